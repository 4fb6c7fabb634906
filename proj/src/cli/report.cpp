#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <system_error>
#include <thread>

#include "json.hpp"
#include "limitforge/cli.hpp"
#include "limitforge/kernels.hpp"

namespace limitforge::cli {

using nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kHeader = "n,value,prediction,ratio,abs_ratio_err\n";

std::string row(std::int64_t n, double value, double prediction, double ratio) {
  return std::to_string(n) + "," + num(value) + "," + num(prediction) + "," + num(ratio) + "," +
         num(std::fabs(ratio - 1.0)) + "\n";
}

ordered_json to_json(const ConvergenceReport& r) {
  ordered_json j;
  j["law"] = r.law;
  j["stream"] = stream_name(r.stream);
  j["checkpoints"] = r.checkpoints;
  j["values"] = r.values;
  j["predictions"] = r.predictions;
  j["ratios"] = r.ratios;
  j["errors"] = r.errors;
  j["final_ratio"] = r.final_ratio;
  j["trend"] = trend_name(r.trend);
  if (r.fitted_rate) {
    j["fitted_rate"] = {{"theta", r.fitted_rate->theta},
                        {"model", rate_model_name(r.fitted_rate->model)},
                        {"rss", r.fitted_rate->rss},
                        {"points", r.fitted_rate->points}};
  } else {
    j["fitted_rate"] = nullptr;
  }
  j["tolerance_used"] = r.tolerance_used;
  return j;
}

ordered_json to_json(const AuditReport& a) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : a.checks) {
    ordered_json cj{{"name", c.name},
                    {"passed", c.passed},
                    {"checked", c.checked},
                    {"min_slack", c.min_slack}};
    cj["first_violation"] = c.first_violation ? ordered_json(*c.first_violation) : nullptr;
    checks.push_back(cj);
  }
  return {{"family", a.family}, {"passed", a.passed()}, {"checks", checks}};
}

ordered_json to_json(const SequenceClassification& s) {
  ordered_json j{{"verdict", limit_verdict_name(s.verdict)},
                 {"rule", s.rule},
                 {"normalized", s.normalized}};
  j["limit"] = s.limit ? ordered_json(*s.limit) : nullptr;
  j["companion_ratio"] = s.companion_ratio ? ordered_json(*s.companion_ratio) : nullptr;
  j["tail_ratio"] = s.tail_ratio ? ordered_json(*s.tail_ratio) : nullptr;
  return j;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string csv_table(const ConvergenceReport& r) {
  std::string out = kHeader;
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    out += row(r.checkpoints[i], r.values[i], r.predictions[i], r.ratios[i]);
  }
  return out;
}

std::string csv_table(const ExperimentResult& r) {
  if (!r.reports.empty()) return csv_table(r.reports.front());
  std::string out = kHeader;
  const double expected = r.expected.value_or(NAN);
  if (r.series) out += row(r.n_used, r.series->estimated_sum, expected, r.series->estimated_sum / expected);
  if (r.constant) out += row(r.n_used, r.constant->value, expected, r.constant->value / expected);
  return out;
}

std::string json_report(const ExperimentResult& r) {
  ordered_json j;
  j["name"] = r.name;
  j["status"] = status_name(r.status);
  j["message"] = r.message;
  ordered_json reports = ordered_json::array();
  for (const auto& rep : r.reports) reports.push_back(to_json(rep));
  j["reports"] = reports;
  if (r.audit) j["audit"] = to_json(*r.audit);
  if (r.identity) {
    j["identity_audit"] = {{"max_relative_discrepancy", r.identity->max_relative_discrepancy},
                           {"worst_checkpoint", r.identity->worst_checkpoint},
                           {"pairs_checked", r.identity->pairs_checked}};
  }
  if (r.classification) {
    j["classification"] = {{"a", to_json(r.classification->a)},
                           {"b", to_json(r.classification->b)},
                           {"contradiction", r.classification->contradiction},
                           {"note", r.classification->note}};
  }
  if (r.series) {
    const auto& s = *r.series;
    j["series"] = {{"estimated_sum", s.estimated_sum},
                   {"L_estimate", s.L_estimate},
                   {"L_alternate", s.L_alternate},
                   {"bridge_integral", s.bridge_integral},
                   {"n_used", s.n_used},
                   {"error_estimate", s.error_estimate},
                   {"identity_residual", s.identity_residual},
                   {"direct_partial_sum", s.direct_partial_sum}};
  }
  if (r.constant) {
    j["constant"] = {{"value", r.constant->value}};
    j["constant"]["error_bound"] =
        std::isnan(r.constant->error_bound) ? ordered_json(nullptr) : ordered_json(r.constant->error_bound);
  }
  j["expected"] = r.expected ? ordered_json(*r.expected) : nullptr;
  if (r.terminated_at) j["terminated_at"] = *r.terminated_at;
  return j.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("rename to " + path + " failed: " + ec.message());
  }
}

std::string manifest_json(const Config& config, const RunOptions& options,
                          const std::vector<ExperimentResult>& results,
                          const std::vector<std::vector<std::string>>& outputs) {
  ordered_json j;
  j["tool"] = "limitforge";
  j["version"] = tool_version;
  j["config_digest"] = config_digest(config);
  j["config_path"] = options.config_path;
  j["generated_at"] = utc_now();
  j["isa"] = kernels::isa_name(kernels::selected_isa());
  j["jobs"] = options.jobs;
  ordered_json experiments = ordered_json::array();
  int pass = 0, fail = 0, error = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    ordered_json e{{"name", r.name}, {"status", status_name(r.status)}, {"message", r.message}};
    e["final_ratios"] = r.final_ratios();
    if (r.series) e["estimated_sum"] = r.series->estimated_sum;
    if (r.constant) e["value"] = r.constant->value;
    e["wall_seconds"] = r.wall_seconds;
    e["outputs"] = outputs[i];
    experiments.push_back(e);
    (r.status == Status::Pass ? pass : r.status == Status::Fail ? fail : error)++;
  }
  j["experiments"] = experiments;
  j["summary"] = {{"pass", pass}, {"fail", fail}, {"error", error}};
  return j.dump(2) + "\n";
}

}  // namespace limitforge::cli
