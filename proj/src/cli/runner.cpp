#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <thread>

#include "limitforge/cli.hpp"

namespace limitforge::cli {

namespace {

std::vector<TargetedLaw> select_laws(const ExperimentConfig& e) {
  const RecurrenceSpec& spec = *e.spec;
  std::vector<TargetedLaw> out;
  switch (e.law.kind) {
    case LawSelector::Kind::None: return out;
    case LawSelector::Kind::SecondTerm: return {{Stream::Primary, GrowthLaw::second_term()}};
    case LawSelector::Kind::Predict: {
      const auto& s = std::get<FirstOrderInverse>(spec);
      return {{Stream::Primary, GrowthLaw::numeric(s.f, s.g)}};
    }
    case LawSelector::Kind::Closed:
      for (Stream t : e.targets) {
        out.push_back({t, GrowthLaw::closed(e.law.closed.c, e.law.closed.e, e.law.closed.l)});
      }
      return out;
    case LawSelector::Kind::Catalog: break;
  }

  std::vector<TargetedLaw> known;
  try {
    known = catalog(spec);
  } catch (const CatalogMiss&) {
    const auto* s = std::get_if<FirstOrderInverse>(&spec);
    if (s == nullptr) throw;
    known = {{Stream::Primary, GrowthLaw::numeric(s->f, s->g)}};
  }
  for (Stream t : e.targets) {
    bool any = false;
    for (const auto& law : known) {
      if (law.stream == t) {
        out.push_back(law);
        any = true;
      }
    }
    if (!any) {
      throw std::invalid_argument(std::string("catalog has no law for the ") + stream_name(t) +
                                  " stream of " + family_name(spec));
    }
  }
  return out;
}

void run_recurrence(const ExperimentConfig& e, ExperimentResult& r) {
  const Trajectory traj = iterate(*e.spec, e.n_max, e.schedule);
  r.terminated_at = traj.terminated_at;
  for (const auto& law : select_laws(e)) {
    r.reports.push_back(ratio_report(traj, law.law, e.tolerance, law.stream));
  }
  if (e.audit) {
    try {
      r.audit = inequality_audit(traj);
    } catch (const std::invalid_argument&) {
      // nothing registered for this spec
    }
  }
  try {
    r.identity = identity_audit(traj);
  } catch (const std::invalid_argument&) {
  }
  if (e.classify) r.classification = classify_limits(traj);

  bool ok = !traj.terminated_at;
  std::string why;
  if (traj.terminated_at) {
    why = "terminated at n = " + std::to_string(*traj.terminated_at) + " (" +
          traj.termination_reason + ")";
  }
  for (const auto& rep : r.reports) {
    if (!rep.passed()) {
      ok = false;
      if (why.empty()) {
        why = std::string(stream_name(rep.stream)) + " vs " + rep.law + ": " + trend_name(rep.trend);
      }
    }
  }
  if (r.audit && !r.audit->passed()) {
    ok = false;
    for (const auto& c : r.audit->checks) {
      if (!c.passed && why.empty()) {
        why = "audit '" + c.name + "' violated at n = " + std::to_string(*c.first_violation);
      }
    }
  }
  if (r.classification && r.classification->contradiction) {
    ok = false;
    if (why.empty()) why = r.classification->note;
  }
  r.status = ok ? Status::Pass : Status::Fail;
  r.message = why;
}

void run_sum(const ExperimentConfig& e, ExperimentResult& r) {
  r.series = sum_alternating(*e.series_f, e.n_max);
  bool ok = r.series->identity_residual <= 1e-10;
  std::string why = ok ? "" : "identity residual above 1e-10";
  if (e.expected && !(std::fabs(r.series->estimated_sum - *e.expected) <= e.tolerance)) {
    ok = false;
    why = "sum differs from expected by more than the tolerance";
  }
  r.status = ok ? Status::Pass : Status::Fail;
  r.message = why;
}

void run_constant(const ExperimentConfig& e, ExperimentResult& r) {
  if (e.constant == "gamma") {
    r.constant = euler_mascheroni(e.n_max);
  } else {
    r.constant = ConstantEstimate{stieltjes(e.alpha, e.n_max), NAN};
  }
  bool ok = true;
  if (e.expected && !(std::fabs(r.constant->value - *e.expected) <= e.tolerance)) ok = false;
  r.status = ok ? Status::Pass : Status::Fail;
  r.message = ok ? "" : "value differs from expected by more than the tolerance";
}

std::string output_path(const std::string& dir, const std::string& stem, const char* ext) {
  return (std::filesystem::path(dir) / (stem + ext)).string();
}

std::vector<std::string> write_outputs(const ExperimentConfig& e, const ExperimentResult& r,
                                       const std::string& dir) {
  std::vector<std::string> written;
  if (e.format == OutputFormat::Json) {
    const auto path = output_path(dir, e.name, ".json");
    write_atomic(path, json_report(r));
    written.push_back(path);
    return written;
  }
  if (r.reports.size() > 1) {
    for (std::size_t i = 0; i < r.reports.size(); ++i) {
      const auto stem = e.name + "." + std::to_string(i) + "-" + stream_name(r.reports[i].stream);
      const auto path = output_path(dir, stem, ".csv");
      write_atomic(path, csv_table(r.reports[i]));
      written.push_back(path);
    }
    return written;
  }
  const auto path = output_path(dir, e.name, ".csv");
  write_atomic(path, csv_table(r));
  written.push_back(path);
  return written;
}

}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Error: return "error";
  }
  return "unknown";
}

std::vector<double> ExperimentResult::final_ratios() const {
  std::vector<double> out;
  for (const auto& rep : reports) out.push_back(rep.final_ratio);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& e) {
  ExperimentResult r;
  r.name = e.name;
  r.expected = e.expected;
  r.n_used = e.n_max;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (e.task) {
      case TaskKind::Recurrence: run_recurrence(e, r); break;
      case TaskKind::SumAlternating: run_sum(e, r); break;
      case TaskKind::Constant: run_constant(e, r); break;
    }
  } catch (const std::exception& ex) {
    r.status = Status::Error;
    r.message = ex.what();
  }
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int run_config(const Config& config, const RunOptions& options, std::ostream& log) {
  std::filesystem::create_directories(options.out_dir);
  const std::size_t count = config.experiments.size();
  std::vector<ExperimentResult> results(count);
  std::vector<std::vector<std::string>> outputs(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      const auto& e = config.experiments[i];
      results[i] = run_experiment(e);
      try {
        outputs[i] = write_outputs(e, results[i], options.out_dir);
      } catch (const std::exception& ex) {
        results[i].status = Status::Error;
        results[i].message = std::string("writing output: ") + ex.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, count));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = 0;
  for (const auto& r : results) {
    log << status_name(r.status) << "  " << r.name;
    const auto ratios = r.final_ratios();
    if (!ratios.empty()) {
      log << "  final ratio";
      for (double v : ratios) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.10g", v);
        log << buf;
      }
    }
    if (!r.message.empty()) log << "  (" << r.message << ")";
    log << "\n";
    if (r.status == Status::Error) code = 2;
    if (r.status == Status::Fail && code == 0) code = 1;
  }

  write_atomic((std::filesystem::path(options.out_dir) / "manifest.json").string(),
               manifest_json(config, options, results, outputs));
  return code;
}

}  // namespace limitforge::cli
