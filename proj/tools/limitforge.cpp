#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "limitforge/cli.hpp"
#include "limitforge/kernels.hpp"

using namespace limitforge;

namespace {

struct Globals {
  std::optional<double> tolerance;
  std::string n_max;
  std::string schedule;
  std::string format;
  std::string out_dir;
  bool seedless = false;
  unsigned jobs = 1;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

cli::Overrides overrides_from(const Globals& g) {
  cli::Overrides o;
  o.tolerance = g.tolerance;
  if (!g.n_max.empty()) o.n_max = cli::parse_count(g.n_max);
  if (!g.schedule.empty()) o.schedule = CheckpointSchedule::parse(g.schedule);
  if (!g.format.empty()) {
    o.format = g.format == "json" ? cli::OutputFormat::Json : cli::OutputFormat::Csv;
  }
  return o;
}

void print_pairs(const std::vector<std::pair<std::string, double>>& rows, bool json) {
  if (json) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : rows) j[k] = v;
    std::cout << j.dump(2) << "\n";
    return;
  }
  for (const auto& [k, v] : rows) std::printf("%-18s %s\n", k.c_str(), num(v).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"limitforge: iterate recurrences and check their growth laws"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--tolerance", g.tolerance, "Override every experiment's tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--n-max", g.n_max, "Override n_max (accepts 1e5)");
  app.add_option("--schedule", g.schedule, "standard | decades | every | n1,n2,...");
  app.add_option("--format", g.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_flag("--seedless", g.seedless, "No randomness is used anywhere; accepted for scripts")
      ->disable_flag_override();
  app.add_option("--jobs", g.jobs, "Experiments run concurrently")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run every experiment of a config file");
  std::string config_path;
  run->add_option("config", config_path, "Config file")->required();

  auto* sum = app.add_subcommand("sum", "Alternating sum of f(k) via L + integral_1^2 f");
  std::string sum_expr, sum_n = "1000000";
  sum->add_option("expression", sum_expr, "f(t)")->required();
  sum->add_option("--n", sum_n, "Terms used: A_2n and B_n");

  auto* constants = app.add_subcommand("constants", "Euler-Mascheroni or Stieltjes constants");
  std::string which, const_n = "100000000";
  int alpha = 0;
  constants->add_option("which", which, "gamma | stieltjes")
      ->required()
      ->check(CLI::IsMember({"gamma", "stieltjes"}));
  constants->add_option("alpha", alpha, "Stieltjes index")->check(CLI::NonNegativeNumber);
  constants->add_option("--n", const_n, "Number of terms");

  auto* iterate_cmd = app.add_subcommand("iterate", "Dump a trajectory as CSV");
  std::string family, f_text, g_text, driver = "constant";
  double a1 = 1.0, b1 = 1.0, x1 = 0.5;
  int p = 1, q = 2;
  iterate_cmd->add_option("family", family)
      ->required()
      ->check(CLI::IsMember({"first_order_inverse", "cumulative_second_order", "tauberian",
                             "coupled", "quadratic_map", "driven_sqrt"}));
  iterate_cmd->add_option("--f", f_text);
  iterate_cmd->add_option("--g", g_text);
  iterate_cmd->add_option("--a1", a1);
  iterate_cmd->add_option("--b1", b1);
  iterate_cmd->add_option("--x1", x1);
  iterate_cmd->add_option("--p", p);
  iterate_cmd->add_option("--q", q);
  iterate_cmd->add_option("--driver", driver)->check(CLI::IsMember({"constant", "sin2"}));

  auto* predict_cmd = app.add_subcommand("predict", "Evaluate F^-1(G(n))");
  std::string pf, pg, pn;
  predict_cmd->add_option("--f", pf)->required();
  predict_cmd->add_option("--g", pg);
  predict_cmd->add_option("--n", pn)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const bool json = g.format == "json";
  try {
    if (*run) {
      cli::Config config = cli::load_config(config_path);
      cli::apply_overrides(config, overrides_from(g));
      cli::RunOptions options;
      options.out_dir = g.out_dir.empty() ? "." : g.out_dir;
      options.jobs = g.jobs;
      options.config_path = config_path;
      return cli::run_config(config, options, std::cout);
    }
    if (*sum) {
      const auto r = sum_alternating(FunctionExpr::parse(sum_expr), cli::parse_count(sum_n));
      print_pairs({{"sum", r.estimated_sum},
                   {"L", r.L_estimate},
                   {"L_alternate", r.L_alternate},
                   {"bridge_integral", r.bridge_integral},
                   {"identity_residual", r.identity_residual},
                   {"error_estimate", r.error_estimate},
                   {"n", static_cast<double>(r.n_used)}},
                  json);
      return 0;
    }
    if (*constants) {
      const auto n = cli::parse_count(const_n);
      if (which == "gamma") {
        const auto c = euler_mascheroni(n);
        print_pairs({{"gamma", c.value}, {"error_bound", c.error_bound}}, json);
      } else {
        print_pairs({{"stieltjes_" + std::to_string(alpha), stieltjes(alpha, n)}}, json);
      }
      return 0;
    }
    if (*iterate_cmd) {
      RecurrenceSpec spec;
      if (family == "first_order_inverse") {
        if (f_text.empty()) throw std::invalid_argument("first_order_inverse needs --f");
        FirstOrderInverse s{FunctionExpr::parse(f_text), std::nullopt, a1};
        if (!g_text.empty()) s.g = FunctionExpr::parse(g_text);
        spec = s;
      } else if (family == "cumulative_second_order") {
        spec = CumulativeSecondOrder{a1};
      } else if (family == "tauberian") {
        spec = TauberianGenerator{p, q};
      } else if (family == "coupled") {
        spec = Coupled{a1, b1};
      } else if (family == "quadratic_map") {
        spec = QuadraticMap{x1};
      } else {
        spec = DrivenSqrt{driver == "sin2" ? Driver::SineSquared : Driver::Constant, a1};
      }
      const auto n_max = g.n_max.empty() ? 1000 : cli::parse_count(g.n_max);
      const auto schedule =
          g.schedule.empty() ? CheckpointSchedule::standard() : CheckpointSchedule::parse(g.schedule);
      const Trajectory t = iterate(spec, n_max, schedule);
      std::cout << "n,value";
      if (t.has_secondary()) std::cout << ",secondary";
      if (t.has_aux()) std::cout << ",aux";
      std::cout << "\n";
      for (std::size_t i = 0; i < t.size(); ++i) {
        std::cout << t.checkpoints[i] << "," << num(t.values[i]);
        if (t.has_secondary()) std::cout << "," << num(t.secondary[i]);
        if (t.has_aux()) std::cout << "," << num(t.aux[i]);
        std::cout << "\n";
      }
      if (t.terminated_at) {
        std::cerr << "terminated at n = " << *t.terminated_at << " (" << t.termination_reason
                  << ")\n";
      }
      return 0;
    }
    if (*predict_cmd) {
      std::optional<FunctionExpr> gexpr;
      if (!pg.empty()) gexpr = FunctionExpr::parse(pg);
      const double n = std::stod(pn);
      const auto pr = predict(FunctionExpr::parse(pf), gexpr, n, g.tolerance.value_or(1e-12));
      print_pairs({{"n", n}, {"prediction", pr.value}}, json);
      if (pr.warning) std::cerr << "warning: " << *pr.warning << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
