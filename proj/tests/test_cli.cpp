#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "limitforge/cli.hpp"

using namespace limitforge;
using namespace limitforge::cli;

namespace {

const char* kTwo = R"(# two experiments
[flag]
family = first_order_inverse
f = t
a1 = 1
n_max = 1e4
tolerance = 1e-2

; a sum
[alt]
task = sum_alternating
f = 1/t
n_max = 1000
expected = 0.6931471805599453
tolerance = 1e-3
)";

const char* kTwoShuffled = R"([alt]
tolerance = 1e-3
f = 1/t
task = sum_alternating
expected = 0.6931471805599453
n_max = 1000

[flag]
tolerance = 1e-2
n_max = 1e4
a1 = 1
f = t
family = first_order_inverse
)";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse a config") {
  const auto c = parse_config(kTwo);
  REQUIRE(c.experiments.size() == 2);
  const auto& flag = c.experiments[0];
  CHECK(flag.name == "flag");
  CHECK(flag.task == TaskKind::Recurrence);
  CHECK(flag.n_max == 10000);
  CHECK(flag.tolerance == 1e-2);
  REQUIRE(flag.spec);
  CHECK(std::holds_alternative<FirstOrderInverse>(*flag.spec));
  CHECK(flag.law.kind == LawSelector::Kind::Catalog);
  CHECK(c.experiments[1].task == TaskKind::SumAlternating);
  CHECK(*c.experiments[1].expected == 0.6931471805599453);
}

TEST_CASE("config keys") {
  const auto c = parse_config(R"([c]
family = coupled
a1 = 1
b1 = 2
n_max = 1000
target = [a, b]
schedule = 10, 100
law = closed(1.5, 0.5)
output = json
)");
  const auto& e = c.experiments[0];
  CHECK(e.targets == std::vector<Stream>{Stream::Primary, Stream::Secondary});
  CHECK(e.schedule.points(e.n_max) == std::vector<std::int64_t>{1, 10, 100, 1000});
  CHECK(e.law.kind == LawSelector::Kind::Closed);
  CHECK(e.law.closed.c == 1.5);
  CHECK(e.law.closed.e == 0.5);
  CHECK(e.format == OutputFormat::Json);
}

TEST_CASE("config errors name the experiment") {
  auto message = [](const char* text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("[x]\nfamily = coupled\n").find("'x'") != std::string::npos);
  CHECK(message("[x]\nfamily = coupled\nn_max = 10\ncolour = red\n").find("colour") !=
        std::string::npos);
  CHECK_FALSE(message("[x]\nfamily = coupled\nn_max = 10\n[x]\nfamily = coupled\nn_max = 10\n").empty());
  CHECK_FALSE(message("[x]\nfamily = coupled\nfamily = coupled\nn_max = 10\n").empty());
  CHECK_FALSE(message("family = coupled\n").empty());
  CHECK_FALSE(message("[x]\nfamily = first_order_inverse\nf = t^(0.5\nn_max = 10\n").empty());
  CHECK(message("[x]\nfamily = coupled\nn_max = 10\nschedule = 20\n").find("exceeds") !=
        std::string::npos);
  CHECK_FALSE(message("[x]\nfamily = quadratic_map\nx1 = 2\nn_max = 10\n").empty());
  CHECK_FALSE(message("[x]\nfamily = coupled\nn_max = 10\nlaw = wild\n").empty());
}

TEST_CASE("parse_count") {
  CHECK(parse_count("1e7") == 10000000);
  CHECK(parse_count(" 250 ") == 250);
  CHECK_THROWS_AS(parse_count("0"), ConfigError);
  CHECK_THROWS_AS(parse_count("1.5"), ConfigError);
  CHECK_THROWS_AS(parse_count("ten"), ConfigError);
}

TEST_CASE("digest ignores ordering but not content") {
  const auto a = config_digest(parse_config(kTwo));
  CHECK(a.size() == 64);
  CHECK(a == config_digest(parse_config(kTwoShuffled)));
  auto c = parse_config(kTwo);
  apply_overrides(c, Overrides{1e-1, std::nullopt, std::nullopt, std::nullopt});
  CHECK(config_digest(c) != a);
}

TEST_CASE("overrides") {
  auto c = parse_config("[x]\nfamily = coupled\nn_max = 1000\nschedule = 10, 500\n");
  apply_overrides(c, Overrides{std::nullopt, 100, std::nullopt, OutputFormat::Json});
  const auto& e = c.experiments[0];
  CHECK(e.n_max == 100);
  CHECK(e.schedule.points(100) == std::vector<std::int64_t>{1, 10, 100});
  CHECK(e.format == OutputFormat::Json);
  apply_overrides(c, Overrides{std::nullopt, std::nullopt, CheckpointSchedule::decades(),
                               std::nullopt});
  CHECK(c.experiments[0].schedule.kind() == CheckpointSchedule::Kind::Decades);
}

TEST_CASE("experiments run and reports are deterministic") {
  const auto c = parse_config(kTwo);
  const auto r1 = run_experiment(c.experiments[0]);
  const auto r2 = run_experiment(c.experiments[0]);
  CHECK(r1.status == Status::Pass);
  CHECK(csv_table(r1) == csv_table(r2));
  CHECK(json_report(r1) == json_report(r2));
  CHECK(csv_table(r1).rfind("n,value,prediction,ratio,abs_ratio_err\n", 0) == 0);

  const auto s = run_experiment(c.experiments[1]);
  CHECK(s.status == Status::Pass);
  REQUIRE(s.series);

  auto strict = c.experiments[0];
  strict.tolerance = 1e-12;
  CHECK(run_experiment(strict).status == Status::Fail);
}

TEST_CASE("run_config writes outputs and a manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "limitforge_cli_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ostringstream log;
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.jobs = 2;
  CHECK(run_config(parse_config(kTwo), opts, log) == 0);
  CHECK(std::filesystem::exists(dir / "flag.csv"));
  CHECK(std::filesystem::exists(dir / "alt.csv"));
  const auto manifest = read_file(dir / "manifest.json");
  CHECK(manifest.find(config_digest(parse_config(kTwo))) != std::string::npos);
  CHECK(manifest.find("\"pass\": 2") != std::string::npos);
  const auto first = read_file(dir / "flag.csv");
  CHECK(run_config(parse_config(kTwo), opts, log) == 0);
  CHECK(read_file(dir / "flag.csv") == first);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    CHECK(entry.path().string().find(".tmp") == std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
