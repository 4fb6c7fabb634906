#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "limitforge/verify.hpp"

using namespace limitforge;

namespace {

std::vector<RecurrenceSpec> catalog_specs() {
  return {
      FirstOrderInverse{FunctionExpr::parse("t"), std::nullopt, 1.0},
      FirstOrderInverse{FunctionExpr::parse("t^0.5"), std::nullopt, 1.0},
      FirstOrderInverse{FunctionExpr::parse("exp(t)"), std::nullopt, 1.0},
      FirstOrderInverse{FunctionExpr::parse("3*t^2"), FunctionExpr::parse("t^-1"), 1.0},
      FirstOrderInverse{FunctionExpr::parse("t"), FunctionExpr::parse("t"), 1.0},
      CumulativeSecondOrder{1.0},
      TauberianGenerator{1, 2},
      TauberianGenerator{2, 3},
      Coupled{1.0, 1.0},
      QuadraticMap{0.5},
      DrivenSqrt{Driver::Constant, 1.0},
      DrivenSqrt{Driver::SineSquared, 1.0},
  };
}

// Inverts the second-term comparison: x with (1 - n x)/law(n) = 1.
double second_term_value(double n) { return (1.0 - std::log(n) / n) / n; }

}  // namespace

TEST_CASE("trend rule") {
  CHECK(classify_trend({0.3, 0.2, 0.1}, 0.15) == Trend::Converging);
  CHECK(classify_trend({0.1, 0.1, 0.1}, 0.15) == Trend::Converging);
  CHECK(classify_trend({0.3, 0.2, 0.1}, 0.05) == Trend::Stalled);
  CHECK(classify_trend({0.1, 0.2, 0.3}, 0.05) == Trend::Diverging);
  CHECK(classify_trend({0.1, 0.2, 0.1}, 0.15) == Trend::Stalled);
  CHECK(classify_trend({9.0, 0.3, 0.2, 0.1}, 0.15) == Trend::Converging);
  CHECK(classify_trend({0.1, 0.1, NAN}, 1.0) == Trend::Diverging);
  CHECK_THROWS_AS(classify_trend({0.1, 0.1}, 1.0), std::invalid_argument);
}

TEST_CASE("rate fit picks the better model") {
  std::vector<std::int64_t> n{10, 100, 1000, 10000, 100000};
  std::vector<double> power, logarithmic;
  for (auto k : n) {
    power.push_back(3.0 * std::pow(static_cast<double>(k), -0.5));
    logarithmic.push_back(2.0 / std::log(static_cast<double>(k)));
  }
  auto p = fit_rate(n, power);
  REQUIRE(p);
  CHECK(p->model == RateModel::Power);
  CHECK(p->theta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p->points == 5);
  auto l = fit_rate(n, logarithmic);
  REQUIRE(l);
  CHECK(l->model == RateModel::Logarithmic);
  CHECK(l->theta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(fit_rate({10, 100}, {0.0, 0.0}));
}

TEST_CASE("every catalog law is a fixed point of the comparison") {
  const auto checkpoints = CheckpointSchedule::standard().points(1000000);
  for (const auto& spec : catalog_specs()) {
    CAPTURE(describe(spec));
    for (const auto& target : catalog(spec)) {
      CAPTURE(target.law.description);
      std::vector<double> values;
      for (auto n : checkpoints) {
        const double dn = static_cast<double>(n);
        values.push_back(target.law.is_second_term() ? second_term_value(dn) : target.law(dn));
      }
      const auto r = ratio_report(checkpoints, values, target.law, 1e-12);
      CHECK(r.trend == Trend::Converging);
      CHECK(r.errors.back() == 0.0);
      if (!target.law.is_second_term()) CHECK(r.final_ratio == 1.0);
      for (std::size_t i = 3; i < r.errors.size(); ++i) CHECK(r.errors[i] == 0.0);
    }
  }
  const auto numeric = GrowthLaw::numeric(FunctionExpr::parse("t + 0.5*sin(t)"), std::nullopt);
  std::vector<double> values;
  for (auto n : checkpoints) values.push_back(numeric(static_cast<double>(n)));
  const auto r = ratio_report(checkpoints, values, numeric, 1e-12);
  CHECK(r.trend == Trend::Converging);
  CHECK(r.final_ratio == 1.0);
}

TEST_CASE("scaling law and values by a power of two leaves ratios unchanged") {
  const auto traj = iterate(FirstOrderInverse{FunctionExpr::parse("t"), std::nullopt, 1.0}, 100000);
  const auto base = ratio_report(traj, GrowthLaw::closed(std::sqrt(2.0), 0.5, 0.0), 1e-3);
  for (double s : {0.25, 2.0, 1024.0}) {
    std::vector<double> scaled;
    for (double v : traj.values) scaled.push_back(s * v);
    const auto r =
        ratio_report(traj.checkpoints, scaled, GrowthLaw::closed(s * std::sqrt(2.0), 0.5, 0.0), 1e-3);
    REQUIRE(r.ratios.size() == base.ratios.size());
    for (std::size_t i = 0; i < r.ratios.size(); ++i) {
      CHECK(std::memcmp(&r.ratios[i], &base.ratios[i], sizeof(double)) == 0);
    }
    CHECK(r.trend == base.trend);
  }
}

TEST_CASE("flagship report") {
  const auto traj = iterate(FirstOrderInverse{FunctionExpr::parse("t"), std::nullopt, 1.0}, 1000000);
  const auto r = ratio_report(traj, catalog(traj.spec)[0].law, 1e-5);
  CHECK(r.passed());
  CHECK(r.errors.back() <= 1e-5);
  REQUIRE(r.fitted_rate);
  CHECK(r.fitted_rate->model == RateModel::Power);
  CHECK_THROWS_AS(ratio_report(traj, catalog(traj.spec)[0].law, 1e-5, Stream::Aux),
                  std::invalid_argument);
}

TEST_CASE("audits pass on clean trajectories") {
  const RecurrenceSpec specs[] = {
      FirstOrderInverse{FunctionExpr::parse("t"), std::nullopt, 1.0},
      FirstOrderInverse{FunctionExpr::parse("t^2"), std::nullopt, 1.0},
      CumulativeSecondOrder{1.0},
      TauberianGenerator{1, 2},
      Coupled{1.0, 2.0},
      QuadraticMap{0.5},
      DrivenSqrt{Driver::Constant, 1.0},
      DrivenSqrt{Driver::SineSquared, 1.0},
  };
  for (const auto& spec : specs) {
    CAPTURE(describe(spec));
    CHECK(inequality_audit(iterate(spec, 100000)).passed());
  }
  CHECK_THROWS_AS(inequality_audit(iterate(FirstOrderInverse{FunctionExpr::parse("t"),
                                                             FunctionExpr::parse("t"), 1.0},
                                           10)),
                  std::invalid_argument);
}

TEST_CASE("audits catch perturbed trajectories") {
  auto broken = [](RecurrenceSpec spec, auto&& perturb) {
    auto t = iterate(spec, 10000);
    perturb(t);
    return inequality_audit(t).passed();
  };
  const double n = 10000.0;
  CHECK_FALSE(broken(FirstOrderInverse{FunctionExpr::parse("t"), std::nullopt, 1.0},
                     [&](Trajectory& t) { t.values.back() = 0.999 * std::sqrt(2.0 * n); }));
  CHECK_FALSE(broken(FirstOrderInverse{FunctionExpr::parse("t"), std::nullopt, 1.0},
                     [&](Trajectory& t) { t.values.back() = 1.001 * std::sqrt(2.0 * n); }));
  CHECK_FALSE(broken(FirstOrderInverse{FunctionExpr::parse("t^2"), std::nullopt, 1.0},
                     [&](Trajectory& t) { t.values.back() *= 0.99; }));
  CHECK_FALSE(broken(CumulativeSecondOrder{1.0},
                     [&](Trajectory& t) { t.values.back() = n - 1.0; }));
  CHECK_FALSE(broken(TauberianGenerator{1, 2},
                     [&](Trajectory& t) { t.aux.back() *= 1.0 + 1e-9; }));
  CHECK_FALSE(broken(Coupled{1.0, 1.0}, [&](Trajectory& t) { t.values.back() *= 0.5; }));
  CHECK_FALSE(broken(QuadraticMap{0.5}, [&](Trajectory& t) { t.values.back() = 1.0 / n; }));
  CHECK_FALSE(broken(DrivenSqrt{Driver::Constant, 1.0},
                     [&](Trajectory& t) { t.values.back() *= 0.9; }));
}

TEST_CASE("classifier on a synthetic finite stream") {
  Trajectory t;
  t.spec = Coupled{2.0, 1.0};
  t.checkpoints = {1, 10, 100, 1000, 10000, 100000};
  for (auto n : t.checkpoints) {
    t.values.push_back(2.0);
    t.secondary.push_back(static_cast<double>(n) / 4.0);
  }
  const auto c = classify_limits(t);
  CHECK(c.a.verdict == LimitVerdict::ApparentlyFinite);
  CHECK(*c.a.limit == 2.0);
  CHECK(*c.a.companion_ratio == 1.0);
  CHECK(c.b.verdict == LimitVerdict::Diverging);
  CHECK_FALSE(c.contradiction);

  for (auto& v : t.secondary) v = 3.0;
  CHECK(classify_limits(t).contradiction);
}

TEST_CASE("classifier finds a C/n tail") {
  Trajectory t;
  t.spec = Coupled{};
  t.checkpoints = {1, 10, 100, 1000, 10000};
  for (auto n : t.checkpoints) {
    t.values.push_back(5.0 - 2.0 / static_cast<double>(n));
    t.secondary.push_back(static_cast<double>(n));
  }
  const auto c = classify_limits(t);
  REQUIRE(c.a.limit);
  CHECK(*c.a.limit == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(c.a.rule.find("C/n") != std::string::npos);
  CHECK_THROWS_AS(classify_limits(iterate(QuadraticMap{}, 1000)), std::invalid_argument);
}

TEST_CASE("abelian averages") {
  CHECK(abelian_average({1.0, 2.0, 3.0}) == std::vector<double>{1.0, 1.5, 2.0});
  std::vector<double> x;
  for (int k = 1; k <= 100000; ++k) x.push_back(1.0 + 1.0 / k);
  CHECK(abelian_average(x).back() == doctest::Approx(1.0).epsilon(2e-4));
  CHECK_THROWS_AS(abelian_average({}), std::invalid_argument);
}
