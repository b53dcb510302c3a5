#include "iterfun/report.hpp"

#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <random>

using namespace iterfun;

namespace {

double read_back(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  EXPECT_EQ(ec, std::errc());
  EXPECT_EQ(ptr, s.data() + s.size());
  return v;
}

} // namespace

TEST(CsvNumber, RoundTripsBitExactly) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> e(-300.0, 300.0);
  std::uniform_real_distribution<double> m(-1.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double v = m(rng) * std::pow(10.0, e(rng));
    ASSERT_EQ(read_back(csv_number(v)), v) << csv_number(v);
  }
  for (double v : {0.0, -0.0, 0.1, 1.0 / 3.0, 5e-324, 1.7976931348623157e308}) EXPECT_EQ(read_back(csv_number(v)), v);
}

TEST(CsvNumber, SeventeenSignificantDigits) {
  EXPECT_EQ(csv_number(0.1), "0.10000000000000001");
  EXPECT_EQ(csv_number(1.0), "1");
  EXPECT_EQ(csv_number(0.25), "0.25");
}

TEST(Json, NonFiniteBecomesNull) {
  EXPECT_TRUE(number_or_null(std::nan("")).is_null());
  EXPECT_TRUE(number_or_null(INFINITY).is_null());
  EXPECT_EQ(number_or_null(2.5), 2.5);
}

TEST(Json, ConditionReportFields) {
  ProblemSpec s;
  s.h = parse("2*x");
  s.f = parse("2*x");
  s.g = parse("sin(x)");
  s.beta = 2.0;
  const json j = to_json(estimate_constants(s));
  EXPECT_EQ(j["constants"]["K"]["value"], 2.0);
  EXPECT_EQ(j["constants"]["K"]["source"], "affine");
  EXPECT_EQ(j["constants"]["beta"]["source"], "certified");
  EXPECT_TRUE(j["g_bounded"].get<bool>());
  EXPECT_TRUE(j["regions"]["contraction_gap_bound"].get<bool>());
  EXPECT_FALSE(j["regions"]["quarter_square_bound"].get<bool>());
  EXPECT_TRUE(j["regions"]["bounded_region"].get<bool>());
  EXPECT_FALSE(j["L_window_empty"].get<bool>());
  EXPECT_EQ(j["L_window"][1], 1.0);
  EXPECT_TRUE(j["kappa_star"].is_null());
  EXPECT_FALSE(j["heuristic_constants"].get<bool>());
}

TEST(Json, ChecksAndResidual) {
  std::vector<CheckOutcome> v = {{"lipschitz-slope", false, 0.8, 0.75, 3.0}};
  const json c = to_json(v);
  EXPECT_EQ(c[0]["name"], "lipschitz-slope");
  EXPECT_FALSE(c[0]["passed"].get<bool>());
  EXPECT_EQ(c[0]["witness"], 3.0);
  ResidualReport r;
  r.probe_count = 3;
  r.worst_x = std::nan("");
  const json j = to_json(r);
  EXPECT_EQ(j["probe_count"], 3u);
  EXPECT_TRUE(j["worst_x"].is_null());
  EXPECT_EQ(j["deciles"].size(), r.deciles.size());
}

TEST(Json, KeyOrderIsStable) {
  const json a = to_json(std::vector<CheckOutcome>{{"x", true, 1, 2, std::nullopt}});
  EXPECT_EQ(a.dump(), R"([{"name":"x","passed":true,"value":1.0,"limit":2.0,"witness":null}])");
}
