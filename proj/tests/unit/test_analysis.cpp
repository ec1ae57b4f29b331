#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ags/analysis/stats.hpp"
#include "ags/error.hpp"

using namespace ags;
using namespace ags::analysis;

// Reference values below come from scipy.special.betainc / scipy.stats.f.

TEST_CASE("incomplete beta trivial values") {
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) CHECK(incomplete_beta(x, 1, 1) == doctest::Approx(x).epsilon(1e-12));
  CHECK(incomplete_beta(0, 3, 4) == 0);
  CHECK(incomplete_beta(1, 3, 4) == 1);
  CHECK(std::fabs(incomplete_beta(0.5, 2, 2) - 0.5) < 1e-12);
}

TEST_CASE("incomplete beta against reference values") {
  struct Case {
    double x, a, b, expected;
  };
  const Case cases[] = {
      {0.3, 2.5, 4, 0.3521975859067672},   {0.9, 0.5, 0.5, 0.7951672353008665},
      {0.7, 30, 40, 0.9999986807222218},   {0.5, 200, 180, 0.15212954940791276},
      {0.999, 2, 0.7, 0.9865019803073303},
  };
  for (const auto& c : cases) CHECK(std::fabs(incomplete_beta(c.x, c.a, c.b) - c.expected) < 1e-10);
  CHECK(incomplete_beta(0.01, 10, 3) == doctest::Approx(6.480550000000001e-19).epsilon(1e-9));
}

TEST_CASE("F distribution") {
  CHECK(f_cdf(0, 3, 5) == 0);
  for (int d = 1; d <= 10; ++d) CHECK(std::fabs(f_cdf(1, d, d) - 0.5) < 1e-9);
  CHECK(std::fabs(f_cdf(1.5, 1, 4) - 0.7121358652733093) < 1e-10);
  CHECK(std::fabs(f_cdf(3.2, 3, 10) - 0.9291757806840846) < 1e-10);
  CHECK(std::fabs(f_cdf(0.4, 7, 2) - 0.15160334330341937) < 1e-10);
  CHECK(f_sf(12.0, 2, 30) == doctest::Approx(0.00014822191618709914).epsilon(1e-8));
  for (double x : {0.1, 0.9, 2.0, 7.5}) CHECK(std::fabs(f_cdf(x, 4, 9) + f_sf(x, 4, 9) - 1) < 1e-12);

  double prev = 0;
  for (double x = 0; x < 60; x += 0.05) {
    const double c = f_cdf(x, 3, 8);
    REQUIRE(c >= prev - 1e-15);
    REQUIRE(c <= 1);
    prev = c;
  }
  CHECK(f_cdf(1e9, 3, 8) > 1 - 1e-9);
  CHECK(f_cdf(INFINITY, 3, 8) == 1);
}

TEST_CASE("one-way ANOVA") {
  const std::vector<SampleGroup> g{{"A", {1, 2, 3}}, {"B", {2, 3, 4}}};
  const AnovaResult r = anova_oneway(g);
  CHECK(std::fabs(r.f_ratio - 1.5) < 1e-9);
  CHECK(r.df_between == 1);
  CHECK(r.df_within == 4);
  CHECK(std::fabs(r.p_value - 0.2878641347266907) < 1e-3);

  const std::vector<SampleGroup> three{{"x", {3.1, 2.7, 4.4, 3.9}}, {"y", {5.0, 4.2, 6.1}}, {"z", {2.2, 2.9, 3.3, 1.8, 2.5}}};
  const AnovaResult t = anova_oneway(three);
  CHECK(std::fabs(t.f_ratio - 11.151023288637969) < 1e-9);
  CHECK(t.df_between == 2);
  CHECK(t.df_within == 9);
  CHECK(std::fabs(t.p_value - 0.0036644938103837527) < 1e-9);

  const std::vector<SampleGroup> same{{"a", {1, 3}}, {"b", {0, 4}}};
  const AnovaResult s = anova_oneway(same);
  CHECK(s.f_ratio == 0);
  CHECK(s.p_value == 1);
}

TEST_CASE("ANOVA degenerate input") {
  CHECK_THROWS_AS(anova_oneway(std::vector<SampleGroup>{{"a", {1, 2}}}), Error);
  CHECK_THROWS_AS(anova_oneway(std::vector<SampleGroup>{{"a", {1, 2}}, {"b", {3}}}), Error);
  CHECK_THROWS_AS(anova_oneway(std::vector<SampleGroup>{{"a", {1, 1}}, {"b", {3, 3}}}), Error);
  CHECK_THROWS_AS(anova_oneway(std::vector<SampleGroup>{{"a", {0.1, 0.1, 0.1}}, {"b", {0.7, 0.7}}}), Error);
  CHECK_THROWS_AS(anova_oneway(std::vector<SampleGroup>{{"a", {1, NAN}}, {"b", {3, 4}}}), Error);
}

TEST_CASE("property: ANOVA invariances") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SampleGroup> g(2 + rng() % 3);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i].label = std::to_string(i);
      g[i].values.resize(2 + rng() % 6);
      for (double& v : g[i].values) v = static_cast<double>(i) * 0.3 + noise(rng);
    }
    const double f = anova_oneway(g).f_ratio;
    auto shifted = g, scaled = g, permuted = g;
    const double shift = noise(rng) * 50, factor = 0.01 + std::fabs(noise(rng)) * 20;
    for (auto& grp : shifted)
      for (double& v : grp.values) v += shift;
    for (auto& grp : scaled)
      for (double& v : grp.values) v *= factor;
    for (auto& grp : permuted) std::shuffle(grp.values.begin(), grp.values.end(), rng);
    REQUIRE(std::fabs(anova_oneway(shifted).f_ratio - f) <= 1e-9 * std::max(1.0, f));
    REQUIRE(std::fabs(anova_oneway(scaled).f_ratio - f) <= 1e-9 * std::max(1.0, f));
    REQUIRE(std::fabs(anova_oneway(permuted).f_ratio - f) <= 1e-9 * std::max(1.0, f));
  }
}

TEST_CASE("published F ratio consistency") {
  // F = 9.98155 with df (1, 24), e.g. two firms over twelve monthly cycles.
  CHECK(std::fabs(f_sf(9.98155, 1, 24) - 0.004237) < 1e-6);
}

TEST_CASE("overbilling summary") {
  const std::vector<Decimal> pair{Decimal::parse("2.42"), Decimal::parse("1.8")};
  const auto s = summarize_overbilling(pair);
  CHECK(s.mean == Decimal::parse("2.11"));
  CHECK(s.mean.round(2).to_string_fixed(2) == "2.11");
  CHECK(s.count == 2);
  CHECK(s.min == Decimal::parse("1.8"));
  CHECK(s.max == Decimal::parse("2.42"));
  const std::vector<Decimal> one{Decimal::parse("3.3")};
  CHECK(summarize_overbilling(one).mean == Decimal::parse("3.3"));
  const std::vector<Decimal> thirds{Decimal(1), Decimal(1), Decimal(2)};
  CHECK(summarize_overbilling(thirds).mean == Decimal::parse("1.3333"));
  CHECK_THROWS_AS(summarize_overbilling(std::vector<Decimal>{}), Error);
}

TEST_CASE("csv ingestion") {
  std::istringstream in("period,label,value\r\n2023-01,a,1.5\n2023-01,b,2\n\n2023-02,a,-0.5\n");
  const auto rows = read_series_csv(in);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].period == "2023-02");
  CHECK(rows[2].value == Decimal::parse("-0.5"));
  const auto groups = group_by_label(rows);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].label == "a");
  CHECK(groups[0].values == std::vector<double>{1.5, -0.5});

  std::istringstream bad_header("p,l,v\n");
  CHECK_THROWS_AS(read_series_csv(bad_header), Error);
  std::istringstream bad_cols("period,label,value\na,b\n");
  CHECK_THROWS_AS(read_series_csv(bad_cols), Error);
  std::istringstream bad_value("period,label,value\na,b,1e3\n");
  CHECK_THROWS_AS(read_series_csv(bad_value), Error);
}

TEST_CASE("bundled monthly fixture") {
  std::ifstream in(AGS_FIXTURE_DIR "/overbilling_monthly.csv");
  REQUIRE(in);
  const auto rows = read_series_csv(in);
  std::vector<Decimal> values;
  for (const auto& r : rows) values.push_back(r.value);
  const auto s = summarize_overbilling(values);
  CHECK(s.count == 24);
  CHECK(s.mean == Decimal::parse("1.9908"));
  CHECK(s.min == Decimal::parse("1.26"));
  CHECK(s.max == Decimal::parse("2.6"));
  const auto r = anova_oneway(group_by_label(rows));
  CHECK(r.df_between == 1);
  CHECK(r.df_within == 22);
  CHECK(std::fabs(r.f_ratio - 5.445133865825648) < 1e-9);
  CHECK(std::fabs(r.p_value - 0.029162989236595216) < 1e-9);
}
