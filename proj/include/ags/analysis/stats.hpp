#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "ags/decimal.hpp"

namespace ags::analysis {

struct SampleGroup {
  std::string label;
  std::vector<double> values;
};

struct AnovaResult {
  double f_ratio = 0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1;
};

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double x, double a, double b);

// CDF of the F(d1, d2) distribution.
double f_cdf(double x, int d1, int d2);
// Upper tail 1 - f_cdf, evaluated directly so small p-values keep precision.
double f_sf(double x, int d1, int d2);

// One-way ANOVA. Throws Error(invalid) for fewer than 2 groups, a group with
// fewer than 2 values, non-finite values, or zero pooled within-group variance.
AnovaResult anova_oneway(std::span<const SampleGroup> groups);

struct OverbillingSummary {
  Decimal mean;  // scale 4, half-even
  std::size_t count = 0;
  Decimal min;
  Decimal max;
};

// Throws Error(invalid) on an empty series.
OverbillingSummary summarize_overbilling(std::span<const Decimal> series);

struct SeriesRow {
  std::string period;
  std::string label;
  Decimal value;
};

// CSV with header "period,label,value"; no quoting. Throws Error(invalid)
// naming the offending line.
std::vector<SeriesRow> read_series_csv(std::istream& in);

// Groups rows by label in order of first appearance.
std::vector<SampleGroup> group_by_label(std::span<const SeriesRow> rows);

double to_double(const Decimal& value);

}  // namespace ags::analysis
