#include "ags/analysis/stats.hpp"

#include <cmath>
#include <map>
#include <string>

#include "ags/error.hpp"

namespace ags::analysis {

namespace {

// Continued fraction for I_x(a, b), modified Lentz; converges for x < (a+1)/(a+b+2).
double beta_cf(double x, double a, double b) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1;
  double d = 1 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1) < kEps) break;
  }
  return h;
}

double front(double x, double a, double b) {
  return std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  if (x < (a + 1) / (a + b + 2)) return front(x, a, b) * beta_cf(x, a, b) / a;
  return 1 - front(1 - x, b, a) * beta_cf(1 - x, b, a) / b;
}

double f_cdf(double x, int d1, int d2) {
  if (x <= 0) return 0;
  if (std::isinf(x)) return 1;
  return incomplete_beta(d1 * x / (d1 * x + d2), d1 / 2.0, d2 / 2.0);
}

double f_sf(double x, int d1, int d2) {
  if (x <= 0) return 1;
  if (std::isinf(x)) return 0;
  return incomplete_beta(d2 / (d2 + d1 * x), d2 / 2.0, d1 / 2.0);
}

AnovaResult anova_oneway(std::span<const SampleGroup> groups) {
  if (groups.size() < 2) throw Error(ErrorCode::invalid, "ANOVA needs at least 2 groups");
  std::size_t n = 0;
  double grand_sum = 0;
  for (const auto& g : groups) {
    if (g.values.size() < 2) throw Error(ErrorCode::invalid, "group '" + g.label + "' has fewer than 2 values");
    for (double v : g.values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::invalid, "group '" + g.label + "' has a non-finite value");
      grand_sum += v;
    }
    n += g.values.size();
  }
  const double grand_mean = grand_sum / static_cast<double>(n);
  double ssb = 0, ssw = 0;
  for (const auto& g : groups) {
    double sum = 0;
    for (double v : g.values) sum += v;
    const double mean = sum / static_cast<double>(g.values.size());
    ssb += static_cast<double>(g.values.size()) * (mean - grand_mean) * (mean - grand_mean);
    for (double v : g.values) ssw += (v - mean) * (v - mean);
  }
  // Identical values can leave rounding residue, so zero is judged relative to magnitude.
  double magnitude = 0;
  for (const auto& g : groups)
    for (double v : g.values) magnitude += v * v;
  if (ssw <= magnitude * 1e-24) throw Error(ErrorCode::invalid, "pooled within-group variance is zero");

  AnovaResult r;
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(n - groups.size());
  r.f_ratio = (ssb / r.df_between) / (ssw / r.df_within);
  r.p_value = f_sf(r.f_ratio, r.df_between, r.df_within);
  return r;
}

OverbillingSummary summarize_overbilling(std::span<const Decimal> series) {
  if (series.empty()) throw Error(ErrorCode::invalid, "overbilling series is empty");
  OverbillingSummary s;
  Decimal sum;
  s.min = s.max = series.front();
  for (const Decimal& v : series) {
    sum = sum + v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.count = series.size();
  s.mean = Decimal::divide(sum, Decimal(static_cast<std::int64_t>(series.size())), 4);
  return s;
}

double to_double(const Decimal& value) { return std::stod(value.to_string()); }

std::vector<SeriesRow> read_series_csv(std::istream& in) {
  std::vector<SeriesRow> rows;
  std::string line;
  int lineno = 0;
  auto strip_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };
  if (!std::getline(in, line)) throw Error(ErrorCode::invalid, "CSV is empty");
  ++lineno;
  strip_cr(line);
  if (line != "period,label,value") throw Error(ErrorCode::invalid, "CSV header must be period,label,value");
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw Error(ErrorCode::invalid, "CSV line " + std::to_string(lineno) + ": expected 3 columns");
    SeriesRow row;
    row.period = line.substr(0, c1);
    row.label = line.substr(c1 + 1, c2 - c1 - 1);
    try {
      row.value = Decimal::parse(line.substr(c2 + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::invalid, "CSV line " + std::to_string(lineno) + ": " + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SampleGroup> group_by_label(std::span<const SeriesRow> rows) {
  std::vector<SampleGroup> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    auto [it, inserted] = index.emplace(r.label, groups.size());
    if (inserted) groups.push_back({r.label, {}});
    groups[it->second].values.push_back(to_double(r.value));
  }
  return groups;
}

}  // namespace ags::analysis
