#include "citerank/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "citerank/errors.hpp"
#include "citerank/format.hpp"

namespace citerank {
namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void check_q(double q) {
  if (!(q >= 0.0 && q <= 100.0)) {
    throw std::invalid_argument("percentile must lie in [0, 100], got " + format_double(q));
  }
}

}  // namespace

void require_aligned(const MetricVector& a, const MetricVector& b) {
  if (a.ids != b.ids) {
    throw MismatchError(std::string(to_string(a.name)) + " and " + std::string(to_string(b.name)) +
                        " cover different journals");
  }
}

RankTable rank_by(const MetricVector& metric, std::optional<std::size_t> top_k) {
  std::vector<std::size_t> order(metric.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (metric.values[a] != metric.values[b]) return metric.values[a] > metric.values[b];
    return metric.ids[a] < metric.ids[b];
  });
  const std::size_t count = top_k ? std::min(*top_k, order.size()) : order.size();

  RankTable table;
  table.metric = metric.name;
  table.rows.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    table.rows.push_back({r + 1, metric.ids[order[r]], metric.values[order[r]]});
  }
  return table;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MismatchError("correlation inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw DegenerateStatistics("correlation needs at least 3 journals, got " + std::to_string(n));

  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateStatistics("correlation undefined: a metric is constant over all journals");
  }

  CorrelationResult out;
  out.n = n;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double one_minus_r2 = 1.0 - out.r * out.r;
  if (one_minus_r2 <= 0.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.r * std::sqrt(df / one_minus_r2);
    boost::math::students_t dist(df);
    out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
  }
  return out;
}

CorrelationResult pearson(const MetricVector& x, const MetricVector& y) {
  require_aligned(x, y);
  return pearson(std::span<const double>(x.values), std::span<const double>(y.values));
}

RegressionModel fit_regression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MismatchError("regression inputs differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw DegenerateStatistics("regression needs at least 2 journals, got " + std::to_string(n));

  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    sxy += dx * (y[i] - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DegenerateStatistics("regression undefined: all PR_w values are identical");

  RegressionModel m;
  m.n = n;
  m.slope = sxy / sxx;
  m.intercept = my - m.slope * mx;
  return m;
}

RegressionModel fit_regression(const MetricVector& x, const MetricVector& y) {
  require_aligned(x, y);
  return fit_regression(std::span<const double>(x.values), std::span<const double>(y.values));
}

double percentile_threshold(std::span<const double> values, double q) {
  if (values.empty()) throw DegenerateStatistics("percentile of an empty sample");
  check_q(q);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q / 100.0;
  const double lower = std::floor(h);
  const auto lo = static_cast<std::size_t>(lower);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - lower) * (sorted[lo + 1] - sorted[lo]);
}

ClassificationReport classify_outliers(const MetricVector& impact, const MetricVector& prestige,
                                       const ClassifyOptions& options) {
  require_aligned(impact, prestige);
  check_q(options.low_percentile);
  check_q(options.high_percentile);

  ClassificationReport report;
  report.low_percentile = options.low_percentile;
  report.high_percentile = options.high_percentile;
  report.prw_low = percentile_threshold(prestige.values, options.low_percentile);
  report.prw_high = percentile_threshold(prestige.values, options.high_percentile);
  report.model = fit_regression(prestige, impact);

  for (std::size_t i = 0; i < impact.size(); ++i) {
    const double prw = prestige.values[i];
    const double delta = if_delta(report.model, impact.values[i], prw);
    ClassifiedJournal entry{impact.ids[i], impact.values[i], prw, delta};
    if (prw < report.prw_low && delta > 0.0) {
      report.popular.push_back(std::move(entry));
    } else if (prw > report.prw_high && delta < 0.0) {
      report.prestigious.push_back(std::move(entry));
    }
  }

  std::sort(report.popular.begin(), report.popular.end(),
            [](const ClassifiedJournal& a, const ClassifiedJournal& b) {
              if (a.if_delta != b.if_delta) return a.if_delta > b.if_delta;
              return a.id < b.id;
            });
  std::sort(report.prestigious.begin(), report.prestigious.end(),
            [](const ClassifiedJournal& a, const ClassifiedJournal& b) {
              if (a.if_delta != b.if_delta) return a.if_delta < b.if_delta;
              return a.id < b.id;
            });
  if (options.top_k) {
    if (report.popular.size() > *options.top_k) report.popular.resize(*options.top_k);
    if (report.prestigious.size() > *options.top_k) report.prestigious.resize(*options.top_k);
  }
  return report;
}

}  // namespace citerank
