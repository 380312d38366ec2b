#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citerank/metrics.hpp"

namespace citerank {

struct RankRow {
  std::size_t rank = 0;  // 1-based
  JournalId id;
  double value = 0.0;

  friend bool operator==(const RankRow&, const RankRow&) = default;
};

struct RankTable {
  MetricName metric = MetricName::ImpactFactor;
  std::vector<RankRow> rows;
};

/// Sorted by value descending, ties by ascending id.
RankTable rank_by(const MetricVector& metric, std::optional<std::size_t> top_k = std::nullopt);

struct CorrelationResult {
  double r = 0.0;
  double p_value = 1.0;  // two-tailed, Student t with n - 2 degrees of freedom
  std::size_t n = 0;
};

/// Pearson product-moment correlation over paired values.
/// Throws DegenerateStatistics for n < 3 or a constant input.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);
CorrelationResult pearson(const MetricVector& x, const MetricVector& y);

struct RegressionModel {
  double intercept = 0.0;
  double slope = 0.0;
  std::size_t n = 0;

  double predict(double x) const noexcept { return intercept + slope * x; }
};

/// Ordinary least squares of y on x. Throws DegenerateStatistics for n < 2 or constant x.
RegressionModel fit_regression(std::span<const double> x, std::span<const double> y);
RegressionModel fit_regression(const MetricVector& x, const MetricVector& y);

/// Residual of an observed IF from the model's prediction at `prw_value`.
inline double if_delta(const RegressionModel& model, double if_value, double prw_value) {
  return if_value - model.predict(prw_value);
}

/// Linear-interpolation percentile, q in [0, 100].
double percentile_threshold(std::span<const double> values, double q);

struct ClassifiedJournal {
  JournalId id;
  double if_value = 0.0;
  double prw_value = 0.0;
  double if_delta = 0.0;

  friend bool operator==(const ClassifiedJournal&, const ClassifiedJournal&) = default;
};

struct ClassifyOptions {
  double low_percentile = 40.0;
  double high_percentile = 90.0;
  std::optional<std::size_t> top_k;
};

struct ClassificationReport {
  /// PR_w below the low cut and IF above the regression line; largest residual first.
  std::vector<ClassifiedJournal> popular;
  /// PR_w above the high cut and IF below the regression line; most negative first.
  std::vector<ClassifiedJournal> prestigious;
  double prw_low = 0.0;
  double prw_high = 0.0;
  double low_percentile = 40.0;
  double high_percentile = 90.0;
  RegressionModel model;
};

ClassificationReport classify_outliers(const MetricVector& impact, const MetricVector& prestige,
                                       const ClassifyOptions& options = {});

/// Throws MismatchError unless both vectors list the same journals in the same order.
void require_aligned(const MetricVector& a, const MetricVector& b);

}  // namespace citerank
