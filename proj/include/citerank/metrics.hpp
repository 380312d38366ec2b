#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "citerank/kernels.hpp"
#include "citerank/network.hpp"

namespace citerank {

enum class MetricName { ImpactFactor, PageRank, WeightedPageRank, YFactor };

/// "IF", "PR", "PRW", "Y".
std::string_view to_string(MetricName name);
MetricName metric_from_string(std::string_view text);

/// One value per journal of a network, in ascending id order.
struct MetricVector {
  MetricName name = MetricName::ImpactFactor;
  std::vector<JournalId> ids;
  std::vector<double> values;
  std::uint64_t fingerprint = 0;
  std::optional<double> lambda;  // set for PageRank-derived metrics

  std::size_t size() const noexcept { return values.size(); }
  /// Throws std::out_of_range for an unknown id.
  double at(std::string_view id) const;
};

enum class DanglingPolicy {
  /// A journal without out-edges spreads its score evenly over all N journals.
  Uniform,
  /// A journal without out-edges keeps its score; the iterate is renormalised.
  SelfAbsorption,
};

std::string_view to_string(DanglingPolicy policy);
std::optional<DanglingPolicy> dangling_policy_from_string(std::string_view text);

struct PageRankParams {
  double lambda = 0.85;
  double tolerance = 1e-9;  // on the L1 norm of successive iterates
  std::size_t max_iterations = 1000;
  DanglingPolicy dangling = DanglingPolicy::Uniform;
  kernels::Isa kernel = kernels::Isa::Auto;

  /// Throws std::invalid_argument when lambda is outside [0, 1), tolerance is
  /// not positive or max_iterations is zero.
  void validate() const;
};

struct ConvergenceInfo {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  kernels::Isa kernel = kernels::Isa::Scalar;
};

struct PageRankResult {
  MetricVector scores;
  ConvergenceInfo convergence;
};

/// Incoming citations divided by article count; 0 for journals with no articles.
MetricVector impact_factor(const CitationNetwork& net);

/// Classic PageRank: each journal splits its score evenly over the distinct
/// journals it cites, ignoring citation counts.
PageRankResult pagerank_unweighted(const CitationNetwork& net, const PageRankParams& params);

/// PageRank where each journal splits its score in proportion to its citation counts.
PageRankResult weighted_pagerank(const CitationNetwork& net, const PageRankParams& params);

/// Fixed point of weighted_pagerank by dense Gaussian elimination. Reference
/// only: throws std::invalid_argument for networks larger than `max_nodes`.
MetricVector solve_pagerank_exact(const CitationNetwork& net, const PageRankParams& params,
                                  std::size_t max_nodes = 64);

/// Y = IF * PR_w per journal. Both inputs must come from the same network.
MetricVector y_factor(const MetricVector& impact, const MetricVector& prestige);

/// `# metric=<name> lambda=<l> fingerprint=<hex>` then `id,value` rows.
void write_metric_csv(std::ostream& out, const MetricVector& metric);
MetricVector read_metric_csv(std::istream& in);

}  // namespace citerank
