#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace citerank {

using JournalId = std::string;
using NodeIndex = std::uint32_t;

struct Journal {
  JournalId id;
  std::string title;
  /// Items published in the two years preceding the citation year.
  std::uint64_t article_count = 0;
  std::set<std::string> categories;

  friend bool operator==(const Journal&, const Journal&) = default;
};

/// One aggregated citation count from `citing` to `cited`.
struct Citation {
  JournalId citing;
  JournalId cited;
  std::uint64_t count = 0;

  friend bool operator==(const Citation&, const Citation&) = default;
};

enum class SelfCitationPolicy { Include, Exclude };

/// Reads `id,title,articles,categories`. Categories are '|'-separated.
std::vector<Journal> parse_journals(std::istream& in);

/// Reads `citing,cited,count`; repeated pairs are summed. Output is sorted by
/// (citing, cited).
std::vector<Citation> parse_edges(std::istream& in);

/// Immutable weighted journal citation graph.
///
/// Journals are indexed 0..N-1 in ascending id order, so every "ascending
/// index" iteration below is also ascending JournalId. Edge weights are
/// positive integer citation counts. Out-edges are stored by citing journal,
/// in-edges by cited journal, both sorted by the opposite endpoint.
class CitationNetwork {
 public:
  int year() const noexcept { return year_; }
  std::size_t size() const noexcept { return journals_.size(); }
  std::size_t edge_count() const noexcept { return out_targets_.size(); }

  std::span<const Journal> journals() const noexcept { return journals_; }
  const Journal& journal(NodeIndex i) const { return journals_.at(i); }
  std::optional<NodeIndex> find(std::string_view id) const;

  std::span<const NodeIndex> out_targets(NodeIndex i) const;
  std::span<const std::uint64_t> out_weights(NodeIndex i) const;
  std::span<const NodeIndex> in_sources(NodeIndex i) const;
  std::span<const std::uint64_t> in_weights(NodeIndex i) const;

  std::uint64_t out_total(NodeIndex i) const noexcept { return out_totals_[i]; }
  std::optional<std::uint64_t> weight(NodeIndex citing, NodeIndex cited) const;

  /// FNV-1a over the canonical dump (year, journals.csv, edges.csv).
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  friend CitationNetwork build_network(std::vector<Journal> journals,
                                       const std::vector<Citation>& edges, int year,
                                       SelfCitationPolicy policy);

 private:
  CitationNetwork() = default;

  int year_ = 0;
  std::vector<Journal> journals_;
  std::vector<std::uint32_t> out_offsets_;
  std::vector<NodeIndex> out_targets_;
  std::vector<std::uint64_t> out_weights_;
  std::vector<std::uint32_t> in_offsets_;
  std::vector<NodeIndex> in_sources_;
  std::vector<std::uint64_t> in_weights_;
  std::vector<std::uint64_t> out_totals_;
  std::uint64_t fingerprint_ = 0;
};

/// Throws NetworkError on an empty journal list, duplicate ids or an edge to an
/// unknown journal. Zero counts are rejected; repeated pairs are summed.
CitationNetwork build_network(std::vector<Journal> journals, const std::vector<Citation>& edges,
                              int year, SelfCitationPolicy policy = SelfCitationPolicy::Include);

/// Journals tagged with any of `codes`, and the edges among them.
CitationNetwork induced_subnetwork(const CitationNetwork& net, const std::set<std::string>& codes);

/// All edges in ascending (citing, cited) order.
std::vector<Citation> citations(const CitationNetwork& net);

// Canonical serialisations; parse_journals/parse_edges read them back.
void dump_journals(const CitationNetwork& net, std::ostream& out);
void dump_edges(const CitationNetwork& net, std::ostream& out);

/// Row-normalised out-edge weights: share(j, i) = W(j, i) / sum_k W(j, k).
struct PropagationWeights {
  std::vector<std::uint32_t> offsets;  // N + 1, aligned with the network's out-edges
  std::vector<NodeIndex> targets;
  std::vector<double> shares;
  std::vector<NodeIndex> dangling;     // journals without out-edges, ascending

  std::span<const NodeIndex> row_targets(NodeIndex j) const;
  std::span<const double> row_shares(NodeIndex j) const;
  std::optional<double> share(NodeIndex citing, NodeIndex cited) const;
};

PropagationWeights propagation_weights(const CitationNetwork& net);

/// The single definition of a propagation share, reused by every consumer so
/// that all routes round identically.
inline double propagation_share(std::uint64_t weight, std::uint64_t out_total) {
  return static_cast<double>(weight) / static_cast<double>(out_total);
}

}  // namespace citerank
