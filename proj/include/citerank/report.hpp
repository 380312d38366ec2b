#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "citerank/analysis.hpp"
#include "citerank/metrics.hpp"
#include "citerank/network.hpp"

namespace citerank {

enum class ScatterLabel { None, Popular, Prestigious, TopY };

std::string_view to_string(ScatterLabel label);
ScatterLabel scatter_label_from_string(std::string_view text);

struct ScatterRow {
  JournalId id;
  double prw = 0.0;  // x
  double impact = 0.0;  // y
  ScatterLabel label = ScatterLabel::None;

  friend bool operator==(const ScatterRow&, const ScatterRow&) = default;
};

/// IF against PR_w for every journal, ready for plotting.
struct ScatterExport {
  std::vector<ScatterRow> rows;
};

/// Labels journals from `report`, then the top `y_top_k` journals by Y-factor
/// that are not already labelled.
ScatterExport export_scatter(const MetricVector& impact, const MetricVector& prestige,
                             const ClassificationReport& report, std::size_t y_top_k);

struct InputDigest {
  std::string path;
  std::string fnv1a64;
};

/// Everything needed to repeat a run.
struct RunManifest {
  std::string command;
  std::string software_version = CITERANK_VERSION;
  std::string timestamp;  // UTC, ISO 8601
  std::vector<InputDigest> inputs;
  int year = 0;
  std::size_t journals = 0;
  std::size_t edges = 0;
  std::uint64_t fingerprint = 0;
  std::vector<std::string> category_filter;
  SelfCitationPolicy self_citations = SelfCitationPolicy::Include;
  PageRankParams pagerank;
  ConvergenceInfo convergence;
  std::optional<ClassifyOptions> percentiles;
  std::vector<JournalId> journals_without_articles;
};

std::string utc_timestamp();
InputDigest digest_file(const std::filesystem::path& path);

// TSV `rank\tid\ttitle\tvalue`; titles come from `net`.
void write_rank_tsv(std::ostream& out, const RankTable& table, const CitationNetwork& net);
RankTable read_rank_tsv(std::istream& in, MetricName metric);

// CSV `id,prw,if,label`.
void write_scatter_csv(std::ostream& out, const ScatterExport& scatter);
ScatterExport read_scatter_csv(std::istream& in);

// CSV `class,rank,id,if,prw,if_delta` behind `#` lines carrying the thresholds
// and regression coefficients.
void write_classification_csv(std::ostream& out, const ClassificationReport& report);
ClassificationReport read_classification_csv(std::istream& in);

std::string manifest_json(const RunManifest& manifest);

/// Writes `contents` to `path` through a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

struct RankTables {
  RankTable impact;
  RankTable prestige;
  RankTable y;
};

/// rank_if.tsv, rank_prw.tsv, rank_y.tsv and manifest.json.
std::vector<std::filesystem::path> write_rank_bundle(const std::filesystem::path& directory,
                                                     const RankTables& tables,
                                                     const CitationNetwork& net,
                                                     const RunManifest& manifest);

/// The rank files plus scatter.csv and classification.csv. Returns the six paths.
std::vector<std::filesystem::path> write_report_bundle(const std::filesystem::path& directory,
                                                       const RankTables& tables,
                                                       const ScatterExport& scatter,
                                                       const ClassificationReport& report,
                                                       const CitationNetwork& net,
                                                       const RunManifest& manifest);

}  // namespace citerank
