#include "citerank/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "citerank/analysis.hpp"
#include "citerank/errors.hpp"
#include "citerank/format.hpp"
#include "citerank/metrics.hpp"
#include "citerank/network.hpp"
#include "citerank/report.hpp"

namespace citerank::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NetworkOptions {
  std::string journals;
  std::string edges;
  int year = 0;
  std::string categories;
  bool exclude_self = false;
};

struct RankOptions {
  double lambda = 0.85;
  double tolerance = 1e-9;
  std::size_t max_iterations = 1000;
  std::string dangling = "uniform";
  std::string kernel = "auto";
  bool allow_nonconverged = false;
};

struct Config {
  NetworkOptions network;
  RankOptions rank;
  std::size_t top = 10;
  std::optional<std::size_t> class_top;
  std::size_t label_top_y = 10;
  double low_pct = 40.0;
  double high_pct = 90.0;
  std::string out_dir = "citerank_out";
  bool log_transform = false;
  std::string metric_x;
  std::string metric_y;
  std::optional<std::string> dump_metric;
};

void add_network_options(CLI::App& cmd, NetworkOptions& o, bool required) {
  auto* j = cmd.add_option("--journals", o.journals, "journal metadata CSV (id,title,articles,categories)");
  auto* e = cmd.add_option("--edges", o.edges, "citation CSV (citing,cited,count)");
  if (required) {
    j->required();
    e->required();
  }
  cmd.add_option("--year", o.year, "citation year recorded in the manifest");
  cmd.add_option("--categories", o.categories, "comma-separated category codes to keep");
  cmd.add_flag("--exclude-self-citations", o.exclude_self, "drop citations from a journal to itself");
}

void add_rank_options(CLI::App& cmd, RankOptions& o) {
  cmd.add_option("--lambda", o.lambda, "damping factor in [0, 1)")->capture_default_str();
  cmd.add_option("--tolerance", o.tolerance, "L1 convergence tolerance")->capture_default_str();
  cmd.add_option("--max-iterations", o.max_iterations, "iteration cap")->capture_default_str();
  cmd.add_option("--dangling", o.dangling, "uniform | self-absorption")->capture_default_str();
  cmd.add_option("--kernel", o.kernel, "auto | scalar | avx2 | neon")->capture_default_str();
  cmd.add_flag("--allow-nonconverged", o.allow_nonconverged, "keep results that hit the iteration cap");
}

std::set<std::string> split_codes(const std::string& text) {
  std::set<std::string> codes;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    codes.insert(item.substr(b, e - b + 1));
  }
  return codes;
}

template <typename Parser>
auto parse_file(const std::string& path, Parser&& parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return parse(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

PageRankParams pagerank_params(const RankOptions& o) {
  PageRankParams p;
  p.lambda = o.lambda;
  p.tolerance = o.tolerance;
  p.max_iterations = o.max_iterations;
  const auto dangling = dangling_policy_from_string(o.dangling);
  if (!dangling) throw UsageError("unknown --dangling '" + o.dangling + "'");
  p.dangling = *dangling;
  const auto isa = kernels::isa_from_string(o.kernel);
  if (!isa) throw UsageError("unknown --kernel '" + o.kernel + "'");
  p.kernel = *isa;
  try {
    p.validate();
    kernels::resolve(p.kernel);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

struct Loaded {
  CitationNetwork net;
  std::vector<InputDigest> inputs;
  std::vector<std::string> categories;
};

Loaded load(const NetworkOptions& o) {
  auto journals = parse_file(o.journals, [](std::istream& in) { return parse_journals(in); });
  auto edges = parse_file(o.edges, [](std::istream& in) { return parse_edges(in); });
  const auto policy = o.exclude_self ? SelfCitationPolicy::Exclude : SelfCitationPolicy::Include;
  CitationNetwork net = build_network(std::move(journals), edges, o.year, policy);
  const auto codes = split_codes(o.categories);
  if (!codes.empty()) net = induced_subnetwork(net, codes);
  return {std::move(net), {digest_file(o.journals), digest_file(o.edges)},
          std::vector<std::string>(codes.begin(), codes.end())};
}

std::vector<JournalId> journals_without_articles(const CitationNetwork& net, std::ostream& err) {
  std::vector<JournalId> ids;
  for (const auto& j : net.journals()) {
    if (j.article_count == 0) ids.push_back(j.id);
  }
  if (!ids.empty()) {
    err << "warning: " << ids.size() << " journal(s) have no articles; their IF is 0\n";
  }
  return ids;
}

PageRankResult checked_pagerank(const CitationNetwork& net, const PageRankParams& params,
                                bool allow_nonconverged, std::ostream& err) {
  PageRankResult result = weighted_pagerank(net, params);
  const auto& c = result.convergence;
  if (!c.converged) {
    std::ostringstream msg;
    msg << "PageRank did not converge after " << c.iterations
        << " iterations (residual " << format_double(c.final_residual) << ")";
    if (!allow_nonconverged) throw NotConverged(msg.str());
    err << "warning: " << msg.str() << "\n";
  }
  return result;
}

std::string command_line(const std::vector<std::string>& args) {
  std::string line = "citerank";
  for (const auto& a : args) line += " " + a;
  return line;
}

RunManifest base_manifest(const std::vector<std::string>& args, const Loaded& loaded,
                          const NetworkOptions& o, const PageRankParams& params,
                          const ConvergenceInfo& convergence, std::vector<JournalId> no_articles) {
  RunManifest m;
  m.command = command_line(args);
  m.timestamp = utc_timestamp();
  m.inputs = loaded.inputs;
  m.year = loaded.net.year();
  m.journals = loaded.net.size();
  m.edges = loaded.net.edge_count();
  m.fingerprint = loaded.net.fingerprint();
  m.category_filter = loaded.categories;
  m.self_citations = o.exclude_self ? SelfCitationPolicy::Exclude : SelfCitationPolicy::Include;
  m.pagerank = params;
  m.convergence = convergence;
  m.journals_without_articles = std::move(no_articles);
  return m;
}

RankTables rank_tables(const MetricVector& impact, const MetricVector& prestige) {
  return {rank_by(impact), rank_by(prestige), rank_by(y_factor(impact, prestige))};
}

int cmd_rank(const Config& c, const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  const PageRankParams params = pagerank_params(c.rank);
  const Loaded loaded = load(c.network);
  auto no_articles = journals_without_articles(loaded.net, err);
  const MetricVector impact = impact_factor(loaded.net);
  const PageRankResult prw = checked_pagerank(loaded.net, params, c.rank.allow_nonconverged, err);
  const RankTables tables = rank_tables(impact, prw.scores);

  const RunManifest manifest = base_manifest(args, loaded, c.network, params, prw.convergence,
                                             std::move(no_articles));
  write_rank_bundle(c.out_dir, tables, loaded.net, manifest);

  out << "metric\trank\tid\tvalue\n";
  for (const RankTable* t : {&tables.impact, &tables.prestige, &tables.y}) {
    const std::size_t n = std::min(c.top, t->rows.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = t->rows[i];
      out << to_string(t->metric) << '\t' << r.rank << '\t' << r.id << '\t'
          << format_double(r.value) << '\n';
    }
  }
  return kOk;
}

int cmd_classify(const Config& c, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  if (!(c.low_pct >= 0.0 && c.high_pct <= 100.0 && c.low_pct < c.high_pct)) {
    throw UsageError("--low-pct must be below --high-pct, both within [0, 100]");
  }
  const PageRankParams params = pagerank_params(c.rank);
  const Loaded loaded = load(c.network);
  auto no_articles = journals_without_articles(loaded.net, err);
  const MetricVector impact = impact_factor(loaded.net);
  const PageRankResult prw = checked_pagerank(loaded.net, params, c.rank.allow_nonconverged, err);

  ClassifyOptions options;
  options.low_percentile = c.low_pct;
  options.high_percentile = c.high_pct;
  options.top_k = c.class_top;
  const ClassificationReport report = classify_outliers(impact, prw.scores, options);
  const ScatterExport scatter = export_scatter(impact, prw.scores, report, c.label_top_y);
  const RankTables tables = rank_tables(impact, prw.scores);

  RunManifest manifest = base_manifest(args, loaded, c.network, params, prw.convergence,
                                       std::move(no_articles));
  manifest.percentiles = options;
  write_report_bundle(c.out_dir, tables, scatter, report, loaded.net, manifest);

  out << "class\trank\tid\tif\tprw\tif_delta\n";
  auto rows = [&out](std::string_view cls, const std::vector<ClassifiedJournal>& list) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& e = list[i];
      out << cls << '\t' << (i + 1) << '\t' << e.id << '\t' << format_double(e.if_value) << '\t'
          << format_double(e.prw_value) << '\t' << format_double(e.if_delta) << '\n';
    }
  };
  rows("popular", report.popular);
  rows("prestigious", report.prestigious);
  return kOk;
}

std::pair<std::vector<double>, std::vector<double>> log_pairs(const MetricVector& x,
                                                             const MetricVector& y,
                                                             std::ostream& err) {
  std::pair<std::vector<double>, std::vector<double>> kept;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.values[i] > 0.0 && y.values[i] > 0.0) {
      kept.first.push_back(std::log(x.values[i]));
      kept.second.push_back(std::log(y.values[i]));
    } else {
      ++dropped;
    }
  }
  if (dropped > 0) err << "warning: --log dropped " << dropped << " non-positive pair(s)\n";
  return kept;
}

int cmd_correlate(const Config& c, std::ostream& out, std::ostream& err) {
  MetricVector x, y;
  if (!c.metric_x.empty() || !c.metric_y.empty()) {
    if (c.metric_x.empty() || c.metric_y.empty()) {
      throw UsageError("--metric-x and --metric-y go together");
    }
    x = parse_file(c.metric_x, [](std::istream& in) { return read_metric_csv(in); });
    y = parse_file(c.metric_y, [](std::istream& in) { return read_metric_csv(in); });
    require_aligned(x, y);
  } else {
    if (c.network.journals.empty() || c.network.edges.empty()) {
      throw UsageError("correlate needs --journals and --edges, or --metric-x and --metric-y");
    }
    const PageRankParams params = pagerank_params(c.rank);
    const Loaded loaded = load(c.network);
    journals_without_articles(loaded.net, err);
    x = impact_factor(loaded.net);
    y = checked_pagerank(loaded.net, params, c.rank.allow_nonconverged, err).scores;
  }

  CorrelationResult r;
  if (c.log_transform) {
    const auto [lx, ly] = log_pairs(x, y, err);
    r = pearson(lx, ly);
  } else {
    r = pearson(x, y);
  }
  out << "x\ty\tr\tp_value\tn\n"
      << to_string(x.name) << '\t' << to_string(y.name) << '\t' << format_double(r.r) << '\t'
      << format_double(r.p_value) << '\t' << r.n << '\n';
  return kOk;
}

int cmd_dump(const Config& c, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load(c.network);
  const auto& net = loaded.net;
  if (!c.dump_metric) {
    out << "key\tvalue\n"
        << "year\t" << net.year() << '\n'
        << "journals\t" << net.size() << '\n'
        << "edges\t" << net.edge_count() << '\n'
        << "fingerprint\t" << hex64(net.fingerprint()) << '\n';
    return kOk;
  }
  MetricName name;
  try {
    name = metric_from_string(*c.dump_metric);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (name == MetricName::ImpactFactor) {
    write_metric_csv(out, impact_factor(net));
    return kOk;
  }
  const PageRankParams params = pagerank_params(c.rank);
  if (name == MetricName::PageRank) {
    PageRankResult pr = pagerank_unweighted(net, params);
    if (!pr.convergence.converged && !c.rank.allow_nonconverged) {
      throw NotConverged("PageRank did not converge");
    }
    write_metric_csv(out, pr.scores);
    return kOk;
  }
  const PageRankResult prw = checked_pagerank(net, params, c.rank.allow_nonconverged, err);
  write_metric_csv(out, name == MetricName::YFactor ? y_factor(impact_factor(net), prw.scores)
                                                    : prw.scores);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Journal status metrics over weighted citation networks", "citerank"};
  app.set_version_flag("--version", CITERANK_VERSION);
  app.require_subcommand(1);

  auto* rank = app.add_subcommand("rank", "IF, PR_w and Y rank tables");
  add_network_options(*rank, c.network, true);
  add_rank_options(*rank, c.rank);
  rank->add_option("--top", c.top, "rows per metric echoed to stdout")->capture_default_str();
  rank->add_option("--out", c.out_dir, "output directory")->capture_default_str();

  auto* classify = app.add_subcommand("classify", "popular and prestigious outliers");
  add_network_options(*classify, c.network, true);
  add_rank_options(*classify, c.rank);
  classify->add_option("--low-pct", c.low_pct, "PR_w percentile below which journals may be popular")
      ->capture_default_str();
  classify->add_option("--high-pct", c.high_pct, "PR_w percentile above which journals may be prestigious")
      ->capture_default_str();
  classify->add_option("--top", c.class_top, "keep at most this many journals per class");
  classify->add_option("--label-top-y", c.label_top_y, "label the top Y-factor journals in scatter.csv")
      ->capture_default_str();
  classify->add_option("--out", c.out_dir, "output directory")->capture_default_str();

  auto* correlate = app.add_subcommand("correlate", "Pearson correlation of IF and PR_w");
  add_network_options(*correlate, c.network, false);
  add_rank_options(*correlate, c.rank);
  correlate->add_flag("--log", c.log_transform, "correlate natural logs, skipping non-positive pairs");
  correlate->add_option("--metric-x", c.metric_x, "metric CSV used instead of IF");
  correlate->add_option("--metric-y", c.metric_y, "metric CSV used instead of PR_w");

  auto* dump = app.add_subcommand("dump", "network summary or one metric as CSV");
  add_network_options(*dump, c.network, true);
  add_rank_options(*dump, c.rank);
  dump->add_option("--metric", c.dump_metric, "IF | PR | PRW | Y");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*rank) return cmd_rank(c, args, out, err);
    if (*classify) return cmd_classify(c, args, out, err);
    if (*correlate) return cmd_correlate(c, out, err);
    return cmd_dump(c, out, err);
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const DegenerateStatistics& e) {
    err << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace citerank::cli
