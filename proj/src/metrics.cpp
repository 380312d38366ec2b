#include "citerank/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "citerank/csv.hpp"
#include "citerank/errors.hpp"
#include "citerank/format.hpp"

namespace citerank {
namespace {

// Share that journal `source` sends along one of its out-edges of weight `weight`.
using ShareFn = std::function<double(NodeIndex source, std::uint64_t weight)>;

struct TransferOperator {
  kernels::PullMatrix matrix;
  std::vector<std::uint32_t> dangling;
};

TransferOperator make_operator(const CitationNetwork& net, DanglingPolicy policy,
                               const ShareFn& share) {
  TransferOperator op;
  const std::size_t n = net.size();
  std::vector<bool> is_dangling(n, false);
  for (NodeIndex j = 0; j < n; ++j) {
    if (net.out_targets(j).empty()) {
      is_dangling[j] = true;
      op.dangling.push_back(j);
    }
  }
  const bool absorb = policy == DanglingPolicy::SelfAbsorption;

  auto& m = op.matrix;
  m.offsets.reserve(n + 1);
  m.offsets.push_back(0);
  m.sources.reserve(net.edge_count() + (absorb ? op.dangling.size() : 0));
  m.shares.reserve(m.sources.capacity());
  for (NodeIndex i = 0; i < n; ++i) {
    auto sources = net.in_sources(i);
    auto weights = net.in_weights(i);
    // A dangling journal has no out-edges, so (i, i) is never already present.
    const bool self_entry = absorb && is_dangling[i];
    bool placed = !self_entry;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      if (!placed && sources[k] > i) {
        m.sources.push_back(i);
        m.shares.push_back(1.0);
        placed = true;
      }
      m.sources.push_back(sources[k]);
      m.shares.push_back(share(sources[k], weights[k]));
    }
    if (!placed) {
      m.sources.push_back(i);
      m.shares.push_back(1.0);
    }
    m.offsets.push_back(static_cast<std::uint32_t>(m.sources.size()));
  }
  kernels::schedule_rows(m);
  return op;
}

PageRankResult power_iterate(const CitationNetwork& net, const TransferOperator& op,
                             const PageRankParams& params, MetricName name) {
  params.validate();
  const auto& k = kernels::table(params.kernel);
  const std::size_t n = net.size();
  const double nd = static_cast<double>(n);
  const double lambda = params.lambda;
  const double floor = (1.0 - lambda) / nd;

  std::vector<double> x(n, 1.0 / nd), y(n, 0.0), next(n, 0.0);
  ConvergenceInfo info;
  info.kernel = k.isa;
  info.final_residual = std::numeric_limits<double>::infinity();

  for (std::size_t it = 1; it <= params.max_iterations; ++it) {
    k.pull(op.matrix, x, y);
    double base = floor;
    if (params.dangling == DanglingPolicy::Uniform && !op.dangling.empty()) {
      base = floor + lambda * (k.sum_indexed(x, op.dangling) / nd);
    }
    k.affine(y, base, lambda, next);
    if (params.dangling == DanglingPolicy::SelfAbsorption) k.divide(next, k.sum(next));
    info.final_residual = k.l1_distance(next, x);
    info.iterations = it;
    x.swap(next);
    if (info.final_residual < params.tolerance) {
      info.converged = true;
      break;
    }
  }

  PageRankResult result;
  result.scores.name = name;
  result.scores.fingerprint = net.fingerprint();
  result.scores.lambda = lambda;
  result.scores.ids.reserve(n);
  for (const auto& j : net.journals()) result.scores.ids.push_back(j.id);
  result.scores.values = std::move(x);
  result.convergence = info;
  return result;
}

MetricVector empty_vector(const CitationNetwork& net, MetricName name) {
  MetricVector v;
  v.name = name;
  v.fingerprint = net.fingerprint();
  v.ids.reserve(net.size());
  for (const auto& j : net.journals()) v.ids.push_back(j.id);
  v.values.assign(net.size(), 0.0);
  return v;
}

}  // namespace

std::string_view to_string(MetricName name) {
  switch (name) {
    case MetricName::ImpactFactor: return "IF";
    case MetricName::PageRank: return "PR";
    case MetricName::WeightedPageRank: return "PRW";
    case MetricName::YFactor: return "Y";
  }
  return "?";
}

MetricName metric_from_string(std::string_view text) {
  for (MetricName m : {MetricName::ImpactFactor, MetricName::PageRank, MetricName::WeightedPageRank,
                       MetricName::YFactor}) {
    if (to_string(m) == text) return m;
  }
  throw std::invalid_argument("unknown metric '" + std::string(text) + "'");
}

double MetricVector::at(std::string_view id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) throw std::out_of_range("no value for '" + std::string(id) + "'");
  return values[static_cast<std::size_t>(it - ids.begin())];
}

std::string_view to_string(DanglingPolicy policy) {
  return policy == DanglingPolicy::Uniform ? "uniform" : "self-absorption";
}

std::optional<DanglingPolicy> dangling_policy_from_string(std::string_view text) {
  if (text == "uniform") return DanglingPolicy::Uniform;
  if (text == "self-absorption") return DanglingPolicy::SelfAbsorption;
  return std::nullopt;
}

void PageRankParams::validate() const {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1), got " + format_double(lambda));
  }
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("tolerance must be positive, got " + format_double(tolerance));
  }
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
}

MetricVector impact_factor(const CitationNetwork& net) {
  MetricVector v = empty_vector(net, MetricName::ImpactFactor);
  for (NodeIndex i = 0; i < net.size(); ++i) {
    const std::uint64_t articles = net.journal(i).article_count;
    if (articles == 0) continue;
    std::uint64_t received = 0;
    for (std::uint64_t w : net.in_weights(i)) received += w;
    v.values[i] = static_cast<double>(received) / static_cast<double>(articles);
  }
  return v;
}

PageRankResult pagerank_unweighted(const CitationNetwork& net, const PageRankParams& params) {
  params.validate();
  auto op = make_operator(net, params.dangling, [&net](NodeIndex source, std::uint64_t) {
    return 1.0 / static_cast<double>(net.out_targets(source).size());
  });
  return power_iterate(net, op, params, MetricName::PageRank);
}

PageRankResult weighted_pagerank(const CitationNetwork& net, const PageRankParams& params) {
  params.validate();
  auto op = make_operator(net, params.dangling, [&net](NodeIndex source, std::uint64_t weight) {
    return propagation_share(weight, net.out_total(source));
  });
  return power_iterate(net, op, params, MetricName::WeightedPageRank);
}

MetricVector solve_pagerank_exact(const CitationNetwork& net, const PageRankParams& params,
                                  std::size_t max_nodes) {
  params.validate();
  const std::size_t n = net.size();
  if (n > max_nodes) {
    throw std::invalid_argument("dense solve limited to " + std::to_string(max_nodes) +
                                " journals, network has " + std::to_string(n));
  }
  const double lambda = params.lambda;
  const double nd = static_cast<double>(n);

  // (I - lambda * M^T) x = (1 - lambda) / N, with M the row-stochastic transfer matrix.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = 1.0;
    a[i][n] = (1.0 - lambda) / nd;
  }
  const PropagationWeights pw = propagation_weights(net);
  for (NodeIndex j = 0; j < n; ++j) {
    auto targets = pw.row_targets(j);
    auto shares = pw.row_shares(j);
    for (std::size_t k = 0; k < targets.size(); ++k) a[targets[k]][j] -= lambda * shares[k];
  }
  for (NodeIndex d : pw.dangling) {
    if (params.dangling == DanglingPolicy::Uniform) {
      for (std::size_t i = 0; i < n; ++i) a[i][d] -= lambda / nd;
    } else {
      a[d][d] -= lambda;
    }
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular PageRank system");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  MetricVector v = empty_vector(net, MetricName::WeightedPageRank);
  v.lambda = lambda;
  for (std::size_t i = n; i-- > 0;) {
    double acc = a[i][n];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * v.values[c];
    v.values[i] = acc / a[i][i];
  }
  return v;
}

MetricVector y_factor(const MetricVector& impact, const MetricVector& prestige) {
  if (impact.fingerprint != prestige.fingerprint) {
    throw MismatchError("Y-factor inputs come from different networks (" +
                        hex64(impact.fingerprint) + " vs " + hex64(prestige.fingerprint) + ")");
  }
  if (impact.ids != prestige.ids) {
    throw MismatchError("Y-factor inputs cover different journals");
  }
  MetricVector y;
  y.name = MetricName::YFactor;
  y.ids = impact.ids;
  y.fingerprint = impact.fingerprint;
  y.lambda = prestige.lambda;
  y.values.resize(impact.size());
  for (std::size_t i = 0; i < impact.size(); ++i) y.values[i] = impact.values[i] * prestige.values[i];
  return y;
}

void write_metric_csv(std::ostream& out, const MetricVector& metric) {
  out << "# metric=" << to_string(metric.name)
      << " lambda=" << (metric.lambda ? format_double(*metric.lambda) : std::string("na"))
      << " fingerprint=" << hex64(metric.fingerprint) << '\n';
  out << "id,value\n";
  for (std::size_t i = 0; i < metric.size(); ++i) {
    out << csv_escape(metric.ids[i]) << ',' << format_double(metric.values[i]) << '\n';
  }
}

MetricVector read_metric_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0) {
    throw ParseError("expected '# metric=...' header", 1);
  }
  MetricVector v;
  bool have_name = false;
  std::istringstream tokens(header.substr(2));
  std::string token;
  while (tokens >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ParseError("malformed header token '" + token + "'", 1);
    const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    try {
      if (key == "metric") {
        v.name = metric_from_string(value);
        have_name = true;
      } else if (key == "lambda") {
        if (value != "na") v.lambda = parse_double(value);
      } else if (key == "fingerprint") {
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v.fingerprint, 16);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
          throw std::invalid_argument("bad fingerprint");
        }
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), 1);
    }
  }
  if (!have_name) throw ParseError("header lacks metric=", 1);

  CsvReader reader(in, ',', 2);
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields != std::vector<std::string>{"id", "value"}) {
    throw ParseError("expected header 'id,value'", 2);
  }
  while (reader.next(fields)) {
    if (fields.size() != 2) throw ParseError("expected 2 fields", reader.record_line());
    if (!v.ids.empty() && !(v.ids.back() < fields[0])) {
      throw ParseError("ids must be unique and ascending", reader.record_line());
    }
    try {
      v.values.push_back(parse_double(fields[1]));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), reader.record_line());
    }
    v.ids.push_back(fields[0]);
  }
  return v;
}

}  // namespace citerank
