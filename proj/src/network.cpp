#include "citerank/network.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <streambuf>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "citerank/csv.hpp"
#include "citerank/errors.hpp"
#include "citerank/format.hpp"

namespace citerank {
namespace {

void expect_header(CsvReader& reader, std::vector<std::string>& fields,
                   const std::vector<std::string>& header) {
  if (!reader.next(fields)) throw ParseError("missing header", 1);
  if (fields != header) {
    std::string expected;
    for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
    throw ParseError("expected header '" + expected + "'", reader.record_line());
  }
}

enum class IntStatus { Ok, Negative, Invalid };

IntStatus parse_count(const std::string& text, std::uint64_t& value) {
  if (!text.empty() && text.front() == '-') {
    std::uint64_t magnitude = 0;
    auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), magnitude);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.size() == 1) {
      return IntStatus::Invalid;
    }
    return IntStatus::Negative;
  }
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
  if (first == text.data() + text.size() || ec != std::errc{} || ptr != text.data() + text.size()) {
    return IntStatus::Invalid;
  }
  return IntStatus::Ok;
}

std::set<std::string> split_categories(const std::string& field) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start <= field.size()) {
    std::size_t bar = field.find('|', start);
    if (bar == std::string::npos) bar = field.size();
    std::string code = field.substr(start, bar - start);
    auto b = code.find_first_not_of(" \t");
    auto e = code.find_last_not_of(" \t");
    if (b != std::string::npos) out.insert(code.substr(b, e - b + 1));
    start = bar + 1;
  }
  return out;
}

std::string join_categories(const std::set<std::string>& codes) {
  std::string out;
  for (const auto& c : codes) {
    if (!out.empty()) out.push_back('|');
    out += c;
  }
  return out;
}

class HashingBuf : public std::streambuf {
 public:
  std::uint64_t value() const noexcept { return hash_.value(); }

 protected:
  int_type overflow(int_type ch) override {
    if (ch != traits_type::eof()) {
      char c = traits_type::to_char_type(ch);
      hash_.update(std::string_view(&c, 1));
    }
    return traits_type::not_eof(ch);
  }
  std::streamsize xsputn(const char* s, std::streamsize n) override {
    hash_.update(std::string_view(s, static_cast<std::size_t>(n)));
    return n;
  }

 private:
  Fnv1a64 hash_;
};

template <typename T>
std::span<const T> slice(const std::vector<T>& data, const std::vector<std::uint32_t>& offsets,
                         NodeIndex i) {
  return std::span<const T>(data).subspan(offsets.at(i), offsets.at(i + 1) - offsets[i]);
}

}  // namespace

std::vector<Journal> parse_journals(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  expect_header(reader, fields, {"id", "title", "articles", "categories"});

  std::vector<Journal> journals;
  std::map<std::string, std::size_t, std::less<>> seen;
  while (reader.next(fields)) {
    const std::size_t line = reader.record_line();
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, found " + std::to_string(fields.size()), line);
    }
    if (fields[0].empty()) throw ParseError("empty journal id", line);
    Journal j;
    j.id = fields[0];
    j.title = fields[1];
    switch (parse_count(fields[2], j.article_count)) {
      case IntStatus::Negative:
        throw ParseError("negative article count '" + fields[2] + "'", line);
      case IntStatus::Invalid:
        throw ParseError("non-integer article count '" + fields[2] + "'", line);
      case IntStatus::Ok:
        break;
    }
    j.categories = split_categories(fields[3]);
    auto [it, inserted] = seen.emplace(j.id, line);
    if (!inserted) {
      throw ParseError("duplicate journal id '" + j.id + "' (first seen at line " +
                           std::to_string(it->second) + ")",
                       line);
    }
    journals.push_back(std::move(j));
  }
  return journals;
}

std::vector<Citation> parse_edges(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  expect_header(reader, fields, {"citing", "cited", "count"});

  std::map<std::pair<std::string, std::string>, std::uint64_t> merged;
  while (reader.next(fields)) {
    const std::size_t line = reader.record_line();
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields, found " + std::to_string(fields.size()), line);
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError("empty journal id", line);
    std::uint64_t count = 0;
    switch (parse_count(fields[2], count)) {
      case IntStatus::Negative:
        throw ParseError("non-positive citation count", line);
      case IntStatus::Invalid:
        throw ParseError("non-integer citation count '" + fields[2] + "'", line);
      case IntStatus::Ok:
        break;
    }
    if (count == 0) throw ParseError("non-positive citation count", line);
    auto& total = merged[{fields[0], fields[1]}];
    if (total > std::numeric_limits<std::uint64_t>::max() - count) {
      throw ParseError("citation count overflow", line);
    }
    total += count;
  }

  std::vector<Citation> edges;
  edges.reserve(merged.size());
  for (auto& [key, count] : merged) edges.push_back({key.first, key.second, count});
  return edges;
}

CitationNetwork build_network(std::vector<Journal> journals, const std::vector<Citation>& edges,
                              int year, SelfCitationPolicy policy) {
  if (journals.empty()) throw NetworkError("network has no journals");
  if (journals.size() >= std::numeric_limits<NodeIndex>::max()) {
    throw NetworkError("too many journals");
  }
  std::sort(journals.begin(), journals.end(),
            [](const Journal& a, const Journal& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < journals.size(); ++i) {
    if (journals[i].id.empty()) throw NetworkError("empty journal id");
    if (i > 0 && journals[i].id == journals[i - 1].id) {
      throw NetworkError("duplicate journal id '" + journals[i].id + "'");
    }
  }

  std::unordered_map<std::string_view, NodeIndex> index;
  index.reserve(journals.size());
  for (std::size_t i = 0; i < journals.size(); ++i) {
    index.emplace(journals[i].id, static_cast<NodeIndex>(i));
  }
  auto lookup = [&](const Citation& e, const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw NetworkError("edge " + e.citing + " -> " + e.cited + " references unknown journal '" +
                         id + "'");
    }
    return it->second;
  };

  std::vector<std::tuple<NodeIndex, NodeIndex, std::uint64_t>> triples;
  triples.reserve(edges.size());
  for (const auto& e : edges) {
    NodeIndex from = lookup(e, e.citing);
    NodeIndex to = lookup(e, e.cited);
    if (e.count == 0) {
      throw NetworkError("edge " + e.citing + " -> " + e.cited + " has a zero citation count");
    }
    if (policy == SelfCitationPolicy::Exclude && from == to) continue;
    triples.emplace_back(from, to, e.count);
  }
  std::sort(triples.begin(), triples.end());

  // Merge repeated pairs.
  std::size_t unique = 0;
  for (std::size_t k = 0; k < triples.size(); ++k) {
    if (unique > 0 && std::get<0>(triples[unique - 1]) == std::get<0>(triples[k]) &&
        std::get<1>(triples[unique - 1]) == std::get<1>(triples[k])) {
      auto& w = std::get<2>(triples[unique - 1]);
      if (w > std::numeric_limits<std::uint64_t>::max() - std::get<2>(triples[k])) {
        throw NetworkError("citation count overflow");
      }
      w += std::get<2>(triples[k]);
    } else {
      triples[unique++] = triples[k];
    }
  }
  triples.resize(unique);
  if (triples.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw NetworkError("too many edges");
  }

  CitationNetwork net;
  net.year_ = year;
  net.journals_ = std::move(journals);
  const std::size_t n = net.journals_.size();

  net.out_offsets_.assign(n + 1, 0);
  net.in_offsets_.assign(n + 1, 0);
  for (const auto& [from, to, w] : triples) {
    ++net.out_offsets_[from + 1];
    ++net.in_offsets_[to + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    net.out_offsets_[i + 1] += net.out_offsets_[i];
    net.in_offsets_[i + 1] += net.in_offsets_[i];
  }

  net.out_targets_.resize(triples.size());
  net.out_weights_.resize(triples.size());
  net.in_sources_.resize(triples.size());
  net.in_weights_.resize(triples.size());
  net.out_totals_.assign(n, 0);
  std::vector<std::uint32_t> in_cursor(net.in_offsets_.begin(), net.in_offsets_.end() - 1);
  // triples are sorted by (from, to): out rows come out ordered by target and
  // each in row receives its sources in ascending order.
  for (std::size_t k = 0; k < triples.size(); ++k) {
    const auto& [from, to, w] = triples[k];
    net.out_targets_[k] = to;
    net.out_weights_[k] = w;
    const std::uint32_t slot = in_cursor[to]++;
    net.in_sources_[slot] = from;
    net.in_weights_[slot] = w;
    net.out_totals_[from] += w;
  }

  HashingBuf buf;
  std::ostream hash_stream(&buf);
  hash_stream << "year=" << year << '\n';
  dump_journals(net, hash_stream);
  dump_edges(net, hash_stream);
  hash_stream.flush();
  net.fingerprint_ = buf.value();
  return net;
}

std::optional<NodeIndex> CitationNetwork::find(std::string_view id) const {
  auto it = std::lower_bound(journals_.begin(), journals_.end(), id,
                             [](const Journal& j, std::string_view key) { return j.id < key; });
  if (it == journals_.end() || it->id != id) return std::nullopt;
  return static_cast<NodeIndex>(it - journals_.begin());
}

std::span<const NodeIndex> CitationNetwork::out_targets(NodeIndex i) const {
  return slice(out_targets_, out_offsets_, i);
}
std::span<const std::uint64_t> CitationNetwork::out_weights(NodeIndex i) const {
  return slice(out_weights_, out_offsets_, i);
}
std::span<const NodeIndex> CitationNetwork::in_sources(NodeIndex i) const {
  return slice(in_sources_, in_offsets_, i);
}
std::span<const std::uint64_t> CitationNetwork::in_weights(NodeIndex i) const {
  return slice(in_weights_, in_offsets_, i);
}

std::optional<std::uint64_t> CitationNetwork::weight(NodeIndex citing, NodeIndex cited) const {
  auto targets = out_targets(citing);
  auto it = std::lower_bound(targets.begin(), targets.end(), cited);
  if (it == targets.end() || *it != cited) return std::nullopt;
  return out_weights(citing)[static_cast<std::size_t>(it - targets.begin())];
}

CitationNetwork induced_subnetwork(const CitationNetwork& net, const std::set<std::string>& codes) {
  if (codes.empty()) throw NetworkError("no category codes given");
  std::vector<Journal> kept;
  std::vector<bool> keep(net.size(), false);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& cats = net.journals()[i].categories;
    keep[i] = std::any_of(cats.begin(), cats.end(), [&](const std::string& c) {
      return codes.count(c) > 0;
    });
    if (keep[i]) kept.push_back(net.journals()[i]);
  }
  if (kept.empty()) {
    std::string list;
    for (const auto& c : codes) list += (list.empty() ? "" : ",") + c;
    throw NetworkError("no journal matches categories " + list);
  }

  std::vector<Citation> edges;
  for (NodeIndex j = 0; j < net.size(); ++j) {
    if (!keep[j]) continue;
    auto targets = net.out_targets(j);
    auto weights = net.out_weights(j);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (keep[targets[k]]) {
        edges.push_back({net.journal(j).id, net.journal(targets[k]).id, weights[k]});
      }
    }
  }
  // Self-citations that survived the original policy are part of the data now.
  return build_network(std::move(kept), edges, net.year(), SelfCitationPolicy::Include);
}

std::vector<Citation> citations(const CitationNetwork& net) {
  std::vector<Citation> out;
  out.reserve(net.edge_count());
  for (NodeIndex j = 0; j < net.size(); ++j) {
    auto targets = net.out_targets(j);
    auto weights = net.out_weights(j);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      out.push_back({net.journal(j).id, net.journal(targets[k]).id, weights[k]});
    }
  }
  return out;
}

void dump_journals(const CitationNetwork& net, std::ostream& out) {
  out << "id,title,articles,categories\n";
  for (const auto& j : net.journals()) {
    write_csv_row(out, {j.id, j.title, std::to_string(j.article_count), join_categories(j.categories)});
  }
}

void dump_edges(const CitationNetwork& net, std::ostream& out) {
  out << "citing,cited,count\n";
  for (NodeIndex j = 0; j < net.size(); ++j) {
    auto targets = net.out_targets(j);
    auto weights = net.out_weights(j);
    const std::string citing = csv_escape(net.journal(j).id);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      out << citing << ',' << csv_escape(net.journal(targets[k]).id) << ',' << weights[k] << '\n';
    }
  }
}

PropagationWeights propagation_weights(const CitationNetwork& net) {
  PropagationWeights pw;
  pw.offsets.reserve(net.size() + 1);
  pw.offsets.push_back(0);
  pw.targets.reserve(net.edge_count());
  pw.shares.reserve(net.edge_count());
  for (NodeIndex j = 0; j < net.size(); ++j) {
    auto targets = net.out_targets(j);
    auto weights = net.out_weights(j);
    if (targets.empty()) pw.dangling.push_back(j);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      pw.targets.push_back(targets[k]);
      pw.shares.push_back(propagation_share(weights[k], net.out_total(j)));
    }
    pw.offsets.push_back(static_cast<std::uint32_t>(pw.targets.size()));
  }
  return pw;
}

std::span<const NodeIndex> PropagationWeights::row_targets(NodeIndex j) const {
  return slice(targets, offsets, j);
}

std::span<const double> PropagationWeights::row_shares(NodeIndex j) const {
  return slice(shares, offsets, j);
}

std::optional<double> PropagationWeights::share(NodeIndex citing, NodeIndex cited) const {
  auto row = row_targets(citing);
  auto it = std::lower_bound(row.begin(), row.end(), cited);
  if (it == row.end() || *it != cited) return std::nullopt;
  return row_shares(citing)[static_cast<std::size_t>(it - row.begin())];
}

}  // namespace citerank
