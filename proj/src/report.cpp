#include "citerank/report.hpp"

#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "citerank/csv.hpp"
#include "citerank/errors.hpp"
#include "citerank/format.hpp"

namespace citerank {
namespace fs = std::filesystem;

namespace {

std::string tsv_safe(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delimiter, start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

double parse_field(const std::string& text, std::size_t line) {
  try {
    return parse_double(text);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line);
  }
}

std::size_t parse_rank(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError("bad rank '" + text + "'", line);
  }
}

// "key=value key=value" as found in '#' comment lines.
void read_settings(const std::string& line, std::map<std::string, std::string>& into) {
  std::istringstream tokens(line.substr(1));
  std::string token;
  while (tokens >> token) {
    const auto eq = token.find('=');
    if (eq != std::string::npos) into[token.substr(0, eq)] = token.substr(eq + 1);
  }
}

}  // namespace

std::string_view to_string(ScatterLabel label) {
  switch (label) {
    case ScatterLabel::None: return "none";
    case ScatterLabel::Popular: return "popular";
    case ScatterLabel::Prestigious: return "prestigious";
    case ScatterLabel::TopY: return "top_y";
  }
  return "none";
}

ScatterLabel scatter_label_from_string(std::string_view text) {
  for (ScatterLabel l : {ScatterLabel::None, ScatterLabel::Popular, ScatterLabel::Prestigious,
                         ScatterLabel::TopY}) {
    if (to_string(l) == text) return l;
  }
  throw std::invalid_argument("unknown scatter label '" + std::string(text) + "'");
}

ScatterExport export_scatter(const MetricVector& impact, const MetricVector& prestige,
                             const ClassificationReport& report, std::size_t y_top_k) {
  require_aligned(impact, prestige);
  std::set<std::string_view> popular, prestigious, top_y;
  for (const auto& e : report.popular) popular.insert(e.id);
  for (const auto& e : report.prestigious) prestigious.insert(e.id);
  const RankTable by_y = rank_by(y_factor(impact, prestige), y_top_k);
  for (const auto& row : by_y.rows) top_y.insert(row.id);

  ScatterExport scatter;
  scatter.rows.reserve(impact.size());
  for (std::size_t i = 0; i < impact.size(); ++i) {
    const std::string& id = impact.ids[i];
    ScatterLabel label = ScatterLabel::None;
    if (popular.count(id)) {
      label = ScatterLabel::Popular;
    } else if (prestigious.count(id)) {
      label = ScatterLabel::Prestigious;
    } else if (top_y.count(id)) {
      label = ScatterLabel::TopY;
    }
    scatter.rows.push_back({id, prestige.values[i], impact.values[i], label});
  }
  return scatter;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

InputDigest digest_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  Fnv1a64 hash;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    hash.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return {path.string(), hex64(hash.value())};
}

void write_rank_tsv(std::ostream& out, const RankTable& table, const CitationNetwork& net) {
  out << "rank\tid\ttitle\tvalue\n";
  for (const auto& row : table.rows) {
    const auto index = net.find(row.id);
    const std::string title = index ? tsv_safe(net.journal(*index).title) : std::string();
    out << row.rank << '\t' << tsv_safe(row.id) << '\t' << title << '\t' << format_double(row.value)
        << '\n';
  }
}

RankTable read_rank_tsv(std::istream& in, MetricName metric) {
  RankTable table;
  table.metric = metric;
  std::string line;
  if (!std::getline(in, line) || line != "rank\tid\ttitle\tvalue") {
    throw ParseError("expected header 'rank<TAB>id<TAB>title<TAB>value'", 1);
  }
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != 4) throw ParseError("expected 4 fields", n);
    table.rows.push_back({parse_rank(f[0], n), f[1], parse_field(f[3], n)});
  }
  return table;
}

void write_scatter_csv(std::ostream& out, const ScatterExport& scatter) {
  out << "id,prw,if,label\n";
  for (const auto& r : scatter.rows) {
    out << csv_escape(r.id) << ',' << format_double(r.prw) << ',' << format_double(r.impact) << ','
        << to_string(r.label) << '\n';
  }
}

ScatterExport read_scatter_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f) || f != std::vector<std::string>{"id", "prw", "if", "label"}) {
    throw ParseError("expected header 'id,prw,if,label'", 1);
  }
  ScatterExport scatter;
  while (reader.next(f)) {
    const std::size_t line = reader.record_line();
    if (f.size() != 4) throw ParseError("expected 4 fields", line);
    try {
      scatter.rows.push_back(
          {f[0], parse_field(f[1], line), parse_field(f[2], line), scatter_label_from_string(f[3])});
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line);
    }
  }
  return scatter;
}

void write_classification_csv(std::ostream& out, const ClassificationReport& report) {
  out << "# prw_low=" << format_double(report.prw_low)
      << " prw_high=" << format_double(report.prw_high)
      << " low_percentile=" << format_double(report.low_percentile)
      << " high_percentile=" << format_double(report.high_percentile) << '\n';
  out << "# intercept=" << format_double(report.model.intercept)
      << " slope=" << format_double(report.model.slope) << " n=" << report.model.n << '\n';
  out << "class,rank,id,if,prw,if_delta\n";
  auto rows = [&out](std::string_view cls, const std::vector<ClassifiedJournal>& list) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& e = list[i];
      out << cls << ',' << (i + 1) << ',' << csv_escape(e.id) << ',' << format_double(e.if_value)
          << ',' << format_double(e.prw_value) << ',' << format_double(e.if_delta) << '\n';
    }
  };
  rows("popular", report.popular);
  rows("prestigious", report.prestigious);
}

ClassificationReport read_classification_csv(std::istream& in) {
  std::map<std::string, std::string> settings;
  std::string line;
  std::size_t line_no = 0;
  while (in.peek() == '#') {
    std::getline(in, line);
    ++line_no;
    read_settings(line, settings);
  }
  auto setting = [&](const std::string& key) {
    auto it = settings.find(key);
    if (it == settings.end()) throw ParseError("missing setting '" + key + "'", line_no);
    return parse_field(it->second, line_no);
  };
  ClassificationReport report;
  report.prw_low = setting("prw_low");
  report.prw_high = setting("prw_high");
  report.low_percentile = setting("low_percentile");
  report.high_percentile = setting("high_percentile");
  report.model.intercept = setting("intercept");
  report.model.slope = setting("slope");
  report.model.n = static_cast<std::size_t>(setting("n"));

  CsvReader reader(in, ',', line_no + 1);
  std::vector<std::string> f;
  if (!reader.next(f) || f != std::vector<std::string>{"class", "rank", "id", "if", "prw", "if_delta"}) {
    throw ParseError("expected header 'class,rank,id,if,prw,if_delta'", line_no + 1);
  }
  while (reader.next(f)) {
    const std::size_t at = reader.record_line();
    if (f.size() != 6) throw ParseError("expected 6 fields", at);
    ClassifiedJournal e{f[2], parse_field(f[3], at), parse_field(f[4], at), parse_field(f[5], at)};
    auto& list = f[0] == "popular" ? report.popular : report.prestigious;
    if (f[0] != "popular" && f[0] != "prestigious") throw ParseError("unknown class '" + f[0] + "'", at);
    if (parse_rank(f[1], at) != list.size() + 1) throw ParseError("ranks must be consecutive", at);
    list.push_back(std::move(e));
  }
  return report;
}

std::string manifest_json(const RunManifest& m) {
  using nlohmann::json;
  json inputs = json::array();
  for (const auto& d : m.inputs) inputs.push_back({{"path", d.path}, {"fnv1a64", d.fnv1a64}});

  json doc;
  doc["command"] = m.command;
  doc["software"] = {{"name", "citerank"}, {"version", m.software_version}};
  doc["timestamp"] = m.timestamp;
  doc["inputs"] = inputs;
  doc["network"] = {
      {"year", m.year},
      {"journals", m.journals},
      {"edges", m.edges},
      {"fingerprint", hex64(m.fingerprint)},
      {"category_filter", m.category_filter},
      {"self_citations", m.self_citations == SelfCitationPolicy::Include ? "include" : "exclude"},
  };
  doc["pagerank"] = {
      {"lambda", m.pagerank.lambda},
      {"tolerance", m.pagerank.tolerance},
      {"max_iterations", m.pagerank.max_iterations},
      {"dangling_policy", std::string(to_string(m.pagerank.dangling))},
      {"kernel_requested", std::string(kernels::to_string(m.pagerank.kernel))},
  };
  doc["convergence"] = {
      {"iterations", m.convergence.iterations},
      {"final_residual", m.convergence.final_residual},
      {"converged", m.convergence.converged},
      {"kernel", std::string(kernels::to_string(m.convergence.kernel))},
  };
  if (m.percentiles) {
    json p = {{"low", m.percentiles->low_percentile}, {"high", m.percentiles->high_percentile}};
    p["top_k"] = m.percentiles->top_k ? json(*m.percentiles->top_k) : json(nullptr);
    doc["percentiles"] = p;
  } else {
    doc["percentiles"] = nullptr;
  }
  doc["journals_without_articles"] = m.journals_without_articles;
  return doc.dump(2) + "\n";
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string() + ": " + std::strerror(errno));
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " +
                             ec.message());
  }
}

namespace {

void prepare_directory(const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec || !fs::is_directory(directory)) {
    throw std::runtime_error("output directory " + directory.string() + " is not usable" +
                             (ec ? ": " + ec.message() : std::string()));
  }
}

template <typename Writer>
fs::path emit(const fs::path& directory, const char* name, Writer&& writer) {
  std::ostringstream buf;
  writer(buf);
  const fs::path path = directory / name;
  try {
    write_file_atomic(path, buf.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("output directory " + directory.string() + ": " + e.what());
  }
  return path;
}

}  // namespace

std::vector<fs::path> write_rank_bundle(const fs::path& directory, const RankTables& tables,
                                        const CitationNetwork& net, const RunManifest& manifest) {
  prepare_directory(directory);
  std::vector<fs::path> paths;
  paths.push_back(emit(directory, "rank_if.tsv", [&](std::ostream& o) { write_rank_tsv(o, tables.impact, net); }));
  paths.push_back(emit(directory, "rank_prw.tsv", [&](std::ostream& o) { write_rank_tsv(o, tables.prestige, net); }));
  paths.push_back(emit(directory, "rank_y.tsv", [&](std::ostream& o) { write_rank_tsv(o, tables.y, net); }));
  paths.push_back(emit(directory, "manifest.json", [&](std::ostream& o) { o << manifest_json(manifest); }));
  return paths;
}

std::vector<fs::path> write_report_bundle(const fs::path& directory, const RankTables& tables,
                                          const ScatterExport& scatter,
                                          const ClassificationReport& report,
                                          const CitationNetwork& net, const RunManifest& manifest) {
  prepare_directory(directory);
  std::vector<fs::path> paths;
  paths.push_back(emit(directory, "rank_if.tsv", [&](std::ostream& o) { write_rank_tsv(o, tables.impact, net); }));
  paths.push_back(emit(directory, "rank_prw.tsv", [&](std::ostream& o) { write_rank_tsv(o, tables.prestige, net); }));
  paths.push_back(emit(directory, "rank_y.tsv", [&](std::ostream& o) { write_rank_tsv(o, tables.y, net); }));
  paths.push_back(emit(directory, "scatter.csv", [&](std::ostream& o) { write_scatter_csv(o, scatter); }));
  paths.push_back(emit(directory, "classification.csv", [&](std::ostream& o) { write_classification_csv(o, report); }));
  paths.push_back(emit(directory, "manifest.json", [&](std::ostream& o) { o << manifest_json(manifest); }));
  return paths;
}

}  // namespace citerank
