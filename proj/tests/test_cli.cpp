#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "citerank/analysis.hpp"
#include "citerank/cli.hpp"
#include "citerank/format.hpp"
#include "citerank/report.hpp"
#include "support/generators.hpp"
#include "support/tempdir.hpp"

using namespace citerank;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> tsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, '\t')) f.push_back(cell);
    rows.push_back(f);
  }
  return rows;
}

struct Files {
  testgen::TempDir dir;
  std::string journals = dir / "journals.csv";
  std::string edges = dir / "edges.csv";

  explicit Files(const testgen::RawNetwork& raw) {
    testgen::write_journals_csv(raw, journals);
    testgen::write_edges_csv(raw, edges);
  }
  std::vector<std::string> args(const std::string& cmd, const std::string& out) const {
    return {cmd, "--journals", journals, "--edges", edges, "--out", dir / out};
  }
};

testgen::RawNetwork sample(std::uint64_t seed, std::size_t n = 30) {
  testgen::Rng rng(seed);
  return testgen::random_network(rng, {n, 0.25, 10, false, false, 0.0});
}

/// Hub cited by every spoke and citing each spoke once; spokes are symmetric.
testgen::RawNetwork hub_and_spokes(std::uint64_t hub_articles) {
  testgen::RawNetwork raw;
  raw.journals = {{"H", "Hub", hub_articles, {}}, {"S1", "s", 1, {}}, {"S2", "s", 1, {}}, {"S3", "s", 1, {}}};
  for (const char* s : {"S1", "S2", "S3"}) {
    raw.edges.push_back({s, "H", 1});
    raw.edges.push_back({"H", s, 1});
  }
  return raw;
}

}  // namespace

TEST_CASE("rank writes three tables and a manifest and echoes the top rows") {
  Files f(sample(1));
  auto args = f.args("rank", "out");
  args.insert(args.end(), {"--top", "10", "--year", "2003"});
  const auto r = run(args);
  REQUIRE(r.code == 0);
  const auto rows = tsv(r.out);
  CHECK(rows[0] == std::vector<std::string>{"metric", "rank", "id", "value"});
  CHECK(rows.size() == 1 + 30);
  for (const char* name : {"rank_if.tsv", "rank_prw.tsv", "rank_y.tsv", "manifest.json"}) {
    CHECK(std::filesystem::exists(f.dir.path() / "out" / name));
  }
  const auto manifest = nlohmann::json::parse(testgen::slurp(f.dir.path() / "out" / "manifest.json"));
  CHECK(manifest["network"]["year"] == 2003);
  CHECK(manifest["network"]["journals"] == 30);
  CHECK(manifest["inputs"].size() == 2);
  CHECK(manifest["command"].get<std::string>().find("rank") != std::string::npos);

  // The echoed PR_w rows agree with the rank table on disk.
  std::ifstream table(f.dir.path() / "out" / "rank_prw.tsv");
  const auto prw = read_rank_tsv(table, MetricName::WeightedPageRank);
  CHECK(rows[11] == std::vector<std::string>{"PRW", "1", prw.rows[0].id, format_double(prw.rows[0].value)});
}

TEST_CASE("lambda zero gives uniform PR_w") {
  Files f(sample(2, 17));
  auto args = f.args("rank", "out");
  args.insert(args.end(), {"--lambda", "0"});
  REQUIRE(run(args).code == 0);
  std::ifstream table(f.dir.path() / "out" / "rank_prw.tsv");
  const auto prw = read_rank_tsv(table, MetricName::WeightedPageRank);
  REQUIRE(prw.rows.size() == 17);
  for (const auto& row : prw.rows) CHECK(row.value == 1.0 / 17);
}

TEST_CASE("category filter restricts the network") {
  testgen::Rng rng(3);
  auto raw = testgen::random_network(rng, {60, 0.2, 10, false, false, 0.0});
  const std::set<std::string> physics{"UB", "UF", "UH", "UI", "UK", "UN", "UP", "UR"};
  std::size_t tagged = 0;
  for (auto& j : raw.journals) {
    if (rng.coin(0.5)) j.categories = {"UH", "PY"};
    tagged += std::any_of(j.categories.begin(), j.categories.end(),
                          [&](const std::string& c) { return physics.count(c) > 0; });
  }
  Files f(raw);
  auto args = f.args("rank", "phys");
  args.insert(args.end(), {"--categories", "UB,UF,UH,UI,UK,UN,UP,UR"});
  REQUIRE(run(args).code == 0);
  const auto manifest = nlohmann::json::parse(testgen::slurp(f.dir.path() / "phys" / "manifest.json"));
  CHECK(manifest["network"]["journals"] == tagged);
  CHECK(manifest["network"]["category_filter"].size() == 8);
}

TEST_CASE("classify reports planted journals first and matches the library") {
  auto raw = sample(4, 60);
  const auto base = build_network(raw.journals, raw.edges, 0);
  const auto prw = weighted_pagerank(base, {}).scores;
  std::size_t lowest = 0, highest = 0;
  for (std::size_t i = 0; i < prw.size(); ++i) {
    if (prw.values[i] < prw.values[lowest]) lowest = i;
    if (prw.values[i] > prw.values[highest]) highest = i;
  }
  // Put everyone near IF = 1 + 200 PR_w, then plant one outlier at each end.
  for (std::size_t i = 0; i < raw.journals.size(); ++i) {
    const double in = impact_factor(base).values[i] * static_cast<double>(raw.journals[i].article_count);
    raw.journals[i].article_count = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(in / (1 + 200 * prw.values[i]))));
  }
  raw.journals[lowest].article_count = 1;
  raw.journals[highest].article_count = 1000000;
  Files f(raw);

  const auto defaults = run(f.args("classify", "a"));
  REQUIRE(defaults.code == 0);
  auto explicit_args = f.args("classify", "b");
  explicit_args.insert(explicit_args.end(), {"--low-pct", "40", "--high-pct", "90"});
  const auto explicit_run = run(explicit_args);
  CHECK(explicit_run.out == defaults.out);
  for (const char* name : {"rank_if.tsv", "rank_prw.tsv", "rank_y.tsv", "scatter.csv", "classification.csv"}) {
    CHECK(testgen::slurp(f.dir.path() / "a" / name) == testgen::slurp(f.dir.path() / "b" / name));
  }

  const auto net = build_network(raw.journals, raw.edges, 0);
  const auto report = classify_outliers(impact_factor(net), weighted_pagerank(net, {}).scores);
  std::ifstream csv(f.dir.path() / "a" / "classification.csv");
  const auto written = read_classification_csv(csv);
  CHECK(written.popular == report.popular);
  CHECK(written.prestigious == report.prestigious);
  REQUIRE_FALSE(report.popular.empty());
  REQUIRE_FALSE(report.prestigious.empty());
  CHECK(report.popular[0].id == raw.journals[lowest].id);
  CHECK(report.prestigious[0].id == raw.journals[highest].id);

  const auto rows = tsv(defaults.out);
  CHECK(rows[0] == std::vector<std::string>{"class", "rank", "id", "if", "prw", "if_delta"});
  CHECK(rows[1][2] == raw.journals[lowest].id);
}

TEST_CASE("classify rejects inverted percentiles") {
  Files f(sample(5));
  auto args = f.args("classify", "out");
  args.insert(args.end(), {"--low-pct", "95", "--high-pct", "40"});
  const auto r = run(args);
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find("--low-pct") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(f.dir.path() / "out"));
}

TEST_CASE("correlate on constructed networks") {
  SUBCASE("collinear") {
    Files f(hub_and_spokes(1));
    const auto r = run({"correlate", "--journals", f.journals, "--edges", f.edges});
    REQUIRE(r.code == 0);
    const auto rows = tsv(r.out);
    CHECK(rows[0] == std::vector<std::string>{"x", "y", "r", "p_value", "n"});
    CHECK(std::fabs(parse_double(rows[1][2]) - 1.0) <= 1e-12);
    CHECK(rows[1][4] == "4");
  }
  SUBCASE("anti-correlated") {
    Files f(hub_and_spokes(6));
    const auto r = run({"correlate", "--journals", f.journals, "--edges", f.edges});
    REQUIRE(r.code == 0);
    CHECK(std::fabs(parse_double(tsv(r.out)[1][2]) + 1.0) <= 1e-12);
  }
  SUBCASE("metric files") {
    testgen::TempDir dir;
    testgen::spit(dir.path() / "x.csv", "# metric=IF lambda=na fingerprint=0000000000000001\nid,value\nA,1\nB,2\nC,3\nD,4\n");
    testgen::spit(dir.path() / "y.csv", "# metric=PRW lambda=0.85 fingerprint=0000000000000001\nid,value\nA,1\nB,3\nC,2\nD,4\n");
    const auto r = run({"correlate", "--metric-x", dir / "x.csv", "--metric-y", dir / "y.csv"});
    REQUIRE(r.code == 0);
    CHECK(std::fabs(parse_double(tsv(r.out)[1][2]) - 0.8) <= 1e-12);

    testgen::spit(dir.path() / "flat.csv", "# metric=PRW lambda=0.85 fingerprint=0000000000000001\nid,value\nA,5\nB,5\nC,5\nD,5\n");
    const auto flat = run({"correlate", "--metric-x", dir / "x.csv", "--metric-y", dir / "flat.csv"});
    CHECK(flat.code == cli::kDegenerate);
    CHECK_FALSE(flat.err.empty());
  }
  SUBCASE("log transform") {
    Files f(hub_and_spokes(1));
    const auto r = run({"correlate", "--journals", f.journals, "--edges", f.edges, "--log"});
    REQUIRE(r.code == 0);
    CHECK(std::fabs(parse_double(tsv(r.out)[1][2]) - 1.0) <= 1e-12);
  }
}

TEST_CASE("exit codes") {
  Files f(sample(6));
  CHECK(run({}).code == cli::kInputError);
  CHECK(run({"rank"}).code == cli::kInputError);
  CHECK(run({"rank", "--journals", f.dir / "missing.csv", "--edges", f.edges}).code == cli::kInputError);

  testgen::spit(f.dir.path() / "bad.csv", "citing,cited,count\nJ00000,J00001,zero\n");
  const auto bad = run({"rank", "--journals", f.journals, "--edges", f.dir / "bad.csv", "--out", f.dir / "o"});
  CHECK(bad.code == cli::kInputError);
  CHECK(bad.err.find("line 2") != std::string::npos);

  auto args = f.args("rank", "slow");
  args.insert(args.end(), {"--max-iterations", "1"});
  CHECK(run(args).code == cli::kNotConverged);
  CHECK_FALSE(std::filesystem::exists(f.dir.path() / "slow"));
  args.push_back("--allow-nonconverged");
  const auto allowed = run(args);
  CHECK(allowed.code == 0);
  CHECK(allowed.err.find("did not converge") != std::string::npos);

  auto lam = f.args("rank", "lam");
  lam.insert(lam.end(), {"--lambda", "1"});
  CHECK(run(lam).code == cli::kInputError);
  auto dangling = f.args("rank", "d");
  dangling.insert(dangling.end(), {"--dangling", "sideways"});
  CHECK(run(dangling).code == cli::kInputError);

  testgen::spit(f.dir.path() / "file", "x");
  CHECK(run({"rank", "--journals", f.journals, "--edges", f.edges, "--out", f.dir / "file"}).code ==
        cli::kInputError);
}

TEST_CASE("version and kernel selection") {
  const auto v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find(CITERANK_VERSION) != std::string::npos);

  Files f(sample(7));
  auto scalar = f.args("rank", "s");
  scalar.insert(scalar.end(), {"--kernel", "scalar"});
  REQUIRE(run(scalar).code == 0);
  auto simd = f.args("rank", "v");
  REQUIRE(run(simd).code == 0);
  CHECK(testgen::slurp(f.dir.path() / "s" / "rank_prw.tsv") == testgen::slurp(f.dir.path() / "v" / "rank_prw.tsv"));

  const auto dump = run({"dump", "--journals", f.journals, "--edges", f.edges, "--metric", "PRW"});
  REQUIRE(dump.code == 0);
  std::istringstream in(dump.out);
  CHECK(read_metric_csv(in).size() == 30);
}
