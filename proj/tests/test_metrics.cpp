#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "citerank/errors.hpp"
#include "citerank/metrics.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace citerank;

namespace {

CitationNetwork make(std::vector<Journal> journals, std::vector<Citation> edges) {
  return build_network(std::move(journals), edges, 2003);
}

Journal j(const std::string& id, std::uint64_t articles = 1) { return {id, id, articles, {}}; }

double linf(const std::vector<double>& a, const std::vector<long double>& b) {
  long double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  return static_cast<double>(worst);
}

PageRankParams tight(double lambda) {
  PageRankParams p;
  p.lambda = lambda;
  p.tolerance = 1e-13;
  p.max_iterations = 100000;
  return p;
}

}  // namespace

TEST_CASE("impact factor divides incoming citations by articles") {
  const auto net = make({j("A"), j("B", 7), j("C"), j("D", 4), j("E", 0)},
                        {{"A", "B", 3}, {"C", "B", 4}, {"A", "D", 6}, {"B", "D", 4}, {"A", "E", 9}});
  const auto v = impact_factor(net);
  CHECK(v.name == MetricName::ImpactFactor);
  CHECK(v.at("B") == 1.0);
  CHECK(v.at("A") == 0.0);
  CHECK(v.at("D") == 2.5);
  CHECK(v.at("E") == 0.0);
  CHECK(v.fingerprint == net.fingerprint());
  CHECK_FALSE(v.lambda.has_value());
  CHECK_THROWS_AS(v.at("Q"), std::out_of_range);
}

TEST_CASE("unweighted PageRank on symmetric graphs") {
  SUBCASE("two-cycle") {
    const auto net = make({j("A"), j("B")}, {{"A", "B", 5}, {"B", "A", 1}});
    const auto r = pagerank_unweighted(net, {});
    CHECK(r.convergence.converged);
    CHECK(r.scores.values[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.scores.values[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("three-cycle") {
    const auto net = make({j("A"), j("B"), j("C")}, {{"A", "B", 1}, {"B", "C", 1}, {"C", "A", 1}});
    for (double v : pagerank_unweighted(net, {}).scores.values) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  SUBCASE("lambda zero is uniform on any topology") {
    testgen::Rng rng(1);
    const auto raw = testgen::random_network(rng, {9, 0.4, 10, false, false, 0.1});
    const auto net = make(raw.journals, raw.edges);
    PageRankParams p;
    p.lambda = 0.0;
    for (double v : pagerank_unweighted(net, p).scores.values) CHECK(v == 1.0 / 9);
    for (double v : weighted_pagerank(net, p).scores.values) CHECK(v == 1.0 / 9);
    for (double v : solve_pagerank_exact(net, p).values) CHECK(v == doctest::Approx(1.0 / 9).epsilon(1e-15));
  }
}

TEST_CASE("weighted PageRank on a small weighted network matches the dense solution") {
  const auto net = make({j("A"), j("B"), j("C")}, {{"A", "B", 2}, {"A", "C", 1}, {"B", "A", 1}, {"C", "A", 1}});
  const auto raw_j = std::vector<Journal>{j("A"), j("B"), j("C")};
  const auto raw_e = std::vector<Citation>{{"A", "B", 2}, {"A", "C", 1}, {"B", "A", 1}, {"C", "A", 1}};
  const auto expected = oracle::pagerank(raw_j, raw_e, 0.85);
  // Hand solution: x_A = 0.05 + 0.85 (x_B + x_C), x_B = 0.05 + 0.85 * 2/3 x_A, x_C = 0.05 + 0.85/3 x_A.
  const double xa = (0.05 + 0.85 * 0.1) / (1 - 0.85 * 0.85);
  CHECK(static_cast<double>(expected[0]) == doctest::Approx(xa).epsilon(1e-15));

  const auto exact = solve_pagerank_exact(net, {});
  CHECK(linf(exact.values, expected) < 1e-14);
  const auto iter = weighted_pagerank(net, tight(0.85));
  CHECK(iter.convergence.converged);
  CHECK(linf(iter.scores.values, expected) < 1e-12);
  CHECK(iter.scores.lambda == 0.85);
}

TEST_CASE("single journal holds all the mass") {
  const auto net = make({j("A")}, {});
  CHECK(weighted_pagerank(net, {}).scores.values == std::vector<double>{1.0});
  CHECK(solve_pagerank_exact(net, {}).values[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("self-absorbing dangling journals keep their mass") {
  testgen::Rng rng(8);
  for (int round = 0; round < 60; ++round) {
    const auto raw = testgen::random_network(rng, testgen::random_shape(rng, 2, 10));
    const auto net = make(raw.journals, raw.edges);
    for (double lambda : {0.5, 0.85}) {
      auto p = tight(lambda);
      p.dangling = DanglingPolicy::SelfAbsorption;
      const auto want = oracle::pagerank(raw.journals, raw.edges, lambda, oracle::Dangling::Keep);
      CHECK(linf(weighted_pagerank(net, p).scores.values, want) < 1e-10);
      CHECK(linf(solve_pagerank_exact(net, p).values, want) < 1e-12);
    }
  }
}

TEST_CASE("PageRank is stochastic with a floor of (1 - lambda) / N") {
  testgen::Rng rng(21);
  for (int round = 0; round < 200; ++round) {
    const auto raw = testgen::random_network(rng, testgen::random_shape(rng, 1, 40));
    const auto net = make(raw.journals, raw.edges);
    for (double lambda : {0.0, 0.3, 0.85, 0.95}) {
      for (DanglingPolicy policy : {DanglingPolicy::Uniform, DanglingPolicy::SelfAbsorption}) {
        PageRankParams p;
        p.lambda = lambda;
        p.dangling = policy;
        const auto r = weighted_pagerank(net, p);
        double sum = 0.0;
        for (double v : r.scores.values) {
          sum += v;
          CHECK(v >= (1 - lambda) / static_cast<double>(net.size()) - 1e-12);
        }
        CHECK(std::fabs(sum - 1.0) <= 1e-6);
      }
    }
  }
}

TEST_CASE("equal weights reduce weighted PageRank to the unweighted one") {
  testgen::Rng rng(34);
  for (int round = 0; round < 100; ++round) {
    auto shape = testgen::random_shape(rng, 1, 30);
    shape.equal_weights = true;
    const auto raw = testgen::random_network(rng, shape);
    const auto net = make(raw.journals, raw.edges);
    const auto w = weighted_pagerank(net, {}).scores.values;
    const auto u = pagerank_unweighted(net, {}).scores.values;
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::fabs(w[i] - u[i]) <= 1e-10);
    CHECK(linf(u, oracle::pagerank(raw.journals, raw.edges, 0.85, oracle::Dangling::Uniform, false)) < 1e-8);
  }
}

TEST_CASE("non-convergence is reported, not hidden") {
  const auto net = make({j("A"), j("B"), j("C")}, {{"A", "B", 1}, {"B", "C", 1}});
  PageRankParams p;
  p.max_iterations = 2;
  const auto r = weighted_pagerank(net, p);
  CHECK_FALSE(r.convergence.converged);
  CHECK(r.convergence.iterations == 2);
  CHECK(r.convergence.final_residual > p.tolerance);
}

TEST_CASE("parameter validation") {
  const auto net = make({j("A")}, {});
  for (double bad : {-0.1, 1.0, 1.5, std::nan("")}) {
    PageRankParams p;
    p.lambda = bad;
    CHECK_THROWS_AS(weighted_pagerank(net, p), std::invalid_argument);
  }
  PageRankParams p;
  p.tolerance = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.max_iterations = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  testgen::Rng rng(2);
  const auto big = testgen::random_network(rng, {65, 0.1, 3, false, false, 0});
  CHECK_THROWS_AS(solve_pagerank_exact(make(big.journals, big.edges), {}), std::invalid_argument);
}

TEST_CASE("y_factor multiplies IF and PR_w") {
  MetricVector impact{MetricName::ImpactFactor, {"JAMA", "NATURE", "X"}, {21.46, 30.98, 0.0}, 42, {}};
  MetricVector prw{MetricName::WeightedPageRank, {"JAMA", "NATURE", "X"}, {3.96e-3, 16.78e-3, 0.5}, 42, 0.85};
  const auto y = y_factor(impact, prw);
  CHECK(y.name == MetricName::YFactor);
  CHECK(y.at("NATURE") == 30.98 * 16.78e-3);
  CHECK(y.at("JAMA") == doctest::Approx(0.08498).epsilon(1e-4));
  CHECK(y.at("X") == 0.0);
  CHECK(y.lambda == 0.85);

  auto other = prw;
  other.fingerprint = 43;
  CHECK_THROWS_AS(y_factor(impact, other), MismatchError);
  other = prw;
  other.ids[2] = "Y";
  CHECK_THROWS_AS(y_factor(impact, other), MismatchError);
}

TEST_CASE("metric CSV round trip") {
  testgen::Rng rng(4);
  const auto raw = testgen::random_network(rng, {12, 0.3, 10, false, false, 0.2});
  const auto net = make(raw.journals, raw.edges);
  for (const auto& v : {impact_factor(net), weighted_pagerank(net, {}).scores}) {
    std::stringstream io;
    write_metric_csv(io, v);
    const auto back = read_metric_csv(io);
    CHECK(back.name == v.name);
    CHECK(back.ids == v.ids);
    CHECK(back.values == v.values);
    CHECK(back.fingerprint == v.fingerprint);
    CHECK(back.lambda == v.lambda);
  }
  std::istringstream unsorted("# metric=IF lambda=na fingerprint=0000000000000001\nid,value\nB,1\nA,2\n");
  CHECK_THROWS_AS(read_metric_csv(unsorted), ParseError);
}
