#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "qsynth/skeletons.hpp"

using namespace qsynth;

namespace {

std::set<std::pair<int, int>> edge_set(const std::vector<CnotLayer>& layers) {
  std::set<std::pair<int, int>> edges;
  for (const CnotLayer& l : layers)
    for (const CnotPair& p : l.pairs)
      edges.insert({std::min(p.control, p.target), std::max(p.control, p.target)});
  return edges;
}

}  // namespace

TEST_CASE("one_factorization partitions the complete graph") {
  for (const int n : {2, 4, 6, 8, 10}) {
    const std::vector<CnotLayer> rounds = one_factorization(n);
    REQUIRE(static_cast<int>(rounds.size()) == n - 1);
    std::set<std::pair<int, int>> seen;
    for (const CnotLayer& layer : rounds) {
      REQUIRE(static_cast<int>(layer.pairs.size()) == n / 2);
      std::set<int> covered;
      for (const CnotPair& p : layer.pairs) {
        covered.insert(p.control);
        covered.insert(p.target);
        const auto edge = std::make_pair(std::min(p.control, p.target),
                                         std::max(p.control, p.target));
        REQUIRE(seen.insert(edge).second);  // each edge exactly once
      }
      REQUIRE(static_cast<int>(covered.size()) == n);  // perfect matching
    }
    REQUIRE(static_cast<int>(seen.size()) == n * (n - 1) / 2);
  }
  REQUIRE_THROWS_WITH(one_factorization(3),
                      Catch::Matchers::ContainsSubstring("constrained"));
  REQUIRE_THROWS_AS(one_factorization(5), std::invalid_argument);
}

TEST_CASE("required_layers closed form") {
  REQUIRE(required_layers(1) == 1);
  REQUIRE(required_layers(2) == 4);
  REQUIRE(required_layers(3) == 10);
  REQUIRE(required_layers(4) == 32);
  REQUIRE(required_layers(6) == 341);
}

TEST_CASE("full skeletons") {
  const Skeleton s2 = full_skeleton(2);
  REQUIRE(s2.s_layer_count() == 4);
  REQUIRE(s2.cnot_layers().size() == 3);

  const Skeleton s4 = full_skeleton(4);
  REQUIRE(s4.s_layer_count() == 32);
  REQUIRE(s4.cnot_layers().size() == 31);

  const Skeleton s6 = full_skeleton(6);
  REQUIRE(s6.s_layer_count() == 341);

  // adjacent CNOT layers never repeat a matching for n >= 4
  for (const Skeleton* s : {&s4, &s6})
    for (size_t k = 0; k + 1 < s->cnot_layers().size(); ++k)
      REQUIRE(!(s->cnot_layers()[k] == s->cnot_layers()[k + 1]));

  // every layer is one of the 1-factorization matchings, cycled in order
  const std::vector<CnotLayer> rounds = one_factorization(4);
  for (size_t k = 0; k < s4.cnot_layers().size(); ++k)
    REQUIRE(s4.cnot_layers()[k] == rounds[k % rounds.size()]);
}

TEST_CASE("star skeleton") {
  // leaves cycle in the order given
  const Skeleton s = star_skeleton(1, {0, 2, 3}, 5);
  REQUIRE(s.n_qubits() == 4);
  const std::vector<int> expected_targets{0, 2, 3, 0, 2};
  for (int k = 0; k < 5; ++k) {
    REQUIRE(s.cnot_layers()[k].pairs.size() == 1);
    REQUIRE(s.cnot_layers()[k].pairs[0].control == 1);
    REQUIRE(s.cnot_layers()[k].pairs[0].target == expected_targets[k]);
  }
  // zero layers: only the opening and closing slot layers
  const Skeleton s0 = star_skeleton(0, {1, 2, 3}, 0);
  REQUIRE(s0.slot_count() == 8);
  REQUIRE(s0.s_layer_count() == 2);
  REQUIRE_THROWS_AS(star_skeleton(0, {2, 3}, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(star_skeleton(0, {}, 1), std::invalid_argument);
}

TEST_CASE("line skeleton") {
  const Skeleton s = line_skeleton(4, 2);
  REQUIRE(s.cnot_layers()[0].pairs ==
          std::vector<CnotPair>{CnotPair{0, 1}, CnotPair{2, 3}});
  REQUIRE(s.cnot_layers()[1].pairs == std::vector<CnotPair>{CnotPair{1, 2}});

  // n = 2 falls back to the fully connected pattern
  const Skeleton s2 = line_skeleton(2, 3);
  for (int k = 0; k < 3; ++k)
    REQUIRE(s2.cnot_layers()[k].pairs == std::vector<CnotPair>{CnotPair{0, 1}});

  const Skeleton s5 = line_skeleton(5, 2);
  REQUIRE(s5.cnot_layers()[0].pairs ==
          std::vector<CnotPair>{CnotPair{0, 1}, CnotPair{2, 3}});
  REQUIRE(s5.cnot_layers()[1].pairs ==
          std::vector<CnotPair>{CnotPair{1, 2}, CnotPair{3, 4}});
}

TEST_CASE("sequential random skeleton") {
  Rng a(5), b(5);
  const Skeleton sa = sequential_random_skeleton(3, 14, a);
  const Skeleton sb = sequential_random_skeleton(3, 14, b);
  REQUIRE(sa == sb);  // fixed seed reproduces
  REQUIRE(sa.cnot_layers().size() == 14);
  for (const CnotLayer& l : sa.cnot_layers()) REQUIRE(l.pairs.size() == 1);
  REQUIRE(sa.dressing() == Dressing::SupportOnly);

  // pair frequencies uniform within 3 sigma over 30,000 draws
  Rng rng(6);
  const Skeleton big = sequential_random_skeleton(3, 30000, rng);
  std::map<std::pair<int, int>, int> counts;
  for (const CnotLayer& l : big.cnot_layers()) {
    const CnotPair& p = l.pairs[0];
    counts[{std::min(p.control, p.target), std::max(p.control, p.target)}]++;
  }
  REQUIRE(counts.size() == 3);
  const double expected = 10000.0;
  const double sigma = std::sqrt(30000.0 * (1.0 / 3.0) * (2.0 / 3.0));
  for (const auto& [pair, c] : counts)
    REQUIRE(std::abs(c - expected) <= 3.0 * sigma);
}

TEST_CASE("graph skeleton covers the edge set with matchings") {
  CouplingGraph g;
  g.n_qubits = 4;
  g.edges = {CnotPair{0, 1}, CnotPair{1, 2}, CnotPair{2, 3}};
  const Skeleton s = graph_skeleton(g, 4);
  REQUIRE(edge_set(s.cnot_layers()) ==
          std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}});
  // layers are matchings
  for (const CnotLayer& l : s.cnot_layers()) {
    std::set<int> used;
    for (const CnotPair& p : l.pairs) {
      REQUIRE(used.insert(p.control).second);
      REQUIRE(used.insert(p.target).second);
    }
  }
  REQUIRE_THROWS_AS(graph_skeleton(CouplingGraph{2, {}}, 1), std::invalid_argument);
}
