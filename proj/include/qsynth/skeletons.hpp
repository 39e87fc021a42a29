#pragma once

// Skeleton generators. Full connectivity uses the circle-method
// 1-factorization of K_n so that every pairing recurs with maximal spacing;
// constrained topologies (star, line, arbitrary coupling graphs) cycle
// through matchings of the available edges with SupportOnly dressing.
//
// Depth accounting: required_layers(n) is the slot-layer count l with
// (2l + 1) n >= 4^n - 1, i.e. l = ceil((4^n - 1 - n) / (2n)). The smallest
// adequate depth for constrained generators has no closed form here; see
// required_layers_constrained in params.hpp, which searches with the
// numeric effective-parameter count.

#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <vector>

#include "qsynth/circuit.hpp"
#include "qsynth/rng.hpp"

namespace qsynth {

// n-1 perfect matchings of K_n partitioning the edge set (n even); round
// robin: vertex n-1 is fixed, the others rotate.
inline std::vector<CnotLayer> one_factorization(int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument(
        "one_factorization: needs an even number of qubits; use the "
        "constrained generators (star/line/graph) for odd counts");
  std::vector<CnotLayer> rounds;
  const int m = n - 1;
  for (int r = 0; r < m; ++r) {
    CnotLayer layer;
    layer.pairs.push_back(CnotPair{r, m});
    for (int k = 1; k < n / 2; ++k) {
      const int a = (r + k) % m;
      const int b = ((r - k) % m + m) % m;
      layer.pairs.push_back(CnotPair{std::min(a, b), std::max(a, b)});
    }
    rounds.push_back(std::move(layer));
  }
  return rounds;
}

inline int required_layers(int n) {
  if (n < 1) throw std::invalid_argument("required_layers: n must be >= 1");
  const std::int64_t p = (std::int64_t{1} << (2 * n)) - 1 - n;
  return static_cast<int>((p + 2 * n - 1) / (2 * n));
}

// Full-dressing skeleton with s_layers slot layers (s_layers - 1 CNOT
// layers), cycling the 1-factorization matchings in generation order.
inline Skeleton full_skeleton(int n, int s_layers) {
  if (s_layers < 1)
    throw std::invalid_argument("full_skeleton: s_layers must be >= 1");
  const std::vector<CnotLayer> rounds = one_factorization(n);
  std::vector<CnotLayer> layers;
  layers.reserve(s_layers - 1);
  for (int k = 0; k + 1 < s_layers; ++k) layers.push_back(rounds[k % rounds.size()]);
  return Skeleton(n, std::move(layers), Dressing::Full);
}

inline Skeleton full_skeleton(int n) { return full_skeleton(n, required_layers(n)); }

// Star coupling: every CNOT pairs the center with one leaf, cycling the
// leaves in the given order; one CNOT per layer, SupportOnly dressing.
// center and leaves must relabel the qubits as 0..n-1 for some n.
inline Skeleton star_skeleton(int center, const std::vector<int>& leaves,
                              int cnot_layers) {
  if (leaves.empty())
    throw std::invalid_argument("star_skeleton: needs at least one leaf");
  const int n = static_cast<int>(leaves.size()) + 1;
  std::set<int> labels(leaves.begin(), leaves.end());
  labels.insert(center);
  if (static_cast<int>(labels.size()) != n || *labels.begin() != 0 ||
      *labels.rbegin() != n - 1)
    throw std::invalid_argument(
        "star_skeleton: center and leaves must be distinct labels 0..n-1");
  std::vector<CnotLayer> layers;
  for (int k = 0; k < cnot_layers; ++k)
    layers.push_back(CnotLayer{{CnotPair{center, leaves[k % leaves.size()]}}});
  return Skeleton(n, std::move(layers), Dressing::SupportOnly);
}

// Nearest-neighbour chain: layers alternate between the even-offset pairs
// {(0,1),(2,3),...} and the odd-offset pairs {(1,2),(3,4),...}. For n = 2
// both sets collapse to the single pair (0,1).
inline Skeleton line_skeleton(int n, int cnot_layers) {
  if (n < 2) throw std::invalid_argument("line_skeleton: n must be >= 2");
  CnotLayer even, odd;
  for (int i = 0; i + 1 < n; i += 2) even.pairs.push_back(CnotPair{i, i + 1});
  for (int i = 1; i + 1 < n; i += 2) odd.pairs.push_back(CnotPair{i, i + 1});
  if (odd.pairs.empty()) odd = even;
  std::vector<CnotLayer> layers;
  for (int k = 0; k < cnot_layers; ++k) layers.push_back(k % 2 == 0 ? even : odd);
  return Skeleton(n, std::move(layers), Dressing::SupportOnly);
}

// One CNOT per layer on a fixed list of pairs, SupportOnly dressing.
inline Skeleton sequential_skeleton(int n, const std::vector<CnotPair>& pairs) {
  std::vector<CnotLayer> layers;
  layers.reserve(pairs.size());
  for (const CnotPair& p : pairs) layers.push_back(CnotLayer{{p}});
  return Skeleton(n, std::move(layers), Dressing::SupportOnly);
}

inline std::vector<CnotPair> all_pairs(int n) {
  std::vector<CnotPair> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) out.push_back(CnotPair{a, b});
  return out;
}

// n_cnots layers, each one CNOT on a uniformly random unordered pair.
inline Skeleton sequential_random_skeleton(int n, int n_cnots, Rng& rng) {
  if (n < 2)
    throw std::invalid_argument("sequential_random_skeleton: n must be >= 2");
  const std::vector<CnotPair> pairs = all_pairs(n);
  std::vector<CnotPair> chosen(n_cnots);
  for (int k = 0; k < n_cnots; ++k)
    chosen[k] = pairs[rng.uniform_int(pairs.size())];
  return sequential_skeleton(n, chosen);
}

struct CouplingGraph {
  int n_qubits = 0;
  std::vector<CnotPair> edges;  // unordered pairs, no self-loops
};

// Greedy partition of the edge set into matchings, cycled for the requested
// depth; SupportOnly dressing. Star and line are the special cases with one
// and two matchings of their edge sets.
inline Skeleton graph_skeleton(const CouplingGraph& g, int cnot_layers) {
  if (g.edges.empty())
    throw std::invalid_argument("graph_skeleton: graph has no edges");
  for (const CnotPair& e : g.edges)
    if (e.control == e.target || e.control < 0 || e.target < 0 ||
        e.control >= g.n_qubits || e.target >= g.n_qubits)
      throw std::invalid_argument("graph_skeleton: bad edge");
  std::vector<CnotPair> remaining = g.edges;
  std::vector<CnotLayer> matchings;
  while (!remaining.empty()) {
    CnotLayer layer;
    std::set<int> used;
    std::vector<CnotPair> next;
    for (const CnotPair& e : remaining) {
      if (used.count(e.control) || used.count(e.target)) {
        next.push_back(e);
      } else {
        layer.pairs.push_back(e);
        used.insert(e.control);
        used.insert(e.target);
      }
    }
    matchings.push_back(std::move(layer));
    remaining = std::move(next);
  }
  std::vector<CnotLayer> layers;
  for (int k = 0; k < cnot_layers; ++k)
    layers.push_back(matchings[k % matchings.size()]);
  return Skeleton(g.n_qubits, std::move(layers), Dressing::SupportOnly);
}

}  // namespace qsynth
