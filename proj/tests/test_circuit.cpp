#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "qsynth/circuit.hpp"
#include "qsynth/io.hpp"
#include "qsynth/optimizer.hpp"
#include "qsynth/qasm.hpp"
#include "qsynth/skeletons.hpp"

using namespace qsynth;

namespace {

// fully independent dense evaluation: kron-built slot layers, permutation
// matrices for CNOT layers, plain matrix products
ComplexMatrix naive_evaluate(const Skeleton& s, const ParamAssignment& p) {
  const int n = s.n_qubits();
  const Eigen::Index dim = s.dim();
  ComplexMatrix u = identity(dim);
  int ai = 0;
  for (int k = 0; k < s.s_layer_count(); ++k) {
    std::vector<Eigen::Matrix2cd> gates(n, Eigen::Matrix2cd::Identity());
    for (int q : s.s_layer_qubits(k)) gates[q] = euler_to_su2(p[ai++]);
    ComplexMatrix layer = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) layer = kron(layer, ComplexMatrix(gates[q]));
    u = layer * u;
    if (k < static_cast<int>(s.cnot_layers().size())) {
      ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::Index j = i;
        for (const CnotPair& pr : s.cnot_layers()[k].pairs) {
          const Eigen::Index wc = Eigen::Index{1} << (n - 1 - pr.control);
          const Eigen::Index wt = Eigen::Index{1} << (n - 1 - pr.target);
          if (j & wc) j ^= wt;
        }
        t(j, i) = 1.0;
      }
      u = t * u;
    }
  }
  return u;
}

ParamAssignment random_params(const Skeleton& s, Rng& rng) {
  ParamAssignment p(s.slot_count());
  for (EulerTriple& t : p) {
    t.theta1 = rng.uniform(0, 2 * std::numbers::pi);
    t.theta2 = rng.uniform(0, 2 * std::numbers::pi);
    t.theta3 = rng.uniform(0, 2 * std::numbers::pi);
  }
  return p;
}

double phase_insensitive_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  // N - |Tr(A B^dag)| vanishes exactly at equality up to phase
  return static_cast<double>(a.rows()) -
         std::abs(a.cwiseProduct(b.conjugate()).sum());
}

}  // namespace

TEST_CASE("skeleton invariants are enforced") {
  REQUIRE_THROWS_AS(Skeleton(2, {CnotLayer{{CnotPair{0, 0}}}}, Dressing::Full),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(Skeleton(2, {CnotLayer{{CnotPair{0, 2}}}}, Dressing::Full),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(
      Skeleton(3, {CnotLayer{{CnotPair{0, 1}, CnotPair{1, 2}}}}, Dressing::Full),
      std::invalid_argument);
}

TEST_CASE("slot counts") {
  REQUIRE(full_skeleton(2, 4).slot_count() == 8);
  REQUIRE(full_skeleton(4, 32).slot_count() == 128);
  // star over 4 qubits, 3 CNOT layers, SupportOnly: 4 + 3*2 + 4
  REQUIRE(star_skeleton(0, {1, 2, 3}, 3).slot_count() == 14);
  // zero CNOT layers
  REQUIRE(Skeleton(3, {}, Dressing::Full).slot_count() == 3);
  REQUIRE(Skeleton(3, {}, Dressing::SupportOnly).slot_count() == 6);
}

TEST_CASE("evaluate closed forms") {
  const Skeleton trivial(2, {}, Dressing::Full);
  REQUIRE((evaluate(trivial, ParamAssignment(2)) - identity(4)).cwiseAbs().maxCoeff() == 0.0);

  const Skeleton one_cnot(2, {CnotLayer{{CnotPair{0, 1}}}}, Dressing::Full);
  ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(3, 2) = cnot(2, 3) = 1.0;
  REQUIRE((evaluate(one_cnot, ParamAssignment(4)) - cnot).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evaluate agrees with the naive dense product oracle") {
  Rng rng(21);
  const auto check = [&](const Skeleton& s) {
    const ParamAssignment p = random_params(s, rng);
    const ComplexMatrix fast = evaluate(s, p);
    REQUIRE(unitarity_error(fast) <= 1e-12);
    REQUIRE((fast - naive_evaluate(s, p)).cwiseAbs().maxCoeff() <= 1e-12);
  };
  check(full_skeleton(2, 4));
  check(Skeleton(3,
                 {CnotLayer{{CnotPair{0, 1}}}, CnotLayer{{CnotPair{1, 2}}},
                  CnotLayer{{CnotPair{0, 2}}}, CnotLayer{{CnotPair{2, 1}}}},
                 Dressing::Full));
  check(sequential_skeleton(3, {CnotPair{0, 1}, CnotPair{1, 2}, CnotPair{0, 2}}));
  check(star_skeleton(0, {1, 2}, 4));
  check(line_skeleton(3, 5));
  for (int rep = 0; rep < 10; ++rep) {
    Rng skel_rng(100 + rep);
    check(sequential_random_skeleton(2 + static_cast<int>(rng.uniform_int(2)), 6, skel_rng));
  }
}

TEST_CASE("normalize preserves the circuit and zeroes trailing angles") {
  const Skeleton s = full_skeleton(2, 4);
  const int n = s.n_qubits();
  const int layers = s.s_layer_count();

  SECTION("identity params are a fixed point") {
    const ParamAssignment zeros(s.slot_count());
    const ParamAssignment out = normalize(s, zeros);
    for (const EulerTriple& t : out) {
      REQUIRE(t.theta1 == Catch::Approx(0.0).margin(1e-12));
      REQUIRE(t.theta2 == Catch::Approx(0.0).margin(1e-12));
      REQUIRE(t.theta3 == Catch::Approx(0.0).margin(1e-12));
    }
  }

  SECTION("random circuits") {
    Rng rng(22);
    for (int rep = 0; rep < 20; ++rep) {
      const ParamAssignment p = random_params(s, rng);
      const ParamAssignment q = normalize(s, p);
      REQUIRE(phase_insensitive_distance(evaluate(s, p), evaluate(s, q)) <= 1e-9);

      int zeroed = 0;
      for (int k = 0; k < layers; ++k)
        for (int qq = 0; qq < n; ++qq) {
          const double trailing = normalized_trailing_angle(s, q, k, qq);
          if (k < layers - 1) {
            REQUIRE(std::abs(trailing) <= 1e-9);
            ++zeroed;
          }
        }
      REQUIRE(zeroed == n * (layers - 1));
      // final layer keeps all three angles: generically nonzero trailing
      double final_trailing = 0;
      for (int qq = 0; qq < n; ++qq)
        final_trailing += std::abs(normalized_trailing_angle(s, q, layers - 1, qq));
      REQUIRE(final_trailing > 1e-6);
    }
  }

  SECTION("support dressing is rejected") {
    const Skeleton sup = star_skeleton(0, {1}, 2);
    REQUIRE_THROWS_AS(normalize(sup, ParamAssignment(sup.slot_count())),
                      std::invalid_argument);
  }
}

TEST_CASE("cnot direction is irrelevant for reachability") {
  // same target, both orientations of every CNOT; both synthesize to 1e-8
  Rng trng(23);
  const ComplexMatrix target = haar_random_unitary(2, trng);
  for (const int flip : {0, 1}) {
    std::vector<CnotLayer> layers(3);
    for (auto& l : layers)
      l.pairs.push_back(flip ? CnotPair{1, 0} : CnotPair{0, 1});
    const Skeleton s(2, layers, Dressing::Full);
    OptimizerConfig cfg;
    cfg.rng_seed = 9;
    const SynthesisResult r = synthesize(target, s, cfg);
    REQUIRE(r.status == Status::Converged);
    REQUIRE(r.final_cost <= 1e-8);
  }
}

TEST_CASE("qasm export") {
  SECTION("bare cnot") {
    const Skeleton s(2, {CnotLayer{{CnotPair{0, 1}}}}, Dressing::Full);
    const std::string text = export_qasm(s, ParamAssignment(4));
    REQUIRE(text ==
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncx q[0],q[1];\n");
  }
  SECTION("rotation count and determinism") {
    Rng rng(24);
    const Skeleton s = full_skeleton(2, 4);
    const ParamAssignment p = random_params(s, rng);
    const std::string text = export_qasm(s, p);
    size_t rz = 0, ry = 0, cx = 0, pos = 0;
    std::istringstream in(text);
    std::string line;
    std::vector<char> kinds;
    while (std::getline(in, line)) {
      if (line.rfind("rz", 0) == 0) ++rz;
      if (line.rfind("ry", 0) == 0) ++ry;
      if (line.rfind("cx", 0) == 0) {
        ++cx;
        kinds.push_back('c');
      }
    }
    (void)pos;
    REQUIRE(rz == 16);  // 8 slots x 2 z rotations
    REQUIRE(ry == 8);
    REQUIRE(cx == 3);
    REQUIRE(text == export_qasm(s, p));  // byte-stable
  }
}

TEST_CASE("circuit json round trip") {
  Rng rng(25);
  const Skeleton s = full_skeleton(4, 4);
  const ParamAssignment p = random_params(s, rng);
  const nlohmann::json j = circuit_to_json(s, p);
  const auto [s2, p2] = circuit_from_json(j);
  REQUIRE(s2 == s);
  REQUIRE(p2.size() == p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    REQUIRE(p2[i].theta1 == p[i].theta1);  // bit-exact
    REQUIRE(p2[i].theta2 == p[i].theta2);
    REQUIRE(p2[i].theta3 == p[i].theta3);
  }
  // serialized text round trips too (serialize -> parse -> serialize)
  const nlohmann::json reparsed = nlohmann::json::parse(j.dump());
  REQUIRE(circuit_to_json(circuit_from_json(reparsed).first,
                          circuit_from_json(reparsed).second) == j);
}

TEST_CASE("circuit json rejects bad documents") {
  const Skeleton s = full_skeleton(2, 2);
  nlohmann::json good = circuit_to_json(s, ParamAssignment(s.slot_count()));

  nlohmann::json bad_version = good;
  bad_version["version"] = 2;
  REQUIRE_THROWS_WITH(circuit_from_json(bad_version),
                      Catch::Matchers::ContainsSubstring("version"));

  nlohmann::json missing = good;
  missing.erase("angles");
  REQUIRE_THROWS_WITH(circuit_from_json(missing),
                      Catch::Matchers::ContainsSubstring("angles"));

  nlohmann::json bad_pair = good;
  bad_pair["cnot_layers"][0][0] = nlohmann::json::array({0, 0});
  REQUIRE_THROWS_WITH(circuit_from_json(bad_pair),
                      Catch::Matchers::ContainsSubstring("cnot_layers"));

  nlohmann::json short_angles = good;
  short_angles["angles"].erase(0);
  REQUIRE_THROWS_WITH(circuit_from_json(short_angles),
                      Catch::Matchers::ContainsSubstring("angles"));
}

TEST_CASE("matrix json round trip") {
  Rng rng(26);
  const ComplexMatrix u = haar_random_unitary(2, rng);
  const ComplexMatrix v = matrix_from_json(matrix_to_json(u));
  REQUIRE((u - v).cwiseAbs().maxCoeff() == 0.0);
  nlohmann::json j = matrix_to_json(u);
  j.erase("im");
  REQUIRE_THROWS_WITH(matrix_from_json(j), Catch::Matchers::ContainsSubstring("im"));
}
