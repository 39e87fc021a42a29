#pragma once

// Circuit data model: skeletons (CNOT layers plus single-qubit slot layers),
// parameter assignments, evaluation to a unitary, and canonical
// normalization. A circuit is
//
//     U = S_l T_{l-1} ... S_2 T_1 S_1
//
// applied right to left: slot layer S_1 acts first, then CNOT layer T_1, and
// so on. Slots are ordered layer-major, then qubit-ascending; that order is
// the contract for ParamAssignment indices and serialization.

#include <Eigen/Dense>
#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsynth/euler.hpp"
#include "qsynth/linalg.hpp"

namespace qsynth {

enum class Dressing { Full, SupportOnly };

struct CnotPair {
  int control = 0;
  int target = 0;
  friend bool operator==(const CnotPair&, const CnotPair&) = default;
};

struct CnotLayer {
  std::vector<CnotPair> pairs;
  friend bool operator==(const CnotLayer&, const CnotLayer&) = default;
};

struct Slot {
  int s_layer = 0;
  int qubit = 0;
  friend bool operator==(const Slot&, const Slot&) = default;
};

class Skeleton {
 public:
  Skeleton() = default;

  Skeleton(int n_qubits, std::vector<CnotLayer> cnot_layers, Dressing dressing)
      : n_(n_qubits), layers_(std::move(cnot_layers)), dressing_(dressing) {
    validate();
    build_slots();
  }

  int n_qubits() const { return n_; }
  Eigen::Index dim() const { return Eigen::Index{1} << n_; }
  const std::vector<CnotLayer>& cnot_layers() const { return layers_; }
  Dressing dressing() const { return dressing_; }

  // Number of single-qubit slot layers. Full dressing interleaves one per
  // CNOT layer plus a closing layer; SupportOnly has an opening and a closing
  // all-qubit layer with support-sized layers after each CNOT layer.
  int s_layer_count() const {
    const int l = static_cast<int>(layers_.size());
    return dressing_ == Dressing::Full ? l + 1 : l + 2;
  }

  std::vector<int> s_layer_qubits(int k) const {
    if (k < 0 || k >= s_layer_count())
      throw std::out_of_range("Skeleton: slot layer index out of range");
    if (dressing_ == Dressing::Full || k == 0 || k == s_layer_count() - 1) {
      std::vector<int> all(n_);
      for (int q = 0; q < n_; ++q) all[q] = q;
      return all;
    }
    return support(layers_[k - 1]);
  }

  const std::vector<Slot>& slots() const { return slots_; }
  int slot_count() const { return static_cast<int>(slots_.size()); }

  // index into slots() or -1 when the layer has no slot on that qubit
  int slot_index(int s_layer, int qubit) const {
    for (int i = layer_start_[s_layer]; i < layer_start_[s_layer + 1]; ++i)
      if (slots_[i].qubit == qubit) return i;
    return -1;
  }

  friend bool operator==(const Skeleton& a, const Skeleton& b) {
    return a.n_ == b.n_ && a.layers_ == b.layers_ && a.dressing_ == b.dressing_;
  }

 private:
  std::vector<int> support(const CnotLayer& layer) const {
    std::set<int> s;
    for (const CnotPair& p : layer.pairs) {
      s.insert(p.control);
      s.insert(p.target);
    }
    return {s.begin(), s.end()};
  }

  void validate() const {
    if (n_ < 1) throw std::invalid_argument("Skeleton: n_qubits must be >= 1");
    for (const CnotLayer& layer : layers_) {
      std::set<int> seen;
      for (const CnotPair& p : layer.pairs) {
        if (p.control == p.target)
          throw std::invalid_argument("Skeleton: control equals target");
        if (p.control < 0 || p.control >= n_ || p.target < 0 || p.target >= n_)
          throw std::invalid_argument("Skeleton: qubit index out of range");
        if (!seen.insert(p.control).second || !seen.insert(p.target).second)
          throw std::invalid_argument("Skeleton: overlapping pairs in one layer");
      }
    }
  }

  void build_slots() {
    slots_.clear();
    layer_start_.clear();
    for (int k = 0; k < s_layer_count(); ++k) {
      layer_start_.push_back(static_cast<int>(slots_.size()));
      for (int q : s_layer_qubits(k)) slots_.push_back(Slot{k, q});
    }
    layer_start_.push_back(static_cast<int>(slots_.size()));
  }

  int n_ = 1;
  std::vector<CnotLayer> layers_;
  Dressing dressing_ = Dressing::Full;
  std::vector<Slot> slots_;
  std::vector<int> layer_start_;
};

using ParamAssignment = std::vector<EulerTriple>;

inline int slot_count(const Skeleton& s) { return s.slot_count(); }

inline void check_param_length(const Skeleton& s, const ParamAssignment& p) {
  if (static_cast<int>(p.size()) != s.slot_count())
    throw std::invalid_argument("parameter count " + std::to_string(p.size()) +
                                " does not match skeleton slot count " +
                                std::to_string(s.slot_count()));
}

// m <- T m where T is the layer's CNOT permutation (self-inverse)
inline void apply_cnot_layer_left(ComplexMatrix& m, const CnotLayer& layer,
                                  int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  for (const CnotPair& p : layer.pairs) {
    const Eigen::Index wc = Eigen::Index{1} << (n_qubits - 1 - p.control);
    const Eigen::Index wt = Eigen::Index{1} << (n_qubits - 1 - p.target);
    for (Eigen::Index i = 0; i < dim; ++i)
      if ((i & wc) && !(i & wt)) m.row(i).swap(m.row(i | wt));
  }
}

// m <- m T
inline void apply_cnot_layer_right(ComplexMatrix& m, const CnotLayer& layer,
                                   int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  for (const CnotPair& p : layer.pairs) {
    const Eigen::Index wc = Eigen::Index{1} << (n_qubits - 1 - p.control);
    const Eigen::Index wt = Eigen::Index{1} << (n_qubits - 1 - p.target);
    for (Eigen::Index j = 0; j < dim; ++j)
      if ((j & wc) && !(j & wt)) m.col(j).swap(m.col(j | wt));
  }
}

inline ComplexMatrix evaluate(const Skeleton& s, const ParamAssignment& p) {
  check_param_length(s, p);
  const int n = s.n_qubits();
  ComplexMatrix u = identity(s.dim());
  int ai = 0;
  const int n_cnot = static_cast<int>(s.cnot_layers().size());
  for (int k = 0; k < s.s_layer_count(); ++k) {
    for (int q : s.s_layer_qubits(k))
      apply_single_qubit_left(u, euler_to_su2(p[ai++]), q, n);
    if (k < n_cnot) apply_cnot_layer_left(u, s.cnot_layers()[k], n);
  }
  return u;
}

// Flattened element sequence in application order: the slots of each slot
// layer (qubit-ascending) followed by that layer's CNOT layer. The circuit
// unitary is the left-to-right application of the chain.
struct Element {
  bool is_slot = true;
  int qubit = -1;        // slot only
  int angle_index = -1;  // slot only
  int cnot_layer = -1;   // CNOT element only
};

inline std::vector<Element> element_chain(const Skeleton& s) {
  std::vector<Element> chain;
  int ai = 0;
  const int n_cnot = static_cast<int>(s.cnot_layers().size());
  for (int k = 0; k < s.s_layer_count(); ++k) {
    for (int q : s.s_layer_qubits(k)) {
      Element e;
      e.is_slot = true;
      e.qubit = q;
      e.angle_index = ai++;
      chain.push_back(e);
    }
    if (k < n_cnot) {
      Element e;
      e.is_slot = false;
      e.cnot_layer = k;
      chain.push_back(e);
    }
  }
  return chain;
}

namespace detail {

enum class CnotRole { Control, Target, Idle };

inline CnotRole role_in_layer(const CnotLayer& layer, int qubit) {
  for (const CnotPair& p : layer.pairs) {
    if (p.control == qubit) return CnotRole::Control;
    if (p.target == qubit) return CnotRole::Target;
  }
  return CnotRole::Idle;
}

}  // namespace detail

// Canonical form for Full-dressing circuits: in every slot layer except the
// last, the rotation applied last on each qubit -- the trailing Rz of a
// Rz Ry Rx decomposition on control and idle qubits, the trailing Rx of a
// Rx Ry Rx decomposition on target qubits -- commutes with the CNOT layer
// that follows, so it is split off and merged into the next layer's gate on
// the same qubit. Each non-final slot is left with two free angles and the
// circuit unitary is unchanged.
inline ParamAssignment normalize(const Skeleton& s, const ParamAssignment& p) {
  if (s.dressing() != Dressing::Full)
    throw std::invalid_argument("normalize: defined for Full dressing only");
  check_param_length(s, p);
  const int layers = s.s_layer_count();
  const int n = s.n_qubits();

  std::vector<Eigen::Matrix2cd> gates(p.size());
  for (size_t i = 0; i < p.size(); ++i) gates[i] = euler_to_su2(p[i]);

  ParamAssignment out(p.size());
  for (int k = 0; k < layers - 1; ++k) {
    const CnotLayer& cnots = s.cnot_layers()[k];
    for (int q = 0; q < n; ++q) {
      const int idx = s.slot_index(k, q);
      const int next = s.slot_index(k + 1, q);
      const Eigen::Matrix2cd v = gates[idx];
      if (detail::role_in_layer(cnots, q) == detail::CnotRole::Target) {
        const double push = su2_to_xyx(v)[2];
        gates[idx] = rot_x(-push) * v;
        gates[next] = gates[next] * rot_x(push);
      } else {
        const double push = su2_to_zyx(v)[2];
        gates[idx] = rot_z(-push) * v;
        gates[next] = gates[next] * rot_z(push);
      }
      out[idx] = su2_to_euler(gates[idx]);
    }
  }
  for (int q = 0; q < n; ++q) {
    const int idx = s.slot_index(layers - 1, q);
    out[idx] = su2_to_euler(gates[idx]);
  }
  return out;
}

// Trailing angle of the slot's canonical decomposition (zyx on control and
// idle qubits, xyx on targets); zero for every non-final slot of a
// normalized assignment.
inline double normalized_trailing_angle(const Skeleton& s,
                                        const ParamAssignment& p, int s_layer,
                                        int qubit) {
  const Eigen::Matrix2cd v = euler_to_su2(p[s.slot_index(s_layer, qubit)]);
  if (s_layer < s.s_layer_count() - 1 &&
      detail::role_in_layer(s.cnot_layers()[s_layer], qubit) ==
          detail::CnotRole::Target)
    return su2_to_xyx(v)[2];
  return su2_to_zyx(v)[2];
}

}  // namespace qsynth
