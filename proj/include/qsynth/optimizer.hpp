#pragma once

// The synthesis engine. Cost is C = N - |Tr(U_goal U_circ^dag)|, zero
// exactly when the circuit matches the target up to a global phase. The
// sweep walks the element chain forward and back once per sweep, keeping
//
//     M = A^dag U_goal B^dag
//
// where B is the product of elements before the cursor and A the product
// after. The trace overlap as a function of the gate G at the cursor slot is
// Tr(G^dag E) with E the partial trace of M onto the slot's qubit, so the
// locally optimal update is the polar factor of E (its singular values bound
// |Tr| from above, met exactly by the update, which makes the per-slot cost
// non-increasing). Moving the cursor costs O(4^n) sparse work per element;
// M is rebuilt from scratch once per sweep to stop error drift.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qsynth/circuit.hpp"
#include "qsynth/euler.hpp"
#include "qsynth/linalg.hpp"

namespace qsynth {

enum class Variant { SvdSweep, EulerGradient };
enum class Status { Converged, Plateaued, SweepBudgetExhausted };

struct OptimizerConfig {
  double convergence_threshold = 1e-8;
  int plateau_window = 200;
  double plateau_rel_improvement = 1e-2;
  int max_sweeps = 50000;
  Variant variant = Variant::SvdSweep;
  double learning_rate = 0.05;  // EulerGradient only
  std::uint64_t rng_seed = 0;
};

struct TracePoint {
  int sweep = 0;
  double cost = 0.0;
  double wall_seconds = 0.0;
};

struct SynthesisResult {
  Status status = Status::SweepBudgetExhausted;
  double final_cost = 0.0;
  ParamAssignment params;
  std::vector<TracePoint> trace;
  int sweeps_used = 0;
  std::uint64_t seed = 0;
};

inline double cost(const ComplexMatrix& u_goal, const ComplexMatrix& u_circ) {
  if (u_goal.rows() != u_circ.rows() || u_goal.cols() != u_circ.cols())
    throw std::invalid_argument("cost: dimension mismatch");
  // Tr(U_goal U_circ^dag) = sum_ij U_goal_ij conj(U_circ_ij)
  const Complex tr = u_goal.cwiseProduct(u_circ.conjugate()).sum();
  return static_cast<double>(u_goal.rows()) - std::abs(tr);
}

class SweepEngine {
 public:
  SweepEngine(const Skeleton& s, ComplexMatrix u_goal)
      : skeleton_(&s), u_goal_(std::move(u_goal)), chain_(element_chain(s)) {
    if (u_goal_.rows() != s.dim() || u_goal_.cols() != s.dim())
      throw std::invalid_argument("SweepEngine: target dimension mismatch");
  }

  // One full left-to-right then right-to-left pass. Returns the cost after
  // the final slot update of the pass.
  double sweep(ParamAssignment& p, const OptimizerConfig& cfg) {
    check_param_length(*skeleton_, p);
    rebuild(p);
    const int n_elements = static_cast<int>(chain_.size());
    double c = static_cast<double>(u_goal_.rows());
    for (int j = 0; j < n_elements; ++j) {
      if (chain_[j].is_slot) c = update_slot(p, j, cfg);
      if (j + 1 < n_elements) advance(p, j);
    }
    for (int j = n_elements - 1; j >= 0; --j) {
      if (chain_[j].is_slot) c = update_slot(p, j, cfg);
      if (j > 0) retreat(p, j);
    }
    return c;
  }

  // Environment of the slot under the cursor, E = ptrace(M). The cursor is
  // at element 0 after rebuild(); tests drive advance() directly.
  Eigen::Matrix2cd environment_at_cursor() const {
    const Element& el = chain_[cursor_];
    if (!el.is_slot)
      throw std::logic_error("SweepEngine: cursor is not at a slot");
    return partial_trace_to_qubit(m_, el.qubit, skeleton_->n_qubits());
  }

  void rebuild(const ParamAssignment& p) {
    const int n = skeleton_->n_qubits();
    m_ = u_goal_;
    for (int j = static_cast<int>(chain_.size()) - 1; j >= 1; --j) {
      const Element& el = chain_[j];
      if (el.is_slot)
        apply_single_qubit_left(m_, euler_to_su2(p[el.angle_index]).adjoint(),
                                el.qubit, n);
      else
        apply_cnot_layer_left(m_, skeleton_->cnot_layers()[el.cnot_layer], n);
    }
    cursor_ = 0;
  }

  // cursor j -> j+1:  M <- embed(e_{j+1}) M embed(e_j)^dag
  void advance(const ParamAssignment& p, int j) {
    if (j != cursor_) throw std::logic_error("SweepEngine: cache out of step");
    const int n = skeleton_->n_qubits();
    const Element& nxt = chain_[j + 1];
    if (nxt.is_slot)
      apply_single_qubit_left(m_, euler_to_su2(p[nxt.angle_index]), nxt.qubit, n);
    else
      apply_cnot_layer_left(m_, skeleton_->cnot_layers()[nxt.cnot_layer], n);
    const Element& el = chain_[j];
    if (el.is_slot)
      apply_single_qubit_right(m_, euler_to_su2(p[el.angle_index]).adjoint(),
                               el.qubit, n);
    else  // the CNOT layer is self-inverse
      apply_cnot_layer_right(m_, skeleton_->cnot_layers()[el.cnot_layer], n);
    cursor_ = j + 1;
  }

  // cursor j -> j-1:  M <- embed(e_j)^dag M embed(e_{j-1})
  void retreat(const ParamAssignment& p, int j) {
    if (j != cursor_) throw std::logic_error("SweepEngine: cache out of step");
    const int n = skeleton_->n_qubits();
    const Element& el = chain_[j];
    if (el.is_slot)
      apply_single_qubit_left(m_, euler_to_su2(p[el.angle_index]).adjoint(),
                              el.qubit, n);
    else
      apply_cnot_layer_left(m_, skeleton_->cnot_layers()[el.cnot_layer], n);
    const Element& prv = chain_[j - 1];
    if (prv.is_slot)
      apply_single_qubit_right(m_, euler_to_su2(p[prv.angle_index]), prv.qubit, n);
    else
      apply_cnot_layer_right(m_, skeleton_->cnot_layers()[prv.cnot_layer], n);
    cursor_ = j - 1;
  }

  const std::vector<Element>& chain() const { return chain_; }

  void enable_update_log(bool on) { log_updates_ = on; }
  const std::vector<double>& update_log() const { return update_log_; }

 private:
  double update_slot(ParamAssignment& p, int j, const OptimizerConfig& cfg) {
    const Element& el = chain_[j];
    const double dim = static_cast<double>(u_goal_.rows());
    const Eigen::Matrix2cd env =
        partial_trace_to_qubit(m_, el.qubit, skeleton_->n_qubits());
    double c;
    if (cfg.variant == Variant::SvdSweep) {
      const detail::Svd2x2 svd = detail::svd_2x2(env);
      if (svd.s1 <= 1e-14)
        throw DegenerateEnvironmentError(
            "sweep: degenerate environment at slot " +
            std::to_string(el.angle_index));
      Eigen::Matrix2cd g = svd.x * svd.y.adjoint();
      g /= std::sqrt(g.determinant());  // back to SU(2); |Tr| is unchanged
      p[el.angle_index] = su2_to_euler(g);
      c = dim - (svd.s0 + svd.s1);
    } else {
      EulerTriple& t = p[el.angle_index];
      for (int a = 0; a < 3; ++a) {
        const Eigen::Matrix2cd g = euler_to_su2(t);
        const Complex z = g.conjugate().cwiseProduct(env).sum();  // Tr(G^dag E)
        const double mag = std::abs(z);
        if (mag < 1e-300) continue;
        const Eigen::Matrix2cd dg = euler_to_su2_derivative(t, a);
        const Complex dz = dg.conjugate().cwiseProduct(env).sum();
        const double dcost = -(std::conj(z) * dz).real() / mag;
        (a == 0 ? t.theta1 : a == 1 ? t.theta2 : t.theta3) -=
            cfg.learning_rate * dcost;
      }
      const Eigen::Matrix2cd g = euler_to_su2(t);
      c = dim - std::abs(g.conjugate().cwiseProduct(env).sum());
    }
    if (log_updates_) update_log_.push_back(c);
    return c;
  }

  const Skeleton* skeleton_;
  ComplexMatrix u_goal_;
  std::vector<Element> chain_;
  ComplexMatrix m_;
  int cursor_ = 0;
  bool log_updates_ = false;
  std::vector<double> update_log_;
};

// Environment of one slot computed from scratch: E such that the circuit's
// trace overlap as a function of that slot's gate G is Tr(G^dag E).
inline ComplexMatrix environment(const Skeleton& s, const ParamAssignment& p,
                                 const ComplexMatrix& u_goal, int slot_index) {
  check_param_length(s, p);
  if (slot_index < 0 || slot_index >= s.slot_count())
    throw std::out_of_range("environment: slot index out of range");
  const int n = s.n_qubits();
  const std::vector<Element> chain = element_chain(s);
  int at = -1;
  for (int j = 0; j < static_cast<int>(chain.size()); ++j)
    if (chain[j].is_slot && chain[j].angle_index == slot_index) {
      at = j;
      break;
    }
  ComplexMatrix m = u_goal;
  for (int j = static_cast<int>(chain.size()) - 1; j > at; --j) {
    const Element& el = chain[j];
    if (el.is_slot)
      apply_single_qubit_left(m, euler_to_su2(p[el.angle_index]).adjoint(),
                              el.qubit, n);
    else
      apply_cnot_layer_left(m, s.cnot_layers()[el.cnot_layer], n);
  }
  for (int j = 0; j < at; ++j) {
    const Element& el = chain[j];
    if (el.is_slot)
      apply_single_qubit_right(m, euler_to_su2(p[el.angle_index]).adjoint(),
                               el.qubit, n);
    else
      apply_cnot_layer_right(m, s.cnot_layers()[el.cnot_layer], n);
  }
  return partial_trace_to_qubit(m, chain[at].qubit, n);
}

inline SynthesisResult synthesize(const ComplexMatrix& u_goal, const Skeleton& s,
                                  const OptimizerConfig& cfg) {
  if (u_goal.rows() != s.dim() || u_goal.cols() != s.dim())
    throw std::invalid_argument("synthesize: target dimension mismatch");
  if (cfg.convergence_threshold <= 0)
    throw std::invalid_argument("synthesize: threshold must be positive");
  if (cfg.max_sweeps < 1)
    throw std::invalid_argument("synthesize: max_sweeps must be >= 1");

  Rng rng(cfg.rng_seed);
  ParamAssignment p(s.slot_count());
  for (EulerTriple& t : p) {
    t.theta1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    t.theta2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    t.theta3 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  SweepEngine engine(s, u_goal);
  SynthesisResult res;
  res.seed = cfg.rng_seed;
  res.status = Status::SweepBudgetExhausted;
  const auto t0 = std::chrono::steady_clock::now();
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const double c = engine.sweep(p, cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.trace.push_back(TracePoint{sweep, c, secs});
    if (c <= cfg.convergence_threshold) {
      res.status = Status::Converged;
      break;
    }
    if (sweep > cfg.plateau_window) {
      const double before = res.trace[sweep - 1 - cfg.plateau_window].cost;
      if (before > 0.0 && before - c < cfg.plateau_rel_improvement * before) {
        res.status = Status::Plateaued;
        break;
      }
    }
  }
  res.sweeps_used = static_cast<int>(res.trace.size());
  res.final_cost = res.trace.empty() ? cost(u_goal, evaluate(s, p))
                                     : res.trace.back().cost;
  res.params = std::move(p);
  return res;
}

}  // namespace qsynth
