#pragma once

// OpenQASM 2.0 export. Gates are written in application order: for each slot
// layer the rz/ry/rz triple per qubit (innermost rotation first), then the cx
// gates of the following CNOT layer. qelib1's ry matches exp(-i t Y / 2)
// exactly and its rz differs from exp(-i t Z / 2) by a global phase only, so
// a simulator reproduces the circuit unitary up to global phase.

#include <charconv>
#include <string>
#include <system_error>

#include "qsynth/circuit.hpp"

namespace qsynth {

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline std::string export_qasm(const Skeleton& s, const ParamAssignment& p) {
  check_param_length(s, p);
  std::string out;
  out += "OPENQASM 2.0;\n";
  out += "include \"qelib1.inc\";\n";
  out += "qreg q[" + std::to_string(s.n_qubits()) + "];\n";
  const auto rot = [&out](const char* gate, double angle, int q) {
    if (angle == 0.0) return;  // identity rotations are dropped
    out += std::string(gate) + "(" + detail::format_double(angle) + ") q[" +
           std::to_string(q) + "];\n";
  };
  int ai = 0;
  const int n_cnot = static_cast<int>(s.cnot_layers().size());
  for (int k = 0; k < s.s_layer_count(); ++k) {
    for (int q : s.s_layer_qubits(k)) {
      const EulerTriple& t = p[ai++];
      rot("rz", t.theta3, q);
      rot("ry", t.theta1, q);
      rot("rz", t.theta2, q);
    }
    if (k < n_cnot)
      for (const CnotPair& pr : s.cnot_layers()[k].pairs)
        out += "cx q[" + std::to_string(pr.control) + "],q[" +
               std::to_string(pr.target) + "];\n";
  }
  return out;
}

}  // namespace qsynth
