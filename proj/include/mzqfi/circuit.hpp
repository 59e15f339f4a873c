#pragma once

// Density-matrix simulation of the four-qubit Mach-Zehnder circuit.
// Register layout: q0 atom, q1 atom copy, q2 light qubit (measured),
// q3 ancilla. q0 is the most significant bit of a basis index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mzqfi/analytic.hpp"
#include "mzqfi/errors.hpp"
#include "mzqfi/linalg.hpp"
#include "mzqfi/rng.hpp"

namespace mzqfi {

inline constexpr int kMaxQubits = 8;
inline constexpr int kMziQubits = 4;
inline constexpr int kReadoutQubit = 2;

enum class GateKind { hadamard, pauli_x, cnot, thermal_rotation, controlled_phase };

inline std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::hadamard: return "H";
    case GateKind::pauli_x: return "X";
    case GateKind::cnot: return "CNOT";
    case GateKind::thermal_rotation: return "R";
    case GateKind::controlled_phase: return "CU";
  }
  return "?";
}

// One gate. `control` is -1 for single-qubit gates. For thermal_rotation
// `angle` holds beta; for controlled_phase it is the relative phase theta of
// U = diag(1, e^{-i theta}).
struct GateOp {
  GateKind kind = GateKind::hadamard;
  int target = 0;
  int control = -1;
  double angle = 0.0;
  double hbar_omega0 = 1.0;

  bool is_controlled() const { return kind == GateKind::cnot || kind == GateKind::controlled_phase; }
};

// R(beta) = [[sqrt(p_g), -sqrt(p_e)], [sqrt(p_e), sqrt(p_g)]].
inline Matrix thermal_rotation_matrix(double beta, double hbar_omega0) {
  detail::require(hbar_omega0 > 0.0, "hbar_omega0 must be > 0");
  const auto pop = thermal_populations(beta, hbar_omega0);
  const double g = std::sqrt(pop.ground);
  const double e = std::sqrt(pop.excited);
  Matrix r(2, 2);
  r << g, -e, e, g;
  return r;
}

// 2x2 action of a gate on its target (the controlled part for CNOT/CU).
inline Matrix gate_target_matrix(const GateOp& g) {
  Matrix m(2, 2);
  switch (g.kind) {
    case GateKind::hadamard: {
      const double s = 1.0 / std::sqrt(2.0);
      m << s, s, s, -s;
      return m;
    }
    case GateKind::pauli_x:
    case GateKind::cnot:
      m << 0.0, 1.0, 1.0, 0.0;
      return m;
    case GateKind::thermal_rotation:
      return thermal_rotation_matrix(g.angle, g.hbar_omega0);
    case GateKind::controlled_phase:
      m << 1.0, 0.0, 0.0, std::polar(1.0, -g.angle);
      return m;
  }
  throw InvalidArgument("unknown gate kind");
}

inline void validate_gate(const GateOp& g, int n_qubits) {
  detail::require(g.target >= 0 && g.target < n_qubits, "gate target outside register");
  if (g.is_controlled()) {
    detail::require(g.control >= 0 && g.control < n_qubits, "gate control outside register");
    detail::require(g.control != g.target, "gate control equals target");
  }
}

// Full 2^n x 2^n unitary of a gate.
inline Matrix gate_matrix(const GateOp& g, int n_qubits) {
  detail::require(n_qubits >= 1 && n_qubits <= kMaxQubits, "register size must be in [1, 8]");
  validate_gate(g, n_qubits);
  const Matrix u = gate_target_matrix(g);
  const int dim = 1 << n_qubits;
  const int tbit = n_qubits - 1 - g.target;
  const int cbit = g.is_controlled() ? n_qubits - 1 - g.control : -1;
  Matrix full = Matrix::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    if (cbit >= 0 && ((col >> cbit) & 1) == 0) {
      full(col, col) = 1.0;
      continue;
    }
    const int b = (col >> tbit) & 1;
    for (int a = 0; a < 2; ++a) {
      const int row = (col & ~(1 << tbit)) | (a << tbit);
      full(row, col) += u(a, b);
    }
  }
  return full;
}

// Interferometer sequence for N = 1: R(q0), CNOT q0->q1, X(q3), H(q2),
// CNOT q2->q3, controlled phase q1->q2, CNOT q2->q3, H(q2), CNOT q2->q3.
// The controlled gate imprints the relative phase 2x so that the readout
// reproduces the cos(2Nx) fringe of the closed form.
inline std::vector<GateOp> build_mzi_circuit(double beta, double x, double hbar_omega0 = 1.0) {
  std::vector<GateOp> c;
  c.push_back({GateKind::thermal_rotation, 0, -1, beta, hbar_omega0});
  c.push_back({GateKind::cnot, 1, 0});
  c.push_back({GateKind::pauli_x, 3});
  c.push_back({GateKind::hadamard, 2});
  c.push_back({GateKind::cnot, 3, 2});
  c.push_back({GateKind::controlled_phase, 2, 1, 2.0 * x});
  c.push_back({GateKind::cnot, 3, 2});
  c.push_back({GateKind::hadamard, 2});
  c.push_back({GateKind::cnot, 3, 2});
  return c;
}

struct QubitRegister {
  int n_qubits = 0;
  Matrix state;

  static QubitRegister ground(int n) {
    detail::require(n >= 1 && n <= kMaxQubits, "register size must be in [1, 8]");
    QubitRegister r;
    r.n_qubits = n;
    r.state = Matrix::Zero(1 << n, 1 << n);
    r.state(0, 0) = 1.0;
    return r;
  }

  void apply(const GateOp& g) {
    const Matrix u = gate_matrix(g, n_qubits);
    state = u * state * u.adjoint();
  }
};

inline QubitRegister run(const std::vector<GateOp>& circuit, int n_qubits = kMziQubits) {
  auto reg = QubitRegister::ground(n_qubits);
  for (const auto& g : circuit) reg.apply(g);
  return reg;
}

// Partial trace down to a single qubit.
inline Matrix reduced_state(const QubitRegister& reg, int qubit) {
  detail::require(qubit >= 0 && qubit < reg.n_qubits, "qubit outside register");
  const int bit = reg.n_qubits - 1 - qubit;
  const int dim = 1 << reg.n_qubits;
  Matrix out = Matrix::Zero(2, 2);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if ((i & ~(1 << bit)) != (j & ~(1 << bit))) continue;
      out((i >> bit) & 1, (j >> bit) & 1) += reg.state(i, j);
    }
  }
  return out;
}

// Final (pre-measurement) reduced state of the readout qubit.
inline Matrix readout_reduced_state(double beta, double x, double hbar_omega0 = 1.0) {
  return reduced_state(run(build_mzi_circuit(beta, x, hbar_omega0)), kReadoutQubit);
}

// Readout qubit after the non-selective computational-basis measurement,
// as a block-diagonal operator with two 1x1 blocks.
inline BlockDiagonal readout_state(double beta, double x, double hbar_omega0 = 1.0) {
  const Matrix r = readout_reduced_state(beta, x, hbar_omega0);
  BlockDiagonal out;
  out.blocks.push_back(Matrix::Constant(1, 1, r(0, 0)));
  out.blocks.push_back(Matrix::Constant(1, 1, r(1, 1)));
  return out;
}

inline FringeProbabilities exact_probability(double beta, double x, double hbar_omega0 = 1.0) {
  const Matrix r = readout_reduced_state(beta, x, hbar_omega0);
  return {r(0, 0).real(), r(1, 1).real()};
}

struct ShotRecord {
  std::int64_t n0 = 0;
  std::int64_t n1 = 0;
  std::int64_t mu = 0;
  std::uint64_t seed = 0;
  double beta = 0.0;
  double x = 0.0;
};

// n0 ~ Binomial(mu, p0) from a stream keyed by (seed, beta_index, x_index).
inline ShotRecord sample_shots(double beta, double x, std::int64_t mu, std::uint64_t seed,
                               std::uint64_t beta_index = 0, std::uint64_t x_index = 0,
                               double hbar_omega0 = 1.0) {
  detail::require(mu >= 1, "mu must be >= 1");
  const double p0 = std::clamp(exact_probability(beta, x, hbar_omega0).p0, 0.0, 1.0);
  CounterRng rng(derive_key(seed, {beta_index, x_index}));
  std::binomial_distribution<std::int64_t> dist(mu, p0);
  ShotRecord rec;
  rec.n0 = dist(rng);
  rec.n1 = mu - rec.n0;
  rec.mu = mu;
  rec.seed = seed;
  rec.beta = beta;
  rec.x = x;
  return rec;
}

}  // namespace mzqfi
