// Copyright 2026 The chaoslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Truncated qubit (x) Fock Hilbert space.
//
// Basis convention (pinned by tests, relied on by serialized states):
//   flat index k = s * (n_max + 1) + n
//   s = 0 is |G>, s = 1 is |E>; n in [0, n_max] is the photon number.
// The cavity ladder is hard-truncated: a^dag |n_max> = 0.

#pragma once

#include <complex>
#include <cstddef>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace chaoslab {

using Complex = std::complex<double>;
using SparseOperator = Eigen::SparseMatrix<Complex>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

class FockTruncation {
 public:
  /// Throws InvalidArgument for n_max < 1.
  explicit FockTruncation(int n_max);

  int n_max() const { return n_max_; }
  Eigen::Index cavity_dim() const { return n_max_ + 1; }
  Eigen::Index dim() const { return 2 * cavity_dim(); }
  Eigen::Index index(int qubit, int photons) const {
    return static_cast<Eigen::Index>(qubit) * cavity_dim() + photons;
  }

  friend bool operator==(const FockTruncation&, const FockTruncation&) = default;

 private:
  int n_max_;
};

/// Sparse operator with an explicitly asserted Hermiticity flag.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(SparseOperator m) : m_(std::move(m)) { m_.makeCompressed(); }

  /// Builds an operator and asserts Hermiticity; throws InvalidArgument if
  /// max |M - M^dag| exceeds 1e-12 * max(1, max |M|).
  static OperatorMatrix hermitian(SparseOperator m);
  static OperatorMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const SparseOperator& sparse() const { return m_; }
  ComplexMatrix dense() const { return ComplexMatrix(m_); }
  bool hermitian_flag() const { return hermitian_; }

  double hermiticity_defect() const;
  double max_abs() const;
  /// True when every stored entry has zero imaginary part.
  bool is_real() const;

  OperatorMatrix adjoint() const;
  /// Returns a copy carrying the Hermitian flag (checked).
  OperatorMatrix as_hermitian() const { return hermitian(m_); }

  ComplexVector apply(const ComplexVector& v) const;

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(Complex s, const OperatorMatrix& a);
  friend OperatorMatrix operator*(double s, const OperatorMatrix& a) { return Complex(s, 0.0) * a; }

 private:
  SparseOperator m_;
  bool hermitian_ = false;
};

/// Commutator [a, b] = ab - ba.
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// Kronecker product qubit_op (2x2) (x) cavity_op (n_max+1 square), following
/// the flat index convention. Throws InvalidArgument on dimension mismatch.
OperatorMatrix tensor(const OperatorMatrix& qubit_op, const OperatorMatrix& cavity_op);

/// Single-subsystem operators and their embeddings on the full space.
struct OperatorSet {
  // cavity space (n_max + 1)
  OperatorMatrix a, a_dag, number, cavity_identity;
  // qubit space (2)
  OperatorMatrix sigma_z, sigma_plus, sigma_minus, sigma_x, qubit_identity;
  // full space, (qubit op) (x) 1 or 1 (x) (cavity op)
  OperatorMatrix A, A_dag, N, Sz, Sp, Sm, Sx, identity;
};

OperatorSet build_operators(const FockTruncation& trunc);

class KetState {
 public:
  /// Wraps amplitudes; throws InvalidArgument if | ||psi|| - 1 | >= 1e-9.
  explicit KetState(ComplexVector amplitudes);
  /// Normalizes first; throws InvalidArgument for a zero vector.
  static KetState normalized(ComplexVector amplitudes);
  static KetState basis(Eigen::Index dim, Eigen::Index k);

  Eigen::Index dim() const { return amps_.size(); }
  const ComplexVector& amplitudes() const { return amps_; }
  double norm() const { return amps_.norm(); }

 private:
  ComplexVector amps_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-12), unit trace (1e-9) and eigenvalues >= -1e-10.
  explicit DensityMatrix(ComplexMatrix rho);
  static DensityMatrix from_ket(const KetState& psi);
  /// Convex combination w * a + (1 - w) * b, w in [0, 1].
  static DensityMatrix mix(double w, const DensityMatrix& a, const DensityMatrix& b);

  Eigen::Index dim() const { return rho_.rows(); }
  const ComplexMatrix& matrix() const { return rho_; }
  Complex trace() const { return rho_.trace(); }
  double purity() const;

 private:
  struct Unchecked {};
  DensityMatrix(ComplexMatrix rho, Unchecked) : rho_(std::move(rho)) {}
  friend DensityMatrix partial_trace_cavity(const DensityMatrix&, const FockTruncation&);
  friend DensityMatrix partial_trace_qubit(const DensityMatrix&, const FockTruncation&);
  friend DensityMatrix reduced_qubit(const KetState&, const FockTruncation&);
  friend DensityMatrix reduced_cavity(const KetState&, const FockTruncation&);

  ComplexMatrix rho_;
};

/// Qubit reduced state rho_1 = Tr_cavity(rho) (2 x 2).
DensityMatrix partial_trace_cavity(const DensityMatrix& rho, const FockTruncation& trunc);
/// Cavity reduced state rho_2 = Tr_qubit(rho) ((n_max+1) square).
DensityMatrix partial_trace_qubit(const DensityMatrix& rho, const FockTruncation& trunc);
/// Same reductions taken directly from a pure state, O(dim) and O(dim^2).
DensityMatrix reduced_qubit(const KetState& psi, const FockTruncation& trunc);
DensityMatrix reduced_cavity(const KetState& psi, const FockTruncation& trunc);

/// Probability mass of a Poisson(|beta|^2) photon distribution above n_max.
double coherent_tail_mass(Complex beta, int n_max);

/// Glauber coherent state on the cavity space. Throws PreconditionError when
/// the truncated tail mass exceeds 1e-8.
KetState glauber_state(Complex beta, const FockTruncation& trunc);
/// Bloch coherent state (|G> + tau |E>) / sqrt(1 + |tau|^2).
KetState bloch_state(Complex tau);
/// |tau> (x) |beta> on the full space.
KetState product_state(Complex tau, Complex beta, const FockTruncation& trunc);
KetState tensor_product(const KetState& qubit, const KetState& cavity);

/// Semiclassical phase-space coordinates. Bloch domain: q1^2 + p1^2 <= 2.
struct PhasePoint {
  double q1 = 0.0, p1 = 0.0, q2 = 0.0, p2 = 0.0;

  double bloch_radius_sq() const { return q1 * q1 + p1 * p1; }
  bool in_bloch_domain() const { return bloch_radius_sq() <= 2.0; }
  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

struct CoherentLabels {
  Complex tau;
  Complex beta;
};

PhasePoint labels_to_phase(Complex tau, Complex beta);
/// Throws PreconditionError unless q1^2 + p1^2 < 2.
CoherentLabels phase_to_labels(const PhasePoint& pt);

Complex expectation(const OperatorMatrix& op, const KetState& psi);
/// <op^2> - <op>^2, evaluated as ||(op - <op>) psi||^2 for Hermitian op.
double variance(const OperatorMatrix& op, const KetState& psi);

/// |<a|b>|^2.
double overlap_probability(const KetState& a, const KetState& b);

}  // namespace chaoslab
