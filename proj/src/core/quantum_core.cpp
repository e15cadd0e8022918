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

#include "core/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "core/errors.hpp"

namespace chaoslab {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kHermitianTolerance = 1e-12;
constexpr double kTraceTolerance = 1e-9;
constexpr double kPositivityTolerance = 1e-10;
constexpr double kCoherentTailTolerance = 1e-8;

SparseOperator from_triplets(Eigen::Index dim, const std::vector<Eigen::Triplet<Complex>>& t) {
  SparseOperator m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

FockTruncation::FockTruncation(int n_max) : n_max_(n_max) {
  if (n_max < 1) throw InvalidArgument("FockTruncation: n_max must be >= 1");
}

OperatorMatrix OperatorMatrix::hermitian(SparseOperator m) {
  OperatorMatrix op(std::move(m));
  const double defect = op.hermiticity_defect();
  if (defect > kHermitianTolerance * std::max(1.0, op.max_abs())) {
    std::ostringstream os;
    os << "operator is not Hermitian (max |M - M^dag| = " << defect << ")";
    throw InvalidArgument(os.str());
  }
  op.hermitian_ = true;
  return op;
}

OperatorMatrix OperatorMatrix::identity(Eigen::Index dim) {
  SparseOperator m(dim, dim);
  m.setIdentity();
  return hermitian(std::move(m));
}

double OperatorMatrix::hermiticity_defect() const {
  SparseOperator diff = m_ - SparseOperator(m_.adjoint());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

double OperatorMatrix::max_abs() const {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < m_.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(m_, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

bool OperatorMatrix::is_real() const {
  for (Eigen::Index k = 0; k < m_.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(m_, k); it; ++it)
      if (it.value().imag() != 0.0) return false;
  return true;
}

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix out(SparseOperator(m_.adjoint()));
  out.hermitian_ = hermitian_;
  return out;
}

ComplexVector OperatorMatrix::apply(const ComplexVector& v) const {
  require_same_dim(dim(), v.size(), "OperatorMatrix::apply");
  return m_ * v;
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "operator+");
  return OperatorMatrix(SparseOperator(a.m_ + b.m_));
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "operator-");
  return OperatorMatrix(SparseOperator(a.m_ - b.m_));
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "operator*");
  return OperatorMatrix(SparseOperator(a.m_ * b.m_));
}

OperatorMatrix operator*(Complex s, const OperatorMatrix& a) {
  return OperatorMatrix(SparseOperator(s * a.m_));
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) { return a * b - b * a; }

OperatorMatrix tensor(const OperatorMatrix& qubit_op, const OperatorMatrix& cavity_op) {
  if (qubit_op.dim() != 2) throw InvalidArgument("tensor: qubit operator must be 2x2");
  SparseOperator k = Eigen::kroneckerProduct(qubit_op.sparse(), cavity_op.sparse()).eval();
  OperatorMatrix out(std::move(k));
  if (qubit_op.hermitian_flag() && cavity_op.hermitian_flag()) return out.as_hermitian();
  return out;
}

OperatorSet build_operators(const FockTruncation& trunc) {
  const Eigen::Index nc = trunc.cavity_dim();
  std::vector<Eigen::Triplet<Complex>> lower, number;
  for (Eigen::Index n = 1; n < nc; ++n) lower.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  for (Eigen::Index n = 0; n < nc; ++n) number.emplace_back(n, n, static_cast<double>(n));

  OperatorSet ops;
  ops.a = OperatorMatrix(from_triplets(nc, lower));
  ops.a_dag = ops.a.adjoint();
  ops.number = OperatorMatrix::hermitian(from_triplets(nc, number));
  ops.cavity_identity = OperatorMatrix::identity(nc);

  // qubit basis order (G, E); sigma_z |E> = +|E>, sigma_+ |G> = |E>
  ops.sigma_z = OperatorMatrix::hermitian(from_triplets(2, {{0, 0, -1.0}, {1, 1, 1.0}}));
  ops.sigma_plus = OperatorMatrix(from_triplets(2, {{1, 0, 1.0}}));
  ops.sigma_minus = ops.sigma_plus.adjoint();
  ops.sigma_x = OperatorMatrix::hermitian(from_triplets(2, {{1, 0, 1.0}, {0, 1, 1.0}}));
  ops.qubit_identity = OperatorMatrix::identity(2);

  ops.A = tensor(ops.qubit_identity, ops.a);
  ops.A_dag = tensor(ops.qubit_identity, ops.a_dag);
  ops.N = tensor(ops.qubit_identity, ops.number);
  ops.Sz = tensor(ops.sigma_z, ops.cavity_identity);
  ops.Sp = tensor(ops.sigma_plus, ops.cavity_identity);
  ops.Sm = tensor(ops.sigma_minus, ops.cavity_identity);
  ops.Sx = tensor(ops.sigma_x, ops.cavity_identity);
  ops.identity = OperatorMatrix::identity(trunc.dim());
  return ops;
}

KetState::KetState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw InvalidArgument("KetState: empty amplitude vector");
  const double n = amps_.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) >= kNormTolerance) {
    std::ostringstream os;
    os << "KetState: norm " << n << " deviates from 1 by more than " << kNormTolerance;
    throw InvalidArgument(os.str());
  }
}

KetState KetState::normalized(ComplexVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("KetState: cannot normalize a zero vector");
  amplitudes /= n;
  return KetState(std::move(amplitudes));
}

KetState KetState::basis(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) throw InvalidArgument("KetState::basis: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(k) = 1.0;
  return KetState(std::move(v));
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw InvalidArgument("DensityMatrix: matrix must be square");
  const double defect = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (defect > kHermitianTolerance) throw InvalidArgument("DensityMatrix: not Hermitian");
  if (std::abs(rho_.trace() - Complex(1.0)) > kTraceTolerance) throw InvalidArgument("DensityMatrix: trace is not 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPositivityTolerance)
    throw InvalidArgument("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::from_ket(const KetState& psi) {
  const ComplexVector& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint(), Unchecked{});
}

DensityMatrix DensityMatrix::mix(double w, const DensityMatrix& a, const DensityMatrix& b) {
  if (w < 0.0 || w > 1.0) throw InvalidArgument("DensityMatrix::mix: weight outside [0, 1]");
  require_same_dim(a.dim(), b.dim(), "DensityMatrix::mix");
  return DensityMatrix(w * a.rho_ + (1.0 - w) * b.rho_, Unchecked{});
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

DensityMatrix partial_trace_cavity(const DensityMatrix& rho, const FockTruncation& trunc) {
  require_same_dim(rho.dim(), trunc.dim(), "partial_trace_cavity");
  const Eigen::Index nc = trunc.cavity_dim();
  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out(2, 2);
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) out(s, sp) = m.block(s * nc, sp * nc, nc, nc).trace();
  return DensityMatrix(std::move(out), DensityMatrix::Unchecked{});
}

DensityMatrix partial_trace_qubit(const DensityMatrix& rho, const FockTruncation& trunc) {
  require_same_dim(rho.dim(), trunc.dim(), "partial_trace_qubit");
  const Eigen::Index nc = trunc.cavity_dim();
  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = m.topLeftCorner(nc, nc) + m.bottomRightCorner(nc, nc);
  return DensityMatrix(std::move(out), DensityMatrix::Unchecked{});
}

DensityMatrix reduced_qubit(const KetState& psi, const FockTruncation& trunc) {
  require_same_dim(psi.dim(), trunc.dim(), "reduced_qubit");
  const Eigen::Index nc = trunc.cavity_dim();
  const auto g = psi.amplitudes().head(nc);
  const auto e = psi.amplitudes().tail(nc);
  ComplexMatrix out(2, 2);
  out(0, 0) = g.squaredNorm();
  out(1, 1) = e.squaredNorm();
  out(0, 1) = e.dot(g);  // sum_n psi_Gn conj(psi_En)
  out(1, 0) = std::conj(out(0, 1));
  return DensityMatrix(std::move(out), DensityMatrix::Unchecked{});
}

DensityMatrix reduced_cavity(const KetState& psi, const FockTruncation& trunc) {
  require_same_dim(psi.dim(), trunc.dim(), "reduced_cavity");
  const Eigen::Index nc = trunc.cavity_dim();
  const auto g = psi.amplitudes().head(nc);
  const auto e = psi.amplitudes().tail(nc);
  ComplexMatrix out = g * g.adjoint() + e * e.adjoint();
  return DensityMatrix(std::move(out), DensityMatrix::Unchecked{});
}

double coherent_tail_mass(Complex beta, int n_max) {
  const double mean = std::norm(beta);
  if (mean == 0.0) return 0.0;
  // log Poisson pmf; the terms past the mode decrease monotonically
  const auto log_pmf = [mean](double n) { return -mean + n * std::log(mean) - std::lgamma(n + 1.0); };
  double tail = 0.0;
  for (long n = n_max + 1;; ++n) {
    const double term = std::exp(log_pmf(static_cast<double>(n)));
    tail += term;
    if (static_cast<double>(n) > mean && term < 1e-18 * std::max(tail, 1e-300)) break;
    if (static_cast<double>(n) > mean && term == 0.0) break;
  }
  return std::min(tail, 1.0);
}

KetState glauber_state(Complex beta, const FockTruncation& trunc) {
  const double tail = coherent_tail_mass(beta, trunc.n_max());
  if (tail > kCoherentTailTolerance) {
    std::ostringstream os;
    os << "coherent state |beta| = " << std::abs(beta) << " has tail mass " << tail << " above n_max = "
       << trunc.n_max() << " (limit " << kCoherentTailTolerance << "); increase n_max";
    throw PreconditionError(os.str());
  }
  const Eigen::Index nc = trunc.cavity_dim();
  ComplexVector v(nc);
  const double mag = std::abs(beta);
  const double phase = std::arg(beta);
  for (Eigen::Index n = 0; n < nc; ++n) {
    const double dn = static_cast<double>(n);
    if (mag == 0.0) {
      v(n) = n == 0 ? 1.0 : 0.0;
      continue;
    }
    const double log_mag = -0.5 * mag * mag + dn * std::log(mag) - 0.5 * std::lgamma(dn + 1.0);
    v(n) = std::polar(std::exp(log_mag), dn * phase);
  }
  return KetState::normalized(std::move(v));
}

KetState bloch_state(Complex tau) {
  ComplexVector v(2);
  v << 1.0, tau;
  return KetState(v / std::sqrt(1.0 + std::norm(tau)));
}

KetState tensor_product(const KetState& qubit, const KetState& cavity) {
  if (qubit.dim() != 2) throw InvalidArgument("tensor_product: qubit state must have dimension 2");
  const Eigen::Index nc = cavity.dim();
  ComplexVector v(2 * nc);
  v.head(nc) = qubit.amplitudes()(0) * cavity.amplitudes();
  v.tail(nc) = qubit.amplitudes()(1) * cavity.amplitudes();
  return KetState::normalized(std::move(v));
}

KetState product_state(Complex tau, Complex beta, const FockTruncation& trunc) {
  return tensor_product(bloch_state(tau), glauber_state(beta, trunc));
}

PhasePoint labels_to_phase(Complex tau, Complex beta) {
  const double scale = std::sqrt(2.0 / (1.0 + std::norm(tau)));
  const double root2 = std::sqrt(2.0);
  return PhasePoint{scale * tau.real(), scale * tau.imag(), root2 * beta.real(), root2 * beta.imag()};
}

CoherentLabels phase_to_labels(const PhasePoint& pt) {
  const double rho = pt.bloch_radius_sq();
  if (!(rho < 2.0)) {
    std::ostringstream os;
    os << "phase point outside the Bloch domain: q1^2 + p1^2 = " << rho << " (must be < 2)";
    throw PreconditionError(os.str());
  }
  const Complex tau = Complex(pt.q1, pt.p1) / std::sqrt(2.0 - rho);
  const Complex beta = Complex(pt.q2, pt.p2) / std::sqrt(2.0);
  return {tau, beta};
}

Complex expectation(const OperatorMatrix& op, const KetState& psi) {
  require_same_dim(op.dim(), psi.dim(), "expectation");
  return psi.amplitudes().dot(op.sparse() * psi.amplitudes());
}

double variance(const OperatorMatrix& op, const KetState& psi) {
  require_same_dim(op.dim(), psi.dim(), "variance");
  const ComplexVector& v = psi.amplitudes();
  const ComplexVector opv = op.sparse() * v;
  const Complex mean = v.dot(opv);
  if (op.hermitian_flag()) return (opv - mean * v).squaredNorm();
  const Complex second = v.dot(op.sparse() * opv);
  return (second - mean * mean).real();
}

double overlap_probability(const KetState& a, const KetState& b) {
  require_same_dim(a.dim(), b.dim(), "overlap");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace chaoslab
