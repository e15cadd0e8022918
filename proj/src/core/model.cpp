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

#include "core/model.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "core/errors.hpp"
#include "core/propagation.hpp"

namespace chaoslab {

void SystemParams::validate() const {
  if (!std::isfinite(delta_a) || !std::isfinite(g) || !std::isfinite(r) || !std::isfinite(omega_p))
    throw PreconditionError("SystemParams: non-finite value");
  if (g < 0.0) throw PreconditionError("SystemParams: coupling g must be >= 0");
  if (r < 0.0) throw PreconditionError("SystemParams: squeezing parameter r must be >= 0");
}

SystemParams SystemParams::from_squeezing(double delta_a, double g, double r, double omega_p) {
  SystemParams p{delta_a, g, r, omega_p};
  p.validate();
  return p;
}

SystemParams SystemParams::from_drive(double delta_a, double g, double lambda, double omega_p) {
  if (!(lambda >= 0.0) || !(lambda < delta_c)) {
    std::ostringstream os;
    os << "SystemParams: drive amplitude lambda = " << lambda << " must satisfy 0 <= lambda < delta_c"
       << " (parametric instability at lambda = |delta_c|)";
    throw PreconditionError(os.str());
  }
  return from_squeezing(delta_a, g, 0.5 * std::atanh(lambda / delta_c), omega_p);
}

double SystemParams::lambda() const { return delta_c * std::tanh(2.0 * r); }

const char* to_string(Phase p) { return p == Phase::superradiant ? "superradiant" : "normal"; }

DerivedParams derive_params(const SystemParams& p) {
  p.validate();
  DerivedParams d;
  d.g_tilde = p.g * std::exp(p.r) / 2.0;
  d.omega_c_eff = SystemParams::delta_c / std::cosh(2.0 * p.r);
  d.eta = p.delta_a / SystemParams::delta_c * std::cosh(2.0 * p.r);
  d.g_crit = std::sqrt(p.delta_a * d.omega_c_eff) / 2.0;
  d.phase = d.g_tilde > d.g_crit ? Phase::superradiant : Phase::normal;
  d.eta_semiclassical = d.eta > 18.0;
  return d;
}

OperatorMatrix build_H_rabi(const SystemParams& p, const FockTruncation& trunc) {
  const DerivedParams d = derive_params(p);
  const OperatorSet o = build_operators(trunc);
  return (0.5 * p.delta_a * o.Sz + d.omega_c_eff * o.N + d.g_tilde * ((o.A_dag + o.A) * (o.Sp + o.Sm)))
      .as_hermitian();
}

OperatorMatrix build_H_err(const SystemParams& p, const FockTruncation& trunc) {
  p.validate();
  const OperatorSet o = build_operators(trunc);
  return (-0.5 * p.g * std::exp(-p.r) * ((o.A_dag - o.A) * (o.Sp - o.Sm))).as_hermitian();
}

OperatorMatrix build_H_eff(const SystemParams& p, const FockTruncation& trunc, double err_scale) {
  return (build_H_rabi(p, trunc) + err_scale * build_H_err(p, trunc)).as_hermitian();
}

OperatorMatrix build_H_rotated(const SystemParams& p, const FockTruncation& trunc) {
  p.validate();
  const OperatorSet o = build_operators(trunc);
  const OperatorMatrix squeeze_drive = o.A_dag * o.A_dag + o.A * o.A;
  return (0.5 * p.delta_a * o.Sz + SystemParams::delta_c * o.N + p.g * (o.A_dag * o.Sm + o.A * o.Sp) -
          0.5 * p.lambda() * squeeze_drive)
      .as_hermitian();
}

LabHamiltonian::LabHamiltonian(const SystemParams& p, const FockTruncation& trunc) : omega_p_(p.omega_p) {
  p.validate();
  const OperatorSet o = build_operators(trunc);
  static_part_ = (0.5 * p.omega_a() * o.Sz + p.omega_c() * o.N + p.g * (o.A_dag * o.Sm + o.A * o.Sp)).sparse();
  drive_ = (-0.5 * p.lambda() * (o.A_dag * o.A_dag)).sparse();
  drive_adjoint_ = drive_.adjoint();

  cavity_dim_ = trunc.cavity_dim();
  const Eigen::Index nc = cavity_dim_;
  diagonal_.resize(2 * nc);
  exchange_.resize(nc);
  pair_.resize(nc);
  for (Eigen::Index n = 0; n < nc; ++n) {
    const double dn = static_cast<double>(n);
    diagonal_(n) = -0.5 * p.omega_a() + p.omega_c() * dn;
    diagonal_(nc + n) = 0.5 * p.omega_a() + p.omega_c() * dn;
    exchange_(n) = p.g * std::sqrt(dn + 1.0);
    pair_(n) = -0.5 * p.lambda() * std::sqrt(dn * (dn - 1.0));
  }
}

void LabHamiltonian::apply(double t, const ComplexVector& psi, ComplexVector& out) const {
  const Complex phase = std::polar(1.0, -omega_p_ * t);
  const Complex conj_phase = std::conj(phase);
  const Eigen::Index nc = cavity_dim_;
  out.array() = diagonal_.array() * psi.array();
  for (Eigen::Index n = 0; n + 1 < nc; ++n) {
    // g (a^dag s- + a s+) between |G, n+1> and |E, n>
    out(n + 1) += exchange_(n) * psi(nc + n);
    out(nc + n) += exchange_(n) * psi(n + 1);
  }
  for (Eigen::Index s = 0; s < 2; ++s) {
    const Eigen::Index base = s * nc;
    for (Eigen::Index n = 2; n < nc; ++n) {
      out(base + n) += phase * pair_(n) * psi(base + n - 2);
      out(base + n - 2) += conj_phase * pair_(n) * psi(base + n);
    }
  }
}

double LabHamiltonian::norm_bound() const {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(static_part_.rows());
  for (const SparseOperator* m : {&static_part_, &drive_, &drive_adjoint_})
    for (Eigen::Index k = 0; k < m->outerSize(); ++k)
      for (SparseOperator::InnerIterator it(*m, k); it; ++it) sums(it.row()) += std::abs(it.value());
  return sums.size() ? sums.maxCoeff() : 0.0;
}

OperatorMatrix LabHamiltonian::at(double t) const {
  const Complex phase = std::polar(1.0, -omega_p_ * t);
  SparseOperator h = static_part_ + phase * drive_ + std::conj(phase) * SparseOperator(drive_.adjoint());
  return OperatorMatrix::hermitian(std::move(h));
}

OperatorMatrix build_H_lab(const SystemParams& p, double t, const FockTruncation& trunc) {
  return LabHamiltonian(p, trunc).at(t);
}

namespace {

// log of |<2m| S(r) |0>|^2 = tanh^{2m} r (2m)! / (4^m m!^2 cosh r)
double log_squeezed_vacuum_prob(double r, long m) {
  r = std::abs(r);
  const double dm = static_cast<double>(m);
  return 2.0 * dm * std::log(std::tanh(r)) + std::lgamma(2.0 * dm + 1.0) - dm * std::log(4.0) -
         2.0 * std::lgamma(dm + 1.0) - std::log(std::cosh(r));
}

// Real antisymmetric generator (a^2 - a^dag^2) / 2 on `nc` cavity levels.
SparseOperator squeeze_generator(Eigen::Index nc) {
  std::vector<Eigen::Triplet<Complex>> t;
  for (Eigen::Index n = 2; n < nc; ++n) {
    const double v = 0.5 * std::sqrt(static_cast<double>(n) * static_cast<double>(n - 1));
    t.emplace_back(n - 2, n, v);   // a^2 / 2
    t.emplace_back(n, n - 2, -v);  // -a^dag^2 / 2
  }
  SparseOperator k(nc, nc);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

}  // namespace

double squeezed_vacuum_tail(double r, int n_cut) {
  if (r == 0.0) return 0.0;
  double tail = 0.0;
  for (long m = std::max(0, n_cut / 2);; ++m) {
    if (2 * m <= n_cut) continue;
    const double term = std::exp(log_squeezed_vacuum_prob(std::abs(r), m));
    tail += term;
    if (term <= 1e-17 * tail || term == 0.0 || m > 100'000'000) break;
  }
  return std::min(tail, 1.0);
}

KetState squeezed_vacuum(double r_s, const FockTruncation& trunc, double angle) {
  const double tail = squeezed_vacuum_tail(r_s, trunc.n_max());
  if (tail > 1e-8) {
    std::ostringstream os;
    os << "squeezed vacuum r = " << r_s << " has tail mass " << tail << " above n_max = " << trunc.n_max();
    throw PreconditionError(os.str());
  }
  ComplexVector v = ComplexVector::Zero(trunc.cavity_dim());
  const double sign = r_s >= 0.0 ? -1.0 : 1.0;  // amplitude (-tanh r)^m
  for (long m = 0; 2 * m <= trunc.n_max(); ++m) {
    const double mag = r_s == 0.0 ? (m == 0 ? 1.0 : 0.0) : std::exp(0.5 * log_squeezed_vacuum_prob(r_s, m));
    v(2 * m) = (m % 2 == 0 ? 1.0 : sign) * mag * std::polar(1.0, angle * static_cast<double>(2 * m));
  }
  return KetState::normalized(std::move(v));
}

OperatorMatrix squeeze_unitary(double r, const FockTruncation& trunc) {
  const int cut = trunc.n_max() - kSqueezeMargin;
  const double tail = cut > 0 ? squeezed_vacuum_tail(r, cut) : (r == 0.0 ? 0.0 : 1.0);
  if (tail > 1e-6) {
    std::ostringstream os;
    os << "squeeze_unitary: squeezed-vacuum tail " << tail << " above n = " << cut << " for r = " << r
       << "; truncation n_max = " << trunc.n_max() << " is inadequate";
    throw PreconditionError(os.str());
  }
  const Eigen::Index nc = trunc.cavity_dim();
  const Eigen::Index working = nc + kSqueezeMargin;
  const Eigen::MatrixXd generator = Eigen::MatrixXd(squeeze_generator(working).real()) * r;
  const Eigen::MatrixXd full = generator.exp();
  const Eigen::MatrixXd cav = full.topLeftCorner(nc, nc);
  SparseOperator cav_sparse = cav.cast<Complex>().sparseView(1.0, 1e-300);
  return tensor(OperatorMatrix::identity(2), OperatorMatrix(std::move(cav_sparse)));
}

KetState apply_squeeze(double r, const KetState& psi, const FockTruncation& trunc, bool adjoint, int margin,
                       double edge_limit, double* edge_mass) {
  if (psi.dim() != trunc.dim()) throw InvalidArgument("apply_squeeze: dimension mismatch");
  if (edge_mass) *edge_mass = 0.0;
  if (r == 0.0) return psi;
  const Eigen::Index nc = trunc.cavity_dim();
  const Eigen::Index working = nc + std::max(margin, kSqueezeMargin);
  // d/ds phi = +/- K phi, written as i d/ds phi = (i K) phi with i K Hermitian
  const double sign = adjoint ? -1.0 : 1.0;
  const SparseOperator generator = Complex(0.0, sign) * squeeze_generator(working);
  const HamiltonianAction action = [&generator](double, const ComplexVector& v, ComplexVector& out) {
    out.noalias() = generator * v;
  };
  const double norm_bound = static_cast<double>(working);
  TimeDependentOptions opts;
  opts.tol = 1e-11;

  ComplexVector out(trunc.dim());
  double leaked = 0.0, high = 0.0;
  for (int s = 0; s < 2; ++s) {
    if (psi.amplitudes().segment(s * nc, nc).squaredNorm() == 0.0) {
      out.segment(s * nc, nc).setZero();
      continue;
    }
    ComplexVector padded = ComplexVector::Zero(working);
    padded.head(nc) = psi.amplitudes().segment(s * nc, nc);
    const ComplexVector image = evolve_time_dependent(action, norm_bound, padded, 0.0, std::abs(r), opts).amplitudes;
    leaked += image.tail(working - nc).squaredNorm();
    const Eigen::Index high_from = std::max<Eigen::Index>(0, nc - kSqueezeMargin);
    high += image.segment(high_from, working - high_from).squaredNorm();
    out.segment(s * nc, nc) = image.head(nc);
  }
  if (edge_mass) *edge_mass = high;
  if (high > edge_limit) {
    std::ostringstream os;
    os << "apply_squeeze: squeezed image of the state reaches the truncation edge (mass " << high
       << " above n = " << trunc.n_max() - kSqueezeMargin << ", " << leaked << " beyond n_max = " << trunc.n_max()
       << ")";
    throw PreconditionError(os.str());
  }
  return KetState::normalized(std::move(out));
}

OperatorMatrix rotation_unitary(const SystemParams& p, double t, const FockTruncation& trunc) {
  const Eigen::Index nc = trunc.cavity_dim();
  std::vector<Eigen::Triplet<Complex>> d;
  for (int s = 0; s < 2; ++s)
    for (Eigen::Index n = 0; n < nc; ++n) {
      const double sz = s == 0 ? -1.0 : 1.0;
      const double angle = 0.5 * p.omega_p * (static_cast<double>(n) + 0.5 * sz) * t;
      d.emplace_back(trunc.index(s, static_cast<int>(n)), trunc.index(s, static_cast<int>(n)), std::polar(1.0, angle));
    }
  SparseOperator m(trunc.dim(), trunc.dim());
  m.setFromTriplets(d.begin(), d.end());
  return OperatorMatrix(std::move(m));
}

FrameCheckResult verify_frame_equivalence(const SystemParams& p, const KetState& psi0_squeezed, double T, int steps,
                                          const FockTruncation& trunc, const FrameCheckOptions& opts) {
  if (steps < 1 || !(T > 0.0)) throw InvalidArgument("verify_frame_equivalence: need T > 0 and steps >= 1");
  if (psi0_squeezed.dim() != trunc.dim()) throw InvalidArgument("verify_frame_equivalence: dimension mismatch");

  const LabHamiltonian lab(p, trunc);
  const HamiltonianAction lab_action = [&lab](double t, const ComplexVector& psi, ComplexVector& out) {
    lab.apply(t, psi, out);
  };
  const OperatorMatrix h_eff = build_H_eff(p, trunc);
  const HamiltonianAction eff_action = [&h_eff](double, const ComplexVector& psi, ComplexVector& out) {
    out.noalias() = h_eff.sparse() * psi;
  };
  const double eff_norm = h_eff.max_abs() * 4.0;

  TimeDependentOptions seg;
  seg.tol = opts.tolerance / steps;

  FrameCheckResult res;
  double edge = 0.0;
  ComplexVector lab_state =
      apply_squeeze(p.r, psi0_squeezed, trunc, /*adjoint=*/true, 200, opts.edge_mass_limit, &edge).amplitudes();
  res.max_edge_mass = edge;
  ComplexVector eff_state = psi0_squeezed.amplitudes();
  double t = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double t_next = T * static_cast<double>(i) / steps;
    if (i > 0) {
      auto lab_run = evolve_time_dependent(lab_action, lab.norm_bound(), lab_state, t, t_next, seg);
      auto eff_run = evolve_time_dependent(eff_action, eff_norm, eff_state, t, t_next, seg);
      lab_state = std::move(lab_run.amplitudes);
      eff_state = std::move(eff_run.amplitudes);
      res.integrator_steps += lab_run.steps + eff_run.steps;
      res.lab_norm_drift = std::max(res.lab_norm_drift, std::abs(lab_state.norm() - 1.0));
      t = t_next;
    }
    // back to the lab frame: U_R^dag(t) U_S^dag psi_S(t)
    const KetState eff_ket = KetState::normalized(eff_state);
    const ComplexVector unsqueezed =
        apply_squeeze(p.r, eff_ket, trunc, /*adjoint=*/true, 200, opts.edge_mass_limit, &edge).amplitudes();
    res.max_edge_mass = std::max(res.max_edge_mass, edge);
    const ComplexVector in_lab = rotation_unitary(p, t, trunc).adjoint().sparse() * unsqueezed;
    const double overlap = std::norm(lab_state.dot(in_lab));
    res.times.push_back(t);
    res.overlaps.push_back(overlap);
    res.min_overlap = std::min(res.min_overlap, overlap);
  }
  return res;
}

}  // namespace chaoslab
