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

#include "core/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"
#include "core/ode.hpp"

namespace chaoslab {

namespace {

// Union-find over the nonzero pattern of a sparse operator.
std::vector<std::vector<Eigen::Index>> connected_components(const SparseOperator& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(m, k); it; ++it) {
      if (it.value() == Complex(0.0)) continue;
      const Eigen::Index a = find(it.row()), b = find(it.col());
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

}  // namespace

SpectralPropagator diagonalize(const OperatorMatrix& H) {
  if (!H.hermitian_flag()) {
    const double defect = H.hermiticity_defect();
    if (defect > 1e-12 * std::max(1.0, H.max_abs())) {
      std::ostringstream os;
      os << "diagonalize: operator is not Hermitian (max |H - H^dag| = " << defect << ")";
      throw InvalidArgument(os.str());
    }
  }
  const SparseOperator& m = H.sparse();
  const bool real = H.is_real();
  SpectralPropagator out;
  out.dim_ = H.dim();

  std::vector<Eigen::Index> local(static_cast<std::size_t>(H.dim()));
  for (auto& basis : connected_components(m)) {
    SpectralPropagator::Block block;
    const auto nb = static_cast<Eigen::Index>(basis.size());
    for (Eigen::Index i = 0; i < nb; ++i) local[basis[i]] = i;
    ComplexMatrix dense = ComplexMatrix::Zero(nb, nb);
    for (Eigen::Index j : basis)
      for (SparseOperator::InnerIterator it(m, j); it; ++it)
        if (it.value() != Complex(0.0)) dense(local[it.row()], local[it.col()]) = it.value();
    block.real = real;
    if (real) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense.real());
      if (es.info() != Eigen::Success) throw ConvergenceError("diagonalize: eigensolver failed");
      block.energies = es.eigenvalues();
      block.real_vectors = es.eigenvectors();
    } else {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(dense);
      if (es.info() != Eigen::Success) throw ConvergenceError("diagonalize: eigensolver failed");
      block.energies = es.eigenvalues();
      block.complex_vectors = es.eigenvectors();
    }
    block.basis = std::move(basis);
    out.blocks_.push_back(std::move(block));
  }
  return out;
}

namespace {

struct EigenIndex {
  double energy;
  std::size_t block;
  Eigen::Index column;
};

std::vector<EigenIndex> sorted_spectrum(const std::vector<SpectralPropagator::Block>& blocks) {
  std::vector<EigenIndex> all;
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (Eigen::Index j = 0; j < blocks[b].energies.size(); ++j) all.push_back({blocks[b].energies(j), b, j});
  std::stable_sort(all.begin(), all.end(),
                   [](const EigenIndex& x, const EigenIndex& y) { return x.energy < y.energy; });
  return all;
}

ComplexMatrix block_vectors(const SpectralPropagator::Block& b) {
  if (b.real) return b.real_vectors.cast<Complex>();
  return b.complex_vectors;
}

}  // namespace

Eigen::VectorXd SpectralPropagator::eigenvalues() const {
  const auto all = sorted_spectrum(blocks_);
  Eigen::VectorXd out(static_cast<Eigen::Index>(all.size()));
  for (std::size_t i = 0; i < all.size(); ++i) out(static_cast<Eigen::Index>(i)) = all[i].energy;
  return out;
}

ComplexMatrix SpectralPropagator::eigenvectors() const {
  const auto all = sorted_spectrum(blocks_);
  ComplexMatrix out = ComplexMatrix::Zero(dim_, dim_);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Block& b = blocks_[all[i].block];
    for (std::size_t r = 0; r < b.basis.size(); ++r) {
      const auto rr = static_cast<Eigen::Index>(r);
      out(b.basis[r], static_cast<Eigen::Index>(i)) =
          b.real ? Complex(b.real_vectors(rr, all[i].column)) : b.complex_vectors(rr, all[i].column);
    }
  }
  return out;
}

double SpectralPropagator::reconstruction_residual(const OperatorMatrix& H) const {
  if (H.dim() != dim_) throw InvalidArgument("reconstruction_residual: dimension mismatch");
  ComplexMatrix rebuilt = ComplexMatrix::Zero(dim_, dim_);
  for (const Block& b : blocks_) {
    const ComplexMatrix v = block_vectors(b);
    const ComplexMatrix local = v * b.energies.asDiagonal() * v.adjoint();
    for (std::size_t i = 0; i < b.basis.size(); ++i)
      for (std::size_t j = 0; j < b.basis.size(); ++j)
        rebuilt(b.basis[i], b.basis[j]) = local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return (rebuilt - H.dense()).cwiseAbs().maxCoeff();
}

double SpectralPropagator::orthonormality_defect() const {
  double worst = 0.0;
  for (const Block& b : blocks_) {
    const ComplexMatrix v = block_vectors(b);
    const auto n = static_cast<Eigen::Index>(b.basis.size());
    worst = std::max(worst, (v.adjoint() * v - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  return worst;
}

SpectralPropagator::Coefficients SpectralPropagator::project(const KetState& psi) const {
  if (psi.dim() != dim_) throw InvalidArgument("SpectralPropagator::project: dimension mismatch");
  Coefficients c;
  c.reserve(blocks_.size());
  for (const Block& b : blocks_) {
    ComplexVector local(static_cast<Eigen::Index>(b.basis.size()));
    for (std::size_t i = 0; i < b.basis.size(); ++i) local(static_cast<Eigen::Index>(i)) = psi.amplitudes()(b.basis[i]);
    if (b.real) {
      ComplexVector proj(local.size());
      proj.real() = b.real_vectors.transpose() * local.real();
      proj.imag() = b.real_vectors.transpose() * local.imag();
      c.push_back(std::move(proj));
    } else {
      c.push_back(b.complex_vectors.adjoint() * local);
    }
  }
  return c;
}

double SpectralPropagator::energy(const Coefficients& c) const {
  double e = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) e += blocks_[b].energies.dot(c[b].cwiseAbs2());
  return e;
}

ComplexMatrix SpectralPropagator::evolve_batch(const Coefficients& c, std::span<const double> times) const {
  if (c.size() != blocks_.size()) throw InvalidArgument("evolve_batch: coefficient layout mismatch");
  const auto nt = static_cast<Eigen::Index>(times.size());
  ComplexMatrix out(dim_, nt);
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    const Block& b = blocks_[bi];
    const auto nb = static_cast<Eigen::Index>(b.basis.size());
    ComplexMatrix phased(nb, nt);
    for (Eigen::Index j = 0; j < nt; ++j)
      for (Eigen::Index k = 0; k < nb; ++k)
        phased(k, j) = c[bi](k) * std::polar(1.0, -b.energies(k) * times[static_cast<std::size_t>(j)]);
    if (b.real) {
      const Eigen::MatrixXd re = b.real_vectors * phased.real();
      const Eigen::MatrixXd im = b.real_vectors * phased.imag();
      for (Eigen::Index k = 0; k < nb; ++k) {
        out.row(b.basis[k]).real() = re.row(k);
        out.row(b.basis[k]).imag() = im.row(k);
      }
    } else {
      const ComplexMatrix v = b.complex_vectors * phased;
      for (Eigen::Index k = 0; k < nb; ++k) out.row(b.basis[k]) = v.row(k);
    }
  }
  return out;
}

KetState SpectralPropagator::evolve(const KetState& psi0, double t) const {
  const double times[] = {t};
  if (t == 0.0) return psi0;
  return KetState(evolve_batch(project(psi0), times).col(0));
}

std::vector<KetState> SpectralPropagator::evolve_series(const KetState& psi0, std::span<const double> times) const {
  if (!std::is_sorted(times.begin(), times.end())) throw InvalidArgument("evolve_series: times must be sorted");
  std::vector<KetState> out;
  out.reserve(times.size());
  for_each_time(psi0, times, [&](std::size_t i, const Eigen::Ref<const ComplexVector>& v) {
    out.push_back(times[i] == 0.0 ? psi0 : KetState(ComplexVector(v)));
  });
  return out;
}

void SpectralPropagator::for_each_time(
    const KetState& psi0, std::span<const double> times,
    const std::function<void(std::size_t, const Eigen::Ref<const ComplexVector>&)>& fn, Eigen::Index batch) const {
  const Coefficients c = project(psi0);
  const std::size_t step = static_cast<std::size_t>(std::max<Eigen::Index>(1, batch));
  for (std::size_t start = 0; start < times.size(); start += step) {
    const std::size_t count = std::min(step, times.size() - start);
    const ComplexMatrix cols = evolve_batch(c, times.subspan(start, count));
    for (std::size_t j = 0; j < count; ++j) {
      if (times[start + j] == 0.0) fn(start + j, psi0.amplitudes());
      else fn(start + j, cols.col(static_cast<Eigen::Index>(j)));
    }
  }
}

namespace {

double row_sum_norm(const SparseOperator& m) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(m, k); it; ++it) sums(it.row()) += std::abs(it.value());
  return sums.size() ? sums.maxCoeff() : 0.0;
}

}  // namespace

TimeDependentResult evolve_time_dependent(const HamiltonianBuilder& H, const ComplexVector& psi0, double t_start,
                                          double t_end, const TimeDependentOptions& opts) {
  const HamiltonianAction action = [&H](double t, const ComplexVector& y, ComplexVector& out) {
    const OperatorMatrix h = H(t);
    if (h.dim() != y.size()) throw InvalidArgument("evolve_time_dependent: Hamiltonian dimension mismatch");
    out.noalias() = h.sparse() * y;
  };
  return evolve_time_dependent(action, row_sum_norm(H(t_start).sparse()), psi0, t_start, t_end, opts);
}

TimeDependentResult evolve_time_dependent(const HamiltonianAction& H, double norm_bound, const ComplexVector& psi0,
                                          double t_start, double t_end, const TimeDependentOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("evolve_time_dependent: tol must be positive");
  TimeDependentResult res{psi0, 0, 0, 0.0};
  const double span = t_end - t_start;
  if (span == 0.0) return res;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  const double norm0 = psi0.norm();

  ComplexVector work(psi0.size());
  const auto rhs = [&H, &work](double t, const ComplexVector& y) -> ComplexVector {
    H(t, y, work);
    return -kI * work;
  };

  double h = opts.initial_step;
  if (h <= 0.0) h = norm_bound > 0.0 ? 0.5 / norm_bound : 1e-3 * std::abs(span);
  h = std::min(h, std::abs(span));

  double t = t_start;
  ComplexVector y = psi0;
  ComplexVector k1 = rhs(t, y);
  while (dir * (t_end - t) > 0.0) {
    double step = std::min(h, dir * (t_end - t));
    if (step < opts.min_step) {
      std::ostringstream os;
      os << "evolve_time_dependent: step size underflow at t = " << t;
      throw ConvergenceError(os.str());
    }
    const auto trial = ode::dormand_prince_attempt(rhs, t, y, k1, dir * step);
    const double budget = opts.tol * step / std::abs(span);
    const double err = trial.error.norm() / budget;
    if (err <= 1.0) {
      const bool last = step >= dir * (t_end - t);
      t = last ? t_end : t + dir * step;
      y = trial.y1;
      k1 = trial.k7;
      ++res.steps;
      res.norm_drift = std::max(res.norm_drift, std::abs(y.norm() - norm0));
    } else {
      ++res.rejected;
    }
    h = step * ode::next_step_factor(err);
  }
  if (res.norm_drift > opts.tol) {
    std::ostringstream os;
    os << "evolve_time_dependent: norm drift " << res.norm_drift << " exceeds tolerance " << opts.tol;
    throw ConvergenceError(os.str());
  }
  res.amplitudes = std::move(y);
  return res;
}

KetState evolve_time_dependent(const HamiltonianBuilder& H, const KetState& psi0, double t_end, double tol) {
  TimeDependentOptions opts;
  opts.tol = tol;
  return KetState(evolve_time_dependent(H, psi0.amplitudes(), 0.0, t_end, opts).amplitudes);
}

std::vector<double> uniform_times(double T, std::size_t count) {
  if (count < 2) throw InvalidArgument("uniform_times: need at least two samples");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(count - 1);
  return t;
}

}  // namespace chaoslab
