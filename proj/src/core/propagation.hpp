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

// Time evolution. Static Hamiltonians are diagonalized once and evolved
// exactly in the eigenbasis; the time-dependent lab Hamiltonian goes through
// an adaptive Dormand-Prince integrator without renormalization, so the norm
// drift stays visible as the error monitor.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "core/quantum_core.hpp"

namespace chaoslab {

/// Eigen-decomposition of a Hermitian operator. The sparsity graph of H is
/// split into connected components (e.g. parity sectors of the Rabi model)
/// that are diagonalized independently; real operators use a real solver.
class SpectralPropagator {
 public:
  struct Block {
    std::vector<Eigen::Index> basis;  ///< flat indices spanned by this block
    Eigen::VectorXd energies;
    Eigen::MatrixXd real_vectors;      ///< used when `real`
    Eigen::MatrixXcd complex_vectors;  ///< used otherwise
    bool real = true;
  };

  /// Coefficients of a state in the eigenbasis, one vector per block.
  using Coefficients = std::vector<ComplexVector>;

  Eigen::Index dim() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// All eigenvalues sorted ascending.
  Eigen::VectorXd eigenvalues() const;
  /// Dense eigenvector matrix, columns ordered like eigenvalues().
  ComplexMatrix eigenvectors() const;

  /// max |V Lambda V^dag - H|.
  double reconstruction_residual(const OperatorMatrix& H) const;
  /// max |V^dag V - I| over the blocks.
  double orthonormality_defect() const;

  Coefficients project(const KetState& psi) const;
  double energy(const Coefficients& c) const;

  /// psi(t) = V exp(-i Lambda t) V^dag psi0.
  KetState evolve(const KetState& psi0, double t) const;
  std::vector<KetState> evolve_series(const KetState& psi0, std::span<const double> times) const;

  /// Raw evolved amplitudes for a batch of times, one column per time.
  ComplexMatrix evolve_batch(const Coefficients& c, std::span<const double> times) const;

  /// Calls fn(i, amplitudes) for every sample time, in order, evaluating the
  /// times in batches of `batch` columns. t = 0 yields psi0 unchanged.
  void for_each_time(const KetState& psi0, std::span<const double> times,
                     const std::function<void(std::size_t, const Eigen::Ref<const ComplexVector>&)>& fn,
                     Eigen::Index batch = 256) const;

 private:
  friend SpectralPropagator diagonalize(const OperatorMatrix& H);
  Eigen::Index dim_ = 0;
  std::vector<Block> blocks_;
};

/// Throws InvalidArgument for non-Hermitian input.
SpectralPropagator diagonalize(const OperatorMatrix& H);

using HamiltonianBuilder = std::function<OperatorMatrix(double)>;

/// Matrix-free form: writes H(t) psi into out (out is pre-sized).
using HamiltonianAction = std::function<void(double t, const ComplexVector& psi, ComplexVector& out)>;

struct TimeDependentOptions {
  double tol = 1e-8;         ///< global error budget (state-norm distance)
  double min_step = 1e-12;   ///< absolute step size below which the run fails
  double initial_step = 0.0; ///< 0 picks a step from ||H||
};

struct TimeDependentResult {
  ComplexVector amplitudes;  ///< not renormalized
  long steps = 0;
  long rejected = 0;
  double norm_drift = 0.0;  ///< max | ||psi|| - 1 | seen along the run
};

/// Integrates i d/dt psi = H(t) psi from t_start to t_end. Local error per step
/// is held below tol * h / |t_end - t_start| so the accumulated error stays
/// within tol. Throws ConvergenceError on step-size underflow or when the norm
/// drift exceeds tol.
TimeDependentResult evolve_time_dependent(const HamiltonianBuilder& H, const ComplexVector& psi0, double t_start,
                                          double t_end, const TimeDependentOptions& opts = {});
/// Same integrator driven by H(t) psi directly. `norm_bound` (an upper bound
/// of ||H(t)||) only seeds the first step; 0 lets the controller find it.
TimeDependentResult evolve_time_dependent(const HamiltonianAction& H, double norm_bound, const ComplexVector& psi0,
                                          double t_start, double t_end, const TimeDependentOptions& opts = {});
/// Convenience form from t = 0; returns the renormalization-free state, which
/// must satisfy the KetState norm invariant.
KetState evolve_time_dependent(const HamiltonianBuilder& H, const KetState& psi0, double t_end, double tol);

/// Uniform grid of `count` times covering [0, T] inclusive.
std::vector<double> uniform_times(double T, std::size_t count);

}  // namespace chaoslab
