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

#include "core/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/semiclassical.hpp"

namespace chaoslab {

namespace {

constexpr Eigen::Index kBatch = 256;

void require_state_dim(const KetState& psi, const FockTruncation& trunc, const char* where) {
  if (psi.dim() != trunc.dim()) {
    std::ostringstream os;
    os << where << ": state dimension " << psi.dim() << " does not match truncation dimension " << trunc.dim();
    throw InvalidArgument(os.str());
  }
}

TimeSeries make_series(std::span<const double> times, std::string label) {
  TimeSeries s;
  s.times.assign(times.begin(), times.end());
  s.values.assign(times.size(), 0.0);
  s.label = std::move(label);
  s.validate();
  return s;
}

// Qubit linear entropy from the two cavity halves of a pure state.
double entropy_of_amplitudes(const Eigen::Ref<const ComplexVector>& v, Eigen::Index half) {
  const auto g = v.head(half);
  const auto e = v.tail(half);
  const double rgg = g.squaredNorm();
  const double ree = e.squaredNorm();
  const double rge = std::norm(e.dot(g));
  const double total = rgg + ree;
  // 1 - Tr rho^2 = 2 (rho_GG rho_EE - |rho_GE|^2) for a unit-trace 2x2 state.
  const double s = 2.0 * (rgg * ree - rge) / (total * total);
  return std::max(0.0, s);
}

// exp(i eps G) v by Taylor series; G is Hermitian with norm ~ sqrt(n_max).
ComplexVector apply_exp_i_eps(const OperatorMatrix& G, double eps, const Eigen::Ref<const ComplexVector>& v) {
  ComplexVector term = v;
  ComplexVector sum = v;
  for (int k = 1; k < 200; ++k) {
    term = (G.sparse() * term) * (kI * eps / static_cast<double>(k));
    sum += term;
    if (term.norm() < 1e-18 * sum.norm()) return sum;
  }
  throw ConvergenceError("otoc_direct: exp(i eps G) series did not converge; reduce epsilon");
}

void require_unit_interval(double value, const char* what) {
  if (!(value >= -1e-12 && value <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << what << " left [0, 1]: " << value;
    throw ConvergenceError(os.str());
  }
}

// Cavity population of a full-space state in the top `levels` Fock states.
double edge_population(const ComplexVector& v, const FockTruncation& trunc, int levels) {
  const Eigen::Index half = trunc.n_max() + 1;
  const Eigen::Index k = std::min<Eigen::Index>(levels, half);
  return v.segment(half - k, k).squaredNorm() + v.tail(k).squaredNorm();
}

}  // namespace

void TimeSeries::validate() const {
  if (times.size() != values.size()) throw InvalidArgument("TimeSeries: times and values differ in length");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw InvalidArgument("TimeSeries: times must be strictly increasing");
}

double fidelity(const KetState& a, const KetState& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("fidelity: dimension mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double time_average(const TimeSeries& s) {
  s.validate();
  if (s.size() < 2) throw InvalidArgument("time_average: need at least two samples");
  double acc = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i)
    acc += 0.5 * (s.values[i] + s.values[i - 1]) * (s.times[i] - s.times[i - 1]);
  return acc / (s.times.back() - s.times.front());
}

TimeSeries loschmidt_echo(const SpectralPropagator& unperturbed, const SpectralPropagator& perturbed,
                          const KetState& psi0, std::span<const double> times) {
  TimeSeries out = make_series(times, "loschmidt_echo");
  const auto c0 = unperturbed.project(psi0);
  const auto c1 = perturbed.project(psi0);
  for (std::size_t start = 0; start < times.size(); start += kBatch) {
    const std::size_t count = std::min<std::size_t>(kBatch, times.size() - start);
    const auto sub = times.subspan(start, count);
    const ComplexMatrix a = unperturbed.evolve_batch(c0, sub);
    const ComplexMatrix b = perturbed.evolve_batch(c1, sub);
    for (std::size_t j = 0; j < count; ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      const double v = sub[j] == 0.0 ? std::norm(psi0.amplitudes().squaredNorm())
                                     : std::norm(a.col(col).dot(b.col(col)));
      require_unit_interval(v, "Loschmidt echo");
      out.values[start + j] = std::min(v, 1.0);
    }
  }
  return out;
}

TimeSeries loschmidt_echo(const SystemParams& p, const FockTruncation& trunc, const KetState& psi0,
                          std::span<const double> times, double err_scale) {
  require_state_dim(psi0, trunc, "loschmidt_echo");
  const SpectralPropagator rabi = diagonalize(build_H_rabi(p, trunc));
  const SpectralPropagator eff = diagonalize(build_H_eff(p, trunc, err_scale));
  return loschmidt_echo(rabi, eff, psi0, times);
}

TimeSeries fidelity_vs_r_scan(const SystemParams& base, const CoherentLabels& labels, double T,
                              std::span<const double> r_values, const FockTruncation& trunc, int threads) {
  if (r_values.empty()) throw InvalidArgument("fidelity_vs_r_scan: empty r array");
  const KetState psi0 = product_state(labels.tau, labels.beta, trunc);
  TimeSeries out;
  out.times.assign(r_values.begin(), r_values.end());
  out.values.assign(r_values.size(), 0.0);
  out.label = "fidelity_vs_r";
  out.validate();
  parallel_for(r_values.size(), threads, [&](std::size_t i) {
    SystemParams p = base;
    p.r = r_values[i];
    p.validate();
    const ComplexVector a = diagonalize(build_H_rabi(p, trunc)).evolve(psi0, T).amplitudes();
    const ComplexVector b = diagonalize(build_H_eff(p, trunc)).evolve(psi0, T).amplitudes();
    const double edge =
        std::max(edge_population(a, trunc, kScanEdgeLevels), edge_population(b, trunc, kScanEdgeLevels));
    if (edge > kScanEdgeLimit) {
      std::ostringstream os;
      os << "fidelity_vs_r_scan: truncation n_max = " << trunc.n_max() << " inadequate at r = " << p.r << " ("
         << edge << " of the population in the top " << kScanEdgeLevels << " Fock levels at T)";
      throw PreconditionError(os.str());
    }
    const double v = std::norm(a.dot(b));
    require_unit_interval(v, "Loschmidt echo");
    out.values[i] = std::min(v, 1.0);
  });
  return out;
}

OperatorMatrix quadrature_G(const FockTruncation& trunc) {
  const OperatorSet ops = build_operators(trunc);
  return (0.5 * (ops.A + ops.A_dag)).as_hermitian();
}

TimeSeries otoc_variance(const SpectralPropagator& H, const KetState& psi0, std::span<const double> times,
                         const FockTruncation& trunc, const std::optional<OperatorMatrix>& observable) {
  require_state_dim(psi0, trunc, "otoc_variance");
  const OperatorMatrix G = observable ? *observable : quadrature_G(trunc);
  if (G.dim() != trunc.dim()) throw InvalidArgument("otoc_variance: observable dimension mismatch");
  TimeSeries out = make_series(times, "var_G");
  H.for_each_time(psi0, times, [&](std::size_t i, const Eigen::Ref<const ComplexVector>& v) {
    ComplexVector gv = G.sparse() * v;
    const Complex mean = v.dot(gv);
    gv -= mean * v;
    out.values[i] = gv.squaredNorm();
  });
  return out;
}

OtocDirectResult otoc_direct(const SpectralPropagator& H, const KetState& phi, const OtocConfig& cfg,
                             const FockTruncation& trunc) {
  require_state_dim(phi, trunc, "otoc_direct");
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) throw InvalidArgument("otoc_direct: epsilon must be > 0");
  const OperatorMatrix G = quadrature_G(trunc);
  OtocDirectResult res;
  res.f = make_series(cfg.times, "otoc_F");
  double max_var = 0.0;
  H.for_each_time(phi, cfg.times, [&](std::size_t i, const Eigen::Ref<const ComplexVector>& v) {
    const ComplexVector w = apply_exp_i_eps(G, cfg.epsilon, v);
    const double f = std::norm(v.dot(w));
    require_unit_interval(f, "OTOC F(t)");
    res.f.values[i] = f;
    ComplexVector gv = G.sparse() * v;
    gv -= v.dot(gv) * v;
    max_var = std::max(max_var, gv.squaredNorm());
  });
  res.small_parameter_warning = cfg.epsilon * cfg.epsilon * max_var > cfg.small_parameter_limit;
  return res;
}

ScramblingTime scrambling_time(const TimeSeries& series) {
  series.validate();
  if (series.size() == 0) throw InvalidArgument("scrambling_time: empty series");
  const double peak = *std::max_element(series.values.begin(), series.values.end());
  const double tol = 1e-9 * std::max(std::abs(peak), std::numeric_limits<double>::min());
  ScramblingTime st;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series.values[i] >= peak - tol) {
      st.index = i;
      break;
    }
  st.t_star = series.times[st.index];
  st.at_horizon = st.index + 1 == series.size();
  return st;
}

LyapunovFit lyapunov_fit(const TimeSeries& series, double t_lo, double t_hi) {
  series.validate();
  if (series.size() == 0 || !(t_lo < t_hi) || t_lo < series.times.front() || t_hi > series.times.back())
    throw InvalidArgument("lyapunov_fit: window must lie inside the series range");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    if (t < t_lo || t > t_hi) continue;
    if (!(series.values[i] > 0.0)) throw InvalidArgument("lyapunov_fit: non-positive value inside the fit window");
    xs.push_back(t);
    ys.push_back(std::log(series.values[i]));
  }
  LyapunovFit fit;
  fit.points = xs.size();
  if (xs.size() < 3) throw InvalidArgument("lyapunov_fit: fewer than three samples in the window");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.lambda_q = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + fit.lambda_q * (xs[i] - mx));
    ss_res += r * r;
  }
  // A perfectly flat series is fitted exactly.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.reliable = fit.r_squared >= 0.9;
  return fit;
}

std::pair<double, double> default_fit_window(double t_star) { return {0.05 * t_star, 0.8 * t_star}; }

double linear_entropy(const DensityMatrix& rho_full, const FockTruncation& trunc) {
  if (rho_full.dim() != trunc.dim()) throw InvalidArgument("linear_entropy: dimension mismatch");
  return std::max(0.0, 1.0 - partial_trace_cavity(rho_full, trunc).purity());
}

double linear_entropy(const KetState& psi, const FockTruncation& trunc) {
  require_state_dim(psi, trunc, "linear_entropy");
  return entropy_of_amplitudes(psi.amplitudes(), trunc.cavity_dim());
}

TimeSeries entropy_series(const SpectralPropagator& H, const KetState& psi0, std::span<const double> times,
                          const FockTruncation& trunc) {
  require_state_dim(psi0, trunc, "entropy_series");
  TimeSeries out = make_series(times, "linear_entropy");
  const Eigen::Index half = trunc.cavity_dim();
  H.for_each_time(psi0, times, [&](std::size_t i, const Eigen::Ref<const ComplexVector>& v) {
    out.values[i] = entropy_of_amplitudes(v, half);
  });
  return out;
}

TimeSeries entropy_series(const SystemParams& p, const FockTruncation& trunc, const KetState& psi0,
                          std::span<const double> times, HamiltonianChoice choice, double err_scale) {
  const OperatorMatrix H = choice == HamiltonianChoice::eff ? build_H_eff(p, trunc, err_scale) : build_H_rabi(p, trunc);
  return entropy_series(diagonalize(H), psi0, times, trunc);
}

double average_entropy(const TimeSeries& series, double T) {
  series.validate();
  if (!(T > 0.0) || series.size() < 2) throw InvalidArgument("average_entropy: need T > 0 and two samples");
  const double span_tol = 1e-12 * T;
  if (std::abs(series.times.front()) > span_tol || std::abs(series.times.back() - T) > span_tol)
    throw InvalidArgument("average_entropy: series does not cover [0, T]");
  double acc = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i)
    acc += 0.5 * (series.values[i] + series.values[i - 1]) * (series.times[i] - series.times[i - 1]);
  return acc / T;
}

namespace {

// Nested trapezoid refinement of the entropy average; each doubling only
// evaluates the new midpoints.
AveragedEntropy averaged_entropy_from_coefficients(const SpectralPropagator& H,
                                                   const SpectralPropagator::Coefficients& c, double T,
                                                   Eigen::Index half, std::size_t initial_samples, double rel_tol,
                                                   std::size_t max_samples) {
  if (!(T > 0.0)) throw InvalidArgument("time_averaged_entropy: T must be > 0");
  if (initial_samples < 2) throw InvalidArgument("time_averaged_entropy: need at least two samples");
  auto sum_at = [&](const std::vector<double>& times) {
    double acc = 0.0;
    for (std::size_t start = 0; start < times.size(); start += kBatch) {
      const std::size_t count = std::min<std::size_t>(kBatch, times.size() - start);
      const ComplexMatrix cols = H.evolve_batch(c, std::span<const double>(times).subspan(start, count));
      for (Eigen::Index j = 0; j < cols.cols(); ++j) acc += entropy_of_amplitudes(cols.col(j), half);
    }
    return acc;
  };
  std::size_t intervals = initial_samples - 1;
  double h = T / static_cast<double>(intervals);
  const double ends = sum_at({0.0, T});
  std::vector<double> interior;
  for (std::size_t k = 1; k < intervals; ++k) interior.push_back(h * static_cast<double>(k));
  double interior_sum = sum_at(interior);
  AveragedEntropy res;
  res.value = (0.5 * ends + interior_sum) * h / T;
  res.samples = intervals + 1;
  while (2 * intervals + 1 <= max_samples) {
    std::vector<double> mids(intervals);
    for (std::size_t k = 0; k < intervals; ++k) mids[k] = h * (static_cast<double>(k) + 0.5);
    interior_sum += sum_at(mids);
    intervals *= 2;
    h = T / static_cast<double>(intervals);
    const double next = (0.5 * ends + interior_sum) * h / T;
    res.last_change = std::abs(next - res.value) / std::max(std::abs(next), 1e-300);
    res.value = next;
    res.samples = intervals + 1;
    if (res.last_change < rel_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace

AveragedEntropy time_averaged_entropy(const SpectralPropagator& H, const KetState& psi0, double T,
                                      const FockTruncation& trunc, std::size_t initial_samples, double rel_tol,
                                      std::size_t max_samples) {
  require_state_dim(psi0, trunc, "time_averaged_entropy");
  return averaged_entropy_from_coefficients(H, H.project(psi0), T, trunc.cavity_dim(), initial_samples, rel_tol,
                                            max_samples);
}

EntropyMap entropy_map(const SystemParams& p, const FockTruncation& trunc, const EntropyMapSpec& spec) {
  if (spec.q1_points < 1 || spec.p1_points < 1) throw InvalidArgument("entropy_map: empty grid");
  if (!(spec.T > 0.0)) throw InvalidArgument("entropy_map: T must be > 0");
  EntropyMap map;
  auto axis = [](double lo, double hi, int n) {
    std::vector<double> a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return a;
  };
  map.q1_axis = axis(spec.q1_min, spec.q1_max, spec.q1_points);
  map.p1_axis = axis(spec.p1_min, spec.p1_max, spec.p1_points);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  map.values = Eigen::MatrixXd::Constant(spec.q1_points, spec.p1_points, nan);
  map.p2 = Eigen::MatrixXd::Constant(spec.q1_points, spec.p1_points, nan);
  const std::size_t cells = static_cast<std::size_t>(spec.q1_points) * static_cast<std::size_t>(spec.p1_points);
  map.masked.assign(cells, 1);

  std::vector<std::size_t> admissible;
  for (int i = 0; i < spec.q1_points; ++i)
    for (int j = 0; j < spec.p1_points; ++j) {
      const double q1 = map.q1_axis[static_cast<std::size_t>(i)], p1 = map.p1_axis[static_cast<std::size_t>(j)];
      if (!(q1 * q1 + p1 * p1 < 2.0)) continue;
      const auto root = solve_p2_on_shell(q1, p1, spec.energy, p);
      if (!root) continue;
      map.p2(i, j) = root->p2;
      const std::size_t cell = static_cast<std::size_t>(i) * static_cast<std::size_t>(spec.p1_points) + j;
      map.masked[cell] = 0;
      admissible.push_back(cell);
    }
  if (admissible.empty()) throw PreconditionError("entropy_map: no grid cell lies on the energy shell");

  const SpectralPropagator H = diagonalize(build_H_eff(p, trunc));
  std::vector<AveragedEntropy> results(admissible.size());
  parallel_for(admissible.size(), spec.threads, [&](std::size_t k) {
    const std::size_t cell = admissible[k];
    const auto i = static_cast<Eigen::Index>(cell / static_cast<std::size_t>(spec.p1_points));
    const auto j = static_cast<Eigen::Index>(cell % static_cast<std::size_t>(spec.p1_points));
    const PhasePoint pt{map.q1_axis[static_cast<std::size_t>(i)], map.p1_axis[static_cast<std::size_t>(j)], 0.0,
                        map.p2(i, j)};
    const CoherentLabels labels = phase_to_labels(pt);
    const KetState psi0 = product_state(labels.tau, labels.beta, trunc);
    results[k] = averaged_entropy_from_coefficients(H, H.project(psi0), spec.T, trunc.cavity_dim(),
                                                    spec.initial_samples, spec.rel_tol, spec.max_samples);
  });
  for (std::size_t k = 0; k < admissible.size(); ++k) {
    const std::size_t cell = admissible[k];
    const auto i = static_cast<Eigen::Index>(cell / static_cast<std::size_t>(spec.p1_points));
    const auto j = static_cast<Eigen::Index>(cell % static_cast<std::size_t>(spec.p1_points));
    map.values(i, j) = results[k].value;
    if (!results[k].converged) ++map.unconverged;
  }
  return map;
}

TimeSeries recurrence(const SpectralPropagator& H, const KetState& psi0, std::span<const double> times) {
  TimeSeries out = make_series(times, "recurrence");
  const auto c = H.project(psi0);
  // P(t) = |sum_k |c_k|^2 exp(-i E_k t)|^2 needs only the eigen-populations.
  std::vector<double> energies, weights;
  for (std::size_t b = 0; b < H.blocks().size(); ++b)
    for (Eigen::Index k = 0; k < c[b].size(); ++k) {
      energies.push_back(H.blocks()[b].energies(k));
      weights.push_back(std::norm(c[b](k)));
    }
  for (std::size_t i = 0; i < times.size(); ++i) {
    Complex amp = 0.0;
    for (std::size_t k = 0; k < energies.size(); ++k) amp += weights[k] * std::polar(1.0, -energies[k] * times[i]);
    const double v = std::norm(amp);
    require_unit_interval(v, "recurrence probability");
    out.values[i] = std::min(v, 1.0);
  }
  return out;
}

double revival_amplitude(const TimeSeries& s, double collapse_level) {
  s.validate();
  std::size_t i = 0;
  while (i < s.size() && s.values[i] >= collapse_level) ++i;
  double best = 0.0;
  for (; i < s.size(); ++i) best = std::max(best, s.values[i]);
  return best;
}

ComplexVector coherent_vector(Complex beta, Eigen::Index cavity_dim) {
  ComplexVector v(cavity_dim);
  const double mod = std::abs(beta);
  if (mod == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  const double log_mod = std::log(mod);
  const double base = -0.5 * mod * mod;
  const Complex unit = beta / mod;
  Complex phase = 1.0;
  for (Eigen::Index n = 0; n < cavity_dim; ++n) {
    if (n > 0) phase *= unit;
    const double nn = static_cast<double>(n);
    v(n) = std::exp(base + nn * log_mod - 0.5 * std::lgamma(nn + 1.0)) * phase;
  }
  return v;
}

double HusimiGrid::cell_area() const {
  auto step = [](const std::vector<double>& a) { return a.size() > 1 ? (a.back() - a.front()) / (a.size() - 1) : 0.0; };
  return step(re_beta_axis) * step(im_beta_axis);
}

double HusimiGrid::normalization() const { return q_values.sum() * cell_area(); }

Complex HusimiGrid::mean() const {
  Complex m = 0.0;
  for (Eigen::Index i = 0; i < q_values.rows(); ++i)
    for (Eigen::Index j = 0; j < q_values.cols(); ++j)
      m += q_values(i, j) * grid_point(i, j);
  return m * cell_area() / normalization();
}

double HusimiGrid::spread() const {
  const Complex m = mean();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q_values.rows(); ++i)
    for (Eigen::Index j = 0; j < q_values.cols(); ++j)
      acc += q_values(i, j) * std::norm(grid_point(i, j) - m);
  return acc * cell_area() / normalization();
}

HusimiGridSpec default_husimi_grid(const KetState& psi, const FockTruncation& trunc, int points) {
  require_state_dim(psi, trunc, "default_husimi_grid");
  const Eigen::Index half = trunc.cavity_dim();
  const auto& v = psi.amplitudes();
  double cumulative = 0.0;
  Eigen::Index support = 0;
  for (Eigen::Index n = 0; n < half; ++n) {
    cumulative += std::norm(v(n)) + std::norm(v(half + n));
    support = n;
    if (cumulative >= 1.0 - 1e-6) break;
  }
  const double radius = std::max(3.0, 1.5 * std::sqrt(static_cast<double>(support)));
  HusimiGridSpec g;
  g.re_min = g.im_min = -radius;
  g.re_max = g.im_max = radius;
  g.re_points = g.im_points = points;
  return g;
}

namespace {

std::vector<double> grid_axis(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw InvalidArgument("husimi: grid needs at least two points per axis and hi > lo");
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return a;
}

template <class CellValue>
HusimiGrid husimi_grid(const HusimiGridSpec& spec, double time, CellValue&& value) {
  HusimiGrid grid;
  grid.re_beta_axis = grid_axis(spec.re_min, spec.re_max, spec.re_points);
  grid.im_beta_axis = grid_axis(spec.im_min, spec.im_max, spec.im_points);
  grid.snapshot_time = time;
  grid.q_values.resize(spec.re_points, spec.im_points);
  for (Eigen::Index i = 0; i < spec.re_points; ++i)
    for (Eigen::Index j = 0; j < spec.im_points; ++j)
      grid.q_values(i, j) = value(grid.grid_point(i, j)) / std::numbers::pi;
  return grid;
}

}  // namespace

HusimiGrid husimi(const KetState& psi, const FockTruncation& trunc, const HusimiGridSpec& spec, double time) {
  require_state_dim(psi, trunc, "husimi");
  const Eigen::Index half = trunc.cavity_dim();
  const auto g = psi.amplitudes().head(half);
  const auto e = psi.amplitudes().tail(half);
  // <beta| rho_2 |beta> = sum over qubit levels of |<beta|psi_s>|^2.
  return husimi_grid(spec, time, [&](Complex beta) {
    const ComplexVector cv = coherent_vector(beta, half);
    return std::norm(cv.dot(g)) + std::norm(cv.dot(e));
  });
}

HusimiGrid husimi(const DensityMatrix& rho_cavity, const HusimiGridSpec& spec, double time) {
  const ComplexMatrix& rho = rho_cavity.matrix();
  return husimi_grid(spec, time, [&](Complex beta) {
    const ComplexVector cv = coherent_vector(beta, rho.rows());
    return std::max(0.0, cv.dot(rho * cv).real());
  });
}

HusimiGrid husimi_snapshot(const SpectralPropagator& H, const KetState& psi0, double t, const FockTruncation& trunc,
                           const HusimiGridSpec& grid) {
  return husimi(H.evolve(psi0, t), trunc, grid, t);
}

}  // namespace chaoslab
