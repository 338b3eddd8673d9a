// Copyright 2026 The qpa-readout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Brute-force number-basis oracle for the resonator master equation.
//
// Superoperators act on row-major vectorized matrices, so that
// vec(A X B) = (A kron B^T) vec(X).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include "qpa/analytic.hpp"
#include "qpa/error.hpp"
#include "qpa/gaussian.hpp"
#include "qpa/ode.hpp"
#include "qpa/parallel.hpp"
#include "qpa/params.hpp"

namespace qpa::fock {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;
using Dense = Eigen::MatrixXcd;
using RowDense = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Operators {
  int dim;
  SpMat a, adag, num, identity;

  explicit Operators(int n) : dim(n), a(n, n), num(n, n), identity(n, n) {
    if (n < 2) throw ValidationError("Fock dimension must be >= 2");
    std::vector<Eigen::Triplet<cplx>> ta, tn, ti;
    for (int k = 0; k < n; ++k) {
      if (k + 1 < n) ta.emplace_back(k, k + 1, std::sqrt(static_cast<double>(k + 1)));
      tn.emplace_back(k, k, static_cast<double>(k));
      ti.emplace_back(k, k, 1.0);
    }
    a.setFromTriplets(ta.begin(), ta.end());
    num.setFromTriplets(tn.begin(), tn.end());
    identity.setFromTriplets(ti.begin(), ti.end());
    adag = a.adjoint();
  }
};

/// rho' = -i K_l rho + i rho K_r + kappa a rho a^dag - decay rho.
class Generator {
 public:
  Generator(Operators ops, SpMat kl, SpMat kr, double kappa, double decay)
      : ops_(std::move(ops)), kl_(std::move(kl)), kr_(std::move(kr)), kappa_(kappa), decay_(decay) {}

  Dense apply(const Dense& rho) const {
    Dense out = cplx(0.0, -1.0) * (kl_ * rho);
    out += cplx(0.0, 1.0) * (rho * kr_);
    out += kappa_ * (ops_.a * rho * ops_.adag);
    if (decay_ != 0.0) out -= decay_ * rho;
    return out;
  }

  SpMat superoperator() const {
    const SpMat& id = ops_.identity;
    SpMat krt = kr_.transpose();
    SpMat adt = SpMat(ops_.adag.transpose());
    SpMat l = cplx(0.0, -1.0) * SpMat(Eigen::kroneckerProduct(kl_, id));
    l += cplx(0.0, 1.0) * SpMat(Eigen::kroneckerProduct(id, krt));
    l += kappa_ * SpMat(Eigen::kroneckerProduct(ops_.a, adt));
    if (decay_ != 0.0) l -= decay_ * SpMat(Eigen::kroneckerProduct(id, id));
    l.makeCompressed();
    return l;
  }

  const Operators& ops() const { return ops_; }
  int dim() const { return ops_.dim; }
  double kappa() const { return kappa_; }

 private:
  Operators ops_;
  SpMat kl_, kr_;
  double kappa_;
  double decay_;
};

namespace detail {

inline SpMat drive_hamiltonian(const Operators& o, const DeviceParams& p, const PumpSpec& pump,
                               const DriveSpec& drive) {
  const cplx zeta = pump.zeta();
  const cplx alpha = drive.alpha_in(p.omega_qpa);
  const cplx i(0.0, 1.0);
  SpMat h = (0.5 * i) * (zeta * SpMat(o.adag * o.adag) - std::conj(zeta) * SpMat(o.a * o.a));
  h -= (i * std::sqrt(p.kappa)) * (alpha * o.adag - std::conj(alpha) * o.a);
  return h;
}

}  // namespace detail

/// Generator of rho_ud including the intrinsic -(1/(2 T1) + 1/T2) term.
inline Generator updown_generator(const DeviceParams& p, const PumpSpec& pump,
                                  const DriveSpec& drive, int dim) {
  Operators o(dim);
  const SpMat h0 = detail::drive_hamiltonian(o, p, pump, drive);
  const cplx w(p.chi, -0.5 * p.kappa);
  SpMat kl = h0 + w * o.num;
  SpMat kr = h0 - w * o.num;
  return Generator(std::move(o), std::move(kl), std::move(kr), p.kappa, p.gamma2_star());
}

/// Lindbladian of the resonator with the qubit frozen in sigma = +-1.
inline Generator conditioned_generator(const DeviceParams& p, const PumpSpec& pump,
                                       const DriveSpec& drive, int sigma, int dim) {
  Operators o(dim);
  const SpMat h = detail::drive_hamiltonian(o, p, pump, drive) + cplx(p.chi * sigma, 0.0) * o.num;
  SpMat kl = h + cplx(0.0, -0.5 * p.kappa) * o.num;
  SpMat kr = h + cplx(0.0, 0.5 * p.kappa) * o.num;
  return Generator(std::move(o), std::move(kl), std::move(kr), p.kappa, 0.0);
}

struct FockState {
  int dim = 0;
  Dense block;                     // rho_ud or a conditioned resonator state
  cplx trace = 0.0;
  cplx log_trace = 0.0;            // kept separately so long evolutions cannot underflow
  std::array<double, 5> top_occupancy{};  // |rho_nn| / sum |rho_nn| for the top 5 levels

  double truncation_weight() const {
    double s = 0.0;
    for (double v : top_occupancy) s += v;
    return s;
  }
};

struct FockOptions {
  int dim = 0;                 // 0: heuristic
  int max_dim = 400;
  double occupancy_tol = 1e-8;
  double window_kappa = 30.0;  // minimum decay-fit window, units of 1/kappa
  double slope_tol = 5e-3;     // allowed slope mismatch between the final two quarters
  bool eigen_check = true;
  double eigen_tol = 5e-3;
};

namespace detail {

inline std::array<double, 5> top_occupancy(const Dense& rho) {
  const int n = static_cast<int>(rho.rows());
  double total = 0.0;
  for (int k = 0; k < n; ++k) total += std::abs(rho(k, k));
  std::array<double, 5> out{};
  for (int j = 0; j < 5 && j < n; ++j) {
    out[j] = total > 0.0 ? std::abs(rho(n - 5 + j, n - 5 + j)) / total : 0.0;
  }
  return out;
}

inline int raise_dim(int dim, const FockOptions& opt) {
  const int next = static_cast<int>(std::ceil(1.5 * dim));
  if (next > opt.max_dim)
    throw TruncationError("Fock truncation exceeds max_dim=" + std::to_string(opt.max_dim));
  return next;
}

// Evolves rho (renormalized) for dt and accumulates ln Tr.
inline void step(const Generator& gen, Dense& rho, cplx& log_trace, double dt) {
  const int n = gen.dim();
  std::vector<cplx> x(rho.size());
  Eigen::Map<Dense>(x.data(), n, n) = rho;
  auto rhs = [&gen, n](const std::vector<cplx>& y, std::vector<cplx>& dy, double) {
    dy.resize(y.size());
    Eigen::Map<Dense>(dy.data(), n, n) = gen.apply(Eigen::Map<const Dense>(y.data(), n, n));
  };
  ode::integrate(rhs, x, 0.0, dt, 0.01 / gen.kappa());
  rho = Eigen::Map<Dense>(x.data(), n, n);
  const cplx tr = rho.trace();
  if (!(std::abs(tr) > 0.0)) throw ConvergenceError("block trace vanished");
  log_trace += std::log(tr);
  rho /= tr;
}

}  // namespace detail

/// Heuristic truncation ceil(n + 10 sqrt(n) + 20), n = coherent plus
/// squeezing photons of the more populated qubit branch.
inline int default_dimension(const DeviceParams& p, const PumpSpec& pump, const DriveSpec& drive) {
  double n = 0.0;
  for (int sigma : {+1, -1}) {
    n = std::max(n, gaussian::intracavity_moments(p, pump, drive, sigma).photons());
  }
  return static_cast<int>(std::ceil(n + 10.0 * std::sqrt(n) + 20.0));
}

/// Integrates the block equation from the vacuum for a time t, raising the
/// truncation until the top-level occupancy is acceptable.
inline FockState evolve_updown_fock(const DeviceParams& p, const PumpSpec& pump,
                                    const DriveSpec& drive, double t, FockOptions opt = {}) {
  if (!(t >= 0.0)) throw ValidationError("evolution time must be >= 0");
  analytic::require_below_threshold(p, pump.lambda);
  int dim = opt.dim > 0 ? opt.dim : default_dimension(p, pump, drive);
  while (true) {
    const Generator gen = updown_generator(p, pump, drive, dim);
    Dense rho = Dense::Zero(dim, dim);
    rho(0, 0) = 1.0;
    cplx log_trace = 0.0;
    const double h = 1.0 / p.kappa;
    for (double t0 = 0.0; t0 < t;) {
      const double dt = std::min(h, t - t0);
      detail::step(gen, rho, log_trace, dt);
      t0 += dt;
    }
    FockState s;
    s.dim = dim;
    s.top_occupancy = detail::top_occupancy(rho);
    if (s.truncation_weight() < opt.occupancy_tol) {
      s.log_trace = log_trace;
      s.trace = std::exp(log_trace);
      s.block = rho * s.trace;
      return s;
    }
    dim = detail::raise_dim(dim, opt);
  }
}

struct FockRate {
  double rate = 0.0;        // Gamma_phi from the decay fit, 1/s
  double rate_eigen = 0.0;  // slowest block eigenvalue (NaN when not computed)
  double frequency = 0.0;   // d arg Tr / dt, rad/s
  double window = 0.0;      // s
  double mismatch = 0.0;    // relative slope mismatch inside the fit window
  int dim = 0;
  double truncation_weight = 0.0;
};

namespace detail {

inline cplx slowest_eigenvalue(const Generator& gen, cplx shift, const Dense& seed) {
  const SpMat l = gen.superoperator();
  const int n2 = static_cast<int>(l.rows());
  SpMat shifted = l;
  for (int k = 0; k < n2; ++k) shifted.coeffRef(k, k) -= shift;
  shifted.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw ConvergenceError("superoperator factorization failed");
  // Column-major storage of the transpose equals row-major vec of the matrix.
  Dense seed_t = seed.transpose();
  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(seed_t.data(), n2);
  x.normalize();
  cplx mu = shift;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXcd y = lu.solve(x);
    if (lu.info() != Eigen::Success || !y.allFinite()) throw ConvergenceError("inverse iteration failed");
    x = y.normalized();
    const cplx next = x.dot(l * x);
    if (std::abs(next - mu) <= 1e-12 * (std::abs(next) + gen.kappa() * 1e-6)) return next;
    mu = next;
  }
  throw ConvergenceError("inverse iteration did not converge");
}

inline FockRate rate_at_dim(const DeviceParams& p, const PumpSpec& pump, const DriveSpec& drive,
                            int dim, const FockOptions& opt, Dense& final_state) {
  const Generator gen = updown_generator(p, pump, drive, dim);
  const double h = 1.0 / p.kappa;
  Dense rho = Dense::Zero(dim, dim);
  rho(0, 0) = 1.0;
  cplx log_trace = 0.0;
  std::vector<cplx> samples{0.0};
  int window = static_cast<int>(std::ceil(opt.window_kappa));
  window += (4 - window % 4) % 4;
  const int max_window = window * 64;
  while (true) {
    while (static_cast<int>(samples.size()) <= window) {
      detail::step(gen, rho, log_trace, h);
      samples.push_back(log_trace);
    }
    const int half = window / 2, quarter = window / 4;
    const cplx slope_a = (samples[half + quarter] - samples[half]) / (quarter * h);
    const cplx slope_b = (samples[window] - samples[half + quarter]) / (quarter * h);
    const cplx slope = (samples[window] - samples[half]) / (half * h);
    const double mismatch = std::abs(slope_a.real() - slope_b.real()) / std::max(std::abs(slope.real()), 1e-300);
    if (mismatch <= opt.slope_tol || slope.real() == 0.0) {
      FockRate r;
      r.rate = -slope.real();
      r.frequency = slope.imag();
      r.window = window * h;
      r.mismatch = mismatch;
      r.dim = dim;
      r.truncation_weight = 0.0;
      for (double v : top_occupancy(rho)) r.truncation_weight += v;
      r.rate_eigen = std::numeric_limits<double>::quiet_NaN();
      final_state = rho;
      return r;
    }
    if (window * 2 > max_window) throw ConvergenceError("non-exponential decay of the block trace");
    window *= 2;
  }
}

}  // namespace detail

/// Gamma_phi from the exponential decay of |Tr rho_ud| (final half of a
/// window of at least 30/kappa), cross-checked against the slowest eigenvalue
/// of the block superoperator found by shifted inverse iteration.
inline FockRate gamma_phi_fock(const DeviceParams& p, const PumpSpec& pump, const DriveSpec& drive,
                               FockOptions opt = {}) {
  analytic::require_below_threshold(p, pump.lambda);
  int dim = opt.dim > 0 ? opt.dim : default_dimension(p, pump, drive);
  while (true) {
    Dense final_state;
    FockRate r = detail::rate_at_dim(p, pump, drive, dim, opt, final_state);
    if (r.truncation_weight < opt.occupancy_tol) {
      if (opt.eigen_check) {
        const Generator gen = updown_generator(p, pump, drive, dim);
        const cplx mu = detail::slowest_eigenvalue(gen, cplx(-r.rate, r.frequency), final_state);
        r.rate_eigen = -mu.real();
        const double scale = std::max(std::abs(r.rate), 1e-12 * p.kappa);
        if (std::abs(r.rate_eigen - r.rate) > opt.eigen_tol * scale)
          throw ConvergenceError("decay fit and block eigenvalue disagree");
      }
      return r;
    }
    dim = detail::raise_dim(dim, opt);
  }
}

struct ConditionedState {
  FockState state;
  cplx a_mean = 0.0;
  double photons = 0.0;            // <a^dag a>
  Eigen::Vector2d quad_mean;       // (x, p)
  Eigen::Matrix2d quad_cov;        // symmetrized
};

/// Null-space solve of the qubit-conditioned Lindbladian with unit trace.
inline ConditionedState steady_state_conditioned(const DeviceParams& p, const PumpSpec& pump,
                                                 const DriveSpec& drive, int sigma,
                                                 FockOptions opt = {}) {
  analytic::require_below_threshold(p, pump.lambda);
  if (sigma != 1 && sigma != -1) throw ValidationError("sigma must be +1 or -1");
  int dim = opt.dim > 0 ? opt.dim : default_dimension(p, pump, drive);
  while (true) {
    const Generator gen = conditioned_generator(p, pump, drive, sigma, dim);
    const SpMat l = gen.superoperator();
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(l.nonZeros() + dim);
    for (int k = 0; k < l.outerSize(); ++k) {
      for (SpMat::InnerIterator it(l, k); it; ++it) {
        if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (int j = 0; j < dim; ++j) trip.emplace_back(0, j * dim + j, 1.0);
    SpMat m(l.rows(), l.cols());
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    Eigen::SparseLU<SpMat> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) throw ConvergenceError("steady-state factorization failed");
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(l.rows());
    rhs(0) = 1.0;
    const Eigen::VectorXcd v = lu.solve(rhs);
    Dense rho = Eigen::Map<const RowDense>(v.data(), dim, dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();

    ConditionedState out;
    out.state.dim = dim;
    out.state.top_occupancy = detail::top_occupancy(rho);
    if (out.state.truncation_weight() >= opt.occupancy_tol) {
      dim = detail::raise_dim(dim, opt);
      continue;
    }
    const Eigen::SelfAdjointEigenSolver<Dense> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw ConvergenceError("steady state is not positive");
    if (std::abs(rho.trace() - 1.0) > 1e-10) throw ConvergenceError("steady state is not normalized");
    out.state.block = rho;
    out.state.trace = rho.trace();
    const Operators& o = gen.ops();
    auto expect = [&rho](const Dense& op) { return (rho * op).trace(); };
    const Dense a = o.a, ad = o.adag;
    const Dense x = (a + ad) / std::sqrt(2.0);
    const Dense q = cplx(0.0, -1.0) * (a - ad) / std::sqrt(2.0);
    out.a_mean = expect(a);
    out.photons = expect(ad * a).real();
    out.quad_mean << expect(x).real(), expect(q).real();
    out.quad_cov(0, 0) = expect(x * x).real() - out.quad_mean(0) * out.quad_mean(0);
    out.quad_cov(1, 1) = expect(q * q).real() - out.quad_mean(1) * out.quad_mean(1);
    out.quad_cov(0, 1) = 0.5 * expect(x * q + q * x).real() - out.quad_mean(0) * out.quad_mean(1);
    out.quad_cov(1, 0) = out.quad_cov(0, 1);
    return out;
  }
}

// --- verification suites ----------------------------------------------------

/// Dimensionless oracle point (kappa = 1).
struct OraclePoint {
  double chi = 0.0;
  double lambda = 0.0;
  double phi = 0.0;
  double nbar = 0.0;         // coherent intra-cavity photons (qubit average)
  double gamma2_star = 0.0;

  DeviceParams device(double chi_scale = 1.0) const {
    DeviceParams p;
    p.kappa = 1.0;
    p.chi = chi * chi_scale;
    p.omega_qpa = 1.0;
    p.t1 = std::numeric_limits<double>::infinity();
    p.t2 = gamma2_star > 0.0 ? 1.0 / gamma2_star : std::numeric_limits<double>::infinity();
    return p;
  }
  PumpSpec pump() const { return PumpSpec::from_lambda(lambda, 1.0); }
  DriveSpec drive() const {
    const DeviceParams p = device();
    const double per_flux = analytic::steady_state_nbar(p, pump(), DriveSpec::from_flux(1.0, 1.0, phi));
    return DriveSpec::from_flux(per_flux > 0.0 ? nbar / per_flux : 0.0, 1.0, phi);
  }
};

struct VerificationRow {
  std::string label;
  OraclePoint point;
  double analytic = 0.0;
  double oracle = 0.0;
  double rel_error = 0.0;
  double oracle_eigen = 0.0;
  double truncation_change = 0.0;  // relative change when the dimension is doubled
  int dim = 0;
  bool pass = false;
  std::string error;               // set when the oracle itself failed
};

struct SuiteOptions {
  int points = 5;
  double nbar_max = 2.0;
  std::uint64_t seed = 1;
  double tolerance = 0.02;
  double truncation_tolerance = 1e-3;
  bool check_doubling = true;
  double chi_scale = 1.0;  // != 1 only for mutation testing
  unsigned workers = 0;

  static SuiteOptions quick(std::uint64_t seed = 1) { return {5, 2.0, seed}; }
  static SuiteOptions full(std::uint64_t seed = 1) { return {20, 4.0, seed}; }
};

inline std::vector<OraclePoint> draw_points(const SuiteOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double phis[] = {0.0, 0.25 * std::numbers::pi, 0.5 * std::numbers::pi};
  std::vector<OraclePoint> pts(static_cast<std::size_t>(opt.points));
  for (auto& pt : pts) {
    pt.chi = 0.02 + 0.13 * u(rng);
    pt.lambda = 0.35 * u(rng);
    pt.phi = phis[std::min(2, static_cast<int>(3.0 * u(rng)))];
    pt.nbar = opt.nbar_max * u(rng);
    pt.gamma2_star = 0.02 * u(rng);
  }
  return pts;
}

/// Oracle vs closed-form total dephasing on every point; a point passes when
/// the relative error is within tolerance and doubling N moves the oracle by
/// less than truncation_tolerance.
inline std::vector<VerificationRow> run_suite(const SuiteOptions& opt,
                                              const std::vector<OraclePoint>& points) {
  std::vector<VerificationRow> rows(points.size());
  parallel_for(points.size(), opt.workers, [&](std::size_t i) {
    VerificationRow& row = rows[i];
    row.point = points[i];
    row.label = "point-" + std::to_string(i);
    const DeviceParams p = row.point.device();
    const PumpSpec pump = row.point.pump();
    const DriveSpec drive = row.point.drive();
    row.analytic = analytic::total_dephasing(p, pump, drive);
    try {
      const DeviceParams po = row.point.device(opt.chi_scale);
      const FockRate r = gamma_phi_fock(po, pump, drive);
      row.oracle = r.rate;
      row.oracle_eigen = r.rate_eigen;
      row.dim = r.dim;
      row.rel_error = std::abs(r.rate - row.analytic) / row.analytic;
      bool ok = row.rel_error <= opt.tolerance;
      if (opt.check_doubling) {
        FockOptions fo;
        fo.dim = 2 * r.dim;
        fo.eigen_check = false;
        const FockRate r2 = gamma_phi_fock(po, pump, drive, fo);
        row.truncation_change = std::abs(r2.rate - r.rate) / r.rate;
        ok = ok && row.truncation_change < opt.truncation_tolerance;
      }
      row.pass = ok;
    } catch (const Error& e) {
      row.error = e.what();
      row.pass = false;
    }
  });
  return rows;
}

inline std::vector<VerificationRow> run_suite(const SuiteOptions& opt) {
  return run_suite(opt, draw_points(opt));
}

}  // namespace qpa::fock
