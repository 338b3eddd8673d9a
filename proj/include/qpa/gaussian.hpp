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

// Gaussian-moment dynamics of the resonator.
//
// Quadratures: x = (a + a^dag)/sqrt(2), p = -i (a - a^dag)/sqrt(2); the
// vacuum has variance 1/2 in each.
//
// The qubit off-diagonal block rho_ud and the qubit-conditioned resonator
// states all obey generators of the form
//     d rho/dt = -i K_l rho + i rho K_r + kappa a rho a^dag - decay * rho
// with K_l, K_r at most quadratic in (x, p). For such generators the
// characteristic function C(u) = Tr[rho exp(i u.R)] stays Gaussian,
//     C(u) = exp(c + i m.u - u.V.u / 2),
// with complex c (log trace), mean m and symmetric covariance V. Rather than
// hand-expanding the moment equations, BlockGenerator acts with the
// left/right multiplication operators
//     R_j rho  <->  (-i d_j + (Omega u)_j / 2) C
//     rho R_j  <->  (-i d_j - (Omega u)_j / 2) C
// on the Gaussian and reads dc/dt, dm/dt, dV/dt off the resulting quadratic.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qpa/analytic.hpp"
#include "qpa/error.hpp"
#include "qpa/ode.hpp"
#include "qpa/params.hpp"

namespace qpa::gaussian {

using cplx = std::complex<double>;
using Vec2c = Eigen::Matrix<cplx, 2, 1>;
using Mat2c = Eigen::Matrix<cplx, 2, 2>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Weyl-ordered operator R.A.R / 2 + b.R + c with A symmetric.
struct QuadraticOp {
  Mat2c a = Mat2c::Zero();
  Vec2c b = Vec2c::Zero();
  cplx c = 0.0;

  QuadraticOp operator+(const QuadraticOp& o) const { return {a + o.a, b + o.b, c + o.c}; }
  QuadraticOp operator*(cplx s) const { return {a * s, b * s, c * s}; }
};

/// a^dag a = (x^2 + p^2)/2 - 1/2.
inline QuadraticOp number_op() {
  QuadraticOp q;
  q.a = Mat2c::Identity();
  q.c = -0.5;
  return q;
}

/// (i/2)(zeta a^dag^2 - zeta* a^2) = -[Im zeta (x^2 - p^2) - Re zeta (xp + px)]/2.
inline QuadraticOp pump_op(cplx zeta) {
  QuadraticOp q;
  q.a << -zeta.imag(), zeta.real(), zeta.real(), zeta.imag();
  return q;
}

/// -i sqrt(kappa)(alpha a^dag - alpha* a) = sqrt(2 kappa)(Im alpha x - Re alpha p).
inline QuadraticOp drive_op(cplx alpha, double kappa) {
  QuadraticOp q;
  const double s = std::sqrt(2.0 * kappa);
  q.b << s * alpha.imag(), -s * alpha.real();
  return q;
}

/// Gaussian operator (not necessarily Hermitian or normalized).
struct GaussianBlockState {
  cplx log_trace = 0.0;  // ln Tr[rho]
  Vec2c mean = Vec2c::Zero();
  Mat2c cov = 0.5 * Mat2c::Identity();

  double log_norm() const { return log_trace.real(); }

  static GaussianBlockState vacuum() { return {}; }
};

struct MomentDerivative {
  cplx dlog_trace = 0.0;
  Vec2c dmean = Vec2c::Zero();
  Mat2c dcov = Mat2c::Zero();
};

namespace detail {

// c0 + c1.u + u.c2.u
struct Poly2 {
  cplx c0 = 0.0;
  Vec2c c1 = Vec2c::Zero();
  Mat2c c2 = Mat2c::Zero();

  Poly2& operator+=(const Poly2& o) {
    c0 += o.c0;
    c1 += o.c1;
    c2 += o.c2;
    return *this;
  }
  Poly2 operator*(cplx s) const { return {c0 * s, c1 * s, c2 * s}; }
};

inline const Mat2& omega() {
  static const Mat2 om = (Mat2() << 0.0, 1.0, -1.0, 0.0).finished();
  return om;
}

enum class Side { left, right };

// Applies R_j on the given side to P(u) exp(q(u)); P must be at most linear.
inline Poly2 apply(Side side, int j, const Poly2& p, const Vec2c& m, const Mat2c& v) {
  const double sgn = side == Side::left ? 0.5 : -0.5;
  const cplx l0 = m(j);
  const Vec2c l1 = cplx(0.0, 1.0) * v.row(j).transpose() + sgn * omega().row(j).transpose().cast<cplx>();
  Poly2 out;
  out.c0 = cplx(0.0, -1.0) * p.c1(j) + p.c0 * l0;
  out.c1 = p.c0 * l1 + l0 * p.c1;
  out.c2 = p.c1 * l1.transpose();
  return out;
}

inline Poly2 one() {
  Poly2 p;
  p.c0 = 1.0;
  return p;
}

inline Poly2 multiply(Side side, const QuadraticOp& op, const Vec2c& m, const Mat2c& v) {
  Poly2 out;
  for (int j = 0; j < 2; ++j) {
    const Poly2 first = apply(side, j, one(), m, v);
    out += first * op.b(j);
    for (int k = 0; k < 2; ++k) {
      if (op.a(j, k) == cplx(0.0)) continue;
      out += apply(side, k, first, m, v) * (0.5 * op.a(j, k));
    }
  }
  out.c0 += op.c;
  return out;
}

}  // namespace detail

class BlockGenerator {
 public:
  BlockGenerator(QuadraticOp left, QuadraticOp right, double kappa, double decay = 0.0)
      : left_(std::move(left)), right_(std::move(right)), kappa_(kappa), decay_(decay) {}

  MomentDerivative operator()(const Vec2c& m, const Mat2c& v) const {
    using detail::Side;
    detail::Poly2 g = detail::multiply(Side::left, left_, m, v) * cplx(0.0, -1.0);
    g += detail::multiply(Side::right, right_, m, v) * cplx(0.0, 1.0);
    // kappa a rho a^dag with a = (x + i p)/sqrt(2).
    const Vec2c va(1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0)));
    for (int j = 0; j < 2; ++j) {
      const detail::Poly2 first = detail::apply(Side::left, j, detail::one(), m, v);
      for (int k = 0; k < 2; ++k) {
        g += detail::apply(Side::right, k, first, m, v) * (kappa_ * va(j) * std::conj(va(k)));
      }
    }
    g.c0 -= decay_;
    MomentDerivative d;
    d.dlog_trace = g.c0;
    d.dmean = cplx(0.0, -1.0) * g.c1;
    d.dcov = -(g.c2 + g.c2.transpose());
    return d;
  }

  MomentDerivative operator()(const GaussianBlockState& s) const { return (*this)(s.mean, s.cov); }

  /// Generator of rho_ud after removing the intrinsic e^{-t/T2*} factor
  /// (set include_intrinsic to keep it).
  static BlockGenerator updown(const DeviceParams& p, const PumpSpec& pump, const DriveSpec& drive,
                               bool include_intrinsic = false) {
    const QuadraticOp h0 = pump_op(pump.zeta()) + drive_op(drive.alpha_in(p.omega_qpa), p.kappa);
    const QuadraticOp n = number_op();
    const cplx w(p.chi, -0.5 * p.kappa);
    return BlockGenerator(h0 + n * w, h0 + n * (-w), p.kappa,
                          include_intrinsic ? p.gamma2_star() : 0.0);
  }

  /// Trace-preserving generator with the qubit frozen in sigma = +-1.
  static BlockGenerator conditioned(const DeviceParams& p, const PumpSpec& pump,
                                    const DriveSpec& drive, int sigma) {
    const QuadraticOp n = number_op();
    const QuadraticOp h = pump_op(pump.zeta()) + drive_op(drive.alpha_in(p.omega_qpa), p.kappa) +
                          n * cplx(p.chi * sigma, 0.0);
    return BlockGenerator(h + n * cplx(0.0, -0.5 * p.kappa), h + n * cplx(0.0, 0.5 * p.kappa),
                          p.kappa);
  }

  double kappa() const { return kappa_; }

 private:
  QuadraticOp left_;
  QuadraticOp right_;
  double kappa_;
  double decay_;
};

namespace detail {

using Packed = std::vector<double>;

inline Packed pack(const GaussianBlockState& s) {
  return {s.log_trace.real(), s.log_trace.imag(), s.mean(0).real(), s.mean(0).imag(),
          s.mean(1).real(),   s.mean(1).imag(),   s.cov(0, 0).real(), s.cov(0, 0).imag(),
          s.cov(0, 1).real(), s.cov(0, 1).imag(), s.cov(1, 1).real(), s.cov(1, 1).imag()};
}

inline GaussianBlockState unpack(const Packed& x) {
  GaussianBlockState s;
  s.log_trace = {x[0], x[1]};
  s.mean << cplx(x[2], x[3]), cplx(x[4], x[5]);
  s.cov << cplx(x[6], x[7]), cplx(x[8], x[9]), cplx(x[8], x[9]), cplx(x[10], x[11]);
  return s;
}

inline void integrate_state(const BlockGenerator& gen, GaussianBlockState& state, double t0,
                            double t1) {
  Packed x = pack(state);
  auto rhs = [&gen](const Packed& y, Packed& dy, double) {
    const GaussianBlockState s = unpack(y);
    const MomentDerivative d = gen(s);
    GaussianBlockState ds;
    ds.log_trace = d.dlog_trace;
    ds.mean = d.dmean;
    ds.cov = d.dcov;
    dy = pack(ds);
  };
  ode::integrate(rhs, x, t0, t1, 0.01 / gen.kappa());
  state = unpack(x);
}

}  // namespace detail

/// Evolves rho_ud from `initial` for a time t. The intrinsic qubit decay is
/// integrated in the rescaled frame and restored in log_trace on return.
inline GaussianBlockState evolve_block(const DeviceParams& p, const PumpSpec& pump,
                                       const DriveSpec& drive, double t,
                                       const GaussianBlockState& initial) {
  if (!(t >= 0.0)) throw ValidationError("evolution time must be >= 0");
  analytic::require_below_threshold(p, pump.lambda);
  const auto gen = BlockGenerator::updown(p, pump, drive);
  GaussianBlockState s = initial;
  detail::integrate_state(gen, s, 0.0, t);
  s.log_trace -= p.gamma2_star() * t;
  return s;
}

struct SteadyBlock {
  GaussianBlockState state;  // log_trace = 0
  cplx rate = 0.0;           // d ln Tr / dt in steady state
};

/// Fixed point of the moment equations: Newton on the covariance Riccati
/// equation from the vacuum, then a direct solve for the affine mean
/// equation. The covariance root must be dynamically stable.
inline SteadyBlock steady_block(const BlockGenerator& gen) {
  auto f = [&gen](const Eigen::Vector3cd& v) {
    Mat2c cov;
    cov << v(0), v(1), v(1), v(2);
    const Mat2c d = gen(Vec2c::Zero(), cov).dcov;
    return Eigen::Vector3cd(d(0, 0), d(0, 1), d(1, 1));
  };
  auto jacobian = [&f](const Eigen::Vector3cd& v) {
    Eigen::Matrix3cd jac;
    for (int k = 0; k < 3; ++k) {
      // F is quadratic in v, so central differences are exact up to rounding.
      Eigen::Vector3cd e = Eigen::Vector3cd::Zero();
      e(k) = 1e-3;
      jac.col(k) = (f(v + e) - f(v - e)) / 2e-3;
    }
    return jac;
  };
  Eigen::Vector3cd v(0.5, 0.0, 0.5);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const Eigen::Vector3cd step = jacobian(v).fullPivLu().solve(f(v));
    v -= step;
    if (!v.allFinite()) break;
    if (step.norm() <= 1e-14 * (1.0 + v.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("covariance fixed point did not converge");
  const Eigen::ComplexEigenSolver<Eigen::Matrix3cd> stab(jacobian(v));
  if (stab.eigenvalues().real().maxCoeff() >= 0.0)
    throw ConvergenceError("covariance fixed point is not dynamically stable");

  SteadyBlock out;
  out.state.cov << v(0), v(1), v(1), v(2);
  const Vec2c r = gen(Vec2c::Zero(), out.state.cov).dmean;
  Mat2c jm;
  for (int k = 0; k < 2; ++k) {
    jm.col(k) = gen(Vec2c::Unit(k), out.state.cov).dmean - r;
  }
  out.state.mean = jm.fullPivLu().solve(-r);
  out.rate = gen(out.state).dlog_trace;
  return out;
}

struct DecayFit {
  double rate = 0.0;     // Gamma_phi including 1/T2*, 1/s
  double window = 0.0;   // s
  double mismatch = 0.0; // relative slope difference between window quarters
};

/// Gamma_phi = -lim ln|Tr rho_ud(t)| / t from time integration of the moment
/// equations starting in the vacuum. The slope is taken over the final half
/// of a window of at least 20/kappa, extended until the two quarters of that
/// half agree to 1e-3.
inline DecayFit dephasing_from_decay(const DeviceParams& p, const PumpSpec& pump,
                                     const DriveSpec& drive) {
  analytic::require_below_threshold(p, pump.lambda);
  const auto gen = BlockGenerator::updown(p, pump, drive);
  const double h = 1.0 / p.kappa;
  const int max_samples = 20 * 1024;
  std::vector<double> log_norm{0.0};
  GaussianBlockState s = GaussianBlockState::vacuum();
  int window = 20;
  const double g2 = p.gamma2_star();
  while (true) {
    while (static_cast<int>(log_norm.size()) <= window) {
      const double t0 = h * static_cast<double>(log_norm.size() - 1);
      detail::integrate_state(gen, s, t0, t0 + h);
      log_norm.push_back(s.log_norm());
    }
    const int half = window / 2, quarter = window / 4;
    const double slope_a = -(log_norm[half + quarter] - log_norm[half]) / (quarter * h);
    const double slope_b = -(log_norm[window] - log_norm[half + quarter]) / ((window - half - quarter) * h);
    const double slope = -(log_norm[window] - log_norm[half]) / ((window - half) * h);
    const double scale = std::abs(slope) + g2;
    const double mismatch = scale > 0.0 ? std::abs(slope_a - slope_b) / scale : 0.0;
    if (mismatch <= 1e-3) return {slope + g2, window * h, mismatch};
    if (window * 2 > max_samples)
      throw ConvergenceError("dephasing slope did not converge within the maximum window");
    window *= 2;
  }
}

// --- linear response of the conditioned resonator ---------------------------

/// Real quadrature drift matrix of the resonator with the qubit frozen in sigma.
inline Mat2 drift_matrix(const DeviceParams& p, const PumpSpec& pump, int sigma) {
  const cplx z = pump.zeta();
  Mat2 a;
  a << -0.5 * p.kappa + z.real(), p.chi * sigma + z.imag(),
      -p.chi * sigma + z.imag(), -0.5 * p.kappa - z.real();
  return a;
}

/// Solves A S + S A^T + q I = 0 for symmetric S.
inline Mat2 solve_lyapunov(const Mat2& a, double q) {
  Eigen::Matrix3d m;
  m << 2.0 * a(0, 0), 2.0 * a(0, 1), 0.0,
       a(1, 0), a(0, 0) + a(1, 1), a(0, 1),
       0.0, 2.0 * a(1, 0), 2.0 * a(1, 1);
  const Eigen::Vector3d s = m.fullPivLu().solve(Eigen::Vector3d(-q, 0.0, -q));
  Mat2 out;
  out << s(0), s(1), s(1), s(2);
  return out;
}

struct IntracavityMoments {
  Vec2 mean;  // (x, p)
  Mat2 cov;
  double photons() const { return 0.5 * (cov.trace() + mean.squaredNorm() - 1.0); }
};

/// Steady intra-cavity quadrature moments with the qubit frozen in sigma.
inline IntracavityMoments intracavity_moments(const DeviceParams& p, const PumpSpec& pump,
                                              const DriveSpec& drive, int sigma) {
  analytic::require_below_threshold(p, pump.lambda);
  const Mat2 a = drift_matrix(p, pump, sigma);
  const cplx alpha = drive.alpha_in(p.omega_qpa);
  const Vec2 r_in(std::sqrt(2.0) * alpha.real(), std::sqrt(2.0) * alpha.imag());
  IntracavityMoments m;
  m.mean = std::sqrt(p.kappa) * a.fullPivLu().solve(r_in);
  m.cov = solve_lyapunov(a, 0.5 * p.kappa);
  return m;
}

struct OutputMoments {
  double mean_i = 0.0, mean_q = 0.0;
  double var_i = 0.0, var_q = 0.0, cov_iq = 0.0;
  double delta = 0.0;  // angle of the measured quadrature Q, rad

  Mat2 covariance() const { return (Mat2() << var_i, cov_iq, cov_iq, var_q).finished(); }
  Vec2 mean() const { return {mean_i, mean_q}; }
};

/// Zero-frequency moments of the field leaving the resonator (before any
/// downstream noise), with the qubit frozen in sigma. I is along the drive,
/// Q = cos(delta) x_out + sin(delta) p_out with delta = phi + pi/2.
inline OutputMoments output_moments(const DeviceParams& p, const PumpSpec& pump,
                                    const DriveSpec& drive, int sigma) {
  analytic::require_below_threshold(p, pump.lambda);
  const Mat2 a = drift_matrix(p, pump, sigma);
  const Mat2 response = Mat2::Identity() + p.kappa * a.inverse();
  const cplx alpha = drive.alpha_in(p.omega_qpa);
  const Vec2 r_in(std::sqrt(2.0) * alpha.real(), std::sqrt(2.0) * alpha.imag());
  const Vec2 r_out = response * r_in;
  const Mat2 s_out = 0.5 * response * response.transpose();

  Mat2 rot;  // rows: I axis, Q axis
  const double c = std::cos(drive.phi), s = std::sin(drive.phi);
  rot << c, s, -s, c;
  const Vec2 m = rot * r_out;
  const Mat2 cov = rot * s_out * rot.transpose();
  OutputMoments out;
  out.mean_i = m(0);
  out.mean_q = m(1);
  out.var_i = cov(0, 0);
  out.var_q = cov(1, 1);
  out.cov_iq = 0.5 * (cov(0, 1) + cov(1, 0));
  out.delta = drive.phi + 0.5 * std::numbers::pi;
  return out;
}

struct MeasurementRate {
  double gamma_meas_raw = 0.0;  // 1/s
  double gamma_meas = 0.0;      // calibrated, 1/s
  double signal = 0.0;          // <Q>_up - <Q>_down
  double noise_up = 0.0;        // S_QQ,up[0] incl. downstream noise
  double noise_down = 0.0;
};

/// Measurement rate from the conditioned output means and the symmetrized
/// zero-frequency noise of the measured quadrature.
inline MeasurementRate snr_and_meas_rate(const DeviceParams& p, const PumpSpec& pump,
                                         const DriveSpec& drive) {
  const OutputMoments up = output_moments(p, pump, drive, +1);
  const OutputMoments down = output_moments(p, pump, drive, -1);
  const double n_eff = drive.effective_added_noise();
  MeasurementRate r;
  r.signal = up.mean_q - down.mean_q;
  r.noise_up = up.var_q + n_eff;
  r.noise_down = down.var_q + n_eff;
  r.gamma_meas_raw = 0.25 * r.signal * r.signal / (r.noise_up + r.noise_down);
  r.gamma_meas = analytic::kMeasCalibration * r.gamma_meas_raw;
  return r;
}

/// Bhattacharyya distance between two bivariate Gaussians.
inline double bhattacharyya(const Vec2& m1, const Mat2& c1, const Vec2& m2, const Mat2& c2) {
  const Mat2 avg = 0.5 * (c1 + c2);
  const Vec2 dm = m1 - m2;
  return 0.125 * dm.dot(avg.inverse() * dm) +
         0.5 * std::log(avg.determinant() / std::sqrt(c1.determinant() * c2.determinant()));
}

/// Overlap measure between the two qubit-conditioned output fields.
inline double output_distinguishability(const DeviceParams& p, const PumpSpec& pump,
                                        const DriveSpec& drive) {
  const OutputMoments up = output_moments(p, pump, drive, +1);
  const OutputMoments down = output_moments(p, pump, drive, -1);
  return bhattacharyya(up.mean(), up.covariance(), down.mean(), down.covariance());
}

}  // namespace qpa::gaussian
