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

// Synthetic steady-state homodyne records and the histogram/SNR pipeline.
//
// A record is the time integral of the measured output quadrature Q. With the
// qubit frozen in sigma it is a Brownian motion with drift <Q>_sigma and
// diffusion S_sigma, the symmetrized zero-frequency noise (downstream noise
// included). An excited qubit relaxes at an exponential time with mean T1,
// after which the drift and diffusion switch to the ground-state values.
// Records are sampled exactly on the output grid (no time stepping).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "qpa/analytic.hpp"
#include "qpa/error.hpp"
#include "qpa/gaussian.hpp"
#include "qpa/parallel.hpp"
#include "qpa/params.hpp"

namespace qpa::trajectory {

/// Drift and diffusion of the integrated record for each qubit state.
struct RecordModel {
  double mean_e = 0.0, mean_g = 0.0;    // <Q>_sigma, sqrt(1/s)
  double noise_e = 0.0, noise_g = 0.0;  // S_QQ,sigma[0], dimensionless (vacuum 1/2)
  double t1 = std::numeric_limits<double>::infinity();
};

/// Record statistics from the linear-response output moments. noise_scale
/// multiplies both diffusion constants (test hook for scaling laws).
inline RecordModel record_model(const DeviceParams& p, const PumpSpec& pump, const DriveSpec& drive,
                                double noise_scale = 1.0) {
  const gaussian::OutputMoments up = gaussian::output_moments(p, pump, drive, +1);
  const gaussian::OutputMoments down = gaussian::output_moments(p, pump, drive, -1);
  const double n_eff = drive.effective_added_noise();
  RecordModel m;
  m.mean_e = up.mean_q;
  m.mean_g = down.mean_q;
  m.noise_e = noise_scale * (up.var_q + n_eff);
  m.noise_g = noise_scale * (down.var_q + n_eff);
  m.t1 = p.t1;
  return m;
}

struct MeasurementRecord {
  std::vector<double> times;   // strictly increasing, times[0] = 0
  std::vector<double> values;  // integrated Q, values[0] = 0
  int true_state = -1;         // +1 excited, -1 ground
  std::optional<double> jump_time;
  std::uint64_t seed = 0;
};

struct RecordSet {
  std::vector<MeasurementRecord> ground;
  std::vector<MeasurementRecord> excited;
  std::vector<double> grid;
  RecordModel model;
  std::uint64_t seed = 0;
};

struct SamplerOptions {
  int samples = 28;          // grid intervals up to t_max
  double noise_scale = 1.0;
  unsigned workers = 0;
};

/// Per-record generator: mt19937_64 seeded from (seed, index, state) through
/// std::seed_seq, so records are independent of evaluation order.
inline std::mt19937_64 record_engine(std::uint64_t seed, std::uint64_t index, int state) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(state > 0 ? 1 : 0)};
  return std::mt19937_64(seq);
}

inline MeasurementRecord sample_record(const RecordModel& m, const std::vector<double>& grid,
                                       int state, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng = record_engine(seed, index, state);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  MeasurementRecord r;
  r.true_state = state;
  r.seed = seed;
  double jump = -1.0;  // time at which the record switches to ground statistics
  if (state > 0) {
    if (std::isfinite(m.t1)) {
      jump = boost::random::exponential_distribution<double>(1.0 / m.t1)(rng);
      if (jump < grid.back()) r.jump_time = jump;
    } else {
      jump = std::numeric_limits<double>::infinity();
    }
  }
  r.times = grid;
  r.values.assign(grid.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double a = grid[k - 1], b = grid[k];
    const double te = std::clamp(jump, a, b) - a;  // time spent excited in [a, b]
    const double tg = (b - a) - te;
    const double mean = m.mean_e * te + m.mean_g * tg;
    const double var = m.noise_e * te + m.noise_g * tg;
    acc += mean + std::sqrt(var) * normal(rng);
    r.values[k] = acc;
  }
  return r;
}

/// n_records ground and n_records excited records on a uniform grid up to t_max.
inline RecordSet sample_records(const DeviceParams& p, const PumpSpec& pump, const DriveSpec& drive,
                                std::size_t n_records, double t_max, std::uint64_t seed,
                                SamplerOptions opt = {}) {
  if (n_records < 1) throw ValidationError("n_records must be >= 1");
  if (opt.samples < 1) throw ValidationError("sampler grid needs at least one interval");
  if (!(t_max * p.kappa >= 10.0))
    throw RegimeError("t_max * kappa < 10: white-noise record model not valid");
  RecordSet set;
  set.model = record_model(p, pump, drive, opt.noise_scale);
  set.seed = seed;
  for (int k = 0; k <= opt.samples; ++k) set.grid.push_back(t_max * k / opt.samples);
  set.ground.resize(n_records);
  set.excited.resize(n_records);
  parallel_for(2 * n_records, opt.workers, [&](std::size_t i) {
    const bool excited = i >= n_records;
    const std::size_t idx = excited ? i - n_records : i;
    auto& slot = excited ? set.excited[idx] : set.ground[idx];
    slot = sample_record(set.model, set.grid, excited ? +1 : -1, seed, idx);
  });
  return set;
}

// --- histograms and fits -----------------------------------------------------

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<std::size_t> counts;
};

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ValidationError("quantile of empty sample");
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  const double lo = v[k];
  if (k + 1 >= v.size()) return lo;
  const double hi = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(k) + 1, v.end());
  return lo + (pos - static_cast<double>(k)) * (hi - lo);
}

/// Freedman-Diaconis binning (export only; fits use unbinned likelihoods).
inline Histogram histogram_fd(std::span<const double> values) {
  if (values.empty()) throw ValidationError("histogram of empty sample");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  std::vector<double> v(values.begin(), values.end());
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  Histogram h;
  h.lo = *mn;
  const double span = *mx - *mn;
  h.width = 2.0 * iqr / std::cbrt(static_cast<double>(values.size()));
  if (!(h.width > 0.0)) h.width = span > 0.0 ? span : 1.0;
  const auto bins = static_cast<std::size_t>(std::floor(span / h.width)) + 1;
  h.counts.assign(std::min<std::size_t>(bins, 100000), 0);
  for (double x : values) {
    auto b = static_cast<std::size_t>((x - h.lo) / h.width);
    h.counts[std::min(b, h.counts.size() - 1)]++;
  }
  return h;
}

enum class FitModel { double_gaussian, t1_modified };

inline const char* to_string(FitModel m) {
  return m == FitModel::double_gaussian ? "double-gaussian" : "t1-modified";
}

struct HistogramFit {
  double t_int = 0.0;
  double mean_g = 0.0, sigma_g = 0.0;
  double mean_e = 0.0, sigma_e = 0.0;
  double snr = 0.0;
  FitModel model = FitModel::double_gaussian;
  bool converged = false;
  std::string error;
};

struct GaussianMle {
  double mean = 0.0;
  double sigma = 0.0;
};

inline GaussianMle gaussian_mle(std::span<const double> x) {
  if (x.size() < 2) throw ValidationError("need at least two samples");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(x.size()))};
}

/// Excited-state density at integration time t for a qubit that may relax
/// at tau ~ Exp(T1): a Gaussian with the jump-free parameters weighted by
/// exp(-t/T1), plus the relaxation kernel integrated over tau in [0, t]
/// (30-point Gauss-Legendre), with mean and variance interpolating linearly
/// between the jump-free excited and ground values.
class T1ExcitedDensity {
 public:
  T1ExcitedDensity(double t, double t1, double mean_g, double sigma_g)
      : t_(t), t1_(t1), mean_g_(mean_g), var_g_(sigma_g * sigma_g) {
    using Rule = boost::math::quadrature::gauss<double, 30>;
    const auto& xs = Rule::abscissa();
    const auto& ws = Rule::weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double tau = 0.5 * t * (1.0 + sgn * xs[i]);
        nodes_.push_back({tau / t, 0.5 * t * ws[i] * std::exp(-tau / t1) / t1});
      }
    }
    survive_ = std::exp(-t / t1);
  }

  double negative_log_likelihood(std::span<const double> x, double mean_e, double sigma_e) const {
    const double var_e = sigma_e * sigma_e;
    struct Term { double mean, inv2var, norm; };
    std::vector<Term> terms;
    terms.reserve(nodes_.size() + 1);
    auto add = [&terms](double w, double mean, double var) {
      terms.push_back({mean, 0.5 / var, w / std::sqrt(2.0 * std::numbers::pi * var)});
    };
    add(survive_, mean_e, var_e);
    for (const Node& n : nodes_) {
      add(n.weight, mean_e * n.frac + mean_g_ * (1.0 - n.frac), var_e * n.frac + var_g_ * (1.0 - n.frac));
    }
    double nll = 0.0;
    for (double v : x) {
      double d = 0.0;
      for (const Term& tm : terms) {
        const double z = v - tm.mean;
        d += tm.norm * std::exp(-z * z * tm.inv2var);
      }
      nll -= std::log(std::max(d, std::numeric_limits<double>::min()));
    }
    return nll;
  }

 private:
  struct Node { double frac, weight; };
  double t_, t1_, mean_g_, var_g_;
  double survive_ = 1.0;
  std::vector<Node> nodes_;
};

namespace detail {

struct NllContext {
  const T1ExcitedDensity* density;
  std::span<const double> x;
  double mean0, scale;
};

inline double nll_gsl(const gsl_vector* v, void* params) {
  const auto* c = static_cast<const NllContext*>(params);
  const double mean = c->mean0 + c->scale * gsl_vector_get(v, 0);
  const double sigma = c->scale * std::exp(gsl_vector_get(v, 1));
  return c->density->negative_log_likelihood(c->x, mean, sigma);
}

}  // namespace detail

/// Maximum-likelihood jump-free excited parameters with T1 fixed; ground
/// parameters are held at their own MLE. Nelder-Mead (GSL nmsimplex2) in
/// (mean, log sigma), started from the plain Gaussian fit.
inline GaussianMle fit_t1_excited(std::span<const double> x, double t, double t1, const GaussianMle& ground,
                                  bool& converged) {
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  const GaussianMle start = gaussian_mle(x);
  if (!std::isfinite(t1)) {
    converged = true;
    return start;
  }
  const T1ExcitedDensity density(t, t1, ground.mean, ground.sigma);
  detail::NllContext ctx{&density, x, start.mean, start.sigma};
  gsl_multimin_function f{&detail::nll_gsl, 2, &ctx};
  gsl_vector* v = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(v, 0, 0.0);
  gsl_vector_set(v, 1, 0.0);
  gsl_vector_set_all(step, 0.05);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &f, v, step);
  int status = GSL_CONTINUE;
  for (int it = 0; it < 500 && status == GSL_CONTINUE; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-7);
  }
  converged = status == GSL_SUCCESS;
  GaussianMle out{start.mean + start.sigma * gsl_vector_get(s->x, 0),
                  start.sigma * std::exp(gsl_vector_get(s->x, 1))};
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(v);
  return out;
}

inline std::vector<double> values_at(const std::vector<MeasurementRecord>& records, std::size_t k) {
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) v.push_back(r.values.at(k));
  return v;
}

inline std::size_t grid_index(const std::vector<double>& grid, double t) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (std::abs(grid[k] - t) <= 1e-9 * std::max(std::abs(t), grid.back())) return k;
  }
  throw ValidationError("t_int is not a sample time of the records");
}

/// SNR = |mu_e - mu_g| / (sigma_e + sigma_g) at each requested integration time.
inline HistogramFit fit_at(const RecordSet& set, double t_int, FitModel model) {
  HistogramFit fit;
  fit.t_int = t_int;
  fit.model = model;
  try {
    const std::size_t k = grid_index(set.grid, t_int);
    if (k == 0) throw ValidationError("t_int must be > 0");
    const std::vector<double> g = values_at(set.ground, k);
    const std::vector<double> e = values_at(set.excited, k);
    const GaussianMle mg = gaussian_mle(g);
    GaussianMle me;
    if (model == FitModel::double_gaussian) {
      me = gaussian_mle(e);
      fit.converged = true;
    } else {
      me = fit_t1_excited(e, t_int, set.model.t1, mg, fit.converged);
      if (!fit.converged) fit.error = "T1-modified fit did not converge";
    }
    fit.mean_g = mg.mean;
    fit.sigma_g = mg.sigma;
    fit.mean_e = me.mean;
    fit.sigma_e = me.sigma;
    const double denom = fit.sigma_e + fit.sigma_g;
    fit.snr = denom > 0.0 ? std::abs(fit.mean_e - fit.mean_g) / denom
                          : std::numeric_limits<double>::infinity();
  } catch (const Error& err) {
    fit.converged = false;
    fit.error = err.what();
  }
  return fit;
}

inline std::vector<HistogramFit> snr_curve(const RecordSet& set, const std::vector<double>& t_int_grid,
                                           FitModel model = FitModel::t1_modified,
                                           unsigned workers = 0) {
  if (set.ground.size() < 1000 || set.excited.size() < 1000)
    throw ValidationError("snr_curve needs at least 1000 records per state");
  std::vector<HistogramFit> fits(t_int_grid.size());
  parallel_for(t_int_grid.size(), workers, [&](std::size_t i) { fits[i] = fit_at(set, t_int_grid[i], model); });
  return fits;
}

struct GammaEstimate {
  double gamma_meas = 0.0;  // calibrated, 1/s
  double slope = 0.0;       // d SNR^2 / dt, 1/s
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  bool resolved = true;     // slope distinguishable from zero
};

/// Least-squares line through SNR^2(t). Gamma_meas = c * slope / 2, with c
/// the calibration constant of the closed-form rates; for the SNR definition
/// above and equal state noises, SNR^2 / t equals twice the raw rate.
inline GammaEstimate gamma_meas_from_snr(const std::vector<HistogramFit>& fits) {
  std::vector<double> t, y;
  for (const auto& f : fits) {
    if (!f.converged) continue;
    t.push_back(f.t_int);
    y.push_back(f.snr * f.snr);
  }
  if (t.size() < 5) throw RegimeError("need at least 5 converged integration times");
  const double n = static_cast<double>(t.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  GammaEstimate est;
  est.points = t.size();
  est.slope = sty / stt;
  est.intercept = my - est.slope * mt;
  double sse = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - est.intercept - est.slope * t[i];
    sse += r * r;
  }
  est.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  est.slope_stderr = n > 2 ? std::sqrt(sse / (n - 2) / stt) : 0.0;
  est.resolved = std::abs(est.slope) > 3.0 * est.slope_stderr;
  est.gamma_meas = analytic::kMeasCalibration * est.slope / 2.0;
  if (est.resolved && est.r_squared < 0.99)
    throw RegimeError("SNR^2 is not linear in the integration time (R^2 = " +
                      std::to_string(est.r_squared) + ")");
  return est;
}

struct ConfidenceInterval {
  double lo = 0.0, hi = 0.0;
};

/// Percentile bootstrap (95%) of the fitted Gamma_meas, resampling records.
inline ConfidenceInterval bootstrap_gamma(const RecordSet& set, const std::vector<double>& t_int_grid,
                                          FitModel model, int resamples, std::uint64_t seed) {
  std::vector<double> est(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    std::mt19937_64 rng = record_engine(seed, static_cast<std::uint64_t>(b), 0);
    boost::random::uniform_int_distribution<std::size_t> pick_g(0, set.ground.size() - 1);
    boost::random::uniform_int_distribution<std::size_t> pick_e(0, set.excited.size() - 1);
    RecordSet r;
    r.grid = set.grid;
    r.model = set.model;
    r.ground.reserve(set.ground.size());
    r.excited.reserve(set.excited.size());
    for (std::size_t i = 0; i < set.ground.size(); ++i) r.ground.push_back(set.ground[pick_g(rng)]);
    for (std::size_t i = 0; i < set.excited.size(); ++i) r.excited.push_back(set.excited[pick_e(rng)]);
    est[static_cast<std::size_t>(b)] = gamma_meas_from_snr(snr_curve(r, t_int_grid, model, 1)).gamma_meas;
  }
  return {quantile(est, 0.025), quantile(est, 0.975)};
}

/// Record sample times in [t_min, t_max], excluding t = 0.
inline std::vector<double> integration_grid(const RecordSet& set, double t_min) {
  std::vector<double> out;
  for (double t : set.grid) {
    if (t >= t_min * (1.0 - 1e-12) && t > 0.0) out.push_back(t);
  }
  return out;
}

}  // namespace qpa::trajectory
