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

// Grid sweeps over the closed-form rates and 1-D gain optimization.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "qpa/analytic.hpp"
#include "qpa/error.hpp"
#include "qpa/parallel.hpp"
#include "qpa/params.hpp"
#include "qpa/units.hpp"

namespace qpa::sweep {

/// Grid points with lambda at or above this fraction of kappa are excluded.
inline constexpr double kLambdaGuard = 0.49;

enum class Axis { gain_db, phi_rad, p_in_dbm, alpha_in, n_add, eta_loss };

/// CSV column name of each axis.
inline const char* column(Axis a) {
  switch (a) {
    case Axis::gain_db: return "G_QPA_dB";
    case Axis::phi_rad: return "Phi";
    case Axis::p_in_dbm: return "P_in_dBm";
    case Axis::alpha_in: return "alpha_in";
    case Axis::n_add: return "n_add";
    default: return "eta_loss";
  }
}

inline Axis parse_axis(const std::string& s) {
  if (s == "gain_db" || s == "G_QPA_dB") return Axis::gain_db;
  if (s == "phi_rad" || s == "Phi") return Axis::phi_rad;
  if (s == "p_in_dbm" || s == "P_in_dBm") return Axis::p_in_dbm;
  if (s == "alpha_in") return Axis::alpha_in;
  if (s == "n_add") return Axis::n_add;
  if (s == "eta_loss") return Axis::eta_loss;
  throw ValidationError("unknown sweep axis '" + s + "'");
}

/// Output quantities, in CSV order.
inline const std::vector<std::string>& output_names() {
  static const std::vector<std::string> names = {
      "Gamma_phi", "Gamma_phi_parasitic", "Gamma_meas", "eta_meas", "eta_QPA",
      "eta_rest",  "lambda",              "G0",         "nbar"};
  return names;
}

struct AxisSpec {
  Axis axis = Axis::gain_db;
  std::vector<double> values;
};

struct SweepSpec {
  std::vector<AxisSpec> axes;
  std::vector<std::string> outputs;  // empty: all

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.values.size();
    return n;
  }
};

inline SweepSpec validate(SweepSpec s) {
  if (s.axes.empty() || s.axes.size() > 3) throw ValidationError("a sweep needs 1 to 3 axes");
  for (std::size_t i = 0; i < s.axes.size(); ++i) {
    const auto& v = s.axes[i].values;
    if (v.empty()) throw ValidationError(std::string("empty grid for axis ") + column(s.axes[i].axis));
    for (double x : v) {
      if (!std::isfinite(x)) throw ValidationError("non-finite grid value");
    }
    if (v.size() > 1) {
      const bool inc = std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
      const bool dec = std::adjacent_find(v.begin(), v.end(), std::less_equal<>()) == v.end();
      if (!inc && !dec) throw ValidationError(std::string("grid not strictly monotone: ") + column(s.axes[i].axis));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (s.axes[j].axis == s.axes[i].axis) throw ValidationError("duplicate sweep axis");
    }
  }
  if (s.outputs.empty()) s.outputs = output_names();
  for (const auto& o : s.outputs) {
    if (std::find(output_names().begin(), output_names().end(), o) == output_names().end())
      throw ValidationError("unknown sweep output '" + o + "'");
  }
  return s;
}

struct SweepRow {
  std::vector<double> coords;  // one per axis
  analytic::RateResult rate;
  double g0 = std::numeric_limits<double>::quiet_NaN();
  std::string error;           // non-empty for excluded or failed points

  bool ok() const { return error.empty(); }

  double output(const std::string& name) const {
    if (!ok()) return std::numeric_limits<double>::quiet_NaN();
    if (name == "Gamma_phi") return rate.gamma_phi;
    if (name == "Gamma_phi_parasitic") return rate.gamma_parasitic;
    if (name == "Gamma_meas") return rate.gamma_meas;
    if (name == "eta_meas") return rate.eta_meas;
    if (name == "eta_QPA") return rate.eta_qpa;
    if (name == "eta_rest") return rate.eta_rest;
    if (name == "lambda") return rate.lambda;
    if (name == "G0") return g0;
    if (name == "nbar") return rate.nbar;
    throw ValidationError("unknown sweep output '" + name + "'");
  }
};

struct SweepTable {
  SweepSpec spec;
  std::vector<SweepRow> rows;  // last axis varies fastest
};

/// Applies one grid coordinate to the working pump/drive.
inline void apply_axis(Axis axis, double v, const DeviceParams& p, PumpSpec& pump, DriveSpec& drive) {
  switch (axis) {
    case Axis::gain_db: {
      if (!(v >= 0.0)) throw DomainError("gain in dB must be >= 0");
      const double lam = lambda_from_gain(units::db_to_ratio(v), p.kappa);
      if (!(lam < kLambdaGuard * p.kappa)) throw DomainError("excluded: lambda >= 0.49 kappa");
      pump = PumpSpec::from_lambda(lam, p.kappa, pump.pump_phase);
      break;
    }
    case Axis::phi_rad: drive.phi = v; break;
    case Axis::p_in_dbm: drive.p_in = units::dbm_to_watt(v); break;
    case Axis::alpha_in:
      if (!(v >= 0.0)) throw ValidationError("|alpha_in| must be >= 0");
      drive.p_in = v * v * units::kHbar * p.omega_qpa;
      break;
    case Axis::n_add: drive.n_add = v; break;
    case Axis::eta_loss: drive.eta_loss = v; break;
  }
}

inline SweepRow evaluate_point(const DeviceParams& p, PumpSpec pump, DriveSpec drive,
                               const std::vector<AxisSpec>& axes, const std::vector<double>& coords) {
  SweepRow row;
  row.coords = coords;
  try {
    for (std::size_t a = 0; a < axes.size(); ++a) apply_axis(axes[a].axis, coords[a], p, pump, drive);
    if (!(pump.lambda < kLambdaGuard * p.kappa)) throw DomainError("excluded: lambda >= 0.49 kappa");
    drive = validate(drive);
    row.rate = analytic::efficiency(p, pump, drive);
    row.g0 = g0_from_lambda(pump.lambda, p.kappa);
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

/// Dense evaluation of every grid point. Points that fail (threshold guard,
/// undefined efficiency, invalid drive) become error rows.
inline SweepTable run_sweep(SweepSpec spec, const DeviceParams& p, const PumpSpec& pump,
                            const DriveSpec& drive, unsigned workers = 0) {
  SweepTable table;
  table.spec = validate(std::move(spec));
  const auto& axes = table.spec.axes;
  const std::size_t n = table.spec.size();
  table.rows.resize(n);
  parallel_for(n, workers, [&](std::size_t i) {
    std::vector<double> coords(axes.size());
    std::size_t rem = i;
    for (std::size_t a = axes.size(); a-- > 0;) {
      coords[a] = axes[a].values[rem % axes[a].values.size()];
      rem /= axes[a].values.size();
    }
    table.rows[i] = evaluate_point(p, pump, drive, axes, coords);
  });
  return table;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) throw ValidationError("linspace needs at least one point");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// --- gain optimization -------------------------------------------------------

struct OptimumReport {
  double gain_db = 0.0;    // argmax
  double eta = 0.0;        // eta_meas at the argmax
  double lambda = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};  // coarse-grid bracket, dB
  double curvature = 0.0;  // d^2 eta / dG^2 at the argmax, 1/dB^2 (NaN at a boundary)
  bool boundary = false;   // argmax on a bound
  bool non_unimodal = false;
  std::vector<std::pair<double, double>> grid;  // coarse (G dB, eta) profile
};

struct OptimizeOptions {
  int coarse_points = 41;
  double tol_lambda = 1e-9;  // in units of kappa
  double pump_phase = 0.0;
};

/// Largest gain in dB allowed by the threshold guard.
inline double max_gain_db(const DeviceParams& p) {
  return units::ratio_to_db(gain_from_lambda(kLambdaGuard * p.kappa, p.kappa));
}

/// Maximizes eta_meas over G_QPA in amplifier mode (drive phase aligned with
/// the pump phase). The coarse grid and the golden-section refinement run in
/// lambda, which resolves the small-gain region where G_dB grows as lambda^2.
inline OptimumReport optimize_gain(const DeviceParams& p, DriveSpec drive, double lo_db, double hi_db,
                                   OptimizeOptions opt = {}) {
  if (!std::isfinite(lo_db) || !std::isfinite(hi_db) || lo_db < 0.0 || hi_db < lo_db)
    throw ValidationError("gain bounds must satisfy 0 <= lo <= hi");
  if (opt.coarse_points < 3) throw ValidationError("coarse grid needs at least 3 points");
  hi_db = std::min(hi_db, max_gain_db(p));
  if (lo_db > hi_db) throw DomainError("gain bounds lie above the threshold guard");
  drive.phi = opt.pump_phase;
  drive = validate(drive);
  const double k = p.kappa;
  auto to_db = [&](double lam) { return units::ratio_to_db(gain_from_lambda(lam, k)); };
  auto eta_l = [&](double lam) {
    return analytic::efficiency(p, PumpSpec::from_lambda(lam, k, opt.pump_phase), drive).eta_meas;
  };
  auto eta_db = [&](double db) { return eta_l(lambda_from_gain(units::db_to_ratio(db), k)); };

  OptimumReport r;
  r.curvature = std::numeric_limits<double>::quiet_NaN();
  const double l_lo = lambda_from_gain(units::db_to_ratio(lo_db), k);
  const double l_hi = lambda_from_gain(units::db_to_ratio(hi_db), k);
  if (hi_db == lo_db) {
    r.gain_db = lo_db;
    r.lambda = l_lo;
    r.eta = eta_l(l_lo);
    r.bracket = {lo_db, hi_db};
    r.grid = {{lo_db, r.eta}};
    return r;
  }
  const std::vector<double> ls = linspace(l_lo, l_hi, static_cast<std::size_t>(opt.coarse_points));
  std::vector<double> dbs(ls.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    dbs[i] = i == 0 ? lo_db : i + 1 == ls.size() ? hi_db : to_db(ls[i]);
    r.grid.emplace_back(dbs[i], eta_l(ls[i]));
    if (r.grid[i].second > r.grid[best].second) best = i;
  }
  int maxima = 0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const double v = r.grid[i].second;
    const bool left = i == 0 || v > r.grid[i - 1].second;
    const bool right = i + 1 == ls.size() || v > r.grid[i + 1].second;
    if (left && right) ++maxima;
  }
  r.non_unimodal = maxima > 1;
  r.gain_db = dbs[best];
  r.lambda = ls[best];
  r.eta = r.grid[best].second;
  const std::size_t ia = best == 0 ? 0 : best - 1;
  const std::size_t ib = std::min(best + 1, ls.size() - 1);
  r.bracket = {dbs[ia], dbs[ib]};
  if (r.non_unimodal) return r;
  if (best == 0 || best + 1 == ls.size()) {
    r.boundary = true;
    return r;
  }
  constexpr double inv_phi = 0.6180339887498949;
  double a = ls[ia], b = ls[ib];
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = eta_l(c), fd = eta_l(d);
  while (b - a > opt.tol_lambda * k) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eta_l(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eta_l(d);
    }
  }
  r.lambda = 0.5 * (a + b);
  r.gain_db = to_db(r.lambda);
  r.eta = eta_l(r.lambda);
  const double h = std::min({1e-2, 0.5 * r.gain_db, r.gain_db - lo_db, hi_db - r.gain_db});
  if (h > 0.0) r.curvature = (eta_db(r.gain_db + h) - 2.0 * r.eta + eta_db(r.gain_db - h)) / (h * h);
  return r;
}

// --- efficiency decomposition --------------------------------------------

struct DecompositionMap {
  std::vector<double> drives_dbm;  // rows
  std::vector<double> gains_db;    // columns
  std::vector<std::vector<double>> eta_meas, eta_qpa, eta_rest;
  bool qpa_decreasing_in_gain = true;
  bool qpa_increasing_in_drive = true;
  bool rest_increasing_in_gain = true;
  bool rest_flat_in_drive = true;
  double identity_max_error = 0.0;  // max |eta_meas - eta_QPA * eta_rest|
};

/// eta_meas, eta_QPA and eta_rest over a (P_in, G) grid in amplifier mode,
/// with the expected monotonicity of each factor checked on the grid.
inline DecompositionMap efficiency_decomposition_map(const DeviceParams& p, const DriveSpec& drive,
                                                     const std::vector<double>& drives_dbm,
                                                     const std::vector<double>& gains_db,
                                                     double pump_phase = 0.0) {
  SweepSpec spec;
  spec.axes = {{Axis::p_in_dbm, drives_dbm}, {Axis::gain_db, gains_db}};
  PumpSpec pump;
  pump.pump_phase = pump_phase;
  DriveSpec d = drive;
  d.phi = pump_phase;
  const SweepTable t = run_sweep(spec, p, pump, d);
  DecompositionMap m;
  m.drives_dbm = drives_dbm;
  m.gains_db = gains_db;
  const std::size_t nr = drives_dbm.size(), nc = gains_db.size();
  m.eta_meas.assign(nr, std::vector<double>(nc));
  m.eta_qpa = m.eta_meas;
  m.eta_rest = m.eta_meas;
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      const SweepRow& row = t.rows[i * nc + j];
      if (!row.ok()) throw DomainError("decomposition grid point failed: " + row.error);
      m.eta_meas[i][j] = row.rate.eta_meas;
      m.eta_qpa[i][j] = row.rate.eta_qpa;
      m.eta_rest[i][j] = row.rate.eta_rest;
      m.identity_max_error = std::max(m.identity_max_error,
                                      std::abs(row.rate.eta_meas - row.rate.eta_qpa * row.rate.eta_rest));
    }
  }
  const double tol = 1e-12;
  const bool gains_up = nc < 2 || gains_db[1] > gains_db[0];
  const bool drives_up = nr < 2 || drives_dbm[1] > drives_dbm[0];
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (j > 0) {
        const double dq = (m.eta_qpa[i][j] - m.eta_qpa[i][j - 1]) * (gains_up ? 1 : -1);
        const double dr = (m.eta_rest[i][j] - m.eta_rest[i][j - 1]) * (gains_up ? 1 : -1);
        if (dq > tol) m.qpa_decreasing_in_gain = false;
        if (dr < -tol) m.rest_increasing_in_gain = false;
      }
      if (i > 0) {
        const double dq = (m.eta_qpa[i][j] - m.eta_qpa[i - 1][j]) * (drives_up ? 1 : -1);
        if (dq < -tol) m.qpa_increasing_in_drive = false;
        if (std::abs(m.eta_rest[i][j] - m.eta_rest[i - 1][j]) > 1e-9) m.rest_flat_in_drive = false;
      }
    }
  }
  return m;
}

// --- downstream-chain model fit -------------------------------------------

struct ChainFit {
  double n_add = 0.0;
  double eta_loss = 1.0;
  double box_mean = 0.0;  // mean eta_meas over the box
  double box_min = 0.0;
  double box_max = 0.0;
};

/// Finds the downstream added noise n_add (with eta_loss held fixed) for which
/// the mean amplifier-mode eta_meas over a (G, P_in) box equals `target`.
/// This is a model fit of unpublished chain parameters, not a prediction.
inline ChainFit fit_added_noise(const DeviceParams& p, const std::vector<double>& gains_db,
                                const std::vector<double>& drives_dbm, double eta_loss,
                                double target) {
  if (gains_db.empty() || drives_dbm.empty()) throw ValidationError("empty fit box");
  if (!(target > 0.0 && target < 1.0)) throw ValidationError("target efficiency must lie in (0, 1)");
  auto box = [&](double n_add, ChainFit& out) {
    double sum = 0.0, mn = 1e300, mx = -1e300;
    for (double g : gains_db) {
      for (double dbm : drives_dbm) {
        DriveSpec d = DriveSpec::from_dbm(dbm, 0.0);
        d.n_add = n_add;
        d.eta_loss = eta_loss;
        const double e = analytic::efficiency(p, PumpSpec::from_gain_db(g, p.kappa), validate(d)).eta_meas;
        sum += e;
        mn = std::min(mn, e);
        mx = std::max(mx, e);
      }
    }
    out.box_mean = sum / static_cast<double>(gains_db.size() * drives_dbm.size());
    out.box_min = mn;
    out.box_max = mx;
    return out.box_mean;
  };
  ChainFit fit;
  fit.eta_loss = eta_loss;
  if (box(0.0, fit) < target) throw DomainError("target efficiency unreachable even with n_add = 0");
  double hi = 1.0;
  while (box(hi, fit) > target) {
    hi *= 2.0;
    if (hi > 1e6) throw ConvergenceError("could not bracket n_add");
  }
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      [&](double n) { ChainFit tmp; return box(n, tmp) - target; }, 0.0, hi,
      boost::math::tools::eps_tolerance<double>(50), iters);
  fit.n_add = 0.5 * (root.first + root.second);
  box(fit.n_add, fit);
  return fit;
}

}  // namespace qpa::sweep
