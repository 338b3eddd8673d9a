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

#include "qpa/io/commands.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <json.hpp>

#include "qpa/analytic.hpp"
#include "qpa/error.hpp"
#include "qpa/fock.hpp"
#include "qpa/io/config.hpp"
#include "qpa/io/csv.hpp"
#include "qpa/io/manifest.hpp"
#include "qpa/io/svg.hpp"
#include "qpa/io/sweep_file.hpp"
#include "qpa/sweep.hpp"
#include "qpa/trajectory.hpp"

namespace qpa::io {

namespace {

using Clock = std::chrono::steady_clock;

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kFailure;
  }
}

std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double per_us(double rate) { return units::per_us(rate); }

RunConfig load(const CommonArgs& a) {
  RunConfig cfg = load_config(a.config, a.set);
  if (a.workers) cfg.workers = *a.workers;
  return cfg;
}

RunManifest start_manifest(const std::string& sub, const RunConfig& cfg, std::map<std::string, std::string> args) {
  RunManifest m;
  m.subcommand = sub;
  m.args = std::move(args);
  m.config_source = cfg.source;
  m.config_sha256 = sha256_hex(cfg.canonical());
  m.seed = cfg.seed;
  m.created_utc = utc_timestamp();
  return m;
}

std::string run_id(const RunManifest& m) {
  std::string text = m.subcommand + "\n" + m.config_sha256 + "\n";
  for (const auto& [k, v] : m.args) text += k + "=" + v + "\n";
  return sha256_hex(text);
}

const std::vector<std::string> kRateColumns = {"G_QPA_dB", "Phi",     "Gamma_phi", "Gamma_phi_parasitic",
                                               "Gamma_meas", "eta_meas", "eta_QPA",  "eta_rest",
                                               "lambda",     "G0",       "nbar"};

}  // namespace

int cmd_rates(const RatesArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load(args);
    if (args.gain_db) cfg.gain_db = *args.gain_db;
    if (args.phi) cfg.phi_rad = *args.phi;
    if (args.pin) {
      if (boost::algorithm::to_lower_copy(*args.pin) == "off") cfg.p_in_dbm.reset();
      else cfg.p_in_dbm = parse_number(*args.pin);
    }
    const DeviceParams& p = cfg.device;
    const PumpSpec pump = validate(cfg.pump(), p);
    const DriveSpec drive = cfg.drive();
    const analytic::RateResult r = analytic::efficiency(p, pump, drive);

    DriveSpec amp = drive, sqz = drive;
    amp.phi = pump.pump_phase;
    sqz.phi = pump.pump_phase + 0.5 * std::numbers::pi;
    const double n_eff = drive.effective_added_noise();
    const double g_amp = analytic::kMeasCalibration *
                         analytic::measurement_rate_amp(p, pump.lambda, analytic::steady_state_nbar(p, pump, amp), n_eff);
    const double g_sqz = analytic::kMeasCalibration *
                         analytic::measurement_rate_sqz(p, pump.lambda, analytic::steady_state_nbar(p, pump, sqz), n_eff);
    const double g0 = g0_from_lambda(pump.lambda, p.kappa);

    out << "operating point: G_QPA = " << fixed(cfg.gain_db) << " dB, Phi = " << fixed(cfg.phi_rad)
        << " rad, P_in = " << (cfg.p_in_dbm ? fixed(*cfg.p_in_dbm, 6) + " dBm" : std::string("off"))
        << ", mode = " << analytic::to_string(r.mode) << "\n";
    out << "  Gamma_phi           " << fixed(per_us(r.gamma_phi), 6) << " us^-1\n";
    out << "  Gamma_phi_parasitic " << fixed(per_us(r.gamma_parasitic), 6) << " us^-1\n";
    out << "  Gamma_meas          " << fixed(per_us(r.gamma_meas), 6) << " us^-1\n";
    out << "  Gamma_meas (amp)    " << fixed(per_us(g_amp), 6) << " us^-1\n";
    out << "  Gamma_meas (sqz)    " << fixed(per_us(g_sqz), 6) << " us^-1\n";
    out << "  eta_meas            " << fixed(r.eta_meas, 6) << "\n";
    out << "  eta_QPA             " << fixed(r.eta_qpa, 6) << "\n";
    out << "  eta_rest            " << fixed(r.eta_rest, 6) << "\n";
    out << "  lambda/kappa        " << fixed(pump.lambda / p.kappa, 6) << "\n";
    out << "  G0                  " << fixed(g0, 6) << "\n";
    out << "  nbar                " << fixed(r.nbar, 6) << "\n";

    if (!args.csv.empty()) {
      CsvTable t(kRateColumns);
      t.add_row({format_number(cfg.gain_db), format_number(cfg.phi_rad), format_number(r.gamma_phi),
                 format_number(r.gamma_parasitic), format_number(r.gamma_meas), format_number(r.eta_meas),
                 format_number(r.eta_qpa), format_number(r.eta_rest), format_number(pump.lambda),
                 format_number(g0), format_number(r.nbar)});
      RunManifest m = start_manifest("rates", cfg,
                                     {{"gain_db", format_number(cfg.gain_db)},
                                      {"phi_rad", format_number(cfg.phi_rad)},
                                      {"p_in_dbm", cfg.p_in_dbm ? format_number(*cfg.p_in_dbm) : "off"}});
      write_output(args.csv, t.str(), m);
      write_manifest(args.csv, m);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.spec.empty()) throw ValidationError("sweep needs --spec");
    if (args.out.empty()) throw ValidationError("sweep needs --out");
    const RunConfig cfg = load(args);
    const SweepFile file = load_sweep_file(args.spec);
    const PumpSpec pump = validate(cfg.pump(), cfg.device);
    const sweep::SweepTable table = sweep::run_sweep(file.spec, cfg.device, pump, cfg.drive(), cfg.workers);

    std::vector<std::string> header;
    for (const auto& a : table.spec.axes) header.emplace_back(sweep::column(a.axis));
    for (const auto& o : table.spec.outputs) header.push_back(o);
    header.emplace_back("status");
    CsvTable csv(header);
    std::size_t errors = 0;
    for (const auto& row : table.rows) {
      std::vector<std::string> f;
      for (double c : row.coords) f.push_back(format_number(c));
      for (const auto& o : table.spec.outputs) f.push_back(row.ok() ? format_number(row.output(o)) : "");
      f.push_back(row.ok() ? "ok" : row.error);
      errors += row.ok() ? 0 : 1;
      csv.add_row(std::move(f));
    }
    RunManifest m = start_manifest("sweep", cfg, {{"spec", args.spec}, {"spec_sha256", sha256_hex(file.canonical)}});
    write_output(args.out, csv.str(), m);

    if (!args.plot.empty() && file.plot != PlotKind::none) {
      PlotMeta meta;
      meta.title = file.plot_output;
      meta.manifest_hash = run_id(m);
      const auto& axes = table.spec.axes;
      const std::size_t inner = axes.back().values.size();
      const std::size_t outer = table.rows.size() / inner;
      std::string svg;
      if (file.plot == PlotKind::line) {
        meta.x_label = sweep::column(axes.back().axis);
        meta.y_label = file.plot_output;
        std::vector<Series> series(outer);
        for (std::size_t s = 0; s < outer; ++s) {
          for (std::size_t a = 0; a + 1 < axes.size(); ++a) {
            series[s].label += std::string(a ? ", " : "") + sweep::column(axes[a].axis) + "=" +
                               fixed(table.rows[s * inner].coords[a]);
          }
          for (std::size_t j = 0; j < inner; ++j) {
            const auto& row = table.rows[s * inner + j];
            series[s].x.push_back(row.coords.back());
            series[s].y.push_back(row.output(file.plot_output));
          }
        }
        svg = line_plot(series, meta);
      } else {
        meta.x_label = sweep::column(axes[1].axis);
        meta.y_label = sweep::column(axes[0].axis);
        std::vector<std::vector<double>> z(outer, std::vector<double>(inner));
        for (std::size_t i = 0; i < outer; ++i) {
          for (std::size_t j = 0; j < inner; ++j) z[i][j] = table.rows[i * inner + j].output(file.plot_output);
        }
        svg = heatmap(axes[1].values, axes[0].values, z, meta, file.plot_output);
      }
      write_output(args.plot, svg, m);
    }
    write_manifest(args.out, m);
    out << "sweep: " << table.rows.size() << " points (" << errors << " excluded) -> " << args.out << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_oracle_check(const OracleArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    fock::SuiteOptions opt;
    if (args.suite == "quick") opt = fock::SuiteOptions::quick(args.seed);
    else if (args.suite == "full") opt = fock::SuiteOptions::full(args.seed);
    else throw ValidationError("--suite must be quick or full");
    if (!(args.corrupt_chi > 0.0)) throw ValidationError("--corrupt-chi must be > 0");
    opt.chi_scale = args.corrupt_chi;
    if (args.workers) opt.workers = *args.workers;
    const auto t0 = Clock::now();
    const std::vector<fock::VerificationRow> rows = fock::run_suite(opt);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

    CsvTable csv({"label", "chi", "lambda", "Phi", "nbar", "gamma2_star", "Gamma_phi_analytic", "Gamma_phi_oracle",
                  "rel_error", "Gamma_phi_oracle_eigen", "truncation_change", "dim", "pass", "error"});
    int failed = 0;
    out << "oracle-check (" << args.suite << ", seed " << args.seed << ")  [rates in units of kappa]\n";
    for (const auto& r : rows) {
      failed += r.pass ? 0 : 1;
      out << "  " << (r.pass ? "PASS " : "FAIL ") << r.label << "  chi=" << fixed(r.point.chi)
          << " lambda=" << fixed(r.point.lambda) << " Phi=" << fixed(r.point.phi) << " nbar=" << fixed(r.point.nbar)
          << "  analytic=" << fixed(r.analytic, 8) << " oracle=" << fixed(r.oracle, 8)
          << " err=" << fixed(100.0 * r.rel_error, 3) << "% dN=" << fixed(r.truncation_change, 2) << " N=" << r.dim
          << (r.error.empty() ? "" : "  (" + r.error + ")") << "\n";
      csv.add_row({r.label, format_number(r.point.chi), format_number(r.point.lambda), format_number(r.point.phi),
                   format_number(r.point.nbar), format_number(r.point.gamma2_star), format_number(r.analytic),
                   format_number(r.oracle), format_number(r.rel_error), format_number(r.oracle_eigen),
                   format_number(r.truncation_change), std::to_string(r.dim), r.pass ? "true" : "false", r.error});
    }
    out << (failed ? "FAILED " : "passed ") << rows.size() - static_cast<std::size_t>(failed) << "/" << rows.size()
        << " in " << fixed(secs, 3) << " s\n";
    if (!args.out.empty()) {
      RunManifest m;
      m.subcommand = "oracle-check";
      m.args = {{"suite", args.suite}, {"corrupt_chi", format_number(args.corrupt_chi)}};
      m.seed = args.seed;
      m.created_utc = utc_timestamp();
      write_output(args.out, csv.str(), m);
      write_manifest(args.out, m);
    }
    return failed ? static_cast<int>(kVerification) : static_cast<int>(kOk);
  });
}

int cmd_trajectories(const TrajectoryArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.out_prefix.empty()) throw ValidationError("trajectories needs --out");
    RunConfig cfg = load(args);
    TrajectoryConfig tc = cfg.trajectory;
    if (args.records) tc.records = *args.records;
    if (args.tint_max_s) tc.t_int_max_s = *args.tint_max_s;
    if (args.seed) cfg.seed = *args.seed;
    if (tc.records < 1000) throw ValidationError("--records must be >= 1000 per state");
    if (!(tc.t_int_max_s > tc.t_int_min_s && tc.t_int_min_s > 0.0))
      throw ValidationError("need 0 < t_int_min < t_int_max");
    const DeviceParams& p = cfg.device;
    const PumpSpec pump = validate(cfg.pump(), p);
    const DriveSpec drive = cfg.drive();
    const trajectory::FitModel model =
        tc.model == "double_gaussian" ? trajectory::FitModel::double_gaussian : trajectory::FitModel::t1_modified;

    trajectory::SamplerOptions so;
    so.samples = tc.samples;
    so.workers = cfg.workers;
    const trajectory::RecordSet set = trajectory::sample_records(p, pump, drive, static_cast<std::size_t>(tc.records),
                                                                 tc.t_int_max_s, cfg.seed, so);
    const std::vector<double> grid = trajectory::integration_grid(set, tc.t_int_min_s);
    const std::vector<trajectory::HistogramFit> fits = trajectory::snr_curve(set, grid, model, cfg.workers);

    CsvTable snr({"t_int", "mean_g", "sigma_g", "mean_e", "sigma_e", "SNR", "SNR2", "converged", "error"});
    CsvTable hist({"t_int", "state", "bin_lo", "bin_hi", "count"});
    std::size_t ok = 0;
    for (const auto& f : fits) {
      ok += f.converged ? 1 : 0;
      snr.add_row({format_number(f.t_int), format_number(f.mean_g), format_number(f.sigma_g), format_number(f.mean_e),
                   format_number(f.sigma_e), format_number(f.snr), format_number(f.snr * f.snr),
                   f.converged ? "true" : "false", f.error});
      const std::size_t k = trajectory::grid_index(set.grid, f.t_int);
      for (int s : {-1, +1}) {
        const std::vector<double> v = trajectory::values_at(s > 0 ? set.excited : set.ground, k);
        const trajectory::Histogram h = trajectory::histogram_fd(v);
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
          hist.add_row({format_number(f.t_int), s > 0 ? "e" : "g",
                        format_number(h.lo + h.width * static_cast<double>(b)),
                        format_number(h.lo + h.width * static_cast<double>(b + 1)), std::to_string(h.counts[b])});
        }
      }
    }
    RunManifest m = start_manifest("trajectories", cfg,
                                   {{"records", std::to_string(tc.records)},
                                    {"t_int_max_s", format_number(tc.t_int_max_s)},
                                    {"t_int_min_s", format_number(tc.t_int_min_s)},
                                    {"samples", std::to_string(tc.samples)},
                                    {"model", tc.model}});
    const std::string snr_path = args.out_prefix + "_snr.csv";
    write_output(snr_path, snr.str(), m);
    write_output(args.out_prefix + "_hist.csv", hist.str(), m);
    write_manifest(snr_path, m);

    const analytic::RateResult r = analytic::efficiency(p, pump, drive);
    out << "trajectories: " << tc.records << " records per state, " << fits.size() << " integration times, "
        << ok << " fits converged, model " << trajectory::to_string(model) << "\n";
    if (ok * 5 < fits.size() * 4) {
      err << "failure: fewer than 80% of the integration-time fits converged\n";
      return static_cast<int>(kFailure);
    }
    const trajectory::GammaEstimate est = trajectory::gamma_meas_from_snr(fits);
    out << "  Gamma_meas fitted   " << fixed(per_us(est.gamma_meas), 6) << " us^-1  (R^2 = " << fixed(est.r_squared, 6)
        << ")\n";
    out << "  Gamma_meas analytic " << fixed(per_us(r.gamma_meas), 6) << " us^-1\n";
    out << "  Gamma_phi analytic  " << fixed(per_us(r.gamma_phi), 6) << " us^-1\n";
    out << "  eta_meas fitted     " << fixed(est.gamma_meas / (2.0 * r.gamma_phi), 6) << "\n";
    out << "  eta_meas analytic   " << fixed(r.eta_meas, 6) << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_optimize(const OptimizeArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load(args);
    if (args.nadd) cfg.n_add = *args.nadd;
    if (args.loss) cfg.eta_loss = *args.loss;
    std::vector<std::string> parts;
    boost::algorithm::split(parts, args.bounds, boost::algorithm::is_any_of(","));
    if (parts.size() != 2) throw ValidationError("--bounds must be lo,hi in dB");
    const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
    sweep::OptimizeOptions opt;
    opt.pump_phase = cfg.pump_phase_rad;
    const sweep::OptimumReport r = sweep::optimize_gain(cfg.device, cfg.drive(), lo, hi, opt);

    nlohmann::ordered_json j;
    j["gain_db"] = r.gain_db;
    j["eta_meas"] = r.eta;
    j["lambda"] = r.lambda;
    j["bracket_db"] = {r.bracket.first, r.bracket.second};
    j["curvature_per_db2"] = std::isfinite(r.curvature) ? nlohmann::ordered_json(r.curvature) : nlohmann::ordered_json();
    j["boundary"] = r.boundary;
    j["non_unimodal"] = r.non_unimodal;
    j["n_add"] = cfg.n_add;
    j["eta_loss"] = cfg.eta_loss;
    auto& g = j["grid"] = nlohmann::ordered_json::array();
    for (const auto& [db, eta] : r.grid) g.push_back({db, eta});

    if (r.non_unimodal) {
      out << "optimize: non-unimodal eta_meas(G) profile; see the grid\n";
    } else {
      out << "optimize: G* = " << fixed(r.gain_db, 6) << " dB, eta_meas = " << fixed(r.eta, 6)
          << (r.boundary ? "  [boundary]" : "") << "\n";
      out << "  bracket [" << fixed(r.bracket.first) << ", " << fixed(r.bracket.second) << "] dB, curvature "
          << fixed(r.curvature) << " /dB^2\n";
    }
    if (!args.out.empty()) {
      RunManifest m = start_manifest("optimize", cfg, {{"bounds", args.bounds}});
      write_output(args.out, j.dump(2) + "\n", m);
      write_manifest(args.out, m);
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace qpa::io
