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

// qpa: dephasing, measurement-rate and efficiency calculations for a
// dispersively coupled qubit read out through a phase-sensitive amplifier.

#include <iostream>

#include <CLI11.hpp>

#include "qpa/io/commands.hpp"
#include "qpa/io/manifest.hpp"

namespace {

void add_common(CLI::App* sub, qpa::io::CommonArgs& a) {
  sub->add_option("-c,--config", a.config, "INI configuration file");
  sub->add_option("--set", a.set, "override a config key (section.key=value)");
  sub->add_option("-j,--workers", a.workers, "worker threads (default: logical cores)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qpa::io;
  CLI::App app{"qpa: qubit readout through a phase-sensitive amplifier"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  RatesArgs rates;
  auto* r = app.add_subcommand("rates", "dephasing, measurement rate and efficiencies at one point");
  add_common(r, rates);
  r->add_option("--gain", rates.gain_db, "G_QPA in dB");
  r->add_option("--phi", rates.phi, "drive phase in rad");
  r->add_option("--pin", rates.pin, "drive power in dBm, or 'off'");
  r->add_option("--csv", rates.csv, "write a one-row CSV");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "grid evaluation to long-format CSV");
  add_common(s, sw);
  s->add_option("--spec", sw.spec, "sweep-spec file")->required();
  s->add_option("-o,--out", sw.out, "output CSV")->required();
  s->add_option("--plot", sw.plot, "output SVG");

  OracleArgs oc;
  auto* o = app.add_subcommand("oracle-check", "Fock-space verification of the closed-form dephasing");
  o->add_option("--suite", oc.suite, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  o->add_option("--seed", oc.seed, "parameter draw seed");
  o->add_option("--corrupt-chi", oc.corrupt_chi, "scale chi in the oracle only (mutation test)");
  o->add_option("-j,--workers", oc.workers, "worker threads");
  o->add_option("-o,--out", oc.out, "report CSV");

  TrajectoryArgs tr;
  auto* t = app.add_subcommand("trajectories", "synthetic records, SNR curve and fitted measurement rate");
  add_common(t, tr);
  t->add_option("--records", tr.records, "records per qubit state");
  t->add_option("--tint-max", tr.tint_max_s, "largest integration time in s");
  t->add_option("--seed", tr.seed, "record seed");
  t->add_option("-o,--out", tr.out_prefix, "output prefix")->required();

  OptimizeArgs op;
  auto* p = app.add_subcommand("optimize", "gain maximizing eta_meas in amplifier mode");
  add_common(p, op);
  p->add_option("--nadd", op.nadd, "added noise quanta");
  p->add_option("--loss", op.loss, "downstream transmission eta_loss");
  p->add_option("--bounds", op.bounds, "gain bounds lo,hi in dB");
  p->add_option("-o,--out", op.out, "JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  if (*r) return cmd_rates(rates, std::cout, std::cerr);
  if (*s) return cmd_sweep(sw, std::cout, std::cerr);
  if (*o) return cmd_oracle_check(oc, std::cout, std::cerr);
  if (*t) return cmd_trajectories(tr, std::cout, std::cerr);
  return cmd_optimize(op, std::cout, std::cerr);
}
