// Copyright 2026 The vibcoh Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <string>
#include <vector>

#include "vibcoh/bell_measure.hpp"
#include "vibcoh/config.hpp"
#include "vibcoh/csv.hpp"
#include "vibcoh/dynamics.hpp"
#include "vibcoh/gates.hpp"
#include "vibcoh/hamiltonian.hpp"
#include "vibcoh/transfer.hpp"
#include "vibcoh/version.hpp"

namespace vibcoh {

struct ExperimentResult {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::string> warnings;

  double at(const std::string& key) const {
    for (const auto& [k, v] : summary) {
      if (k == key) return v;
    }
    throw std::out_of_range("no summary value " + key);
  }
};

struct Experiment {
  std::string name;
  std::string description;
  Schema schema;
  std::function<ExperimentResult(const Params&, std::uint64_t seed)> run;
};

namespace exp_detail {

inline Schema laser_schema(const std::string& eta, const std::string& order) {
  return {{"eta", eta, "bare Lamb-Dicke parameter (effective 2 eta)"},
          {"gamma", "20", "omega_x / g"},
          {"omega_ratio", "4", "omega_x / omega_y"},
          {"delta1", "5", "one-photon detuning / g"},
          {"g", "1", "Rabi frequency unit"},
          {"max_order", order, "expansion order in eta"},
          {"freq_cutoff", "-1", "largest retained |frequency|; < 0 means omega_x + omega_y"},
          {"rtol", "1e-10", "integrator relative tolerance"},
          {"atol", "1e-12", "integrator absolute tolerance"}};
}

inline PresetParams preset_params(const Params& p) {
  PresetParams pp;
  pp.eta = p.num("eta");
  pp.gamma = p.num("gamma");
  pp.omega_ratio = p.num("omega_ratio");
  pp.delta1 = p.num("delta1");
  pp.g = p.num("g");
  pp.max_order = p.integer("max_order");
  pp.freq_cutoff = p.num("freq_cutoff");
  return pp;
}

inline EvolveOptions evolve_options(const Params& p) {
  EvolveOptions o;
  o.rtol = p.num("rtol");
  o.atol = p.num("atol");
  return o;
}

inline int dim_param(const Params& p, const std::string& key) {
  const int d = p.integer(key);
  if (d < 1) throw ConfigError("'" + key + "' must be >= 1");
  return d;
}

inline double positive(const Params& p, const std::string& key) {
  const double v = p.num(key);
  if (!(v > 0)) throw ConfigError("'" + key + "' must be positive");
  return v;
}

inline std::vector<double> fidelity_curve(const Trajectory<StateVector>& tr, const CVector& target) {
  std::vector<double> out;
  for (const auto& s : tr.states) out.push_back(std::norm(target.dot(s.amps())));
  return out;
}

inline std::vector<double> run_curve(const std::vector<HamiltonianTerm>& terms, const ModeSpace& sp,
                                     const StateVector& psi0, const CVector& target, const std::vector<double>& grid,
                                     const EvolveOptions& eo) {
  return fidelity_curve(evolve_schrodinger(TimeDependentHamiltonian(terms, sp), psi0, grid, eo), target);
}

inline double fidelity_at(const std::vector<HamiltonianTerm>& terms, const ModeSpace& sp, const StateVector& psi0,
                          const CVector& target, double t, const EvolveOptions& eo) {
  return run_curve(terms, sp, psi0, target, {0.0, t}, eo).back();
}

inline std::size_t argmax(const std::vector<double>& v) {
  return std::size_t(std::max_element(v.begin(), v.end()) - v.begin());
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

inline CVector normalized_coherent(int dim, cplx alpha) { return coherent_amplitudes(dim, alpha).normalized(); }

}  // namespace exp_detail

// ---------------------------------------------------------------------------
// Coherent-state generation by the stationary displacement term, two panels.

inline Schema fig2_schema() {
  Schema s = exp_detail::laser_schema("0.4", "2");
  s.insert(s.end(), {{"dims_x", "6", "x-mode truncation for the full run"},
                     {"dims_y", "2", "y-mode truncation"},
                     {"ideal_dims_x", "12", "x-mode truncation for the ideal reference"},
                     {"alpha", "1", "target coherent amplitude"},
                     {"t_end", "12.5", "final g t"},
                     {"dt", "0.05", "output spacing in g t"},
                     {"eta_b", "1.0", "panel b Lamb-Dicke parameter"},
                     {"gamma_b", "10", "panel b omega_x / g"}});
  return s;
}

inline ExperimentResult run_fig2(const Params& p, std::uint64_t) {
  using namespace exp_detail;
  const int dx = dim_param(p, "dims_x"), dy = dim_param(p, "dims_y"), dxi = dim_param(p, "ideal_dims_x");
  const double alpha = p.num("alpha");
  require_truncation(alpha, dx);
  require_truncation(alpha, dxi);
  const auto grid = arange(0.0, positive(p, "t_end"), positive(p, "dt"));
  const EvolveOptions eo = evolve_options(p);

  ExperimentResult r;
  Table curve{"fig2", {"gt", "ideal_a", "true_a", "ideal_b", "true_b"}, {}};
  std::vector<std::vector<double>> cols;
  for (int panel = 0; panel < 2; ++panel) {
    PresetParams pp = preset_params(p);
    if (panel == 1) {
      pp.eta = p.num("eta_b");
      pp.gamma = p.num("gamma_b");
    }
    const Preset pr = preset(PresetKind::displacement, pp);
    for (const auto& w : pr.config.validate()) r.warnings.push_back(w);
    const ModeSpace sp({dx, dy}), spi({dxi, dy});
    const CVector vy = fock_vector(dy, 0);
    const CVector target = kron(normalized_coherent(dx, alpha), vy);
    const CVector target_i = kron(normalized_coherent(dxi, alpha), vy);
    const auto ideal = run_curve(ideal_terms(pr), spi, vacuum(spi), target_i, grid, eo);
    const auto truth = run_curve(true_terms(pr), sp, vacuum(sp), target, grid, eo);
    const double tt = alpha / effective_rate(pr);
    const std::string tag = panel == 0 ? "a_" : "b_";
    const std::size_t k = argmax(truth);
    r.summary.emplace_back(tag + "target_time", tt);
    r.summary.emplace_back(tag + "ideal_at_target", fidelity_at(ideal_terms(pr), spi, vacuum(spi), target_i, tt, eo));
    r.summary.emplace_back(tag + "true_at_target", fidelity_at(true_terms(pr), sp, vacuum(sp), target, tt, eo));
    r.summary.emplace_back(tag + "true_peak", truth[k]);
    r.summary.emplace_back(tag + "true_peak_time", grid[k]);
    cols.push_back(ideal);
    cols.push_back(truth);
  }
  r.summary.emplace_back("peak_margin", r.at("a_true_peak") - r.at("b_true_peak"));
  for (std::size_t i = 0; i < grid.size(); ++i) curve.add({grid[i], cols[0][i], cols[1][i], cols[2][i], cols[3][i]});
  r.tables.push_back(std::move(curve));
  return r;
}

// ---------------------------------------------------------------------------
// Kerr cat generation and cross-phase ECS generation.

inline Schema fig3_schema() {
  Schema s = exp_detail::laser_schema("0.4", "4");
  s.insert(s.end(), {{"dims_x", "6", "x-mode truncation"},
                     {"dims_y", "6", "y-mode truncation"},
                     {"alpha", "1", "input |-i alpha> amplitude"},
                     {"periods", "1", "number of Kerr periods pi/chi"},
                     {"dt", "0.05", "output spacing in g t"},
                     {"anchor_gt", "38", "reference peak time under the alternate rate"}});
  return s;
}

inline Schema fig4_schema() {
  Schema s = exp_detail::laser_schema("0.4", "4");
  s.insert(s.end(), {{"dims_x", "6", "x-mode truncation"},
                     {"dims_y", "6", "y-mode truncation"},
                     {"alpha_x", "1", "x coherent amplitude"},
                     {"alpha_y", "1", "y coherent amplitude"},
                     {"periods", "1", "number of cross-phase periods 2 pi/chi"},
                     {"dt", "0.05", "output spacing in g t"},
                     {"anchor_gt", "77", "reference peak time under the alternate rate"}});
  return s;
}

namespace exp_detail {

inline ExperimentResult nonlinear_run(const Params& p, const Preset& pr, const ModeSpace& sp, const StateVector& psi0,
                                      const CVector& target, double period, const std::string& name) {
  const auto grid = arange(0.0, p.num("periods") * period, positive(p, "dt"));
  const EvolveOptions eo = evolve_options(p);
  ExperimentResult r;
  for (const auto& w : pr.config.validate()) r.warnings.push_back(w);
  const auto ideal = run_curve(ideal_terms(pr), sp, psi0, target, grid, eo);
  const auto truth = run_curve(true_terms(pr), sp, psi0, target, grid, eo);
  const double tt = target_time(pr);
  const std::size_t ki = argmax(ideal), kt = argmax(truth);
  const double scale = effective_rate(pr) / alternate_rate(pr);
  r.summary = {{"target_time", tt},
               {"ideal_at_target", fidelity_at(ideal_terms(pr), sp, psi0, target, tt, eo)},
               {"ideal_peak", ideal[ki]},
               {"ideal_peak_time", grid[ki]},
               {"true_peak", truth[kt]},
               {"true_peak_time", grid[kt]},
               {"true_at_target", fidelity_at(true_terms(pr), sp, psi0, target, tt, eo)},
               {"sup_norm_diff", sup_diff(ideal, truth)},
               {"alternate_target_time", alternate_target_time(pr)},
               {"peak_time_alternate", grid[ki] * scale},
               {"anchor_gt", p.num("anchor_gt")}};
  Table t{name, {"gt", "ideal", "true"}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) t.add({grid[i], ideal[i], truth[i]});
  r.tables.push_back(std::move(t));
  return r;
}

}  // namespace exp_detail

inline ExperimentResult run_fig3(const Params& p, std::uint64_t) {
  using namespace exp_detail;
  const int dx = dim_param(p, "dims_x"), dy = dim_param(p, "dims_y");
  const double a = p.num("alpha");
  require_truncation(cplx(0, -a), dx);
  const Preset pr = preset(PresetKind::kerr, preset_params(p));
  const ModeSpace sp({dx, dy});
  const StateVector psi0 = product_state(sp, {normalized_coherent(dx, cplx(0, -a)), fock_vector(dy, 0)});
  const CVector cat = (coherent_amplitudes(dx, a) + kI * coherent_amplitudes(dx, -a)).normalized();
  const CVector target = kron(cat, fock_vector(dy, 0));
  // n(n-1) is even: the ideal evolution repeats after chi t = pi
  return nonlinear_run(p, pr, sp, psi0, target, kPi / effective_rate(pr), "fig3");
}

inline ExperimentResult run_fig4(const Params& p, std::uint64_t) {
  using namespace exp_detail;
  const int dx = dim_param(p, "dims_x"), dy = dim_param(p, "dims_y");
  const double ax = p.num("alpha_x"), ay = p.num("alpha_y");
  require_truncation(ax, dx);
  require_truncation(ay, dy);
  const Preset pr = preset(PresetKind::crossphase, preset_params(p));
  const ModeSpace sp({dx, dy});
  const StateVector psi0 = product_state(sp, {normalized_coherent(dx, ax), normalized_coherent(dy, ay)});
  const auto ecs = apply_cross_parity(CoherentSuperposition::ket({ax, ay}), 0, 1);
  const CVector target = to_fock(ecs, sp).amps().normalized();
  return nonlinear_run(p, pr, sp, psi0, target, 2 * kPi / effective_rate(pr), "fig4");
}

// ---------------------------------------------------------------------------
// Cavity-mediated state transfer.

inline Schema transfer_schema() {
  return {{"gamma_tilde", "0.03", "pulse rate / kappa"},
          {"t_open", "-200", "pulse window start (kappa t)"},
          {"t_close", "200", "pulse window end (kappa t)"},
          {"t_end", "300", "final kappa t"},
          {"dt", "1", "output spacing"},
          {"dim", "4", "truncation per mode"},
          {"phi", "pi", "collective jump phase"},
          {"order", "counter_intuitive", "pulse order: counter_intuitive | as_written"},
          {"gamma_v", "0", "extra vibrational damping rate"},
          {"psi", "0.632455532033676,-0.632455532033676,0.447213595499958", "input Fock amplitudes"},
          {"rtol", "1e-10", "integrator relative tolerance"},
          {"atol", "1e-12", "integrator absolute tolerance"}};
}

inline ExperimentResult run_transfer_experiment(const Params& p, std::uint64_t) {
  PulseSchedule s;
  s.gamma_tilde = exp_detail::positive(p, "gamma_tilde");
  s.t_open = p.num("t_open");
  s.t_close = p.num("t_close");
  if (!(s.t_close > s.t_open)) throw ConfigError("t_close must exceed t_open");
  s.order = p.choice("order", {"counter_intuitive", "as_written"}) == "as_written" ? PulseOrder::as_written
                                                                                   : PulseOrder::counter_intuitive;
  TransferOptions o;
  o.dim = exp_detail::dim_param(p, "dim");
  o.phi = p.num("phi");
  o.gamma_v = p.num("gamma_v");
  o.t_end = p.num("t_end");
  o.dt = exp_detail::positive(p, "dt");
  o.rtol = p.num("rtol");
  o.atol = p.num("atol");
  if (!(o.t_end > s.t_open)) throw ConfigError("t_end must exceed t_open");
  const auto amps = p.list("psi");
  ModeSpace sp({int(amps.size())});
  CVector v(Eigen::Index(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(Eigen::Index(i)) = amps[i];
  if (v.norm() == 0.0) throw ConfigError("'psi' must not be the zero vector");
  const auto rep = run_transfer(StateVector(sp, v.normalized()), s, o);

  ExperimentResult r;
  Table t{"transfer", {"kappa_t", "fidelity", "quasi_norm", "s_lin", "trace"}, {}};
  double trace_dev = 0.0, s_max = 0.0, drift = 0.0, f_after = 1.0;
  double f_close = -1.0;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    t.add({rep.times[i], rep.fidelity[i], rep.quasi_norm[i], rep.s_lin[i], rep.trace[i]});
    trace_dev = std::max(trace_dev, std::abs(rep.trace[i] - 1.0));
    s_max = std::max(s_max, rep.s_lin[i]);
    if (rep.times[i] >= s.t_close) {
      if (f_close < 0) f_close = rep.fidelity[i];
      drift = std::max(drift, std::abs(rep.fidelity[i] - f_close));
      f_after = std::min(f_after, rep.fidelity[i]);
    }
  }
  r.summary = {{"initial_fidelity", rep.fidelity.front()},
               {"final_fidelity", rep.fidelity.back()},
               {"min_fidelity_after_close", f_after},
               {"post_close_drift", drift},
               {"final_quasi_norm", rep.quasi_norm.back()},
               {"initial_s_lin", rep.s_lin.front()},
               {"max_s_lin", s_max},
               {"final_s_lin", rep.s_lin.back()},
               {"max_trace_deviation", trace_dev},
               {"pulse_area", pulse_area(s)}};
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------------------
// Quasi-Bell discrimination records.

inline Schema table1_schema() {
  return {{"alpha", "1", "ECS amplitude"},
          {"shots", "0", "sampled runs per input (0: enumerate only)"},
          {"dark", "0", "P(report e | g)"},
          {"bright", "0", "P(report g | e)"}};
}

inline ExperimentResult run_table1(const Params& p, std::uint64_t seed) {
  const double a = exp_detail::positive(p, "alpha");
  const int shots = p.integer("shots");
  if (shots < 0) throw ConfigError("'shots' must be >= 0");
  DiscriminationOptions opt;
  opt.detector = {p.num("dark"), p.num("bright")};
  for (double q : {opt.detector.dark, opt.detector.bright}) {
    if (q < 0 || q > 1) throw ConfigError("detector error probabilities must lie in [0, 1]");
  }
  const double eps = disambiguation_epsilon(a);
  ExperimentResult r;
  Table rows{"table1",
             {"input", "outcome_1", "outcome_2", "p_pair", "outcome_3", "p_outcome_3", "epsilon", "p_correct"},
             {}};
  Table br{"table1_branches", {"input", "outcomes", "probability", "label"}, {}};
  Table sm{"table1_samples", {"input", "outcomes", "count", "expected"}, {}};
  double worst = 1.0;
  for (EcsKind k : kAllEcsKinds) {
    const auto rec = discriminate_ecs(ecs_ket(k, a), a, MeasurementPolicy::enumerate(), opt);
    std::map<std::string, double> pairs, third;
    std::map<std::string, double> full;
    for (const auto& b : rec.branches) {
      const std::string o = outcome_string(b.outcomes);
      full[o] += b.probability;
      pairs[o.substr(0, 2)] += b.probability;
      if (o.size() >= 3) third[o.substr(2, 1)] += b.probability;
      br.add({to_string(k), o, b.probability, to_string(b.label)});
    }
    const auto best_pair = *std::max_element(pairs.begin(), pairs.end(),
                                             [](const auto& x, const auto& y) { return x.second < y.second; });
    std::string o3 = "-";
    double p3 = 0.0;
    if (!third.empty()) {
      const auto best3 = *std::max_element(third.begin(), third.end(),
                                           [](const auto& x, const auto& y) { return x.second < y.second; });
      double tot = 0.0;
      for (const auto& [key, v] : third) tot += v;
      o3 = best3.first;
      p3 = best3.second / tot;
    }
    const double pc = rec.label_probability(label_of(k));
    worst = std::min(worst, pc);
    rows.add({to_string(k), best_pair.first.substr(0, 1), best_pair.first.substr(1, 1), best_pair.second, o3, p3, eps,
              pc});
    if (shots > 0) {
      const auto counts = sample_outcomes(ecs_ket(k, a), a, std::size_t(shots), seed + std::uint64_t(k), opt);
      for (const auto& [o, pr] : full) {
        const long long c = counts.count(o) ? static_cast<long long>(counts.at(o)) : 0;
        sm.add({to_string(k), o, c, pr * shots});
      }
    }
  }
  r.summary = {{"epsilon", eps},
               {"efficiency", worst},
               {"psi_plus_false_e", confusion_matrix(a, opt)[2][int(EcsLabel::phi_plus)]}};
  r.tables.push_back(std::move(rows));
  r.tables.push_back(std::move(br));
  if (shots > 0) r.tables.push_back(std::move(sm));
  return r;
}

// ---------------------------------------------------------------------------
// Gate figures of merit.

inline Schema gates_schema() {
  return {{"alpha", "2", "logical amplitude"},
          {"theta_z", "pi", "rot_z angle"},
          {"bs_theta", "-1", "beam-splitter angle; < 0 means pi/(4 alpha^2)"},
          {"bs_theta_alt", "pi/36", "second beam-splitter angle"},
          {"policy", "ideal-projector", "Bell policy: ideal-projector | full-protocol"}};
}

inline ExperimentResult run_gates(const Params& p, std::uint64_t) {
  const double a = exp_detail::positive(p, "alpha");
  if (a < 1.0) throw ConfigError("'alpha' must be >= 1 for displacement rotations");
  const BellPolicy policy = p.choice("policy", {"ideal-projector", "full-protocol"}) == "full-protocol"
                                ? BellPolicy::full_protocol
                                : BellPolicy::ideal_projector;
  ExperimentResult r;
  Table rot{"gates_rotations", {"gate", "theta", "process_fidelity", "code_fidelity", "code_weight", "state_fidelity"},
            {}};
  const double tz = p.num("theta_z");
  const auto z = rot_z(coherent_ket(a), 0, a, tz);
  const auto amp = rot_z_branch_amplitudes(a, tz);
  rot.add({"rot_z", tz, z.process_fidelity, z.code_fidelity, z.code_weight, std::arg(amp[0] / amp[1])});
  const auto x = rot_x_pi4(coherent_ket(a), 0, a);
  rot.add({"rot_x_pi4", kPi / 2, x.process_fidelity, x.code_fidelity, x.code_weight, 1.0});
  double hmin = 1.0;
  for (int sign : {1, -1}) {
    const auto h = hadamard(coherent_ket(sign * a), 0, a);
    const double f = code_state_fidelity(h.output, cat_ket(a, sign), a);
    hmin = std::min(hmin, f);
    rot.add({sign > 0 ? "hadamard(+alpha)" : "hadamard(-alpha)", kPi / 2, h.process_fidelity, h.code_fidelity,
             h.code_weight, f});
  }

  Table tt{"gates_cisy_truth", {"input", "p_out_aa", "p_out_am", "p_out_ma", "p_out_mm", "fidelity"}, {}};
  const auto cisy = c_isigma_y(CoherentSuperposition::ket({a, a}), a, policy);
  const auto fid = truth_table(cisy.kraus, logical::c_isigma_y());
  const char* names[] = {"aa", "am", "ma", "mm"};
  double cmin = 1.0;
  for (int j = 0; j < 4; ++j) {
    std::array<double, 4> pr{};
    double tot = 0.0;
    for (const auto& m : cisy.kraus) {
      for (int i = 0; i < 4; ++i) {
        pr[i] += std::norm(m(i, j));
        tot += std::norm(m(i, j));
      }
    }
    for (double& v : pr) v /= tot;
    tt.add({names[j], pr[0], pr[1], pr[2], pr[3], fid[j]});
    cmin = std::min(cmin, fid[j]);
  }

  Table bs{"gates_bs_cnot",
           {"theta", "theta2_alpha2", "success_probability", "code_fidelity", "cnot_code_fidelity", "min_truth",
            "warning"},
           {}};
  double th = p.num("bs_theta");
  if (th < 0) th = bs_cnot_theta(a);
  double success = 0.0, cnot_min = 1.0;
  for (double angle : {th, p.num("bs_theta_alt")}) {
    const auto b = bs_cnot(CoherentSuperposition::ket({a, a}), a, angle, policy);
    const double mt = *std::min_element(b.cnot_truth.begin(), b.cnot_truth.end());
    bs.add({angle, angle * angle * a * a, b.success_probability, b.code_fidelity, b.cnot_code_fidelity, mt,
            b.warnings.empty() ? std::string("-") : b.warnings.front()});
    for (const auto& w : b.warnings) r.warnings.push_back(w);
    if (angle == th) {
      success = b.success_probability;
      cnot_min = mt;
    }
  }
  r.summary = {{"rot_z_code_fidelity", z.code_fidelity},
               {"rot_z_relative_phase", std::arg(amp[0] / amp[1])},
               {"hadamard_min_fidelity", hmin},
               {"cisy_code_fidelity", cisy.code_fidelity},
               {"cisy_min_truth", cmin},
               {"bs_theta", th},
               {"bs_success", success},
               {"bs_cnot_min_truth", cnot_min}};
  r.tables.push_back(std::move(rot));
  r.tables.push_back(std::move(tt));
  r.tables.push_back(std::move(bs));
  return r;
}

// ---------------------------------------------------------------------------
// Registry and runner

inline const std::vector<Experiment>& experiments();

inline const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : experiments()) {
    if (e.name == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

inline std::vector<std::string> header_lines(const std::string& name, const KeyValues& params, std::uint64_t seed) {
  std::vector<std::string> out{std::string("vibcoh ") + kVersion, "experiment = " + name,
                               "seed = " + std::to_string(seed)};
  for (const auto& [k, v] : params) out.push_back(k + " = " + v);
  return out;
}

inline void write_result(const std::filesystem::path& dir, const std::string& name, const KeyValues& params,
                         std::uint64_t seed, const ExperimentResult& r) {
  std::filesystem::create_directories(dir);
  const auto header = header_lines(name, params, seed);
  auto emit = [&](const Table& t) {
    std::ofstream os(dir / (t.name + ".csv"));
    if (!os) throw std::runtime_error("cannot write " + (dir / (t.name + ".csv")).string());
    write_csv(os, t, header);
  };
  for (const auto& t : r.tables) emit(t);
  Table s{name + "_summary", {"key", "value"}, {}};
  for (const auto& [k, v] : r.summary) s.add({k, v});
  emit(s);
}

struct RunOutput {
  ExperimentResult result;
  KeyValues params;
};

inline RunOutput run_named(const std::string& name, const KeyValues& given, std::uint64_t seed,
                           const std::filesystem::path& out_dir);

// Parameter grid over one key of another experiment, runs in parallel.
inline Schema sweep_schema() {
  return {{"experiment", "table1", "experiment to sweep"},
          {"param", "alpha", "key to vary"},
          {"values", "1,2", "comma-separated values"},
          {"workers", "0", "parallel runs; 0 means hardware concurrency"}};
}

inline RunOutput run_sweep(const KeyValues& given, std::uint64_t seed, const std::filesystem::path& out_dir) {
  KeyValues own, forwarded;
  const Schema schema = sweep_schema();
  for (const auto& kv : given) {
    const bool mine = std::any_of(schema.begin(), schema.end(), [&](const ParamSpec& s) { return s.key == kv.first; });
    (mine ? own : forwarded).push_back(kv);
  }
  const Params p(schema, own);
  const std::string sub = p.str("experiment");
  if (sub == "sweep") throw ConfigError("cannot sweep a sweep");
  find_experiment(sub);
  const std::string key = p.str("param");
  std::vector<std::string> values;
  {
    std::stringstream ss(p.str("values"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (item.empty()) throw ConfigError("empty entry in 'values'");
      values.push_back(item);
    }
  }
  int workers = p.integer("workers");
  if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());

  std::vector<RunOutput> outs(values.size());
  for (std::size_t start = 0; start < values.size(); start += std::size_t(workers)) {
    std::vector<std::future<RunOutput>> batch;
    for (std::size_t i = start; i < std::min(values.size(), start + std::size_t(workers)); ++i) {
      KeyValues kv = forwarded;
      set_value(kv, key, values[i]);
      const auto dir = out_dir / ("sweep_" + key + "_" + std::to_string(i));
      batch.push_back(std::async(std::launch::async, [=] { return run_named(sub, kv, seed, dir); }));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) outs[start + i] = batch[i].get();
  }

  RunOutput o;
  o.params = p.resolved();
  for (const auto& kv : forwarded) o.params.push_back(kv);
  Table t{"sweep", {"index", key}, {}};
  std::vector<std::string> keys;
  for (const auto& [k, v] : outs.front().result.summary) keys.push_back(k);
  for (const auto& k : keys) t.columns.push_back(k);
  for (std::size_t i = 0; i < outs.size(); ++i) {
    std::vector<Cell> row{static_cast<long long>(i), values[i]};
    for (const auto& k : keys) row.emplace_back(outs[i].result.at(k));
    t.add(std::move(row));
    for (const auto& w : outs[i].result.warnings) o.result.warnings.push_back(w);
  }
  o.result.summary = {{"runs", double(outs.size())}};
  o.result.tables.push_back(std::move(t));
  write_result(out_dir, "sweep", o.params, seed, o.result);
  return o;
}

inline RunOutput run_named(const std::string& name, const KeyValues& given, std::uint64_t seed,
                           const std::filesystem::path& out_dir) {
  if (name == "sweep") return run_sweep(given, seed, out_dir);
  const Experiment& e = find_experiment(name);
  const Params p(e.schema, given);
  RunOutput o{e.run(p, seed), p.resolved()};
  write_result(out_dir, name, o.params, seed, o.result);
  return o;
}

inline const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> list{
      {"fig2", "coherent-state generation overlap, panels a and b", fig2_schema(), run_fig2},
      {"fig3", "Kerr cat overlap, ideal vs full Hamiltonian", fig3_schema(), run_fig3},
      {"fig4", "cross-phase ECS overlap, ideal vs full Hamiltonian", fig4_schema(), run_fig4},
      {"transfer", "cavity-mediated vibrational state transfer", transfer_schema(), run_transfer_experiment},
      {"table1", "quasi-Bell discrimination records", table1_schema(), run_table1},
      {"gates", "rotation fidelities, C_isy truth table, beam-splitter CNOT", gates_schema(), run_gates},
      {"sweep", "parallel parameter grid over another experiment", sweep_schema(), nullptr},
  };
  return list;
}

}  // namespace vibcoh
