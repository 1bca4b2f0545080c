#include "lll/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <set>

#include "lll/dynamics.hpp"
#include "lll/errors.hpp"
#include "lll/experiments.hpp"
#include "lll/fock.hpp"
#include "lll/operators.hpp"

namespace lll::app {

namespace {

const std::set<std::string> kCommands = {"verify",        "simulate", "multisoliton", "cauchy",
                                          "superposition", "lift"};
const std::set<std::string> kKeys = {
    "command", "N",     "dt",    "t_final",        "M",       "M_list",  "kappa",
    "separations", "t_list", "snapshot_times", "sample_interval", "samples", "doubling",
    "ensemble", "sigma", "out",   "seed"};

// ---------------------------------------------------------------------------
// Parsing helpers

double get_number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string("config: '") + key + "' is not finite");
  return x;
}

double positive(const json& doc, const char* key, double fallback) {
  const double x = get_number(doc, key, fallback);
  if (!(x > 0.0)) throw ConfigError(std::string("config: '") + key + "' must be positive");
  return x;
}

std::vector<double> get_list(const json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  const json& v = doc.at(key);
  if (!v.is_array()) throw ConfigError(std::string("config: '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number())
      throw ConfigError(std::string("config: '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
    if (!std::isfinite(out.back()))
      throw ConfigError(std::string("config: '") + key + "' holds a non-finite value");
  }
  return out;
}

WaveSpec parse_wave(const json& w) {
  if (!w.is_object()) throw ConfigError("config: each wave must be an object");
  for (const auto& [k, _] : w.items())
    if (k != "K" && k != "speed" && k != "a" && k != "b" && k != "theta" && k != "gamma_re" &&
        k != "gamma_im")
      throw ConfigError("config: unknown wave key '" + k + "'");
  if (w.contains("K") == w.contains("speed"))
    throw ConfigError("config: each wave needs exactly one of 'K' or 'speed'");
  WaveSpec s;
  s.K = w.contains("K") ? get_number(w, "K", 0.0) : amplitude_for_speed(get_number(w, "speed", 0));
  if (!(s.K >= 0.0)) throw ConfigError("config: wave amplitude must be >= 0");
  s.a = get_number(w, "a", 0.0);
  s.b = get_number(w, "b", 0.0);
  s.theta = get_number(w, "theta", 0.0);
  s.gamma = cplx(get_number(w, "gamma_re", 0.0), get_number(w, "gamma_im", 0.0));
  return s;
}

void default_ensemble(ExperimentConfig& c) {
  const double K = amplitude_for_speed(1.0);
  if (c.command == "superposition") {
    c.mode = EnsembleMode::CommonSpeed;
    c.waves = {{K, 0, 0, 0, cplx(-0.5, 0)}, {K, 0, 0, 0, cplx(0.5, 0)}};
  } else if (c.command == "simulate") {
    c.waves = {{K, 0, 0, 0, 0.0}};
  } else {
    c.waves = {{K, 0, 0, 0, 0.0}, {K, 0, 0, std::numbers::pi, 0.0}};
  }
}

// ---------------------------------------------------------------------------
// Output helpers

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Artifacts {
  const ExperimentConfig& cfg;
  std::string hash;

  std::filesystem::path path(const std::string& name) const { return cfg.out / name; }

  void write_json(const std::string& name, json body) const {
    body["config_hash"] = hash;
    body["config"] = cfg.raw;
    std::ofstream f(path(name));
    if (!f) throw Error("cannot write " + path(name).string());
    f << body.dump(2) << '\n';
  }

  std::ofstream csv(const std::string& name, const std::string& header) const {
    std::ofstream f(path(name));
    if (!f) throw Error("cannot write " + path(name).string());
    f << header << '\n';
    return f;
  }

  // Trailer lines keep the header on the first line of every CSV.
  void close_csv(std::ofstream& f) const {
    f << "# config_hash " << hash << '\n' << "# config " << cfg.raw.dump() << '\n';
  }
};

struct Row {
  std::string name;
  double value;
  double limit;
  bool pass;
};

json rows_json(const std::vector<Row>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"name", r.name}, {"value", r.value}, {"limit", r.limit}, {"pass", r.pass}});
  return out;
}

bool print_table(std::ostream& os, const std::vector<Row>& rows) {
  bool all = true;
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-34s %14.6e  (limit %.3e)\n", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.value, r.limit);
    os << line;
    all = all && r.pass;
  }
  return all;
}

Row at_most(std::string name, double value, double limit) {
  return {std::move(name), value, limit, value <= limit};
}
Row at_least(std::string name, double value, double limit) {
  return {std::move(name), value, limit, value >= limit};
}

json snapshot(const FockVector& u) {
  json re = json::array(), im = json::array();
  for (const auto& c : u.coeffs()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return {{"n", u.size()}, {"re", re}, {"im", im}};
}

double relative(double now, double start) {
  return std::abs(now - start) / (start != 0.0 ? std::abs(start) : 1.0);
}

// ---------------------------------------------------------------------------
// Commands

FockVector random_vector(std::mt19937_64& rng, std::size_t n, std::size_t support) {
  std::normal_distribution<double> g;
  std::vector<cplx> c(n);
  for (std::size_t i = 0; i < std::min(n, support); ++i) c[i] = {g(rng), g(rng)};
  FockVector u(std::move(c));
  return (1.0 / std::sqrt(u.mass())) * u;
}

std::vector<Row> verify_rows(const ExperimentConfig& c) {
  std::vector<Row> rows;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const std::size_t N = c.N;
  const TrilinearKernelTable table(N);
  const double pi = std::numbers::pi;

  {
    const FockVector p0 = FockVector::basis(N, 0), p1 = FockVector::basis(N, 1);
    const FockVector a = projected_triple(p0, p0, p0, table);
    const FockVector b = projected_triple(p1, p1, p1, table);
    const double err = std::max(l2_norm(a - (1.0 / (2 * pi)) * p0), l2_norm(b - (1.0 / (4 * pi)) * p1));
    rows.push_back(at_most("kernel.analytic", err, 1e-12));
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      const FockVector p = random_vector(rng, N, N), q = random_vector(rng, N, N),
                       r = random_vector(rng, N, N);
      worst = std::max(worst, l2_norm(projected_triple(p, q, r, table) -
                                      projected_triple_fast(p, q, r, table)));
    }
    rows.push_back(at_most("kernel.fast_vs_reference", worst, 1e-12));
  }
  {
    const std::size_t n = 10;
    const TrilinearKernelTable small(n);
    const PolarGrid grid = PolarGrid::for_truncation(n);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      const FockVector p = random_vector(rng, n, n), q = random_vector(rng, n, n),
                       r = random_vector(rng, n, n);
      const auto pz = evaluate_on_grid(p, grid), qz = evaluate_on_grid(q, grid),
                 rz = evaluate_on_grid(r, grid);
      std::vector<cplx> prod(grid.size());
      for (std::size_t j = 0; j < grid.size(); ++j) prod[j] = pz[j] * std::conj(qz[j]) * rz[j];
      worst = std::max(worst, l2_norm(projected_triple(p, q, r, small) -
                                      projector_quadrature_oracle(prod, grid, n)));
    }
    rows.push_back(at_most("kernel.quadrature_oracle", worst, 1e-8));
  }
  {
    double unit = 0.0, comp = 0.0;
    for (int i = 0; i < 4; ++i) {
      const FockVector u = random_vector(rng, N, 8);
      const cplx a(unif(rng), unif(rng)), b(unif(rng), unif(rng));
      const FockVector ra = magnetic_translate(u, a);
      unit = std::max(unit, std::abs(l2_norm(ra) - 1.0));
      const FockVector lhs = magnetic_translate(ra, b);
      const FockVector rhs = translation_composition_phase(b, a) * magnetic_translate(u, a + b);
      comp = std::max(comp, l2_norm(lhs - rhs));
    }
    rows.push_back(at_most("translation.unitarity", unit, 1e-10));
    rows.push_back(at_most("translation.composition", comp, 1e-9));
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      const FockVector u = random_vector(rng, N, 10);
      worst = std::max(worst, sup_norm_estimate(u, SupGrid::for_vector(u)).value);
    }
    rows.push_back(at_most("carlen.random_sup", worst, 1.0 / std::sqrt(pi) + 1e-6));
    const FockVector p0 = FockVector::basis(N, 0);
    const double s0 = sup_norm_estimate(p0, SupGrid::for_vector(p0)).value;
    rows.push_back(at_most("carlen.phi0_equality", std::abs(s0 - 1.0 / std::sqrt(pi)), 1e-8));
  }
  {
    double worst = 0.0;
    std::uniform_real_distribution<double> amp(0.5, 2.0), ang(0.0, 2 * pi);
    for (int i = 0; i < 3; ++i) {
      const WaveSpec w{amp(rng), ang(rng), ang(rng), ang(rng), cplx(unif(rng), unif(rng))};
      worst = std::max(worst, ansatz_residual(w, 0.5, 1e-3, N, table));
    }
    rows.push_back(at_most("waves.ansatz_residual", worst, 1e-6));
    const StationaryFit st =
        stationary_check(FockVector::basis(N, 1), FockVector::basis(N, 0), -1, table);
    rows.push_back(at_most("waves.stationary", st.residual + std::abs(st.lambda - 1.0 / (4 * pi)), 1e-12));
  }
  {
    const FockVector p0 = FockVector::basis(N, 0);
    const SimState s{p0, p0, 0.0, -1};
    const SimState e = integrate(s, 10.0, 1e-3, table).state;
    const double w = 10.0 / (2 * pi);
    const double err = std::max(std::abs(e.u[0] - std::polar(1.0, -w)),
                                std::abs(e.v[0] - std::polar(1.0, w)));
    rows.push_back(at_most("dynamics.single_mode", err, 1e-8));
  }
  {
    const WavePair p = build_wave_pair({amplitude_for_speed(0.5), 0, 0, 0.3, cplx(0, 0.5)}, N);
    const SimState s{p.u, p.v, 0.0, -1};
    const auto c0 = conserved_quantities(s.u, s.v, table);
    const SimState e = integrate(s, 1.0, 1e-3, table).state;
    const auto c1 = conserved_quantities(e.u, e.v, table);
    const double mh = std::max({relative(c1.mass_u, c0.mass_u), relative(c1.mass_v, c0.mass_v),
                                relative(c1.hamiltonian, c0.hamiltonian)});
    const double pq = std::max(relative(c1.p_minus, c0.p_minus),
                               std::abs(c1.q_minus - c0.q_minus) / std::abs(c0.q_minus));
    rows.push_back(at_most("dynamics.conservation_M_H", mh, 1e-8));
    rows.push_back(at_most("dynamics.conservation_P_Q", pq, 1e-7));
  }
  return rows;
}

int cmd_verify(const ExperimentConfig& c, const Artifacts& art, std::ostream& os) {
  const auto rows = verify_rows(c);
  const bool ok = print_table(os, rows);
  art.write_json("verify_summary.json", {{"suite", "verify"}, {"seed", c.seed}, {"rows", rows_json(rows)}, {"pass", ok}});
  return ok ? kPass : kFail;
}

int cmd_simulate(const ExperimentConfig& c, const Artifacts& art, std::ostream& os) {
  const SolitonEnsemble ens(c.waves, c.mode);
  WavePair p = ens.profile_sum(0.0, c.N);
  SimState s{std::move(p.u), std::move(p.v), 0.0, c.sigma};
  const TrilinearKernelTable table(c.N);
  const double dt = c.dt > 0.0 ? c.dt : default_time_step(s);

  std::vector<double> snaps = c.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  json snap_doc = json::array();
  std::vector<DiagnosticsRecord> records;
  for (std::size_t i = 0; i <= snaps.size(); ++i) {
    const double target = i < snaps.size() ? std::min(snaps[i], c.t_final) : c.t_final;
    if (target < s.t) continue;
    Monitors m;
    m.kappas = c.kappa;
    m.sample_interval = c.sample_interval;
    auto res = integrate(s, target, dt, table, m);
    if (!records.empty()) res.records.erase(res.records.begin());
    records.insert(records.end(), res.records.begin(), res.records.end());
    s = res.state;
    if (i < snaps.size())
      snap_doc.push_back({{"t", s.t}, {"u", snapshot(s.u)}, {"v", snapshot(s.v)}});
  }

  auto f = art.csv("diagnostics.csv", "t,M_u,M_v,H,P_minus,Q_minus,Xk_u,Xk_v,tail_u,tail_v");
  auto join = [](const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + num(xs[i]);
    return out;
  };
  for (const auto& r : records)
    f << num(r.t) << ',' << num(r.mass_u) << ',' << num(r.mass_v) << ',' << num(r.hamiltonian)
      << ',' << num(r.p_minus) << ',' << num(std::abs(r.q_minus)) << ',' << join(r.xk_u) << ','
      << join(r.xk_v) << ',' << num(r.tail_u) << ',' << num(r.tail_v) << '\n';
  art.close_csv(f);

  const auto& a = records.front();
  const auto& b = records.back();
  std::vector<Row> rows = {
      at_most("mass_u.drift", relative(b.mass_u, a.mass_u), 1e-8),
      at_most("mass_v.drift", relative(b.mass_v, a.mass_v), 1e-8),
      at_most("hamiltonian.drift", relative(b.hamiltonian, a.hamiltonian), 1e-8),
      at_most("tail.final", std::max(b.tail_u, b.tail_v), kDefaultTailTolerance)};
  const bool ok = print_table(os, rows);
  json growth = json::array();
  if (records.size() >= 3)
    for (std::size_t k = 0; k < c.kappa.size(); ++k)
      growth.push_back({{"kappa", c.kappa[k]}, {"slope", growth_monitor(records, k)}});
  art.write_json("simulate_summary.json",
                 {{"dt", dt},
                  {"records", records.size()},
                  {"q_minus_final", {b.q_minus.real(), b.q_minus.imag()}},
                  {"growth", growth},
                  {"rows", rows_json(rows)},
                  {"pass", ok}});
  if (!snap_doc.empty()) art.write_json("snapshots.json", {{"snapshots", snap_doc}});
  return ok ? kPass : kFail;
}

void write_residual_csv(const Artifacts& art, const std::string& name, const MultiSolitonRun& run) {
  auto f = art.csv(name, "t,eta" + [&] {
    std::string h;
    for (double k : run.kappas) h += ",eta_kappa_" + num(k);
    return h;
  }());
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    f << num(run.times[i]) << ',' << num(run.eta[i]);
    for (const auto& series : run.eta_weighted) f << ',' << num(series[i]);
    f << '\n';
  }
  art.close_csv(f);
}

json decay_json(const DecayFit& d) {
  return {{"slope", d.slope}, {"intercept", d.intercept}, {"r2", d.r2},       {"c_fit", d.c_fit},
          {"window", {d.window_lo, d.window_hi}},        {"points", d.points}};
}

int cmd_multisoliton(const ExperimentConfig& c, const Artifacts& art, std::ostream& os) {
  const SolitonEnsemble ens(c.waves, c.mode);
  const TrilinearKernelTable table(c.N);
  MultiSolitonOptions opt;
  opt.samples = c.samples;
  opt.kappas = c.kappa;
  opt.dt = c.dt;
  const MultiSolitonRun run = build_multisoliton(ens, c.M, c.N, table, opt);
  write_residual_csv(art, "residual.csv", run);

  const AsymptoticInvariants inv = asymptotic_invariants(ens);
  const double q_scale = std::max(std::abs(inv.q_minus), 0.5 * std::sqrt(3.0) * inv.mass);
  std::vector<Row> rows = {
      at_most("mass_u.vs_sum", relative(run.conserved.mass_u, inv.mass), 1e-4),
      at_most("mass_v.vs_sum", relative(run.conserved.mass_v, inv.mass), 1e-4),
      at_most("q_minus.vs_sum", std::abs(run.conserved.q_minus - inv.q_minus) / q_scale, 1e-3)};
  json summary = {{"alpha_sharp", run.alpha_sharp},
                  {"dt", run.dt},
                  {"conserved",
                   {{"mass_u", run.conserved.mass_u},
                    {"mass_v", run.conserved.mass_v},
                    {"hamiltonian", run.conserved.hamiltonian},
                    {"p_minus", run.conserved.p_minus},
                    {"q_minus", {run.conserved.q_minus.real(), run.conserved.q_minus.imag()}}}},
                  {"predicted",
                   {{"mass", inv.mass},
                    {"p_minus", inv.p_minus},
                    {"q_minus", {inv.q_minus.real(), inv.q_minus.imag()}},
                    {"hamiltonian_quartic", inv.hamiltonian_quartic},
                    {"hamiltonian_as_printed", inv.hamiltonian_quadratic}}},
                  {"thresholds", {{"c_fit_min", 0.15}, {"c_fit_max", 0.5}, {"weighted_c_fit_min", 0.1}}}};

  if (run.alpha_sharp > 0.0) {
    const DecayFit fit = fit_residual_decay(run);
    summary["fit"] = decay_json(fit);
    rows.push_back(at_least("c_fit.min", fit.c_fit, 0.15));
    rows.push_back(at_most("c_fit.max", fit.c_fit, 0.5));
    json weighted = json::array();
    for (std::size_t k = 0; k < run.kappas.size(); ++k) {
      const DecayFit w = fit_residual_decay(run, k);
      weighted.push_back({{"kappa", run.kappas[k]}, {"fit", decay_json(w)}});
      rows.push_back(at_least("c_fit.kappa_" + num(run.kappas[k]), w.c_fit, 0.1));
    }
    summary["weighted_fits"] = weighted;

    if (c.doubling) {
      // Same ensemble with every speed doubled, compared at equal α_♯·M.
      auto specs = ens.specs();
      for (auto& w : specs) w.K *= std::sqrt(2.0);
      const SolitonEnsemble doubled(std::move(specs), c.mode);
      MultiSolitonOptions o2 = opt;
      o2.kappas.clear();
      o2.dt = c.dt > 0.0 ? c.dt / 2.0 : 0.0;
      const MultiSolitonRun run2 = build_multisoliton(doubled, c.M / 2.0, c.N, table, o2);
      write_residual_csv(art, "residual_doubled.csv", run2);
      const DecayFit fit2 = fit_residual_decay(run2);
      const double ratio = fit2.slope / fit.slope;
      summary["doubled"] = {{"alpha_sharp", run2.alpha_sharp}, {"M", run2.M}, {"fit", decay_json(fit2)},
                            {"slope_ratio", ratio}};
      rows.push_back({"slope_ratio.doubled", ratio, 4.0, std::abs(ratio - 4.0) <= 1.2});
    }
  } else {
    const double worst = *std::max_element(run.eta.begin(), run.eta.end());
    rows.push_back(at_most("eta.single_wave", worst, 1e-6));
  }
  const bool ok = print_table(os, rows);
  summary["rows"] = rows_json(rows);
  summary["pass"] = ok;
  art.write_json("multisoliton_summary.json", summary);
  return ok ? kPass : kFail;
}

int cmd_cauchy(const ExperimentConfig& c, const Artifacts& art, std::ostream& os) {
  const SolitonEnsemble ens(c.waves, c.mode);
  const TrilinearKernelTable table(c.N);
  const std::vector<double> Ms = c.M_list.empty() ? std::vector<double>{2.0, 2.5, 3.0} : c.M_list;
  const CauchyReport rep = cauchy_in_M(ens, Ms, c.N, table, c.dt);
  auto f = art.csv("cauchy.csv", "M,gap");
  for (std::size_t i = 0; i < rep.gaps.size(); ++i) f << num(rep.M[i]) << ',' << num(rep.gaps[i]) << '\n';
  art.close_csv(f);

  std::vector<Row> rows;
  if (rep.alpha_sharp > 0.0) {
    const double limit = -0.15 * rep.alpha_sharp * rep.alpha_sharp;
    rows.push_back({"gaps.strictly_decreasing", rep.strictly_decreasing ? 1.0 : 0.0, 1.0,
                    rep.strictly_decreasing});
    rows.push_back({"gap_slope_vs_M2", rep.fit_valid ? rep.fit.slope : 0.0, limit,
                    rep.fit_valid && rep.fit.slope <= limit});
  } else {
    rows.push_back(at_most("gaps.single_wave", *std::max_element(rep.gaps.begin(), rep.gaps.end()), 1e-8));
  }
  const bool ok = print_table(os, rows);
  art.write_json("cauchy_summary.json", {{"M", rep.M},
                                         {"gaps", rep.gaps},
                                         {"alpha_sharp", rep.alpha_sharp},
                                         {"fit_valid", rep.fit_valid},
                                         {"slope", rep.fit.slope},
                                         {"r2", rep.fit.r2},
                                         {"rows", rows_json(rows)},
                                         {"pass", ok}});
  return ok ? kPass : kFail;
}

int cmd_superposition(const ExperimentConfig& c, const Artifacts& art, std::ostream& os) {
  const SolitonEnsemble ens(c.waves, c.mode);
  const TrilinearKernelTable table(c.N);
  const std::vector<double> ds = c.separations.empty() ? std::vector<double>{2.0, 3.0, 4.0} : c.separations;
  const std::size_t samples = std::max<std::size_t>(2, std::min<std::size_t>(c.samples, 20));
  const SeparationSweep sw = superposition_sweep(ens, ds, c.t_final, c.N, table, c.dt, samples);
  auto f = art.csv("superposition.csv", "d,t,eta");
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = 0; j < sw.runs[i].times.size(); ++j)
      f << num(ds[i]) << ',' << num(sw.runs[i].times[j]) << ',' << num(sw.runs[i].eta[j]) << '\n';
  art.close_csv(f);

  const double scale = static_cast<double>(ens.size() * ens.size()) * ens.specs().front().K * ens.specs().front().K;
  double growth = 0.0, exponent = -INFINITY, bound = INFINITY;
  for (const auto& r : sw.runs) {
    growth = std::max(growth, r.growth_c);
    if (r.growth_exponent - r.growth_c * scale > exponent - bound) {
      exponent = r.growth_exponent;
      bound = r.growth_c * scale;
    }
  }
  std::vector<Row> rows = {
      {"eta.decreasing_in_d", sw.decreasing ? 1.0 : 0.0, 1.0, sw.decreasing},
      {"slope_vs_d2", sw.fit.slope, -0.15, sw.fit.slope >= -0.45 && sw.fit.slope <= -0.15},
      {"growth_exponent", exponent, bound, exponent <= bound}};
  const bool ok = print_table(os, rows);
  art.write_json("superposition_summary.json", {{"separations", ds},
                                                {"eta_final", sw.eta_final},
                                                {"slope", sw.fit.slope},
                                                {"r2", sw.fit.r2},
                                                {"growth_c", growth},
                                                {"growth_exponent", exponent},
                                                {"rows", rows_json(rows)},
                                                {"pass", ok}});
  return ok ? kPass : kFail;
}

int cmd_lift(const ExperimentConfig& c, const Artifacts& art, std::ostream& os) {
  const SolitonEnsemble ens(c.waves, c.mode);
  const TrilinearKernelTable table(c.N);
  MultiSolitonOptions opt;
  opt.samples = c.samples;
  opt.dt = c.dt;
  const MultiSolitonRun run = build_multisoliton(ens, c.M, c.N, table, opt);
  const std::vector<double> ts = c.t_list.empty() ? std::vector<double>{4, 6, 8, 12, 16} : c.t_list;
  const LiftReport rep = harmonic_lift(run, ts, table);
  auto f = art.csv("lift.csv", "t,V_sup,psi_norm,psi_weighted,residual");
  for (const auto& s : rep.samples)
    f << num(s.t) << ',' << num(s.v_sup) << ',' << num(s.psi_norm) << ',' << num(s.psi_weighted)
      << ',' << num(s.residual) << '\n';
  art.close_csv(f);

  double spread = 0.0;
  for (const auto& s : rep.samples) spread = std::max(spread, std::abs(s.psi_norm - rep.samples[0].psi_norm));
  std::vector<Row> rows = {
      {"V_sup.decreasing", rep.v_sup_decreasing ? 1.0 : 0.0, 1.0, rep.v_sup_decreasing},
      {"weighted_norm.slope_positive", rep.weighted_vs_log.slope, 0.0, rep.weighted_vs_log.slope > 0.0},
      at_least("weighted_norm.r2", rep.weighted_vs_log.r2, 0.9),
      at_most("psi_norm.spread", spread, 1e-6)};
  const bool ok = print_table(os, rows);
  art.write_json("lift_summary.json", {{"t_list", ts},
                                       {"slope", rep.weighted_vs_log.slope},
                                       {"r2", rep.weighted_vs_log.r2},
                                       {"residual_log_slope", rep.residual_trend.slope},
                                       {"rows", rows_json(rows)},
                                       {"pass", ok}});
  return ok ? kPass : kFail;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [k, _] : doc.items())
    if (!kKeys.count(k)) throw ConfigError("config: unknown key '" + k + "'");

  ExperimentConfig c;
  if (doc.contains("command")) {
    if (!doc["command"].is_string()) throw ConfigError("config: 'command' must be a string");
    c.command = doc["command"].get<std::string>();
  }
  if (!kCommands.count(c.command)) throw ConfigError("config: unknown command '" + c.command + "'");

  const double n = positive(doc, "N", 64.0);
  if (n != std::floor(n) || n < 2 || n > 512) throw ConfigError("config: 'N' must be an integer in [2, 512]");
  c.N = static_cast<std::size_t>(n);
  c.dt = get_number(doc, "dt", 0.0);
  if (c.dt < 0.0) throw ConfigError("config: 'dt' must be >= 0");
  c.t_final = positive(doc, "t_final", c.command == "superposition" ? 0.2 : 1.0);
  c.M = positive(doc, "M", 3.0);
  c.M_list = get_list(doc, "M_list");
  c.kappa = get_list(doc, "kappa");
  c.separations = get_list(doc, "separations");
  c.t_list = get_list(doc, "t_list");
  c.snapshot_times = get_list(doc, "snapshot_times");
  for (double k : c.kappa)
    if (!(k >= 0.0)) throw ConfigError("config: 'kappa' entries must be >= 0");
  c.sample_interval = positive(doc, "sample_interval", 0.1);
  const double samples = positive(doc, "samples", 60.0);
  if (samples != std::floor(samples) || samples < 2) throw ConfigError("config: 'samples' must be an integer >= 2");
  c.samples = static_cast<std::size_t>(samples);
  if (doc.contains("doubling")) {
    if (!doc["doubling"].is_boolean()) throw ConfigError("config: 'doubling' must be a boolean");
    c.doubling = doc["doubling"].get<bool>();
  }
  if (doc.contains("sigma")) {
    const double s = get_number(doc, "sigma", -1.0);
    if (s != 1.0 && s != -1.0) throw ConfigError("config: 'sigma' must be +1 or -1");
    c.sigma = static_cast<int>(s);
  }
  if (c.command != "simulate" && c.command != "verify" && c.sigma != -1)
    throw ConfigError("config: soliton experiments need sigma = -1");
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw ConfigError("config: 'out' must be a string");
    c.out = doc["out"].get<std::string>();
  }
  if (doc.contains("seed")) {
    const json& sd = doc["seed"];
    if (!sd.is_number_integer() || (!sd.is_number_unsigned() && sd.get<std::int64_t>() < 0)) throw ConfigError("config: 'seed' must be a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("ensemble")) {
    const json& e = doc["ensemble"];
    if (!e.is_object()) throw ConfigError("config: 'ensemble' must be an object");
    if (e.contains("mode")) {
      const std::string m = e["mode"].is_string() ? e["mode"].get<std::string>() : "";
      if (m == "distinct_speeds") c.mode = EnsembleMode::DistinctSpeeds;
      else if (m == "common_speed") c.mode = EnsembleMode::CommonSpeed;
      else throw ConfigError("config: ensemble mode must be 'distinct_speeds' or 'common_speed'");
    } else {
      c.mode = c.command == "superposition" ? EnsembleMode::CommonSpeed : EnsembleMode::DistinctSpeeds;
    }
    if (!e.contains("waves") || !e["waves"].is_array() || e["waves"].empty())
      throw ConfigError("config: ensemble needs a non-empty 'waves' array");
    for (const auto& w : e["waves"]) c.waves.push_back(parse_wave(w));
  } else {
    default_ensemble(c);
  }
  if (c.command == "superposition" && c.mode != EnsembleMode::CommonSpeed)
    throw ConfigError("config: superposition needs a common_speed ensemble");
  if ((c.command == "multisoliton" || c.command == "cauchy" || c.command == "lift") &&
      c.mode != EnsembleMode::DistinctSpeeds)
    throw ConfigError("config: " + c.command + " needs a distinct_speeds ensemble");
  try {
    SolitonEnsemble check(c.waves, c.mode);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  c.raw = doc;
  c.raw.erase("out");
  c.raw["seed"] = c.seed;
  return c;
}

std::string config_hash(const json& doc) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run(const ExperimentConfig& config, std::ostream& table) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) {
    std::cerr << "cannot create output directory " << config.out << ": " << ec.message() << '\n';
    return kConfigError;
  }
  const Artifacts art{config, config_hash(config.raw)};
  table << "lll_lab " << config.command << "  config " << art.hash << '\n';
  try {
    if (config.command == "verify") return cmd_verify(config, art, table);
    if (config.command == "simulate") return cmd_simulate(config, art, table);
    if (config.command == "multisoliton") return cmd_multisoliton(config, art, table);
    if (config.command == "cauchy") return cmd_cauchy(config, art, table);
    if (config.command == "superposition") return cmd_superposition(config, art, table);
    if (config.command == "lift") return cmd_lift(config, art, table);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return kFail;
  }
  std::cerr << "unknown command " << config.command << '\n';
  return kConfigError;
}

}  // namespace lll::app
