#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fw/caustics.hpp"
#include "fw/config.hpp"
#include "fw/gallery.hpp"
#include "fw/green.hpp"
#include "fw/harness.hpp"
#include "fw/io.hpp"
#include "fw/oscint.hpp"
#include "fw/parametrix.hpp"
#include "fw/specfun.hpp"

using namespace fw;
using nlohmann::json;

namespace {

struct Out {
  const RunConfig& cfg;
  std::string module;
  std::string hash = config_hash(cfg);

  std::string path(const std::string& name) const { return cfg.out_dir() + "/" + name; }
  OutputMeta meta() const { return make_meta(module, hash); }
  void csv(const std::string& name, const std::vector<std::string>& cols,
           const std::vector<std::vector<double>>& rows) const {
    write_csv(path(name), meta(), cols, rows);
  }
  void js(const std::string& name, const json& body) const { write_json(path(name), meta(), body); }
  void echo() const { js(module + ".config.json", config_echo(cfg)); }
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return v;
}

void run_zeros(const RunConfig& cfg) {
  Out o{cfg, "zeros"};
  AiryZeroTable t = airy_zeros(cfg.section("zeros").at("k_max").get<int>());
  std::vector<std::vector<double>> rows;
  for (int k = 1; k <= t.k_max(); ++k)
    rows.push_back({double(k), t.omega(k), t.residuals[k - 1], t.aip[k - 1]});
  o.csv("zeros.csv", {"k", "omega", "residual", "ai_prime"}, rows);
  o.echo();
}

void run_modes(const RunConfig& cfg) {
  Out o{cfg, "modes"};
  const json& s = cfg.section("modes");
  int K = s.at("k_max").get<int>();
  double eta = s.at("eta").get<double>();
  std::vector<std::vector<double>> table, prof;
  std::vector<GalleryMode> modes;
  for (int k = 1; k <= K; ++k) {
    modes.push_back(gallery_mode(k));
    table.push_back({double(k), modes.back().omega_k, modes.back().f_k, eigenvalue(k, eta)});
  }
  for (double x : linspace(0.0, s.at("x_max").get<double>(), s.at("x_steps").get<int>()))
    for (const auto& m : modes) prof.push_back({x, double(m.k), eigenfunction(m, x, eta)});
  o.csv("modes.csv", {"k", "omega", "f_k", "lambda_k"}, table);
  o.csv("mode_profiles.csv", {"x", "k", "e_k"}, prof);
  o.echo();
}

void run_propagate(const RunConfig& cfg) {
  Out o{cfg, "propagate"};
  const json& s = cfg.section("propagate");
  ModelParams p = make_params(cfg.h(), cfg.a(), cfg.tree.at("epsilon").get<double>());
  p.d = cfg.d();
  p.propagator_sign = s.at("sign").get<int>();
  validate(p);
  SliceOptions so;
  so.threads = cfg.threads();
  if (s.at("eta_nodes").get<int>() > 0) so.eta_nodes = s.at("eta_nodes").get<int>();
  std::vector<double> xs = linspace(0.0, s.at("x_max").get<double>(), s.at("x_steps").get<int>());
  int ny = s.at("y_steps").get<int>();
  double y0 = s.at("y_min").get<double>(), y1 = s.at("y_max").get<double>();
  YGrid ys{y0, ny > 1 ? (y1 - y0) / (ny - 1) : 1.0, ny};
  std::vector<std::vector<double>> rows;
  for (double t : s.at("t").get<std::vector<double>>()) {
    FieldSlice f = field_slice(p, t, xs, ys, so);
    for (std::size_t ix = 0; ix < xs.size(); ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        cplx v = f.at(static_cast<int>(ix), iy);
        rows.push_back({t, xs[ix], ys.at(iy), v.real(), v.imag(), std::abs(v)});
      }
  }
  o.csv("propagate.csv", {"t", "x", "y", "re", "im", "abs"}, rows);
  o.js("propagate.manifest.json", {{"h", p.h},
                                   {"a", p.a},
                                   {"d", p.d},
                                   {"k_min", p.trunc.k_min},
                                   {"k_max", p.trunc.k_max},
                                   {"sign", p.propagator_sign},
                                   {"eta_nodes", so.eta_nodes},
                                   {"rows", rows.size()}});
  o.echo();
}

void run_parametrix(const RunConfig& cfg) {
  Out o{cfg, "parametrix"};
  const json& s = cfg.section("parametrix");
  ParametrixParams pp = make_parametrix_params(cfg.h(), cfg.a());
  pp.data = s.at("data") == "bump_symbol" ? DataModel::BumpSymbol : DataModel::ExactAiry;
  pp.n_min = s.at("n_min").get<int>();
  pp.n_max = s.at("n_max").get<int>();
  pp.threads = cfg.threads();
  validate(pp);
  int n_hi = reflection_budget(pp);
  std::vector<double> xs = linspace(0.0, pp.a, s.at("x_steps").get<int>());
  int ny = s.at("y_steps").get<int>();
  double w = s.at("y_half_width").get<double>();
  std::vector<std::vector<double>> rows;
  for (double t : s.at("t").get<std::vector<double>>()) {
    double yc = -t * std::sqrt(1.0 + pp.a);
    YGrid ys{yc - w, ny > 1 ? 2.0 * w / (ny - 1) : 1.0, ny};
    FieldSlice f = parametrix_slice(pp, t, xs, ys, pp.n_min, n_hi);
    for (std::size_t ix = 0; ix < xs.size(); ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        cplx v = f.at(static_cast<int>(ix), iy);
        rows.push_back({t, xs[ix], ys.at(iy), v.real(), v.imag(), std::abs(v)});
      }
  }
  o.csv("parametrix.csv", {"t", "x", "y", "re", "im", "abs"}, rows);
  o.js("parametrix.manifest.json", {{"h", pp.h}, {"a", pp.a}, {"n_min", pp.n_min}, {"n_max", n_hi}});
  o.echo();
}

void run_caustics(const RunConfig& cfg) {
  Out o{cfg, "caustics"};
  const json& s = cfg.section("caustics");
  CausticOptions opt;
  opt.mu_nodes = s.at("mu_nodes").get<int>();
  opt.t_steps = s.at("t_steps").get<int>();
  opt.class_tol = s.at("class_tol").get<double>();
  double a = cfg.a(), h = cfg.h();
  json events = json::array();
  std::vector<std::vector<double>> rows;
  std::vector<double> slice_t = s.at("slice_t").get<std::vector<double>>();
  for (int N : s.at("N").get<std::vector<int>>()) {
    auto win = reflection_window(a, N);
    auto ev = detect_caustics(a, h, N, win[0], win[1], opt);
    for (const auto& e : ev)
      events.push_back({{"kind", caustic_kind_name(e.kind)},
                        {"t", e.t},
                        {"x", e.x},
                        {"y", e.y},
                        {"N", e.N},
                        {"mu", e.mu},
                        {"hessian_rank", e.hessian_rank},
                        {"kernel_cubic", e.kernel_cubic},
                        {"p", e.p},
                        {"q", e.q}});
    std::vector<double> ts = slice_t;
    if (ts.empty()) ts.push_back(ev.empty() ? 0.5 * (win[0] + win[1]) : ev.front().t * 1.02);
    for (double t : ts) {
      WavefrontCurve c = wavefront_slice(a, h, N, t, opt);
      for (std::size_t i = 0; i < c.points.size(); ++i)
        rows.push_back({t, c.points[i][0], c.points[i][1], c.params[i][0], c.params[i][1], double(N)});
    }
  }
  o.csv("wavefront.csv", {"t", "x", "y", "sigma", "mu", "N"}, rows);
  o.js("caustic_events.json", events);
  o.echo();
}

void run_decay(const RunConfig& cfg) {
  Out o{cfg, "decay"};
  const json& s = cfg.section("decay");
  SweepOptions so;
  so.regime = s.at("regime") == "parametrix" ? Regime::Parametrix : Regime::Gallery;
  so.evaluator = s.at("evaluator") == "parametrix" ? Evaluator::Parametrix : Evaluator::Spectral;
  so.alpha = s.at("alpha").get<double>();
  so.threads = cfg.threads();
  double h = cfg.h(), a = cfg.a();
  check_regime(so.regime, h, a, so.alpha);
  ModelParams p = regime_params(so.regime, h, a);
  p.d = 2;
  double t0 = s.at("t_min_over_h").get<double>() * h;
  std::vector<double> tg = logspace(t0, s.at("t_max").get<double>(), s.at("t_steps").get<int>());
  DecayReport r = sup_sweep(p, tg, so);
  json peaks = json::array(), missing = json::array();
  PeakOptions po;
  po.threads = cfg.threads();
  for (int n : s.at("peaks").get<std::vector<int>>()) {
    try {
      for (const auto& pk : peak_scan(p, {n}, po)) {
        peaks.push_back({{"n", pk.n},
                         {"t_peak", pk.t_peak},
                         {"t_pred", pk.t_pred},
                         {"value", pk.peak_value},
                         {"raw_value", pk.raw_value},
                         {"bound", pk.lower_bound_value},
                         {"in_theorem_range", pk.in_theorem_range}});
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PeakNotFound) throw;
      missing.push_back(n);
    }
  }
  const EnvelopeFit& f = r.fits.front();
  json body{{"regime", regime_name(r.regime)},
            {"evaluator", evaluator_name(r.evaluator)},
            {"h", r.h},
            {"a", r.a},
            {"d", r.d},
            {"t", r.t_grid},
            {"sup", r.sup_values},
            {"bound", r.bound_values},
            {"normalization", r.normalization},
            {"envelope_constant", r.envelope_constant},
            {"fit", {{"exponent", f.exponent}, {"constant", f.constant}, {"residual", f.residual}}},
            {"peaks", peaks},
            {"peaks_not_found", missing}};
  json dims = json::array();
  for (int d : s.at("dims").get<std::vector<int>>()) {
    if (d == 2) continue;
    DecayReport rd = dimension_report(r, d, 1.0);
    dims.push_back({{"d", d},
                    {"sup", rd.sup_values},
                    {"fit_exponent", rd.fits[0].exponent},
                    {"predicted_exponent", predicted_exponent(d)}});
  }
  body["dimensions"] = dims;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < tg.size(); ++i)
    rows.push_back({tg[i], r.sup_values[i], r.bound_values[i], r.sup_values[i] / (r.envelope_constant * r.bound_values[i])});
  o.csv("decay.csv", {"t", "sup", "bound", "ratio"}, rows);
  o.js("decay_report.json", body);
  o.echo();
}

void run_oscint_bench(const RunConfig& cfg) {
  Out o{cfg, "oscint-bench"};
  const json& s = cfg.section("oscint_bench");
  std::vector<double> lg =
      logspace(s.at("lambda_min").get<double>(), s.at("lambda_max").get<double>(), s.at("lambda_steps").get<int>());
  std::vector<std::vector<double>> rows;
  json fits = json::array();
  for (int k : s.at("k").get<std::vector<int>>()) {
    DecayFit f = van_der_corput_check(monomial_phase(k), k, 0.1, lg);
    for (std::size_t i = 0; i < f.lambda_grid.size(); ++i) rows.push_back({double(k), f.lambda_grid[i], f.moduli[i]});
    fits.push_back({{"k", k}, {"exponent", f.exponent}, {"predicted", -1.0 / k}, {"residual", f.residual}});
  }
  o.csv("oscint_bench.csv", {"k", "lambda", "modulus"}, rows);
  o.js("oscint_bench.json", fits);
  o.echo();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersion and caustics toolkit for the Friedlander half-plane model"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  app.fallthrough();
  std::string config_path, out_dir;
  double h = 0, a = 0;
  int d = 0, threads = 0;
  long long seed = -1;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "Output directory (overrides FWAVE_OUT_DIR and the config)");
  app.add_option("--h", h, "Semiclassical parameter");
  app.add_option("--a", a, "Source distance to the boundary");
  app.add_option("--d", d, "Dimension");
  app.add_option("--threads", threads, "Worker threads");
  app.add_option("--seed", seed, "Seed for randomized sweeps");

  struct Sub {
    std::string name, help;
    std::function<void(const RunConfig&)> run;
  };
  std::vector<Sub> subs{{"zeros", "Airy zeros with residuals", run_zeros},
                        {"modes", "Gallery mode table and profiles", run_modes},
                        {"propagate", "Spectral propagator on a (t, x, y) grid", run_propagate},
                        {"parametrix", "Reflected-wave parametrix on a grid", run_parametrix},
                        {"caustics", "Wavefront slices and caustic events", run_caustics},
                        {"decay", "Sup-norm sweep, envelope fits and loss peaks", run_decay},
                        {"oscint-bench", "Decay exponents of model oscillatory integrals", run_oscint_bench}};
  std::vector<CLI::App*> cmds;
  for (auto& s : subs) cmds.push_back(app.add_subcommand(s.name, s.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    json patch = json::object();
    RunConfig cfg = load_config(config_path);
    if (h > 0) patch["h"] = h;
    if (a > 0) patch["a"] = a;
    if (d > 0) patch["d"] = d;
    if (threads > 0) patch["threads"] = threads;
    if (seed >= 0) patch["seed"] = seed;
    if (!out_dir.empty()) patch["out"] = out_dir;
    merge_config(cfg.tree, patch);
    validate_config(cfg.tree);
    ensure_dir(cfg.out_dir());
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (cmds[i]->parsed()) subs[i].run(cfg);
  } catch (const Error& e) {
    std::cerr << "fwave: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "fwave: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
