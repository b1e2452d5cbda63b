// Acceptance run: one PASS/FAIL line per criterion. `acceptance --only N` runs a single criterion.
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fw/caustics.hpp"
#include "fw/gallery.hpp"
#include "fw/green.hpp"
#include "fw/harness.hpp"
#include "fw/oscint.hpp"
#include "fw/parametrix.hpp"
#include "fw/specfun.hpp"

using namespace fw;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double ldexp2(int e) { return std::ldexp(1.0, e); }

// ---------------------------------------------------------------- 1
Outcome special_functions() {
  Outcome o;
  // ODE residual on a real and a complex grid, Ai'' from a centered stencil on Ai'.
  double ode = 0.0;
  const double d = 1e-4;
  auto residual = [&](cplx z) {
    cplx app = (airy_ai_prime(z + d) - airy_ai_prime(z - d)) / (2 * d);
    cplx ai = airy_ai(z);
    return std::abs(app - z * ai) / (std::abs(z * ai) + std::abs(airy_ai_prime(z)) + 1e-300);
  };
  for (double x = -30.0; x <= 10.0; x += 0.01) ode = std::max(ode, residual(cplx(x, 0.0)));
  for (int i = 0; i < 72; ++i)
    for (double r = 0.25; r <= 20.0; r += 0.25) ode = std::max(ode, residual(std::polar(r, 2 * kPi * i / 72)));
  o.check(ode <= 1e-7, "ODE residual " + fmt("%.2e", ode) + " <= 1e-7");

  AiryZeroTable t = airy_zeros(200);
  double zr = 0.0, zb = 0.0;
  for (int k = 1; k <= 200; ++k) {
    zr = std::max(zr, std::abs(airy_ai(-t.omega(k))));
    zb = std::max(zb, std::abs(t.omega(k) + boost::math::airy_ai_zero<double>(k)) / t.omega(k));
  }
  o.check(zr <= 1e-10, "max|Ai(-w_k)| " + fmt("%.2e", zr) + " <= 1e-10");
  o.check(zb <= 1e-12, "zeros vs Boost " + fmt("%.2e", zb) + " <= 1e-12");

  double conn = 0.0;
  for (double re = -12.0; re <= 12.0; re += 0.1)
    for (double im = -6.0; im <= 6.0; im += 0.1) {
      cplx z(re, im);
      cplx p = airy_branch(Branch::Plus, z), m = airy_branch(Branch::Minus, z);
      conn = std::max(conn, std::abs(p + m - airy_ai(-z)) / (std::abs(p) + std::abs(m)));
    }
  o.check(conn <= 1e-9, "connection " + fmt("%.2e", conn) + " <= 1e-9");

  double bim = 0.0;
  for (double u = 1.0; u <= 500.0; u += 0.25) bim = std::max(bim, std::abs(phase_correction_B_complex(u).imag()));
  o.check(bim <= 1e-9, "max|Im B| " + fmt("%.2e", bim) + " <= 1e-9");
  return o;
}

// ---------------------------------------------------------------- 2
Outcome canonical_orders() {
  Outcome o;
  std::vector<double> hs;
  for (int e = 4; e <= 10; ++e) hs.push_back(ldexp2(-e));
  DecayFit fold = decay_fit(canonical_sup_profile(CausticKind::Fold, hs));
  DecayFit cusp = decay_fit(canonical_sup_profile(CausticKind::Cusp, hs));
  o.check(std::abs(fold.exponent + 1.0 / 6.0) <= 0.03, "fold exponent " + fmt("%.4f", fold.exponent) + " vs -1/6 +- 0.03");
  o.check(std::abs(cusp.exponent + 0.25) <= 0.03, "cusp exponent " + fmt("%.4f", cusp.exponent) + " vs -1/4 +- 0.03");
  return o;
}

// ---------------------------------------------------------------- 3
Outcome phase_integrals() {
  Outcome o;
  std::vector<double> grid{1e2, 3e2, 1e3, 3e3, 1e4, 3e4, 1e5};
  for (int k : {2, 3, 4}) {
    DecayFit f = van_der_corput_check(monomial_phase(k), k, 1.0, grid);
    o.check(std::abs(f.exponent + 1.0 / k) <= 0.03,
            "k=" + std::to_string(k) + " exponent " + fmt("%.4f", f.exponent) + " vs " + fmt("%.4f", -1.0 / k));
  }
  std::vector<double> lg{1e5, 3e5, 1e6, 3e6, 1e7};
  Fold2DResult fold = fold_cusp_2d(fold_phase_2d(), {{0.0, 0.0}}, lg);
  Fold2DResult cusp = fold_cusp_2d(cusp_phase_2d(), {{0.0, 0.0}}, lg);
  o.check(fold.classification == CausticKind::Fold && fold.fit.exponent <= -5.0 / 6.0 + 0.05,
          "2-D fold exponent " + fmt("%.4f", fold.fit.exponent) + " <= " + fmt("%.4f", -5.0 / 6.0 + 0.05));
  o.check(cusp.classification == CausticKind::Cusp && std::abs(cusp.fit.exponent + 0.75) <= 0.04,
          "2-D cusp exponent " + fmt("%.4f", cusp.fit.exponent) + " vs -3/4 +- 0.04");
  return o;
}

// ---------------------------------------------------------------- 4
Outcome gallery_modes() {
  Outcome o;
  double gram = 0.0;
  for (int k = 1; k <= 20; ++k)
    for (int j = k; j <= 20; ++j) gram = std::max(gram, std::abs(mode_overlap(k, j, 1.0) - (k == j ? 1.0 : 0.0)));
  o.check(gram <= 1e-6, "Gram " + fmt("%.2e", gram) + " <= 1e-6");

  // -e'' + (1 + x) eta^2 e = lambda_k e, relative to the size of the terms.
  double res = 0.0;
  for (int k = 1; k <= 20; ++k)
    for (double eta : {1.0, 10.0, 100.0}) {
      GalleryMode m = gallery_mode(k);
      double lam = eigenvalue(k, eta), sc = std::cbrt(eta * eta);
      double xt = lam / (eta * eta) - 1.0;
      double d = 1e-3 / sc;
      for (int i = 1; i <= 50; ++i) {
        double x = (xt + 3.0 / sc) * i / 50.0;
        double e = eigenfunction(m, x, eta);
        double epp = (eigenfunction(m, x + d, eta) - 2 * e + eigenfunction(m, x - d, eta)) / (d * d);
        double r = std::abs(-epp + (1 + x) * eta * eta * e - lam * e);
        res = std::max(res, r / (lam * m.f_k * std::cbrt(eta)));
      }
    }
  o.check(res <= 1e-5, "eigen-residual " + fmt("%.2e", res) + " <= 1e-5");

  std::vector<std::pair<double, double>> pts;
  for (int L : {25, 50, 100, 200, 400}) pts.push_back({double(L), sobolev_sup(L).value});
  DecayFit f = decay_fit(pts);
  o.check(std::abs(f.exponent - 1.0 / 3.0) <= 0.08, "Sobolev exponent " + fmt("%.4f", f.exponent) + " vs 1/3 +- 0.08");
  return o;
}

// ---------------------------------------------------------------- 5
cplx initial_oracle(const ModelParams& p, double x, double y) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double h = p.h;
  cplx s = 0.0;
  for (int k = p.trunc.k_min; k <= p.trunc.k_max; ++k) {
    double w = -boost::math::airy_ai_zero<double>(k);
    double ap = std::abs(boost::math::airy_ai_prime(-w));
    auto e = [&](double xx, double eta) {
      double e13 = std::cbrt(eta / h);
      return e13 / ap * boost::math::airy_ai(e13 * e13 * xx - w);
    };
    auto f = [&](double eta) {
      double tau = eta * std::sqrt(1 + w * std::cbrt(h * h / (eta * eta)));
      return p.window.weight(eta, tau) * e(p.a, eta) * e(x, eta) / (2 * kPi * h);
    };
    double lo = p.window.psi1.lo, hi = p.window.psi1.hi;
    double re = GK::integrate([&](double eta) { return f(eta) * std::cos(y * eta / h); }, lo, hi, 15, 1e-13);
    double im = GK::integrate([&](double eta) { return f(eta) * std::sin(y * eta / h); }, lo, hi, 15, 1e-13);
    s += cplx(re, im);
  }
  return s;
}

Outcome propagator() {
  Outcome o;
  const double h = ldexp2(-7);
  ModelParams p = make_params(h, 0.05);

  double trace = 0.0;
  for (double t : {0.0, 0.25, 0.5})
    for (double y = -0.5; y <= 0.5; y += 0.05) trace = std::max(trace, std::abs(propagate(p, t, 0.0, y).value));
  o.check(trace == 0.0, "Dirichlet trace " + fmt("%.1e", trace) + " == 0");

  double peak = std::abs(initial_oracle(p, p.a, 0.0)), rec = 0.0;
  for (auto [x, y] : std::vector<std::array<double, 2>>{
           {0.05, 0.0}, {0.03, 0.004}, {0.08, -0.05}, {0.15, 0.02}, {0.01, 0.1}, {0.05, -0.2}})
    rec = std::max(rec, std::abs(propagate(p, 0.0, x, y).value - initial_oracle(p, x, y)) / peak);
  o.check(rec <= 1e-6, "t=0 reconstruction " + fmt("%.2e", rec) + " <= 1e-6");

  double exact = std::sqrt(exact_l2_squared(p)), worst = 0.0;
  std::vector<double> xs;
  for (int i = 0; i <= 2 * 154; ++i) xs.push_back(1.2 * i / (2 * 154));
  SliceOptions so;
  so.eta_nodes = 1500;
  for (double t : {0.0, 0.125, 0.25, 0.375, 0.5}) {
    FieldSlice f = field_slice(p, t, xs, YGrid{-0.9, h / 2, static_cast<int>(1.8 / (h / 2)) + 1}, so);
    worst = std::max(worst, std::abs(slice_l2(f) / exact - 1.0));
  }
  o.check(worst <= 0.01, "L2 drift " + fmt("%.2e", worst) + " <= 1e-2");
  return o;
}

// ---------------------------------------------------------------- 6
Outcome parametrix_structure() {
  Outcome o;
  CutoffSuite cut;
  double tel = 0.0;
  for (double hbar : {ldexp2(-6), ldexp2(-8), ldexp2(-10)})
    for (int N : {1, 2, 4, 8, 16}) tel = std::max(tel, reflection_identity_error(hbar, N, cut, 0.0625));
  o.check(tel <= 1e-8, "telescoping " + fmt("%.2e", tel) + " <= 1e-8");

  const double h = ldexp2(-6), a = 0.1;
  ParametrixParams P = make_parametrix_params(h, a);
  P.data = DataModel::BumpSymbol;
  std::vector<double> xs;
  for (int i = 0; i <= 12; ++i) xs.push_back(0.15 * i / 12);
  YGrid ys{-1.6, h / 2, static_cast<int>(2.2 / (h / 2))};
  BoundaryReport br = parametrix_boundary_check(P, {0.0, 0.25, 0.5, 0.75, 1.0}, xs, ys);
  o.check(br.max_full <= h * h, "boundary ratio " + fmt("%.3e", br.max_full) + " <= h^2 = " + fmt("%.3e", h * h));

  double lambda = 1e3;
  ParametrixParams Q = make_parametrix_params(a * std::sqrt(a) / lambda, a);
  Q.data = DataModel::BumpSymbol;
  Q.check_hypothesis = false;
  double s0 = 0.0, s1 = 0.0;
  for (int i = 0; i <= 40; ++i) {
    double X = i / 40.0;
    s0 = std::max(s0, std::abs(wave_wN(Q, 0, 1.0, 0.0, X)));
    for (int N = 1; N <= 3; ++N) s1 = std::max(s1, std::abs(wave_wN(Q, N, 1.0, 0.0, X)));
  }
  o.check(s1 / s0 <= 1e-3, "N>=1 suppression " + fmt("%.2e", s1 / s0) + " <= 1e-3");
  return o;
}

// ---------------------------------------------------------------- 7
Outcome cross_validation() {
  Outcome o;
  const double h = ldexp2(-8);
  for (double a : {0.055, 0.0625}) {
    if (a < std::pow(h, 0.55) || a > std::sqrt(h) * (1 + 1e-12)) throw std::logic_error("a outside the overlap");
    CrossValidation cv = cross_validate(make_parametrix_params(h, a), {0.25, 0.5, 1.0, 1.5}, 20);
    o.check(cv.probes.size() >= 20 && cv.max_rel_error <= 0.10,
            "a=" + fmt("%.4f", a) + " " + std::to_string(cv.probes.size()) + " probes, max rel " +
                fmt("%.4f", cv.max_rel_error) + " <= 0.10");
  }
  return o;
}

// ---------------------------------------------------------------- 8
Outcome dispersion_envelopes() {
  Outcome o;
  for (Regime rg : {Regime::Gallery, Regime::Parametrix}) {
    std::vector<double> cs;
    std::string per;
    for (int e = 6; e <= 8; ++e) {
      double h = ldexp2(-e);
      double a = rg == Regime::Gallery ? std::pow(h, 0.6) : std::pow(h, 0.55);
      ModelParams p = regime_params(rg, h, a);
      std::vector<double> tg;
      for (int i = 0; i < 16; ++i) tg.push_back(4 * h * std::pow(0.5 / (4 * h), i / 15.0));
      SweepOptions so;
      so.regime = rg;
      DecayReport r = sup_sweep(p, tg, so);
      cs.push_back(r.envelope_constant);
      per += (per.empty() ? "" : "/") + fmt("%.4g", r.envelope_constant);
    }
    // A single C per regime: the largest; it dominates every sweep by construction.
    double C = *std::max_element(cs.begin(), cs.end()), c = *std::min_element(cs.begin(), cs.end());
    o.check(C / c <= 3.0, std::string(regime_name(rg)) + " C=" + fmt("%.4g", C) + " (" + per + "), spread x" +
                              fmt("%.3f", C / c) + " <= 3");
  }
  return o;
}

// ---------------------------------------------------------------- 9
Outcome optimal_loss() {
  Outcome o;
  const double h = ldexp2(-8), a = 0.04;
  ModelParams p = regime_params(Regime::Gallery, h, a);
  std::vector<PeakRecord> found;
  for (int n : {1, 2, 3}) {
    try {
      auto pk = peak_scan(p, {n});
      found.push_back(pk.front());
      const PeakRecord& r = pk.front();
      o.check(std::abs(r.t_peak / r.t_pred - 1.0) <= 0.10,
              "n=" + std::to_string(n) + " t_peak/t_n " + fmt("%.3f", r.t_peak / r.t_pred));
      o.check(r.peak_value >= 0.2 * r.lower_bound_value,
              "n=" + std::to_string(n) + " value/bound " + fmt("%.3f", r.peak_value / r.lower_bound_value) + " >= 0.2");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PeakNotFound) throw;
      o.check(false, "n=" + std::to_string(n) + " no local maximum near t_n");
    }
  }
  // n^{-1/4} scaling relative to the first peak found.
  for (std::size_t i = 1; i < found.size(); ++i) {
    double pred = std::pow(double(found[i].n) / found[0].n, -0.25);
    double got = found[i].peak_value / found[0].peak_value;
    o.check(std::abs(got / pred - 1.0) <= 0.30, "ratio n=" + std::to_string(found[i].n) + "/" +
                                                    std::to_string(found[0].n) + " " + fmt("%.3f", got / pred) +
                                                    " of n^-1/4");
  }
  return o;
}

// ---------------------------------------------------------------- 10
Outcome geometry() {
  Outcome o;
  const double h = ldexp2(-8);
  CausticOptions opt;
  for (double a : {0.01, 0.04, 0.09}) {
    double step = a * 2.0 * std::sqrt(opt.cut.eps0 / a) / (opt.mu_nodes - 1);
    for (int N : {0, 1, 2}) {
      auto w = reflection_window(a, N);
      auto ev = detect_caustics(a, h, N, w[0], w[1], opt);
      int sw = 0;
      double dx = 0.0;
      for (const auto& e : ev)
        if (e.kind == CausticKind::Swallowtail) {
          ++sw;
          dx = std::max(dx, std::abs(e.x - a));
        }
      int want = N == 0 ? 0 : 1;
      o.check(sw == want && dx <= step, "a=" + fmt("%.2f", a) + " N=" + std::to_string(N) + ": " +
                                            std::to_string(sw) + " swallowtail(s), |x-a|/step " +
                                            fmt("%.2g", dx / step));
    }
  }
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double a = 0.05;
  CutoffSuite cut;
  double Tmax = 4.0 * cut.C0 * std::sqrt(1 + a) / std::sqrt(a);
  int worst = 0;
  for (int i = 0; i < 1000; ++i) {
    double X = 2.0 * U(rng), Y = -20.0 + 40.0 * U(rng), T = 0.1 + (Tmax - 0.1) * U(rng);
    worst = std::max(worst, overlap_count(X, Y, T, a, h, cut).count());
  }
  o.check(worst <= 8, "max overlap count " + std::to_string(worst) + " <= 8 over 1000 probes");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);

  std::vector<Criterion> all{{1, "special functions", 60, special_functions},
                             {2, "canonical caustic orders", 300, canonical_orders},
                             {3, "phase-integral decay", 600, phase_integrals},
                             {4, "gallery modes", 300, gallery_modes},
                             {5, "propagator sanity", 600, propagator},
                             {6, "parametrix structure", 900, parametrix_structure},
                             {7, "regime cross-validation", 1200, cross_validation},
                             {8, "dispersion envelopes", 1800, dispersion_envelopes},
                             {9, "optimal loss peaks", 1200, optimal_loss},
                             {10, "geometry", 600, geometry}};
  bool ok = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("error: ") + e.what();
    }
    double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = out.pass && el <= c.limit_s;
    ok = ok && pass;
    std::printf("criterion %2d %s  %s: %s; %.1f s of %.0f s\n", c.id, pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str(), el, c.limit_s);
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
