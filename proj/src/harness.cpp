#include "fw/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fw {

const char* regime_name(Regime r) { return r == Regime::Gallery ? "gallery" : "parametrix"; }
const char* evaluator_name(Evaluator e) { return e == Evaluator::Spectral ? "spectral" : "parametrix"; }

double gallery_bound(double h, double t) { return (std::pow(h, 0.25) + std::cbrt(h / t)) / (h * h); }

double parametrix_bound(double h, double a, double t) {
  // T = t / sqrt(a), so h / (a^{1/2} T) = h / t.
  double s = 2.0 * kPi * h;
  return (std::sqrt(h / t) + std::pow(a, 0.125) * std::pow(h, 0.25)) / (s * s);
}

void check_regime(Regime r, double h, double a, double alpha) {
  if (!(h > 0.0 && h <= 1.0 && a > 0.0)) throw Error(ErrorKind::PreconditionViolated, "need h in (0,1] and a > 0");
  if (r == Regime::Gallery && a > std::sqrt(h) * (1.0 + 1e-12))
    throw Error(ErrorKind::RegimeViolation, "gallery regime needs a <= h^{1/2}");
  if (r == Regime::Parametrix && a < std::pow(h, alpha) * (1.0 - 1e-12))
    throw Error(ErrorKind::RegimeViolation, "parametrix regime needs a >= h^alpha");
}

ModelParams regime_params(Regime r, double h, double a) {
  if (r == Regime::Gallery) return make_params(h, a);
  ParametrixParams pp = make_parametrix_params(h, a);
  pp.check_hypothesis = false;
  return matched_spectral_params(pp);
}

YGrid front_window(double h, double a, double t, int sign, const SweepOptions& opt) {
  (void)a;
  double m = opt.y_margin_over_h * h;
  double lo = 0.7 * t - m, hi = 1.25 * t + m;
  YGrid g;
  g.dy = opt.dy_over_h * h;
  g.ny = static_cast<int>(std::ceil((hi - lo) / g.dy)) + 1;
  g.y0 = sign > 0 ? lo : -lo - g.dy * (g.ny - 1);
  return g;
}

namespace {

int default_eta_nodes(const ModelParams& p, int requested) {
  if (requested > 0) return requested;
  const Plateau& w = p.window.psi1;
  return static_cast<int>(std::ceil(3.0 * (w.hi - w.lo) / p.h)) + 64;
}

std::vector<double> x_rows(double a, double dx) {
  int n = std::max(2, static_cast<int>(std::ceil(a / dx)) + 1);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = a * i / (n - 1);
  return xs;
}

}  // namespace

double window_normalization(const ModelParams& p) {
  SliceOptions so;
  so.eta_nodes = default_eta_nodes(p, 0);
  FieldSlice s = field_slice(p, 0.0, {p.a}, YGrid{-4.0 * p.h, p.h / 16.0, 129}, so);
  return s.max_abs() * p.h * p.h;
}

double sup_at(const ModelParams& p, double t, const SweepOptions& opt) {
  std::vector<double> xs = x_rows(p.a, opt.dx_over_h * p.h);
  YGrid ys = front_window(p.h, p.a, t, p.propagator_sign, opt);
  if (opt.evaluator == Evaluator::Spectral) {
    SliceOptions so;
    so.eta_nodes = default_eta_nodes(p, opt.eta_nodes);
    so.threads = opt.threads;
    return field_slice(p, t, xs, ys, so).max_abs();
  }
  ParametrixParams pp = make_parametrix_params(p.h, p.a);
  pp.check_hypothesis = false;
  pp.threads = opt.threads;
  if (p.propagator_sign > 0) throw Error(ErrorKind::PreconditionViolated, "parametrix evaluator uses sign -1");
  return parametrix_slice(pp, t, xs, ys, pp.n_min, reflection_budget(pp)).max_abs();
}

EnvelopeFit fit_power(const std::string& name, const std::vector<double>& t, const std::vector<double>& y, double t_min) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || !(y[i] > 0.0)) continue;
    double lx = std::log(t[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw Error(ErrorKind::DegenerateInput, "fit needs two points");
  EnvelopeFit f;
  f.name = name;
  double den = n * sxx - sx * sx;
  f.exponent = den > 0 ? (n * sxy - sx * sy) / den : 0.0;
  double lc = (sy - f.exponent * sx) / n;
  f.constant = std::exp(lc);
  double ss = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || !(y[i] > 0.0)) continue;
    double r = std::log(y[i]) - lc - f.exponent * std::log(t[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

DecayReport sup_sweep(const ModelParams& p, const std::vector<double>& t_grid, const SweepOptions& opt) {
  validate(p);
  check_regime(opt.regime, p.h, p.a, opt.alpha);
  if (t_grid.empty()) throw Error(ErrorKind::DegenerateInput, "empty t grid");
  DecayReport r;
  r.regime = opt.regime;
  r.evaluator = opt.evaluator;
  r.h = p.h;
  r.a = p.a;
  r.d = p.d;
  r.t_grid = t_grid;
  r.normalization = window_normalization(p);
  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error(ErrorKind::PreconditionViolated, "sweep times must be positive");
    r.sup_values.push_back(sup_at(p, t, opt));
    r.bound_values.push_back(opt.regime == Regime::Gallery ? gallery_bound(p.h, t) : parametrix_bound(p.h, p.a, t));
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    r.envelope_constant = std::max(r.envelope_constant, r.sup_values[i] / r.bound_values[i]);
  r.fits.push_back(fit_power("sup", t_grid, r.sup_values, opt.fit_t_min_over_h * p.h));
  EnvelopeFit env;
  env.name = opt.regime == Regime::Gallery ? "gallery_envelope" : "parametrix_envelope";
  env.constant = r.envelope_constant;
  double ss = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    double q = std::log(r.sup_values[i] / (r.envelope_constant * r.bound_values[i]));
    ss += q * q;
  }
  env.residual = std::sqrt(ss / t_grid.size());
  r.fits.push_back(env);
  return r;
}

double window_constant(const DecayReport& r, double t_lo, double t_hi) {
  double c = 0.0;
  for (std::size_t i = 0; i < r.t_grid.size(); ++i)
    if (r.t_grid[i] >= t_lo && r.t_grid[i] <= t_hi) c = std::max(c, r.sup_values[i] / r.bound_values[i]);
  return c;
}

std::vector<PeakRecord> peak_scan(const ModelParams& p, const std::vector<int>& n_range, const PeakOptions& opt) {
  validate(p);
  if (opt.t_steps < 3) throw Error(ErrorKind::PreconditionViolated, "peak scan needs at least 3 steps");
  const double h = p.h, a = p.a, rho = 1.0 + a;
  double norm = window_normalization(p);
  SliceOptions so;
  so.eta_nodes = default_eta_nodes(p, opt.eta_nodes);
  so.threads = opt.threads;
  CausticOptions co;
  std::vector<PeakRecord> out;
  for (int n : n_range) {
    if (n < 1) throw Error(ErrorKind::PreconditionViolated, "n must be >= 1");
    PeakRecord rec;
    rec.n = n;
    rec.t_pred = 4.0 * n * std::sqrt(a * rho);
    rec.in_theorem_range = n <= std::min(1.0 / std::sqrt(a), std::sqrt(a) / std::cbrt(h));
    rec.lower_bound_value = std::pow(a, 0.25) / (h * h) * std::pow(h / rec.t_pred, 0.25);
    int half = static_cast<int>(std::ceil(opt.y_half_width_over_h / opt.dy_over_h));
    for (int k = 0; k < opt.t_steps; ++k) {
      double t = rec.t_pred * (1.0 + opt.rel_window * (2.0 * k / (opt.t_steps - 1) - 1.0));
      double yf = slice_point(a, h, n, t, 0.0, co)[1];
      if (p.propagator_sign > 0) yf = -yf;
      YGrid ys{yf - half * opt.dy_over_h * h, opt.dy_over_h * h, 2 * half + 1};
      rec.t_scan.push_back(t);
      rec.value_scan.push_back(field_slice(p, t, {a}, ys, so).max_abs());
    }
    const auto& v = rec.value_scan;
    int best = -1;
    for (int k = 1; k + 1 < opt.t_steps; ++k) {
      if (v[k] >= v[k - 1] && v[k] >= v[k + 1] && (v[k] > v[k - 1] || v[k] > v[k + 1])) {
        if (best < 0 || std::abs(rec.t_scan[k] - rec.t_pred) < std::abs(rec.t_scan[best] - rec.t_pred)) best = k;
      }
    }
    if (best < 0) {
      Error e(ErrorKind::PeakNotFound, "no local maximum within the scan window of t_" + std::to_string(n));
      throw e;
    }
    // Parabolic refinement of the location.
    double y0 = v[best - 1], y1 = v[best], y2 = v[best + 1];
    double dt = rec.t_scan[best + 1] - rec.t_scan[best];
    double den = y0 - 2 * y1 + y2;
    double off = den < 0 ? 0.5 * (y0 - y2) / den : 0.0;
    rec.t_peak = rec.t_scan[best] + std::clamp(off, -0.5, 0.5) * dt;
    rec.raw_value = y1;
    rec.peak_value = y1 / norm;
    out.push_back(std::move(rec));
  }
  return out;
}

double predicted_exponent(int d) { return -(0.5 * (d - 2) + 0.25); }

DecayReport dimension_report(const DecayReport& report2d, int d, double y_norm, double c0) {
  if (d < 2) throw Error(ErrorKind::PreconditionViolated, "d must be >= 2");
  if (!(y_norm >= c0)) throw Error(ErrorKind::LocalizationViolated, "|y| < c0 t");
  DecayReport r = report2d;
  r.d = d;
  if (d == 2) return r;
  double e = 0.5 * (d - 2);
  double h = r.h;
  r.envelope_constant = 0.0;
  for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
    double t = r.t_grid[i];
    r.sup_values[i] *= std::pow(h, -(d - 2.0)) * std::pow(h / (y_norm * t), e);
    r.bound_values[i] = std::pow(h, -static_cast<double>(d)) * std::min(1.0, std::pow(h / t, -predicted_exponent(d)));
    r.envelope_constant = std::max(r.envelope_constant, r.sup_values[i] / r.bound_values[i]);
  }
  r.fits.clear();
  r.fits.push_back(fit_power("sup_d" + std::to_string(d), r.t_grid, r.sup_values, 0.0));
  EnvelopeFit pred;
  pred.name = "predicted";
  pred.exponent = predicted_exponent(d);
  pred.constant = r.envelope_constant;
  r.fits.push_back(pred);
  return r;
}

bool strichartz_admissible(double q, double r, int d) {
  if (!(q >= 1.0 && r >= 2.0)) return false;
  return 1.0 / q <= (0.5 * (d - 2) + 0.25) * (0.5 - 1.0 / r) + 1e-14;
}

StrichartzSample strichartz_sample(const ModelParams& p, double q, double r, int d, const std::vector<double>& t_grid,
                                   const SweepOptions& opt) {
  if (!strichartz_admissible(q, r, d)) throw Error(ErrorKind::AdmissibilityViolated, "(q, r) not admissible");
  if (t_grid.size() < 2) throw Error(ErrorKind::DegenerateInput, "need two times");
  const double h = p.h;
  std::vector<double> xs = x_rows(1.2, 0.5 * h);
  SliceOptions so;
  so.eta_nodes = default_eta_nodes(p, opt.eta_nodes);
  so.threads = opt.threads;
  StrichartzSample s;
  for (double t : t_grid) {
    double ylo = -0.5, yhi = std::abs(t) * 1.3 + 0.5;
    YGrid ys{p.propagator_sign > 0 ? ylo : -yhi, 0.5 * h, static_cast<int>((yhi - ylo) / (0.5 * h)) + 1};
    FieldSlice f = field_slice(p, t, xs, ys, so);
    double dx = xs[1] - xs[0], sum = 0.0;
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      for (int iy = 0; iy < ys.ny; ++iy) {
        double v = std::abs(f.at(static_cast<int>(ix), iy));
        if (d > 2) v *= std::pow(h, -(d - 2.0)) * std::pow(h / std::max(std::abs(ys.at(iy)), h), 0.5 * (d - 2));
        double w = (ix == 0 || ix + 1 == xs.size() ? 0.5 : 1.0) * (iy == 0 || iy + 1 == ys.ny ? 0.5 : 1.0);
        sum += w * std::pow(v, r);
      }
    }
    s.lr_norms.push_back(std::pow(sum * dx * ys.dy, 1.0 / r));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    acc += 0.5 * (std::pow(s.lr_norms[i], q) + std::pow(s.lr_norms[i + 1], q)) * (t_grid[i + 1] - t_grid[i]);
  s.value = std::pow(acc, 1.0 / q);
  return s;
}

CrossValidation cross_validate(const ParametrixParams& pp, const std::vector<double>& t_list, int n_probes,
                               int eta_nodes) {
  validate(pp);
  if (t_list.empty() || n_probes < 1) throw Error(ErrorKind::PreconditionViolated, "need times and probes");
  ModelParams m = matched_spectral_params(pp);
  SweepOptions so;
  so.dy_over_h = 0.25;
  std::vector<double> xs;
  for (int i = 1; i <= 6; ++i) xs.push_back(pp.a * i / 6.0);
  int per_t = (n_probes + static_cast<int>(t_list.size()) - 1) / static_cast<int>(t_list.size());
  CrossValidation cv;
  for (double t : t_list) {
    YGrid ys = front_window(pp.h, pp.a, t, -1, so);
    SliceOptions sopt;
    sopt.eta_nodes = default_eta_nodes(m, eta_nodes);
    sopt.threads = pp.threads;
    FieldSlice S = field_slice(m, t, xs, ys, sopt);
    FieldSlice P = parametrix_slice(pp, t, xs, ys, pp.n_min, reflection_budget(pp));
    // Local maxima of |u| along y in each row, largest first.
    struct Cand {
      double v;
      int ix, iy;
    };
    std::vector<Cand> c;
    for (int ix = 0; ix < static_cast<int>(xs.size()); ++ix)
      for (int iy = 1; iy + 1 < ys.ny; ++iy) {
        double v = std::abs(S.at(ix, iy));
        if (v >= std::abs(S.at(ix, iy - 1)) && v > std::abs(S.at(ix, iy + 1))) c.push_back({v, ix, iy});
      }
    std::sort(c.begin(), c.end(), [](const Cand& l, const Cand& r) {
      if (l.v != r.v) return l.v > r.v;
      return l.ix != r.ix ? l.ix < r.ix : l.iy < r.iy;
    });
    int taken = 0;
    for (const Cand& k : c) {
      if (taken == per_t || static_cast<int>(cv.probes.size()) == n_probes) break;
      CrossProbe pr;
      pr.t = t;
      pr.x = xs[k.ix];
      pr.y = ys.at(k.iy);
      pr.spectral = S.at(k.ix, k.iy);
      pr.parametrix = P.at(k.ix, k.iy);
      pr.rel_error = std::abs(pr.spectral - pr.parametrix) / std::abs(pr.spectral);
      cv.max_rel_error = std::max(cv.max_rel_error, pr.rel_error);
      cv.probes.push_back(pr);
      ++taken;
    }
  }
  return cv;
}

}  // namespace fw
