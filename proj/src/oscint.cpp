#include "fw/oscint.hpp"

#include <algorithm>
#include <cmath>

#include "fw/quad.hpp"
#include "fw/specfun.hpp"

namespace fw {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Central difference of order j with O(d^2) error.
template <class F>
double central_diff(const F& f, double x, int j, double d) {
  double s = 0.0;
  for (int k = 0; k <= j; ++k) s += ((k % 2) ? -1.0 : 1.0) * binom(j, k) * f(x + (0.5 * j - k) * d);
  return s / std::pow(d, j);
}

double stencil_step(int j) {
  static const double steps[] = {1e-5, 1e-4, 1e-3, 5e-3, 1e-2, 2e-2, 3e-2};
  return steps[std::clamp(j, 0, 6)];
}

double total_variation(const std::function<double(double)>& f, double lo, double hi, int n = 2000) {
  double var = 0.0, prev = f(lo);
  for (int i = 1; i <= n; ++i) {
    double cur = f(lo + (hi - lo) * i / n);
    var += std::abs(cur - prev);
    prev = cur;
  }
  return var;
}

// Leading Taylor coefficient c_m of phi - phi(x) from the derivative, by a
// discrete Cauchy integral on a small circle.
cplx leading_coeff(const std::function<cplx(cplx)>& dphi, double x, int m) {
  if (m == 1) return dphi(cplx(x, 0.0));
  const int n = 32;
  const double rho = 1e-2;
  cplx s{0.0, 0.0};
  for (int j = 0; j < n; ++j) {
    cplx w = std::polar(1.0, 2 * kPi * (j + 0.5) / n);
    s += dphi(x + rho * w) / std::pow(rho * w, m - 1);
  }
  return s / (static_cast<double>(n) * m);
}

// Integral of g e^{i lambda phi} along the steepest-descent path leaving x,
// parametrised by lambda (phi(h(s)) - phi(x)) = i s^m.
cplx descent_path(const std::function<cplx(cplx)>& phi, const std::function<cplx(cplx)>& dphi,
                  const std::function<cplx(cplx)>& g, double x, int m, bool rightward, double lambda, int panels,
                  int nodes) {
  cplx cm = leading_coeff(dphi, x, m);
  // Pick the m-th root heading right (largest real part) or left.
  cplx base = std::pow(kI / cm, 1.0 / m);
  cplx dir = base;
  for (int k = 1; k < m; ++k) {
    cplx cand = base * std::polar(1.0, 2 * kPi * k / m);
    if (rightward ? cand.real() > dir.real() : cand.real() < dir.real()) dir = cand;
  }
  std::vector<double> gx, gw;
  gauss_legendre(nodes, gx, gw);
  const double smax = std::pow(40.0, 1.0 / m);
  const cplx phi0 = phi(cplx(x, 0.0));
  const cplx lam_scale = std::pow(1.0 / lambda, 1.0 / m);
  CompensatedSum acc;
  cplx hprev = x;
  double sprev = 0.0;
  cplx dhprev = dir * lam_scale;
  bool have_prev = false;
  for (int p = 0; p < panels; ++p) {
    double a = smax * p / panels, b = smax * (p + 1) / panels;
    for (int q = 0; q < nodes; ++q) {
      double s = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
      cplx target = phi0 + kI * std::pow(s, m) / lambda;
      cplx hcur = have_prev ? hprev + dhprev * (s - sprev) : x + dir * lam_scale * s;
      for (int it = 0; it < 40; ++it) {
        cplx f = phi(hcur) - target;
        cplx dh = f / dphi(hcur);
        hcur -= dh;
        if (std::abs(dh) <= 1e-15 * (1.0 + std::abs(hcur))) break;
      }
      cplx dhds = kI * (m * std::pow(s, m - 1)) / (lambda * dphi(hcur));
      acc.add(0.5 * (b - a) * gw[q] * std::exp(-std::pow(s, m)) * g(hcur) * dhds);
      hprev = hcur;
      dhprev = dhds;
      sprev = s;
      have_prev = true;
    }
  }
  return std::exp(kI * lambda * phi0) * acc.value();
}

}  // namespace

double bump(double x, double lo, double hi) {
  double t = (2.0 * x - lo - hi) / (hi - lo);
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

double phase_derivative(const PhaseSpec& spec, double x, int j) {
  if (j == 0) return spec.phase(x);
  if (spec.derivative) return spec.derivative(x, j);
  return central_diff(spec.phase, x, j, stencil_step(j));
}

cplx nsd_integral(const std::function<cplx(cplx)>& phi, const std::function<cplx(cplx)>& dphi,
                  const std::function<cplx(cplx)>& g, double lo, double hi, const std::vector<NsdPoint>& crit,
                  double lambda, int panels, int nodes) {
  // Each segment [p, q] between consecutive special points equals the path
  // integral from p minus the one from q; both end in the same valley.
  std::vector<NsdPoint> pts;
  pts.push_back({lo, 1});
  for (auto c : crit)
    if (c.x > lo && c.x < hi) pts.push_back(c);
  pts.push_back({hi, 1});
  std::sort(pts.begin() + 1, pts.end() - 1, [](const NsdPoint& a, const NsdPoint& b) { return a.x < b.x; });
  const double tiny = 1e-25;
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const NsdPoint& p = pts[i];
    const NsdPoint& q = pts[i + 1];
    bool p_end = (i == 0), q_end = (i + 2 == pts.size());
    if (!(p_end && std::abs(g(cplx(p.x, 0.0))) < tiny))
      total.add(descent_path(phi, dphi, g, p.x, p.m, true, lambda, panels, nodes));
    if (!(q_end && std::abs(g(cplx(q.x, 0.0))) < tiny))
      total.add(-descent_path(phi, dphi, g, q.x, q.m, false, lambda, panels, nodes));
  }
  return total.value();
}

CriticalPointSet find_critical_points(const PhaseSpec& spec, const CriticalOptions& opt) {
  CriticalPointSet out;
  if (spec.dimension == 2) {
    // Grid scan of |grad|^2 local minima, then Newton on the gradient.
    const int n = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(opt.scan_points) * 1000.0)));
    const double lo = spec.support_lo, hi = spec.support_hi, dx = (hi - lo) / n;
    auto g2 = [&](double a, double b) {
      auto g = spec.grad2(a, b);
      return g[0] * g[0] + g[1] * g[1];
    };
    std::vector<double> grid((n + 1) * (n + 1));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) grid[i * (n + 1) + j] = g2(lo + i * dx, lo + j * dx);
    std::vector<std::array<double, 2>> found;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        double v = grid[i * (n + 1) + j];
        bool is_min = true;
        for (int di = -1; di <= 1 && is_min; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            int a = i + di, b = j + dj;
            if ((di || dj) && a >= 0 && a <= n && b >= 0 && b <= n && grid[a * (n + 1) + b] < v) {
              is_min = false;
              break;
            }
          }
        if (!is_min) continue;
        double p0 = lo + i * dx, p1 = lo + j * dx;
        for (int it = 0; it < 100; ++it) {
          auto g = spec.grad2(p0, p1);
          auto H = spec.hess2(p0, p1);
          double det = H[0] * H[2] - H[1] * H[1];
          if (std::sqrt(g[0] * g[0] + g[1] * g[1]) < opt.grad_tol) break;
          double s0, s1;
          if (std::abs(det) > 1e-14) {
            s0 = (H[2] * g[0] - H[1] * g[1]) / det;
            s1 = (-H[1] * g[0] + H[0] * g[1]) / det;
          } else {
            // Degenerate Hessian: fall back to a gradient step on |grad|^2.
            double t0 = H[0] * g[0] + H[1] * g[1], t1 = H[1] * g[0] + H[2] * g[1];
            double nn = t0 * t0 + t1 * t1;
            if (nn == 0) break;
            double step = (g[0] * g[0] + g[1] * g[1]) / nn;
            s0 = step * t0;
            s1 = step * t1;
          }
          p0 -= s0;
          p1 -= s1;
        }
        auto g = spec.grad2(p0, p1);
        if (std::sqrt(g[0] * g[0] + g[1] * g[1]) >= opt.grad_tol) continue;
        if (p0 < lo || p0 > hi || p1 < lo || p1 > hi) continue;
        bool dup = false;
        for (auto& f : found)
          if (std::hypot(f[0] - p0, f[1] - p1) < 1e-6) dup = true;
        if (!dup) found.push_back({p0, p1});
      }
    }
    for (std::size_t i = 0; i < found.size(); ++i)
      for (std::size_t j = i + 1; j < found.size(); ++j)
        if (std::hypot(found[i][0] - found[j][0], found[i][1] - found[j][1]) < dx) out.possibly_incomplete = true;
    for (auto& f : found) {
      CriticalPoint cp;
      cp.location = {f[0], f[1]};
      auto H = spec.hess2(f[0], f[1]);
      double tr = H[0] + H[2], det = H[0] * H[2] - H[1] * H[1];
      double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
      double e1 = tr / 2 + disc, e2 = tr / 2 - disc;
      double scale = std::max({1.0, std::abs(e1), std::abs(e2)});
      cp.hessian_rank = (std::abs(e1) > opt.class_tol * scale) + (std::abs(e2) > opt.class_tol * scale);
      if (cp.hessian_rank == 2) {
        cp.order = 1;
      } else if (cp.hessian_rank == 1) {
        // Reduce to the kernel direction v: g(t) = Phi(c + t v + w(t) u) with w solving d_u Phi = 0.
        double ev = std::abs(e1) > std::abs(e2) ? e1 : e2;
        double u0, u1;
        if (std::abs(H[1]) > 1e-14) {
          u0 = H[1];
          u1 = ev - H[0];
        } else if (std::abs(H[0]) >= std::abs(H[2])) {
          u0 = 1;
          u1 = 0;
        } else {
          u0 = 0;
          u1 = 1;
        }
        double nu = std::hypot(u0, u1);
        u0 /= nu;
        u1 /= nu;
        double v0 = -u1, v1 = u0;
        auto reduced = [&](double t) {
          double w = 0.0;
          for (int it = 0; it < 60; ++it) {
            double p0 = f[0] + t * v0 + w * u0, p1 = f[1] + t * v1 + w * u1;
            auto g = spec.grad2(p0, p1);
            auto Hh = spec.hess2(p0, p1);
            double du = g[0] * u0 + g[1] * u1;
            double duu = Hh[0] * u0 * u0 + 2 * Hh[1] * u0 * u1 + Hh[2] * u1 * u1;
            double st = du / duu;
            w -= st;
            if (std::abs(st) < 1e-15) break;
          }
          return spec.phase2(f[0] + t * v0 + w * u0, f[1] + t * v1 + w * u1);
        };
        double tol = std::max(opt.class_tol, 1e-5) * scale;
        // Richardson-combined stencils remove the O(d^2) truncation term.
        auto rd = [&](int j) {
          double d = 2.0 * stencil_step(j);
          double a = central_diff(reduced, 0.0, j, d), b = central_diff(reduced, 0.0, j, 0.5 * d);
          return (4.0 * b - a) / 3.0;
        };
        if (std::abs(rd(3)) > tol) {
          cp.order = 2;
          cp.classification = CausticKind::Fold;
        } else if (std::abs(rd(4)) > tol) {
          cp.order = 3;
          cp.classification = CausticKind::Cusp;
        } else {
          cp.order = 4;
          cp.classification = CausticKind::Swallowtail;
        }
      } else {
        cp.order = 2;
        cp.classification = CausticKind::Cusp;  // umbilic-type; reported as the worse cusp class
      }
      out.points.push_back(cp);
    }
    return out;
  }

  const int n = opt.scan_points;
  const double lo = spec.support_lo, hi = spec.support_hi, dx = (hi - lo) / n;
  std::vector<double> d1(n + 1);
  for (int i = 0; i <= n; ++i) d1[i] = phase_derivative(spec, lo + i * dx, 1);
  std::vector<double> seeds;
  for (int i = 0; i <= n; ++i) {
    if (d1[i] == 0.0) seeds.push_back(lo + i * dx);
    if (i < n && d1[i] * d1[i + 1] < 0.0) seeds.push_back(lo + (i + 0.5) * dx);
    bool left = i == 0 || std::abs(d1[i]) <= std::abs(d1[i - 1]);
    bool right = i == n || std::abs(d1[i]) <= std::abs(d1[i + 1]);
    if (left && right && i > 0 && i < n) seeds.push_back(lo + i * dx);
  }
  std::vector<double> roots;
  for (double x : seeds) {
    // Damped Newton on Phi', then Newton on Phi'/Phi'' which has simple
    // roots even where Phi' vanishes to higher order.
    for (int it = 0; it < 200; ++it) {
      double f = phase_derivative(spec, x, 1), fp = phase_derivative(spec, x, 2);
      if (std::abs(f) < opt.grad_tol || fp == 0.0) break;
      double step = f / fp;
      double lim = 4 * dx;
      if (std::abs(step) > lim) step = std::copysign(lim, step);
      x -= step;
    }
    for (int it = 0; it < 50; ++it) {
      double f = phase_derivative(spec, x, 1), fp = phase_derivative(spec, x, 2);
      double fpp = phase_derivative(spec, x, 3);
      if (f == 0.0 || fp == 0.0) break;
      double u = f / fp, up = 1.0 - f * fpp / (fp * fp);
      if (up == 0.0) break;
      double xn = x - u / up;
      if (!(std::abs(phase_derivative(spec, xn, 1)) <= std::max(std::abs(f), opt.grad_tol))) break;
      if (std::abs(xn - x) < 1e-15 * (1.0 + std::abs(x))) {
        x = xn;
        break;
      }
      x = xn;
    }
    if (std::abs(phase_derivative(spec, x, 1)) >= opt.grad_tol) continue;
    if (x < lo || x > hi) continue;
    bool dup = false;
    for (double r : roots)
      if (std::abs(r - x) < 1e-7 * (1.0 + std::abs(x))) dup = true;
    if (!dup) roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (roots[i] - roots[i - 1] < dx) out.possibly_incomplete = true;
  for (double x : roots) {
    CriticalPoint cp;
    cp.location = {x};
    double der[7];
    double scale = 0.0;
    for (int j = 2; j <= 6; ++j) {
      der[j] = phase_derivative(spec, x, j);
      scale = std::max(scale, std::abs(der[j]));
    }
    int j0 = 7;
    for (int j = 2; j <= 6; ++j)
      if (std::abs(der[j]) > opt.class_tol * std::max(scale, 1e-300)) {
        j0 = j;
        break;
      }
    cp.order = j0 - 1;
    cp.hessian_rank = j0 == 2 ? 1 : 0;
    if (cp.order == 2) cp.classification = CausticKind::Fold;
    if (cp.order == 3) cp.classification = CausticKind::Cusp;
    if (cp.order >= 4) cp.classification = CausticKind::Swallowtail;
    out.points.push_back(cp);
  }
  return out;
}

EvalResult evaluate_detailed(const PhaseSpec& spec, double lambda, const EvalOptions& opt) {
  if (!(lambda >= 1.0)) throw Error(ErrorKind::PreconditionViolated, "lambda must be >= 1");
  EvalResult res;
  if (spec.dimension == 2) {
    // Iterated adaptive quadrature on the square.
    const double lo = spec.support_lo, hi = spec.support_hi;
    double var = 0.0;
    for (int i = 0; i <= 40; ++i) {
      double y = lo + (hi - lo) * i / 40;
      var = std::max(var, total_variation([&](double x) { return spec.phase2(x, y); }, lo, hi, 400));
      var = std::max(var, total_variation([&](double x) { return spec.phase2(y, x); }, lo, hi, 400));
    }
    std::size_t panels = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(lambda * var / (2 * kPi))));
    QuadOptions qo;
    qo.tol = opt.tol;
    qo.max_nodes = opt.max_nodes;
    std::size_t nodes = 0;
    bool ok = true;
    auto outer = gk_adaptive(
        [&](double y) {
          auto r = gk_adaptive([&](double x) { return spec.symbol2(x, y) * std::exp(kI * lambda * spec.phase2(x, y)); },
                               uniform_breaks(lo, hi, panels), qo);
          nodes += r.nodes;
          ok = ok && r.converged;
          return r.value;
        },
        uniform_breaks(lo, hi, panels), qo);
    res.value = outer.value;
    res.error = outer.error;
    res.nodes = nodes;
    if (!ok || !outer.converged) {
      Error e(ErrorKind::BudgetExceeded, "2-D quadrature hit the node cap");
      e.partial_value = res.value;
      e.partial_error = res.error;
      throw e;
    }
    return res;
  }

  if (spec.analytic() && lambda > opt.nsd_threshold) {
    auto cps = find_critical_points(spec);
    std::vector<NsdPoint> crit;
    for (auto& c : cps.points) crit.push_back({c.location[0], c.order + 1});
    cplx v1 = nsd_integral(spec.phase_c, spec.dphase_c, spec.symbol_c, spec.support_lo, spec.support_hi, crit, lambda,
                           opt.nsd_panels, opt.nsd_nodes);
    cplx v2 = nsd_integral(spec.phase_c, spec.dphase_c, spec.symbol_c, spec.support_lo, spec.support_hi, crit, lambda,
                           opt.nsd_panels + 4, opt.nsd_nodes);
    res.value = v2;
    res.error = std::abs(v2 - v1);
    res.nodes = 0;
    res.steepest_descent = true;
    return res;
  }

  const double lo = spec.support_lo, hi = spec.support_hi;
  double var = total_variation(spec.phase, lo, hi);
  std::size_t panels = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(lambda * var / (2 * kPi))));
  QuadOptions qo;
  qo.tol = opt.tol;
  qo.max_nodes = opt.max_nodes;
  if (panels * 15 > opt.max_nodes) {
    Error e(ErrorKind::BudgetExceeded, "oscillation count exceeds the node budget");
    throw e;
  }
  auto r = gk_adaptive([&](double x) { return spec.symbol(x) * std::exp(kI * lambda * spec.phase(x)); },
                       uniform_breaks(lo, hi, panels), qo);
  res.value = r.value;
  res.error = r.error;
  res.nodes = r.nodes;
  if (!r.converged) {
    Error e(ErrorKind::BudgetExceeded, "adaptive quadrature hit the node cap");
    e.partial_value = r.value;
    e.partial_error = r.error;
    throw e;
  }
  return res;
}

cplx evaluate(const PhaseSpec& spec, double lambda, const EvalOptions& opt) {
  return evaluate_detailed(spec, lambda, opt).value;
}

DecayFit decay_fit(const std::vector<std::pair<double, double>>& values) {
  if (values.size() < 4) throw Error(ErrorKind::DegenerateInput, "decay fit needs at least 4 points");
  DecayFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(values.size());
  for (auto [l, m] : values) {
    if (!(m > 0.0) || !(l > 0.0)) throw Error(ErrorKind::DegenerateInput, "decay fit needs positive data");
    double x = std::log(l), y = std::log(m);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    fit.lambda_grid.push_back(l);
    fit.moduli.push_back(m);
  }
  double den = n * sxx - sx * sx;
  if (den <= 0.0) throw Error(ErrorKind::DegenerateInput, "decay fit needs distinct abscissae");
  double slope = (n * sxy - sx * sy) / den;
  double icpt = (sy - slope * sx) / n;
  fit.exponent = slope;
  fit.constant = std::exp(icpt);
  for (auto [l, m] : values) fit.residual = std::max(fit.residual, std::abs(std::log(m) - icpt - slope * std::log(l)));
  return fit;
}

DecayFit van_der_corput_check(const PhaseSpec& spec, int k, double c0, const std::vector<double>& lambda_grid,
                              const EvalOptions& opt) {
  if (k < 2) throw Error(ErrorKind::PreconditionViolated, "k must be >= 2");
  const int n = 1000;
  for (int i = 0; i <= n; ++i) {
    double x = spec.support_lo + (spec.support_hi - spec.support_lo) * i / n;
    double s = 0.0;
    for (int j = 2; j <= k; ++j) s += std::abs(phase_derivative(spec, x, j));
    if (s < c0)
      throw Error(ErrorKind::PreconditionViolated,
                  "derivative lower bound fails at xi = " + std::to_string(x) + " (sum = " + std::to_string(s) + ")");
  }
  std::vector<std::pair<double, double>> vals;
  for (double l : lambda_grid) vals.push_back({l, std::abs(evaluate(spec, l, opt))});
  return decay_fit(vals);
}

namespace {

struct Frame2D {
  double v1[2], v2[2];  // v1: nondegenerate Hessian direction
  double ev1;
};

Frame2D hessian_frame(const Phase2D& H) {
  auto h = H.hess(0.0, 0.0);
  double a = h[0].real(), b = h[1].real(), c = h[2].real();
  double tr = a + c, det = a * c - b * b;
  double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  double e1 = tr / 2 + disc, e2 = tr / 2 - disc;
  double ev = std::abs(e1) >= std::abs(e2) ? e1 : e2;
  double u0, u1;
  if (std::abs(b) > 1e-14) {
    u0 = b;
    u1 = ev - a;
  } else if (std::abs(a) >= std::abs(c)) {
    u0 = 1;
    u1 = 0;
  } else {
    u0 = 0;
    u1 = 1;
  }
  double nu = std::hypot(u0, u1);
  Frame2D f;
  f.v1[0] = u0 / nu;
  f.v1[1] = u1 / nu;
  f.v2[0] = -f.v1[1];
  f.v2[1] = f.v1[0];
  f.ev1 = ev;
  return f;
}

double det_hess(const Phase2D& H, double x, double y) {
  auto h = H.hess(x, y);
  return (h[0] * h[2] - h[1] * h[1]).real();
}

}  // namespace

Fold2DResult classify_2d(const Phase2D& H, const Fold2DOptions& opt) {
  Fold2DResult res;
  double h0 = std::abs(H.H(0.0, 0.0));
  auto g0 = H.grad(0.0, 0.0);
  if (h0 > 1e-12) throw Error(ErrorKind::HypothesisViolated, "H(0) != 0");
  if (std::abs(g0[0]) + std::abs(g0[1]) > 1e-12) throw Error(ErrorKind::HypothesisViolated, "grad H(0) != 0");
  auto h = H.hess(0.0, 0.0);
  double a = h[0].real(), b = h[1].real(), c = h[2].real();
  double tr = a + c, det = a * c - b * b;
  double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  double e1 = tr / 2 + disc, e2 = tr / 2 - disc;
  double scale = std::max(std::abs(e1), std::abs(e2));
  int rank = (std::abs(e1) > opt.class_tol * std::max(scale, 1.0)) + (std::abs(e2) > opt.class_tol * std::max(scale, 1.0));
  if (rank != 1) throw Error(ErrorKind::HypothesisViolated, "rank H''(0) = " + std::to_string(rank) + ", expected 1");
  const double d = 1e-4;
  double gx = (det_hess(H, d, 0) - det_hess(H, -d, 0)) / (2 * d);
  double gy = (det_hess(H, 0, d) - det_hess(H, 0, -d)) / (2 * d);
  double gn = std::hypot(gx, gy);
  if (gn < opt.class_tol * std::max(1.0, scale)) throw Error(ErrorKind::HypothesisViolated, "grad det H''(0) = 0");
  double t0 = -gy / gn, t1 = gx / gn;  // tangent of the curve det H'' = 0
  double n0 = gx / gn, n1 = gy / gn;
  // X'(0) = H''(0) xi'(0).
  double xp0 = a * t0 + b * t1, xp1 = b * t0 + c * t1;
  res.xprime_norm = std::hypot(xp0, xp1);
  // Points of the curve at parameter s along the tangent, projected along the normal.
  auto curve = [&](double s) {
    double w = 0.0;
    for (int it = 0; it < 60; ++it) {
      double px = s * t0 + w * n0, py = s * t1 + w * n1;
      double f = det_hess(H, px, py);
      double dd = 1e-6;
      double fp = (det_hess(H, px + dd * n0, py + dd * n1) - det_hess(H, px - dd * n0, py - dd * n1)) / (2 * dd);
      double st = f / fp;
      w -= st;
      if (std::abs(st) < 1e-15) break;
    }
    return std::array<double, 2>{s * t0 + w * n0, s * t1 + w * n1};
  };
  auto X = [&](double s) {
    auto p = curve(s);
    auto g = H.grad(p[0], p[1]);
    return std::array<double, 2>{g[0].real(), g[1].real()};
  };
  const double ds = 1e-3;
  auto xm = X(-ds), x0 = X(0.0), xpl = X(ds);
  double xs0 = (xpl[0] - 2 * x0[0] + xm[0]) / (ds * ds), xs1 = (xpl[1] - 2 * x0[1] + xm[1]) / (ds * ds);
  res.xsecond_norm = std::hypot(xs0, xs1);
  if (res.xprime_norm > opt.class_tol * std::max(1.0, scale)) {
    res.classification = CausticKind::Fold;
  } else if (res.xsecond_norm > 1e-4 * std::max(1.0, scale)) {
    res.classification = CausticKind::Cusp;
  } else {
    throw Error(ErrorKind::HypothesisViolated, "X'(0) = 0 and X''(0) = 0");
  }
  return res;
}

cplx integral_2d(const Phase2D& H, const std::array<double, 2>& x, double lambda, const Fold2DOptions& opt) {
  Frame2D fr = hessian_frame(H);
  const double r = opt.radius, R = 2.0 * r;
  const double r4 = r * r * r * r;
  auto sym = [&](cplx e1, cplx e2) {
    cplx p0 = e1 * fr.v1[0] + e2 * fr.v2[0], p1 = e1 * fr.v1[1] + e2 * fr.v2[1];
    cplx q = p0 * p0 + p1 * p1;
    return opt.amplitude * std::exp(-q * q / r4);
  };
  auto phase = [&](cplx e1, cplx e2) {
    cplx p0 = e1 * fr.v1[0] + e2 * fr.v2[0], p1 = e1 * fr.v1[1] + e2 * fr.v2[1];
    return x[0] * p0 + x[1] * p1 - H.H(p0, p1);
  };
  auto dphase1 = [&](cplx e1, cplx e2) {
    cplx p0 = e1 * fr.v1[0] + e2 * fr.v2[0], p1 = e1 * fr.v1[1] + e2 * fr.v2[1];
    auto g = H.grad(p0, p1);
    return x[0] * fr.v1[0] + x[1] * fr.v1[1] - (g[0] * fr.v1[0] + g[1] * fr.v1[1]);
  };
  auto ddphase1 = [&](double e1, double e2) {
    double p0 = e1 * fr.v1[0] + e2 * fr.v2[0], p1 = e1 * fr.v1[1] + e2 * fr.v2[1];
    auto h = H.hess(p0, p1);
    return -(h[0].real() * fr.v1[0] * fr.v1[0] + 2 * h[1].real() * fr.v1[0] * fr.v1[1] +
             h[2].real() * fr.v1[1] * fr.v1[1]);
  };
  // Real critical point of the inner phase, by Newton from 0.
  auto inner_crit = [&](double e2, bool& ok) {
    double c = 0.0;
    ok = false;
    for (int it = 0; it < 60; ++it) {
      double f = dphase1(c, e2).real(), fp = ddphase1(c, e2);
      if (fp == 0.0) return c;
      double st = f / fp;
      c -= st;
      if (std::abs(c) > 4 * R) return c;
      if (std::abs(st) < 1e-15 * (1 + std::abs(c))) {
        ok = true;
        break;
      }
    }
    ok = ok && std::abs(c) < R;
    return c;
  };
  auto inner = [&](double e2) {
    bool ok;
    double c = inner_crit(e2, ok);
    std::vector<NsdPoint> crit;
    if (ok) crit.push_back({c, 2});
    return nsd_integral([&](cplx z) { return phase(z, e2); }, [&](cplx z) { return dphase1(z, e2); },
                        [&](cplx z) { return sym(z, e2); }, -R, R, crit, lambda, 3, 12);
  };
  // Oscillation count of the reduced phase sets the initial panels.
  double var = 0.0, prev = 0.0;
  const int ns = 400;
  for (int i = 0; i <= ns; ++i) {
    double e2 = -R + 2 * R * i / ns;
    bool ok;
    double c = inner_crit(e2, ok);
    double v = phase(ok ? c : 0.0, e2).real();
    if (i) var += std::abs(v - prev);
    prev = v;
  }
  std::size_t panels = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(lambda * var / (2 * kPi))));
  QuadOptions qo;
  qo.tol = opt.tol;
  qo.max_nodes = 40000000;
  auto res = gk_adaptive(inner, uniform_breaks(-R, R, panels), qo);
  if (!res.converged) {
    Error e(ErrorKind::BudgetExceeded, "2-D oscillatory integral hit the node cap");
    e.partial_value = res.value;
    e.partial_error = res.error;
    throw e;
  }
  return res.value;
}

Fold2DResult fold_cusp_2d(const Phase2D& H, const std::vector<std::array<double, 2>>& xs,
                          const std::vector<double>& lambda_grid, const Fold2DOptions& opt) {
  Fold2DResult res = classify_2d(H, opt);
  std::vector<double> sup(lambda_grid.size(), 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) jobs.push_back({i, j});
  std::vector<double> vals(jobs.size());
  parallel_for(jobs.size(), opt.threads, [&](std::size_t k) {
    vals[k] = std::abs(integral_2d(H, xs[jobs[k].second], lambda_grid[jobs[k].first], opt));
  });
  for (std::size_t k = 0; k < jobs.size(); ++k) sup[jobs[k].first] = std::max(sup[jobs[k].first], vals[k]);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) pts.push_back({lambda_grid[i], sup[i]});
  res.fit = decay_fit(pts);
  return res;
}

namespace {

double golden_max(const std::function<double(double)>& f, double a, double b, int iters = 40) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

std::vector<std::pair<double, double>> canonical_sup_profile(CausticKind kind, const std::vector<double>& hs) {
  std::vector<std::pair<double, double>> out;
  for (double h : hs) {
    double best = 0.0;
    if (kind == CausticKind::Cusp) {
      // Self-similar window (h^{1/2} s1, h^{3/4} s2) around the Pearcey origin.
      auto f = [&](double s1, double s2) {
        return std::abs(canonical_integral(kind, {std::sqrt(h) * s1, std::pow(h, 0.75) * s2, 0.0}, h));
      };
      double bs1 = 0, bs2 = 0;
      best = f(0, 0);
      for (int i = 0; i <= 24; ++i)
        for (int j = 0; j <= 12; ++j) {
          double s1 = -4.0 + 0.25 * i, s2 = -1.5 + 0.25 * j;
          double v = f(s1, s2);
          if (v > best) {
            best = v;
            bs1 = s1;
            bs2 = s2;
          }
        }
      for (int round = 0; round < 3; ++round) {
        double w = 0.25 / (round + 1);
        double s2c = bs2;
        best = std::max(best, golden_max([&](double s) { return f(s, s2c); }, bs1 - w, bs1 + w));
        double s1c = bs1;
        best = std::max(best, golden_max([&](double s) { return f(s1c, s); }, bs2 - w, bs2 + w));
      }
    } else {
      // Fold: z1 = h^{2/3} s. Swallowtail: a point of the smooth fold sheet
      // where Phi' = (zeta - 1)^2 (zeta^2 + 2 zeta + 2), scanned across it in z3.
      auto f = [&](double s) {
        double d = std::pow(h, 2.0 / 3.0) * s;
        if (kind == CausticKind::Fold) return std::abs(canonical_integral(kind, {d, 0.0}, h));
        return std::abs(canonical_integral(kind, {-1.0, -2.0, 2.0 + d, 0.0}, h));
      };
      double lo = -4.0, hi = kind == CausticKind::Fold ? 2.0 : 4.0, step = kind == CausticKind::Fold ? 0.05 : 0.1;
      double bs = 0.0;
      best = -1.0;
      for (double s = lo; s <= hi + 1e-12; s += step) {
        double v = f(s);
        if (v > best) {
          best = v;
          bs = s;
        }
      }
      best = std::max(best, golden_max(f, bs - step, bs + step));
    }
    out.push_back({h, best});
  }
  return out;
}

PhaseSpec monomial_phase(int k) {
  if (k < 1) throw Error(ErrorKind::PreconditionViolated, "k must be >= 1");
  PhaseSpec s;
  s.phase = [k](double x) { return std::pow(x, k) / k; };
  s.derivative = [k](double x, int j) {
    if (j > k) return 0.0;
    double c = 1.0;
    for (int i = 0; i < j; ++i) c *= k - i;
    return c * std::pow(x, k - j) / k;
  };
  s.symbol = [](double x) { return cplx(bump(x)); };
  return s;
}

Phase2D fold_phase_2d() {
  Phase2D f;
  f.H = [](cplx a, cplx b) { return a * a / 2.0 + a * b * b + b * b * b; };
  f.grad = [](cplx a, cplx b) { return std::array<cplx, 2>{a + b * b, 2.0 * a * b + 3.0 * b * b}; };
  f.hess = [](cplx a, cplx b) { return std::array<cplx, 3>{1.0, 2.0 * b, 2.0 * a + 6.0 * b}; };
  return f;
}

Phase2D cusp_phase_2d() {
  Phase2D f;
  f.H = [](cplx a, cplx b) { return a * a / 2.0 + a * b * b + b * b * b * b; };
  f.grad = [](cplx a, cplx b) { return std::array<cplx, 2>{a + b * b, 2.0 * a * b + 4.0 * b * b * b}; };
  f.hess = [](cplx a, cplx b) { return std::array<cplx, 3>{1.0, 2.0 * b, 2.0 * a + 12.0 * b * b}; };
  return f;
}

}  // namespace fw
