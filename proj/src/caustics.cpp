#include "fw/caustics.hpp"

#include <algorithm>
#include <cmath>

namespace fw {

double reference_eta(const CausticOptions& opt) {
  if (opt.eta_ref > 0.0) return opt.eta_ref;
  const Plateau& c = opt.cut.chi0;
  const int n = 4000;
  double num = 0.0, den = 0.0, de = (c.hi - c.lo) / n;
  for (int i = 1; i < n; ++i) {
    double e = c.lo + de * i;
    double w = e * c(e);
    num += e * w;
    den += w;
  }
  return num / den;
}

namespace {

struct SliceCtx {
  double a, h, eta, lambda, T;
  int N;
  const CutoffSuite* cut;
  double mu_max;

  double sigma(double mu) const {
    double rho = 1.0 + a;
    double al = N == 0 ? 1.0 : reflection_factor(lambda, 1.0 + mu * mu);
    return T / (2.0 * std::sqrt(rho + a * mu * mu)) + mu - 2.0 * N * std::sqrt(1.0 + mu * mu) * al;
  }
  LagrangianPoint point(double mu) const { return lagrangian_point(a, N, h, eta, sigma(mu), mu, *cut); }
  std::array<double, 2> velocity(double mu) const {
    double d = 1e-6 * (1.0 + std::abs(mu));
    double lo = std::max(mu - d, -mu_max), hi = std::min(mu + d, mu_max);
    LagrangianPoint p1 = point(hi), p0 = point(lo);
    return {(p1.X - p0.X) / (hi - lo), (p1.Y - p0.Y) / (hi - lo)};
  }
};

SliceCtx make_ctx(double a, double h, int N, double t, const CausticOptions& opt) {
  if (!(a > 0.0 && h > 0.0)) throw Error(ErrorKind::PreconditionViolated, "a and h must be positive");
  if (N < 0) throw Error(ErrorKind::PreconditionViolated, "N must be >= 0");
  SliceCtx c;
  c.a = a;
  c.h = h;
  c.N = N;
  c.eta = reference_eta(opt);
  c.lambda = a * std::sqrt(a) * c.eta / h;
  c.T = t / std::sqrt(a);
  c.cut = &opt.cut;
  c.mu_max = std::sqrt(opt.cut.eps0 / a) * (1.0 - 1e-9);
  return c;
}

double mu_node(const SliceCtx& c, int i, int n) { return -c.mu_max + 2.0 * c.mu_max * i / (n - 1); }

}  // namespace

WavefrontCurve wavefront_slice(double a, double h, int N, double t, const CausticOptions& opt) {
  if (!(t >= 0.0)) throw Error(ErrorKind::EmptySlice, "negative time has no slice");
  SliceCtx c = make_ctx(a, h, N, t, opt);
  WavefrontCurve w;
  w.N = N;
  w.t = t;
  w.eta = c.eta;
  double rho = 1.0 + a;
  for (int i = 0; i < opt.mu_nodes; ++i) {
    LagrangianPoint p = c.point(mu_node(c, i, opt.mu_nodes));
    w.points.push_back({a * p.X, -t * std::sqrt(rho) + a * std::sqrt(a) * p.Y});
    w.params.push_back({p.sigma, p.mu});
  }
  if (w.points.empty()) throw Error(ErrorKind::EmptySlice, "no mu nodes");
  return w;
}

std::array<double, 2> slice_point(double a, double h, int N, double t, double mu, const CausticOptions& opt) {
  SliceCtx c = make_ctx(a, h, N, t, opt);
  LagrangianPoint p = c.point(mu);
  return {a * p.X, -t * std::sqrt(1.0 + a) + a * std::sqrt(a) * p.Y};
}

std::vector<CuspPoint> slice_cusps(double a, double h, int N, double t, const CausticOptions& opt) {
  SliceCtx c = make_ctx(a, h, N, t, opt);
  std::vector<CuspPoint> out;
  int n = opt.mu_nodes;
  double prev_mu = mu_node(c, 0, n);
  double prev = c.velocity(prev_mu)[0];
  for (int i = 1; i < n; ++i) {
    double mu = mu_node(c, i, n);
    double v = c.velocity(mu)[0];
    if ((prev < 0.0) != (v < 0.0) && prev != 0.0) {
      double lo = prev_mu, hi = mu, flo = prev;
      for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = c.velocity(mid)[0];
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double m = 0.5 * (lo + hi);
      LagrangianPoint p = c.point(m);
      out.push_back({m, p.X, p.Y});
    }
    prev = v;
    prev_mu = mu;
  }
  return out;
}

std::array<double, 2> reflection_window(double a, int N) {
  double p = 4.0 * std::sqrt(a * (1.0 + a));
  if (N == 0) return {0.0, 0.5 * p};
  return {(N - 0.5) * p, (N + 0.5) * p};
}

namespace {

// Hessian rank and kernel cubic of G_a at the origin.
void classify_normal_form(double a, int N, double Tt, CausticEvent& ev) {
  auto g = [&](double x, double y) { return G_a(a, N, Tt, ev.p, ev.q, x, y); };
  const double d = 1e-3;
  double hxx = (g(d, 0) - 2 * g(0, 0) + g(-d, 0)) / (d * d);
  double hyy = (g(0, d) - 2 * g(0, 0) + g(0, -d)) / (d * d);
  double hxy = (g(d, d) - g(d, -d) - g(-d, d) + g(-d, -d)) / (4 * d * d);
  double tr = hxx + hyy, det = hxx * hyy - hxy * hxy;
  double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  double l1 = 0.5 * tr + disc, l2 = 0.5 * tr - disc;
  double big = std::max(std::abs(l1), std::abs(l2));
  ev.hessian_rank = (std::abs(l1) > 1e-6 * std::max(big, 1.0)) + (std::abs(l2) > 1e-6 * std::max(big, 1.0));
  // Kernel: eigenvector of the eigenvalue closest to zero.
  double lk = std::abs(l1) < std::abs(l2) ? l1 : l2;
  double vx = hxy, vy = lk - hxx;
  if (std::abs(vx) + std::abs(vy) < 1e-14) {
    vx = lk - hyy;
    vy = hxy;
  }
  double nv = std::hypot(vx, vy);
  vx /= nv;
  vy /= nv;
  const double s = 1e-2;
  auto gs = [&](double u) { return g(u * vx, u * vy); };
  ev.kernel_cubic = (gs(2 * s) - 2 * gs(s) + 2 * gs(-s) - gs(-2 * s)) / (2 * s * s * s);
}

}  // namespace

std::vector<CausticEvent> detect_caustics(double a, double h, int N, double t_lo, double t_hi,
                                          const CausticOptions& opt) {
  if (!(t_lo >= 0.0 && t_hi > t_lo)) throw Error(ErrorKind::PreconditionViolated, "need 0 <= t_lo < t_hi");
  std::vector<CausticEvent> events;
  auto count = [&](double t) { return static_cast<int>(slice_cusps(a, h, N, t, opt).size()); };
  double prev_t = t_lo;
  int prev_c = count(t_lo);
  for (int i = 1; i <= opt.t_steps; ++i) {
    double t = t_lo + (t_hi - t_lo) * i / opt.t_steps;
    int c = count(t);
    if (c >= prev_c + 2) {
      double lo = prev_t, hi = t;
      for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        if (count(mid) > prev_c)
          hi = mid;
        else
          lo = mid;
      }
      auto cusps = slice_cusps(a, h, N, hi, opt);
      // The newborn pair is the closest adjacent pair.
      std::size_t best = 0;
      double gap = 1e300;
      for (std::size_t j = 0; j + 1 < cusps.size(); ++j) {
        double gj = cusps[j + 1].mu - cusps[j].mu;
        if (gj < gap) {
          gap = gj;
          best = j;
        }
      }
      if (cusps.size() < 2) continue;
      SliceCtx ctx = make_ctx(a, h, N, hi, opt);
      CausticEvent ev;
      ev.N = N;
      ev.t = hi;
      ev.mu = 0.5 * (cusps[best].mu + cusps[best + 1].mu);
      LagrangianPoint p = ctx.point(ev.mu);
      ev.x = a * p.X;
      ev.y = -hi * std::sqrt(1.0 + a) + a * std::sqrt(a) * p.Y;
      auto v = ctx.velocity(ev.mu);
      ev.velocity = std::hypot(v[0], v[1]);
      if (N >= 1) {
        double Tt = ctx.T / (4.0 * N);
        ScaleFunctions sf = scale_functions(Tt, a, N, 0.0, 0.0);
        ev.p = static_cast<double>(N) * N * (sf.F0 - p.X);
        ev.q = -2.0 * N * N * sf.H0;
        classify_normal_form(a, N, Tt, ev);
        double k3 = std::abs(ev.kernel_cubic);
        if (k3 <= opt.class_tol)
          ev.kind = CausticKind::Swallowtail;
        else if (k3 <= 10.0 * opt.class_tol)
          throw Error(ErrorKind::ClassificationAmbiguous, "kernel cubic inside the dead band");
        else
          ev.kind = CausticKind::Cusp;
      } else {
        ev.kind = CausticKind::Cusp;
      }
      events.push_back(ev);
    }
    prev_c = c;
    prev_t = t;
  }
  return events;
}

double lagrangian_min_singular(double a, int N, double h, double eta, double sigma, double mu,
                               const CutoffSuite& cut) {
  const double d = 1e-6;
  auto vec = [&](double s, double m) {
    LagrangianPoint p = lagrangian_point(a, N, h, eta, s, m, cut);
    return std::array<double, 4>{p.X, p.T, p.xi, p.tau};
  };
  auto sp = vec(sigma + d, mu), sm = vec(sigma - d, mu), mp = vec(sigma, mu + d), mm = vec(sigma, mu - d);
  double g11 = 0, g12 = 0, g22 = 0;
  for (int i = 0; i < 4; ++i) {
    double js = (sp[i] - sm[i]) / (2 * d), jm = (mp[i] - mm[i]) / (2 * d);
    g11 += js * js;
    g12 += js * jm;
    g22 += jm * jm;
  }
  double tr = g11 + g22, det = g11 * g22 - g12 * g12;
  double lmin = 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return std::sqrt(std::max(lmin, 0.0));
}

}  // namespace fw
