#include "fw/green.hpp"

#include <algorithm>
#include <cmath>

#include "fw/quad.hpp"
#include "fw/specfun.hpp"

namespace fw {

ModelParams make_params(double h, double a, double epsilon) {
  ModelParams p;
  p.h = h;
  p.a = a;
  p.trunc = default_truncation(h, epsilon);
  return p;
}

void validate(const ModelParams& p) {
  if (!(p.h > 0.0 && p.h <= 1.0)) throw Error(ErrorKind::ConfigError, "h must lie in (0, 1]");
  if (!(p.a > 0.0)) throw Error(ErrorKind::ConfigError, "a must be positive");
  if (p.d < 2) throw Error(ErrorKind::ConfigError, "dimension must be >= 2");
  if (p.propagator_sign != 1 && p.propagator_sign != -1) throw Error(ErrorKind::ConfigError, "sign must be +1 or -1");
  if (p.trunc.k_min < 1 || p.trunc.k_max < p.trunc.k_min)
    throw Error(ErrorKind::ConfigError, "mode truncation range is empty");
  if (p.trunc.k_max > std::floor(p.trunc.epsilon / p.h + 1e-9))
    throw Error(ErrorKind::ConfigError, "k_max exceeds epsilon / h");
}

double tau_k(double omega_k, double h, double eta) {
  return eta * std::sqrt(1.0 + omega_k * std::cbrt(h * h / (eta * eta)));
}

namespace {

double eta_lo(const ModelParams& p) { return p.window.psi1.lo; }
double eta_hi(const ModelParams& p) { return p.window.psi1.hi; }

// psi_2(tau_k) psi_1(eta) e_k(a, eta/h) e_k(x, eta/h), real.
double mode_weight(const ModelParams& p, const GalleryMode& m, double x, double eta) {
  double w = p.window.weight(eta, tau_k(m.omega_k, p.h, eta));
  if (w == 0.0) return 0.0;
  return w * eigenfunction(m, p.a, eta / p.h) * eigenfunction(m, x, eta / p.h);
}

}  // namespace

cplx propagate_term(const ModelParams& p, int k, double t, double x, double y, double* error) {
  if (x < 0.0) throw Error(ErrorKind::PreconditionViolated, "x must be nonnegative");
  if (x == 0.0) {
    if (error) *error = 0.0;
    return {0.0, 0.0};
  }
  GalleryMode m = gallery_mode(k);
  const double sg = p.propagator_sign;
  PhaseSpec spec;
  spec.phase = [&](double eta) { return y * eta - sg * t * tau_k(m.omega_k, p.h, eta); };
  spec.symbol = [&](double eta) { return cplx(mode_weight(p, m, x, eta) / (2.0 * kPi * p.h), 0.0); };
  spec.support_lo = eta_lo(p);
  spec.support_hi = eta_hi(p);
  auto r = evaluate_detailed(spec, 1.0 / p.h, p.eval);
  if (error) *error = r.error;
  return r.value;
}

namespace {

WavefieldSample sum_terms(const ModelParams& p, double t, double x, double y, int k0, int k1) {
  WavefieldSample s;
  s.t = t;
  s.x = x;
  s.y = y;
  CompensatedSum acc;
  double err = 0.0;
  for (int k = k0; k <= k1; ++k) {
    double e = 0.0;
    try {
      acc.add(propagate_term(p, k, t, x, y, &e));
    } catch (Error& ex) {
      if (ex.kind() != ErrorKind::BudgetExceeded) throw;
      acc.add(ex.partial_value);
      Error out(ErrorKind::BudgetExceeded, "mode " + std::to_string(k) + " did not converge");
      out.partial_value = acc.value();
      out.partial_error = err + ex.partial_error;
      throw out;
    }
    err += e;
  }
  s.value = acc.value();
  s.quadrature_error = err;
  s.k_terms = std::max(0, k1 - k0 + 1);
  return s;
}

}  // namespace

WavefieldSample propagate(const ModelParams& p, double t, double x, double y) {
  validate(p);
  return sum_terms(p, t, x, y, p.trunc.k_min, p.trunc.k_max);
}

cplx full_green(const ModelParams& p, const SourcePoint& source, const SpacePoint& target) {
  ModelParams q = p;
  q.a = source.a;
  return propagate(q, target.t - source.s, target.x, target.y - source.b).value;
}

SplitSample propagate_split(const ModelParams& p, double t, double x, double y, int L) {
  validate(p);
  if (L < p.trunc.k_min || L > p.trunc.k_max)
    throw Error(ErrorKind::PreconditionViolated, "split index outside the truncation range");
  SplitSample s;
  s.low = sum_terms(p, t, x, y, p.trunc.k_min, L);
  s.high = sum_terms(p, t, x, y, L + 1, p.trunc.k_max);
  return s;
}

TangencyParams tangency_params(const ModelParams& p, int k, double t, double x, double eta) {
  double w = shared_zero_table(k).omega(k);
  double h13 = std::cbrt(p.h);
  TangencyParams tp;
  tp.lambda_g = t * w / h13;
  tp.mu_g = p.a / h13 / (t * std::sqrt(w));
  tp.delta = x / p.a;
  tp.alpha = p.a / (h13 * h13 * w);
  tp.s = std::pow(eta, -2.0 / 3.0);
  return tp;
}

int tangential_threshold(const ModelParams& p, double t) {
  return static_cast<int>(std::ceil(p.tangency_D * std::max(std::pow(p.h, -0.25), 1.0 / t)));
}

namespace {

// Slowly varying amplitudes: A_+(X) = e^{-i pi/4} e^{i xi} X^{-1/4} Psi_-(X),
// A_-(X) = e^{i pi/4} e^{-i xi} X^{-1/4} Psi_+(X), xi = (2/3) X^{3/2}.
cplx psi_amplitude(int sign, double X) {
  double xi = 2.0 / 3.0 * X * std::sqrt(X);
  double q = std::pow(X, 0.25);
  if (sign > 0) return std::exp(kI * (-kPi / 4 + xi)) * q * airy_branch(Branch::Minus, cplx(X, 0.0));
  return std::exp(kI * (kPi / 4 - xi)) * q * airy_branch(Branch::Plus, cplx(X, 0.0));
}

}  // namespace

cplx nontangential_symbol(const ModelParams& p, int k, double x, double eta, int s1, int s2) {
  GalleryMode m = gallery_mode(k);
  double w = p.window.weight(eta, tau_k(m.omega_k, p.h, eta));
  if (w == 0.0) return {0.0, 0.0};
  double e23 = std::pow(eta / p.h, 2.0 / 3.0);
  double Xx = m.omega_k - e23 * x, Xa = m.omega_k - e23 * p.a;
  // Ai(-X) = sum_s omega^s e^{-s i xi} X^{-1/4} Psi_s(X), omega = e^{i pi/4}.
  cplx c1 = std::exp(kI * (s1 * kPi / 4)), c2 = std::exp(kI * (s2 * kPi / 4));
  double pref = w * m.f_k * m.f_k / std::cbrt(static_cast<double>(k)) * std::cbrt(eta / p.h) *
                std::cbrt(eta / p.h);
  return pref * c1 * c2 * std::pow(Xx * Xa, -0.25) * psi_amplitude(s1, Xx) * psi_amplitude(s2, Xa);
}

double nontangential_phase(const ModelParams& p, int k, double t, double x, double y, double eta, int s1, int s2) {
  double w = shared_zero_table(k).omega(k);
  double z = std::cbrt(p.h * p.h / (eta * eta)) * w;
  double zx = z - x, za = z - p.a;
  return eta * (y - p.propagator_sign * t * std::sqrt(1.0 + z) - s1 * 2.0 / 3.0 * zx * std::sqrt(zx) -
                s2 * 2.0 / 3.0 * za * std::sqrt(za));
}

namespace {

void check_regime(const ModelParams& p, double t, double x, int k) {
  if (k < tangential_threshold(p, t))
    throw Error(ErrorKind::RegimeViolation, "mode index below D max(h^{-1/4}, 1/t)");
  double w = shared_zero_table(k).omega(k);
  double worst = std::max(x, p.a) * std::pow(eta_hi(p) / p.h, 2.0 / 3.0);
  if (w - worst < 0.5 * w) throw Error(ErrorKind::RegimeViolation, "Airy argument leaves the oscillatory region");
}

}  // namespace

cplx nontangential_branch(const ModelParams& p, int k, double t, double x, double y, int s1, int s2) {
  check_regime(p, t, x, k);
  PhaseSpec spec;
  spec.phase = [&](double eta) { return nontangential_phase(p, k, t, x, y, eta, s1, s2); };
  spec.symbol = [&](double eta) { return nontangential_symbol(p, k, x, eta, s1, s2) / (2.0 * kPi * p.h); };
  spec.support_lo = eta_lo(p);
  spec.support_hi = eta_hi(p);
  return evaluate(spec, 1.0 / p.h, p.eval);
}

cplx nontangential_asymptotic(const ModelParams& p, double t, double x, double y, int k) {
  validate(p);
  check_regime(p, t, x, k);
  CompensatedSum acc;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) acc.add(nontangential_branch(p, k, t, x, y, s1, s2));
  return acc.value();
}

std::array<double, 3> tangency_g(double z) {
  // g = (2/3)(1+z)^{-1/2} - q, q = 1/(r (1 + r)), r = sqrt(1 + z).
  double r = std::sqrt(1.0 + z);
  double D = r + 1.0 + z;
  double r1 = 0.5 / r, r2 = -0.25 / (r * r * r);
  double D1 = r1 + 1.0, D2 = r2;
  double q = 1.0 / D, q1 = -D1 / (D * D), q2 = -D2 / (D * D) + 2.0 * D1 * D1 / (D * D * D);
  double g = 2.0 / 3.0 / r - q;
  double g1 = -1.0 / 3.0 / (r * r * r) - q1;
  double g2 = 0.5 / (r * r * r * r * r) - q2;
  return {g, g1, g2};
}

std::array<double, 2> phase_s_derivatives(double z_scale, double mu, double delta, double alpha, double s, int s1,
                                          int s2) {
  double z = z_scale * s;
  auto g = tangency_g(z);
  double u = s - delta * alpha, v = s - alpha;
  double d1 = -(g[0] + z * g[1]) + mu / 3.0 * (s1 * delta / std::sqrt(u) + s2 / std::sqrt(v));
  double d2 = -z_scale * (2.0 * g[1] + z * g[2]) - mu / 6.0 * (s1 * delta / (u * std::sqrt(u)) + s2 / (v * std::sqrt(v)));
  return {d1, d2};
}

StructureReport phase_structure_scan(const ModelParams& p, const std::vector<double>& t_grid, int n_delta, int n_s) {
  StructureReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  const double s0 = std::pow(eta_hi(p), -2.0 / 3.0), s1v = std::pow(eta_lo(p), -2.0 / 3.0);
  double h23 = std::cbrt(p.h * p.h);
  for (double t : t_grid) {
    int k0 = std::max(p.trunc.k_min, tangential_threshold(p, t));
    for (int k = k0; k <= p.trunc.k_max; ++k) {
      auto tp = tangency_params(p, k, t, 0.0, 1.0);
      double zs = h23 * shared_zero_table(k).omega(k);
      for (int id = 0; id < n_delta; ++id) {
        double delta = static_cast<double>(id) / (n_delta - 1);
        for (int is = 0; is < n_s; ++is) {
          double s = s0 + (s1v - s0) * is / (n_s - 1);
          for (int a1 : {1, -1})
            for (int a2 : {1, -1}) {
              auto d = phase_s_derivatives(zs, tp.mu_g, delta, tp.alpha, s, a1, a2);
              double v = std::abs(d[0]) + std::abs(d[1]);
              ++rep.samples;
              if (v < rep.min_value) {
                rep.min_value = v;
                rep.worst_s1 = a1;
                rep.worst_s2 = a2;
                rep.worst_s = s;
                rep.worst_mu = tp.mu_g;
                rep.worst_delta = delta;
              }
            }
        }
      }
    }
  }
  if (rep.samples == 0) throw Error(ErrorKind::RegimeViolation, "no mode lies in the non-tangential range");
  return rep;
}

double FieldSlice::max_abs() const {
  double m = 0.0;
  for (auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

FieldSlice field_slice(const ModelParams& p, double t, const std::vector<double>& xs, const YGrid& ys,
                       const SliceOptions& opt) {
  validate(p);
  const int k0 = opt.k_min > 0 ? opt.k_min : p.trunc.k_min;
  const int k1 = opt.k_max > 0 ? opt.k_max : p.trunc.k_max;
  const int M = opt.eta_nodes;
  const double lo = eta_lo(p), hi = eta_hi(p), de = (hi - lo) / M;
  const double sg = p.propagator_sign;
  // Interior nodes only: the windowed integrand vanishes to all orders at both ends.
  std::vector<double> eta(M - 1);
  for (int j = 1; j < M; ++j) eta[j - 1] = lo + de * j;
  const std::size_t ne = eta.size();

  std::vector<GalleryMode> modes;
  for (int k = k0; k <= k1; ++k) modes.push_back(gallery_mode(k));
  const std::size_t nk = modes.size();

  // c[k][j] = psi_2 psi_1 e_k(a) e^{-i sg t tau_k / h}
  std::vector<cplx> c(nk * ne);
  std::vector<double> e13(ne), e23(ne);
  for (std::size_t j = 0; j < ne; ++j) {
    e13[j] = std::cbrt(eta[j] / p.h);
    e23[j] = e13[j] * e13[j];
  }
  parallel_for(nk, opt.threads, [&](std::size_t ik) {
    const auto& m = modes[ik];
    double pre = m.f_k * std::pow(static_cast<double>(m.k), -1.0 / 6.0);
    for (std::size_t j = 0; j < ne; ++j) {
      double tau = tau_k(m.omega_k, p.h, eta[j]);
      double wt = p.window.weight(eta[j], tau);
      if (wt == 0.0) continue;
      double ea = pre * e13[j] * airy_ai(e23[j] * p.a - m.omega_k);
      c[ik * ne + j] = wt * ea * std::exp(-kI * (sg * t * tau / p.h));
    }
  });

  FieldSlice out;
  out.t = t;
  out.xs = xs;
  out.ys = ys;
  out.values.assign(xs.size() * static_cast<std::size_t>(ys.ny), cplx(0.0, 0.0));
  const double scale = de / (2.0 * kPi * p.h);
  parallel_for(xs.size(), opt.threads, [&](std::size_t ix) {
    const double x = xs[ix];
    if (x == 0.0) return;  // every mode vanishes on the boundary
    std::vector<cplx> F(ne, cplx(0.0, 0.0));
    for (std::size_t ik = 0; ik < nk; ++ik) {
      const auto& m = modes[ik];
      double pre = m.f_k * std::pow(static_cast<double>(m.k), -1.0 / 6.0);
      for (std::size_t j = 0; j < ne; ++j) {
        cplx cj = c[ik * ne + j];
        if (cj == cplx(0.0, 0.0)) continue;
        F[j] += cj * (pre * e13[j] * airy_ai(e23[j] * x - m.omega_k));
      }
    }
    // Direct transform onto the y grid, phasors advanced by exact rotation per node.
    std::vector<cplx> ph(ne), step(ne);
    for (std::size_t j = 0; j < ne; ++j) {
      ph[j] = std::exp(kI * (ys.y0 * eta[j] / p.h)) * F[j];
      step[j] = std::exp(kI * (ys.dy * eta[j] / p.h));
    }
    for (int m = 0; m < ys.ny; ++m) {
      if (m > 0 && m % 64 == 0) {
        // Re-anchor to keep rotation drift at rounding level.
        for (std::size_t j = 0; j < ne; ++j) ph[j] = std::exp(kI * (ys.at(m) * eta[j] / p.h)) * F[j];
      }
      cplx s(0.0, 0.0);
      for (std::size_t j = 0; j < ne; ++j) {
        s += ph[j];
        ph[j] *= step[j];
      }
      out.values[ix * ys.ny + m] = scale * s;
    }
  });
  return out;
}

double slice_l2(const FieldSlice& s) {
  const std::size_t nx = s.xs.size();
  double total = 0.0;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    double wx;
    if (nx == 1)
      wx = 1.0;
    else if (ix == 0)
      wx = 0.5 * (s.xs[1] - s.xs[0]);
    else if (ix == nx - 1)
      wx = 0.5 * (s.xs[nx - 1] - s.xs[nx - 2]);
    else
      wx = 0.5 * (s.xs[ix + 1] - s.xs[ix - 1]);
    double row = 0.0;
    for (int m = 0; m < s.ys.ny; ++m) {
      double w = (m == 0 || m == s.ys.ny - 1) ? 0.5 : 1.0;
      row += w * std::norm(s.at(static_cast<int>(ix), m));
    }
    total += wx * row * s.ys.dy;
  }
  return std::sqrt(total);
}

double exact_l2_squared(const ModelParams& p) {
  validate(p);
  CompensatedSum acc;
  for (int k = p.trunc.k_min; k <= p.trunc.k_max; ++k) {
    GalleryMode m = gallery_mode(k);
    auto r = gk_adaptive(
        [&](double eta) {
          double w = p.window.weight(eta, tau_k(m.omega_k, p.h, eta));
          double ea = eigenfunction(m, p.a, eta / p.h);
          return cplx(w * w * ea * ea, 0.0);
        },
        uniform_breaks(eta_lo(p), eta_hi(p), 16), QuadOptions{1e-12, 2000000});
    acc.add(r.value);
  }
  return acc.value().real() / (2.0 * kPi * p.h);
}

}  // namespace fw
