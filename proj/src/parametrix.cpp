#include "fw/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fw/specfun.hpp"

namespace fw {

// ---------------------------------------------------------------- cutoffs

double CutoffSuite::chi1(double th) const {
  return Plateau{-theta0, -0.5 * theta0, 0.5 * theta0, theta0}(th);
}

double CutoffSuite::chi2(double u) const { return smooth_step((u - 0.5 * beta) / (0.5 * beta)); }

double CutoffSuite::chi3(double z) const {
  return smooth_step((z - 0.5) / 0.25) * smooth_step((zeta1 - z) / (zeta1 - zeta0));
}

double CutoffSuite::chi4(double s) const { return smooth_step((2.0 * zeta1 - std::abs(s)) / zeta1); }

double CutoffSuite::chi5(double z) const { return smooth_step((z0 - z) / (0.5 * (z0 - 1.0))); }

void CutoffSuite::validate() const {
  auto bad = [](const char* m) { throw Error(ErrorKind::ConfigError, m); };
  if (!(theta0 > 0.0)) bad("theta0 must be positive");
  if (!(zeta0 > 1.0 && zeta1 > zeta0)) bad("need 1 < zeta0 < zeta1");
  if (!(beta > 0.0)) bad("beta must be positive");
  if (!(z0 > 1.0)) bad("z0 must exceed 1");
  if (!(a0 > 0.0)) bad("a0 must be positive");
  if (!(C0 > 0.0 && R0 > 0.0 && M0 > 0.0 && eps0 > 0.0 && C2 > 0.0)) bad("constants must be positive");
  if (!(alpha > 0.0 && alpha < 4.0 / 7.0)) bad("alpha must lie in (0, 4/7)");
}

ScaleFrame ScaleFrame::make(double a, double h, double eta) {
  if (!(a > 0.0 && h > 0.0 && eta > 0.0)) throw Error(ErrorKind::PreconditionViolated, "scale frame needs a, h, eta > 0");
  ScaleFrame f;
  f.a = a;
  f.h = h;
  f.eta = eta;
  f.hbar = h / eta;
  f.lambda_tilde = a * std::sqrt(a) / h;
  f.lambda = eta * f.lambda_tilde;
  f.rho = 1.0 + a;
  return f;
}

// ---------------------------------------------------------------- B

double phase_B_any(double u) {
  if (u >= 1.0) return shared_B_table().B(u);
  if (u < 0.0) throw Error(ErrorKind::PreconditionViolated, "B(u) needs u >= 0");
  double Z = std::pow(u, 2.0 / 3.0);
  cplx r = airy_branch(Branch::Minus, Z) / airy_branch(Branch::Plus, Z);
  return std::arg(r * (-kI) * std::exp(kI * (4.0 * u / 3.0)));
}

double phase_B_prime_any(double u) {
  if (u >= 1.0) return shared_B_table().Bprime(u);
  if (!(u > 0.0)) throw Error(ErrorKind::PreconditionViolated, "B'(u) needs u > 0");
  double Z = std::pow(u, 2.0 / 3.0);
  cplx d = airy_branch_prime(Branch::Minus, Z) / airy_branch(Branch::Minus, Z) -
           airy_branch_prime(Branch::Plus, Z) / airy_branch(Branch::Plus, Z);
  return d.imag() * (2.0 / 3.0) / std::cbrt(u) + 4.0 / 3.0;
}

double reflection_factor(double lambda, double z) {
  return 1.0 - 0.75 * phase_B_prime_any(lambda * z * std::sqrt(z));
}

// ---------------------------------------------------------------- scale functions

double psi_a(double a, double tp) {
  double rho = 1.0 + a;
  double th = -tp / (std::sqrt(2.0) * std::sqrt(rho + std::sqrt(rho * rho + tp * tp)));
  return -2.0 * th * (rho + th * th) + (2.0 / 3.0) * th * th * th;
}

double psi_a_prime(double a, double tp) {
  double rho = 1.0 + a;
  double th2 = tp * tp / (2.0 * (rho + std::sqrt(rho * rho + tp * tp)));
  return std::sqrt(rho + th2);
}

namespace {

// T' = -2 m sqrt(rho + a m^2), solved for m without cancellation.
double tilde_param(double a, double Tp) {
  double rho = 1.0 + a;
  double m2 = 0.5 * Tp * Tp / (rho + std::sqrt(rho * rho + a * Tp * Tp));
  return Tp > 0.0 ? -std::sqrt(m2) : std::sqrt(m2);
}

}  // namespace

double psi_a_tilde(double a, double Tp) {
  double rho = 1.0 + a;
  double m = tilde_param(a, Tp);
  double s = std::sqrt(rho + a * m * m);
  double m3 = m * m * m;
  return -2.0 * m3 * s / (s + std::sqrt(rho)) + (2.0 / 3.0) * m3;
}

double psi_a_tilde_prime(double a, double Tp) {
  double rho = 1.0 + a;
  double m = tilde_param(a, Tp);
  return m * m / (std::sqrt(rho) + std::sqrt(rho + a * m * m));
}

double gamma_a(double a, double z) { return (z - 1.0) / (std::sqrt(1.0 + a) + std::sqrt(1.0 + a * z)); }

double varphi(double a, int N, double lambda, double T, double X, double Tp, double sigma, double z) {
  double z32 = z * std::sqrt(z);
  double refl = N == 0 ? 0.0 : N * (-(4.0 / 3.0) * z32 + phase_B_any(lambda * z32) / lambda);
  return gamma_a(a, z) * (T - Tp) + psi_a_tilde(a, Tp) + sigma * (X - z) + sigma * sigma * sigma / 3.0 + refl;
}

std::array<double, 3> varphi_gradient(double a, int N, double lambda, double T, double X, double Tp, double sigma,
                                      double z) {
  double rho = 1.0 + a;
  double sz = std::sqrt(1.0 + a * z);
  double d_tp = psi_a_tilde_prime(a, Tp) + (1.0 - z) / (std::sqrt(rho) + sz);
  double d_sigma = X - z + sigma * sigma;
  double alpha = N == 0 ? 1.0 : reflection_factor(lambda, z);
  double d_z = (T - Tp - 2.0 * sigma * sz - 4.0 * N * std::sqrt(z) * sz * alpha) / (2.0 * sz);
  return {d_tp, d_sigma, d_z};
}

double phi_hbar(double a, int N, double hbar, double t, double x, double tp, double s, double zeta) {
  double w = zeta * zeta - 1.0;
  double w32 = w * std::sqrt(w);
  double refl = N == 0 ? 0.0 : -(4.0 / 3.0) * N * w32 + hbar * N * phase_B_any(w32 / hbar);
  return t * zeta + s * (x + 1.0 - zeta * zeta) + s * s * s / 3.0 - tp * zeta + psi_a(a, tp) + refl;
}

double Phi_N_eps(double a, int N, double lambda, double T, double X, double z, int e1, int e2) {
  double z32 = z * std::sqrt(z);
  return gamma_a(a, z) * T + (2.0 / 3.0) * e1 * std::pow(z - 1.0, 1.5) + (2.0 / 3.0) * e2 * std::pow(z - X, 1.5) -
         N * ((4.0 / 3.0) * z32 - phase_B_any(lambda * z32) / lambda);
}

ScaleFunctions scale_functions(double Tt, double a, int N, double Tp, double sigma) {
  ScaleFunctions s;
  s.F0 = 2.0 * Tt * Tt / (1.0 + std::sqrt(1.0 + 4.0 * a * Tt * Tt));
  double c = 1.0 + a * s.F0;
  s.G0 = 1.0 / (std::sqrt(s.F0) * std::sqrt(c) * (1.0 / s.F0 + a / c));
  s.H0 = (1.0 - s.F0) / (std::sqrt(1.0 + a) + std::sqrt(c));
  s.F1 = -(s.G0 / N) * (0.5 * Tp + sigma * std::sqrt(c));
  return s;
}

double psi_aNlambda(double a, int N, double Tt, double X, double Tp, double sigma) {
  ScaleFunctions s = scale_functions(Tt, a, N, Tp, sigma);
  double c = std::sqrt(1.0 + a * s.F0);
  double q = sigma * c + 0.5 * Tp;
  double r = 0.5 * Tp + sigma;
  return (X - s.F0) * sigma + sigma * sigma * sigma / 3.0 + s.H0 * Tp + psi_a_tilde(a, Tp) +
         s.G0 / (2.0 * N * c) * q * q - r * r * r / (12.0 * N * N);
}

double G_a(double a, int N, double Tt, double p, double q, double x, double y) {
  ScaleFunctions s = scale_functions(Tt, a, N, 0.0, 0.0);
  double c = std::sqrt(1.0 + a * s.F0);
  double l = y * c + x;
  double n3 = static_cast<double>(N) * N * N;
  return p * y - y * y * y / 3.0 + q * x + n3 * psi_a_tilde(a, -2.0 * x / N) + s.G0 / (2.0 * c) * l * l +
         (x + y) * (x + y) * (x + y) / (12.0 * N * N);
}

double hessian_formula(double a, int N, double Tt, double x, double y) {
  ScaleFunctions s = scale_functions(Tt, a, N, 0.0, 0.0);
  return -2.0 * s.G0 * (x + y) + 4.0 * x * y - (x + y) * (x + y) / (static_cast<double>(N) * N);
}

// ---------------------------------------------------------------- Lagrangian

namespace {

template <class V>
V h1_t(double a, V mu) {
  double rho = 1.0 + a;
  V s = std::sqrt(rho + a * mu * mu);
  return s / (std::sqrt(rho) + s);
}

// H2 / sqrt(1 + mu^2)
template <class V>
V k2_t(double a, V mu) {
  double rho = 1.0 + a;
  V m2 = mu * mu;
  V num = 2.0 / 3.0 + 5.0 * a / 9.0 + m2 * (-1.0 / 3.0 + a / 9.0) - (4.0 / 9.0) * a * m2 * m2;
  V den = std::sqrt(rho) * std::sqrt(rho + a * m2) + 1.0 + (2.0 / 3.0) * a * (1.0 + m2);
  return num / den;
}

template <class V>
void b_coeffs(double X, double T, double a, V mu, V& B0, V& B1, V& w) {
  double rho = 1.0 + a;
  V h1 = h1_t(a, mu), k2 = k2_t(a, mu);
  V m3 = mu * mu * mu;
  B0 = 2.0 * m3 * h1 - (2.0 / 3.0) * m3 + 2.0 * k2 * (T / (2.0 * std::sqrt(rho + a * mu * mu)) + mu);
  B1 = -2.0 * mu * mu * h1 - 2.0 * k2;
  w = 1.0 + mu * mu - X;
}

}  // namespace

double H1(double a, double mu) { return h1_t(a, mu); }
double H2(double a, double mu) { return std::sqrt(1.0 + mu * mu) * k2_t(a, mu); }

LagrangianPoint lagrangian_point(double a, int N, double h, double eta, double sigma, double mu,
                                 const CutoffSuite& cut) {
  if (a * mu * mu > cut.eps0) throw Error(ErrorKind::DomainViolation, "a mu^2 exceeds eps0");
  if (N < 0) throw Error(ErrorKind::PreconditionViolated, "N must be >= 0");
  LagrangianPoint p;
  p.sigma = sigma;
  p.mu = mu;
  p.eta = eta;
  p.N = N;
  p.z = 1.0 + mu * mu;
  double rho = 1.0 + a;
  double lambda = a * std::sqrt(a) * eta / h;
  double al = N == 0 ? 1.0 : reflection_factor(lambda, p.z);
  p.X = 1.0 + mu * mu - sigma * sigma;
  p.Y = 2.0 * mu * mu * (mu - sigma) * H1(a, mu) + (2.0 / 3.0) * (sigma * sigma * sigma - mu * mu * mu) +
        4.0 * N * al * H2(a, mu);
  p.T = 2.0 * std::sqrt(rho + a * mu * mu) * (sigma - mu + 2.0 * N * std::sqrt(1.0 + mu * mu) * al);
  p.xi = eta * std::sqrt(a) * sigma;
  p.tau = eta * std::sqrt(1.0 + a * p.z);
  return p;
}

const char* root_regime_name(RootRegime r) {
  switch (r) {
    case RootRegime::LargeR: return "LargeR";
    case RootRegime::MediumR: return "MediumR";
    case RootRegime::SmallRT: return "SmallRT";
  }
  return "?";
}

cplx mu_equation(double X, double Y, double T, double a, cplx mu) {
  cplx B0, B1, w;
  b_coeffs(X, T, a, mu, B0, B1, w);
  cplx l = Y - B0, r = B1 + (2.0 / 3.0) * w;
  return l * l - w * r * r;
}

std::array<double, 4> mu_quartic(double X, double Y, double T) {
  double A = T / 6.0, Bc = -2.0 / 3.0, C = Y - T / 3.0, K = 4.0 * X * X / 9.0;
  double lead = A * A;
  return {(C * C - K * (1.0 - X)) / lead, 2.0 * Bc * C / lead, (Bc * Bc + 2.0 * A * C - K) / lead,
          2.0 * A * Bc / lead};
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& c) {
  int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {};
  auto eval = [&](cplx z, cplx& dp) {
    cplx p = c[n];
    dp = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      dp = dp * z + p;
      p = p * z + c[i];
    }
    return p;
  };
  // Aberth iteration from points on a circle of the Cauchy bound radius.
  double bound = 0.0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(c[i] / c[n]));
  bound = 1.0 + bound;
  std::vector<cplx> z(n);
  for (int i = 0; i < n; ++i) z[i] = std::polar(0.5 * bound, 2.0 * kPi * (i + 0.25) / n);
  for (int it = 0; it < 500; ++it) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx dp;
      cplx p = eval(z[i], dp);
      if (p == 0.0) continue;
      cplx ratio = p / dp;
      cplx s = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      cplx step = ratio / (1.0 - ratio * s);
      z[i] -= step;
      moved = std::max(moved, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    if (moved < 1e-15) break;
  }
  return z;
}

namespace {

cplx newton_mu(double X, double Y, double T, double a, cplx mu, bool& ok) {
  ok = false;
  for (int it = 0; it < 60; ++it) {
    double d = 1e-6 * (1.0 + std::abs(mu));
    cplx f = mu_equation(X, Y, T, a, mu);
    cplx df = (mu_equation(X, Y, T, a, mu + d) - mu_equation(X, Y, T, a, mu - d)) / (2.0 * d);
    if (df == 0.0) return mu;
    cplx step = f / df;
    mu -= step;
    if (!(std::abs(mu) < 1e8)) return mu;
    if (std::abs(step) <= 1e-13 * (1.0 + std::abs(mu))) {
      ok = true;
      return mu;
    }
  }
  // Multiple roots converge only linearly; accept a small final residual.
  ok = std::abs(mu_equation(X, Y, T, a, mu)) <= 1e-10 * (1.0 + std::pow(std::abs(mu), 6.0) + Y * Y + T * T);
  return mu;
}

// Simultaneous (Aberth) correction of all roots at parameter a. The mutual repulsion keeps tracked roots
// apart, so a real pair that meets leaves the axis instead of collapsing onto one root. Roots far outside
// the chart are carried along but do not count towards convergence.
bool aberth_mu(double X, double Y, double T, double a, std::vector<cplx>& z, double far2) {
  const std::size_t n = z.size();
  // Real iterates stay real; nudge them off the axis with alternating signs along the real order, so
  // neighbours that are about to meet move apart into the complex plane.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return z[i].real() < z[j].real(); });
  for (std::size_t r = 0; r < n; ++r) {
    cplx& v = z[order[r]];
    if (std::abs(v.imag()) < 1e-9) v += cplx(0.0, (r % 2 ? 1e-7 : -1e-7) * (1.0 + std::abs(v)));
  }
  for (int it = 0; it < 200; ++it) {
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = 1e-6 * (1.0 + std::abs(z[i]));
      cplx f = mu_equation(X, Y, T, a, z[i]);
      cplx df = (mu_equation(X, Y, T, a, z[i] + d) - mu_equation(X, Y, T, a, z[i] - d)) / (2.0 * d);
      if (f == 0.0 || df == 0.0) continue;
      cplx ratio = f / df, rep = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) rep += 1.0 / (z[i] - z[j]);
      cplx step = ratio / (1.0 - ratio * rep);
      z[i] -= step;
      if (!std::isfinite(std::abs(z[i]))) return false;
      if (a * std::norm(z[i]) <= far2) moved = std::max(moved, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    if (moved < 1e-14) return true;
  }
  // Near a double root the iteration is only linear; accept a small residual there.
  for (cplx r : z)
    if (a * std::norm(r) <= far2 &&
        !(std::abs(mu_equation(X, Y, T, a, r)) <= 1e-10 * (1.0 + std::pow(std::abs(r), 6.0) + Y * Y + T * T)))
      return false;
  return true;
}

bool continue_mu(double X, double Y, double T, double a0, double a1, std::vector<cplx>& z, double far2, int depth) {
  std::vector<cplx> trial = z;
  if (aberth_mu(X, Y, T, a1, trial, far2)) {
    z = trial;
    return true;
  }
  if (depth >= 12) return false;
  double am = 0.5 * (a0 + a1);
  return continue_mu(X, Y, T, a0, am, z, far2, depth + 1) && continue_mu(X, Y, T, am, a1, z, far2, depth + 1);
}

}  // namespace

RootSet mu_roots(double X, double Y, double T, double a, const CutoffSuite& cut) {
  if (!(T > 0.0)) throw Error(ErrorKind::PreconditionViolated, "mu_roots needs T > 0");
  auto q = mu_quartic(X, Y, T);
  std::vector<cplx> roots = polynomial_roots({q[0], q[1], q[2], q[3], 1.0});
  for (auto& r : roots) {
    bool ok;
    r = newton_mu(X, Y, T, 0.0, r, ok);
  }
  if (a > 0.0) {
    const int stages = 8;
    const double far2 = 4.0 * cut.eps0;
    for (int s = 1; s <= stages; ++s)
      if (!continue_mu(X, Y, T, a * (s - 1) / stages, a * s / stages, roots, far2, 0))
        throw Error(ErrorKind::RootTrackingFailure, "root continuation in a did not converge");
    std::vector<cplx> kept;
    for (cplx r : roots)
      if (a * std::norm(r) <= far2) kept.push_back(r);
    roots = kept;
  }
  std::sort(roots.begin(), roots.end(), [](cplx u, cplx v) {
    return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
  });
  RootSet rs;
  rs.mu = roots;
  rs.R = 2.0 * (1.0 - 3.0 * Y / T);
  if (std::abs(rs.R) >= cut.R0)
    rs.regime = RootRegime::LargeR;
  else if (std::abs(rs.R) * T >= cut.M0)
    rs.regime = RootRegime::MediumR;
  else
    rs.regime = RootRegime::SmallRT;
  return rs;
}

double sigma_on_root(double X, double Y, double T, double a, double mu) {
  double B0, B1, w;
  b_coeffs(X, T, a, mu, B0, B1, w);
  double s = std::sqrt(std::max(w, 0.0));
  double rp = std::abs(Y - B0 - s * (B1 + (2.0 / 3.0) * w));
  double rm = std::abs(Y - B0 + s * (B1 + (2.0 / 3.0) * w));
  return rp <= rm ? s : -s;
}

double reflection_index(double X, double T, double a, double lambda, double mu, double sigma) {
  (void)X;
  double rho = 1.0 + a;
  double two_n_alpha = (T / (2.0 * std::sqrt(rho + a * mu * mu)) - sigma + mu) / std::sqrt(1.0 + mu * mu);
  return two_n_alpha / (2.0 * reflection_factor(lambda, 1.0 + mu * mu));
}

OverlapResult overlap_count(double X, double Y, double T, double a, double h, const CutoffSuite& cut) {
  OverlapResult out;
  out.window_hi = 0.5 * T + cut.N0;
  if (!(T > 0.0)) return out;
  double lambda = a * std::sqrt(a) / h;
  int n_cap = static_cast<int>(std::floor(cut.C0 / std::sqrt(a)));
  std::set<int> members;
  for (cplx r : mu_roots(X, Y, T, a, cut).mu) {
    if (std::abs(r.imag()) > 1e-6 * (1.0 + std::abs(r.real()))) continue;
    double mu = r.real();
    if (a * mu * mu > cut.eps0) continue;
    if (1.0 + mu * mu - X < -1e-12) continue;
    double sg = sigma_on_root(X, Y, T, a, mu);
    long n = std::lround(reflection_index(X, T, a, lambda, mu, sg));
    if (n >= 1 && n <= n_cap) members.insert(static_cast<int>(n));
  }
  out.members.assign(members.begin(), members.end());
  return out;
}

SwallowtailLocation swallowtail_condition(double a, int N) {
  if (N < 1) throw Error(ErrorKind::PreconditionViolated, "swallowtail needs N >= 1");
  SwallowtailLocation s;
  s.X = 1.0;
  s.T = 4.0 * N * std::sqrt(1.0 + a);
  s.x = a;
  s.t = 4.0 * N * std::sqrt(a * (1.0 + a));
  return s;
}

// ---------------------------------------------------------------- fields

ParametrixParams make_parametrix_params(double h, double a) {
  ParametrixParams p;
  p.h = h;
  p.a = a;
  return p;
}

void validate(const ParametrixParams& p) {
  p.cut.validate();
  if (!(p.h > 0.0 && p.h < 1.0)) throw Error(ErrorKind::ConfigError, "h must lie in (0, 1)");
  if (!(p.a > 0.0)) throw Error(ErrorKind::ConfigError, "a must be positive");
  if (p.check_hypothesis && (p.a > p.cut.a0 || p.a < std::pow(p.h, 4.0 / 7.0) * (1.0 - 1e-12)))
    throw Error(ErrorKind::RegimeViolation, "parametrix needs h^{4/7} <= a <= a0");
  if (!(p.nodes_per_radian > 0.0)) throw Error(ErrorKind::ConfigError, "nodes_per_radian must be positive");
}

int reflection_budget(const ParametrixParams& p) {
  return p.n_max >= 0 ? p.n_max : static_cast<int>(std::floor(p.cut.C0 / std::sqrt(p.a)));
}

double zeta_window(const CutoffSuite& cut, double a, double zeta) {
  double c3 = cut.chi3(zeta);
  if (c3 == 0.0) return 0.0;
  return c3 * cut.chi2((zeta * zeta - 1.0) / a);
}

ModelParams matched_spectral_params(const ParametrixParams& p) {
  ModelParams m = make_params(p.h, p.a);
  m.window = p.window;
  CutoffSuite cut = p.cut;
  double a = p.a;
  m.window.zeta_cut = [cut, a](double zeta) { return zeta_window(cut, a, zeta); };
  m.propagator_sign = -1;
  // Modes with zeta_k <= zeta1 somewhere on the eta window.
  double zmax = cut.zeta1 * cut.zeta1 - 1.0;
  double wmax = zmax * std::pow(p.window.psi1.hi / p.h, 2.0 / 3.0);
  int k = 1;
  while (shared_zero_table(k + 1).omega(k + 1) <= wmax) ++k;
  m.trunc.k_min = 1;
  m.trunc.k_max = k + 1;
  return m;
}

cplx reflection_ratio(double Z) {
  cplx ap = airy_branch(Branch::Plus, cplx(Z, 0.0));
  return -std::conj(ap) / ap;
}

cplx reflection_power_B(double zeta, double hbar, int N) {
  double w = zeta * zeta - 1.0;
  double u = w * std::sqrt(w) / hbar;
  double ph = N * (-(4.0 / 3.0) * u + phase_B_any(u)) - N * kPi / 2.0;
  return std::polar(1.0, ph);
}

cplx reflection_power_airy(double zeta, double hbar, int N) {
  cplx q = reflection_ratio(std::pow(hbar, -2.0 / 3.0) * (zeta * zeta - 1.0));
  cplx r = 1.0;
  for (int i = 0; i < std::abs(N); ++i) r *= q;
  return N >= 0 ? r : 1.0 / r;
}

double reflection_identity_error(double hbar, int N, const CutoffSuite& cut, double a, int samples) {
  double lo = std::sqrt(1.0 + 0.5 * a * cut.beta), hi = cut.zeta1;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    double zeta = lo + (hi - lo) * (i + 0.5) / samples;
    worst = std::max(worst, std::abs(reflection_power_B(zeta, hbar, N) - reflection_power_airy(zeta, hbar, N)));
  }
  return worst;
}

namespace {

struct ZetaGrid {
  double z0 = 0.0, dz = 0.0;
  int n = 0;
  double at(int j) const { return z0 + dz * j; }
};

// Uniform grid over the zeta support at this eta, fine enough for the fastest phase.
ZetaGrid zeta_grid(const ParametrixParams& p, double eta, double t, int n_abs) {
  const auto& c = p.cut;
  double hbar = p.h / eta;
  double lo = std::sqrt(1.0 + 0.5 * p.a * c.beta), hi = c.zeta1;
  double env = std::min({0.25 * p.a * c.beta, c.zeta1 - c.zeta0});
  if (p.data == DataModel::ExactAiry) {
    lo = std::max(lo, p.window.psi2.lo / eta);
    hi = std::min(hi, p.window.psi2.hi / eta);
    env = std::min(env, (p.window.psi2.plo - p.window.psi2.lo) / eta);
  }
  ZetaGrid g;
  if (!(hi > lo)) return g;
  double gmax = hi * std::sqrt(hi * hi - 1.0);
  double rate = (std::abs(t) + 4.0 * n_abs * gmax + 4.0 * gmax + c.theta0) / hbar + 60.0 / env;
  g.n = static_cast<int>(std::ceil((hi - lo) * rate * p.nodes_per_radian)) + 16;
  g.dz = (hi - lo) / (g.n + 1);
  g.z0 = lo + g.dz;
  return g;
}

// g0^(zeta/hbar) = int e^{i(psi_a(t') - t' zeta)/hbar} sigma_0(t') dt' on a uniform zeta grid.
std::vector<cplx> bump_data(const ParametrixParams& p, double hbar, const ZetaGrid& g) {
  const auto& c = p.cut;
  double th = c.theta0;
  double rho = 1.0 + p.a;
  double span = std::abs(g.at(g.n - 1) - std::sqrt(rho)) + std::abs(psi_a_prime(p.a, th) - g.z0);
  double rate = span / hbar + 60.0 / (0.5 * th);
  int m = static_cast<int>(std::ceil(2.0 * th * rate * p.nodes_per_radian)) + 64;
  double dt = 2.0 * th / (m + 1);
  std::vector<cplx> out(g.n, 0.0);
  for (int i = 1; i <= m; ++i) {
    double tp = -th + dt * i;
    double s0 = c.chi1(tp);
    if (s0 == 0.0) continue;
    cplx base = dt * s0 * std::exp(kI * ((psi_a(p.a, tp) - tp * g.z0) / hbar));
    cplx step = std::exp(-kI * (tp * g.dz / hbar));
    cplx ph = base;
    for (int j = 0; j < g.n; ++j) {
      if (j % 64 == 0) ph = base * std::exp(-kI * (tp * g.dz * j / hbar));
      out[j] += ph;
      ph *= step;
    }
  }
  return out;
}

// Geometric sum of q^N for N in [lo, hi], |q| = 1.
cplx geometric(cplx q, int lo, int hi) {
  if (hi < lo) return 0.0;
  double th = std::arg(q);
  if (std::abs(1.0 - q) < 1e-7) {
    CompensatedSum s;
    for (int n = lo; n <= hi; ++n) s.add(std::polar(1.0, n * th));
    return s.value();
  }
  return (std::polar(1.0, lo * th) - std::polar(1.0, (hi + 1) * th)) / (1.0 - q);
}

// Values of sum_{N} u_N(t, x; h/eta) for each x in xs.
std::vector<cplx> eta_column(const ParametrixParams& p, double eta, double t, const std::vector<double>& xs, int n_lo,
                             int n_hi) {
  std::vector<cplx> out(xs.size(), 0.0);
  double hbar = p.h / eta;
  int n_abs = std::max(std::abs(n_lo), std::abs(n_hi) + 1);
  ZetaGrid g = zeta_grid(p, eta, t, n_abs);
  if (g.n == 0) return out;
  double s23 = std::pow(hbar, -2.0 / 3.0);
  std::vector<cplx> data;
  if (p.data == DataModel::BumpSymbol) data = bump_data(p, hbar, g);
  std::vector<double> acc_re(xs.size(), 0.0), acc_im(xs.size(), 0.0);
  for (int j = 0; j < g.n; ++j) {
    double zeta = g.at(j);
    double w = zeta_window(p.cut, p.a, zeta);
    if (w == 0.0) continue;
    double Z = s23 * (zeta * zeta - 1.0);
    cplx d;
    if (p.data == DataModel::ExactAiry) {
      w *= p.window.psi2(eta * zeta);
      if (w == 0.0) continue;
      d = s23 * 2.0 * zeta * airy_ai(s23 * (p.a + 1.0 - zeta * zeta));
    } else {
      d = data[j];
    }
    cplx c = g.dz * s23 * w * d * geometric(reflection_ratio(Z), n_lo, n_hi) * std::exp(kI * (t * zeta / hbar));
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      double ai = airy_ai(s23 * (xs[ix] + 1.0 - zeta * zeta));
      acc_re[ix] += c.real() * ai;
      acc_im[ix] += c.imag() * ai;
    }
  }
  for (std::size_t ix = 0; ix < xs.size(); ++ix) out[ix] = {acc_re[ix], acc_im[ix]};
  return out;
}

}  // namespace

cplx wave_u_range(const ParametrixParams& p, double eta, double t, double x, int n_lo, int n_hi) {
  return eta_column(p, eta, t, {x}, n_lo, n_hi)[0];
}

cplx wave_uN(const ParametrixParams& p, int N, double eta, double t, double x) {
  return wave_u_range(p, eta, t, x, N, N);
}

cplx wave_wN(const ParametrixParams& p, int N, double eta, double T, double X) {
  double t = std::sqrt(p.a) * T, x = p.a * X;
  double hbar = p.h / eta;
  return std::sqrt(p.a) * std::exp(-kI * (t * std::sqrt(1.0 + p.a) / hbar)) * wave_uN(p, N, eta, t, x);
}

FieldSlice parametrix_slice(const ParametrixParams& p, double t, const std::vector<double>& xs, const YGrid& ys,
                            int n_lo, int n_hi) {
  validate(p);
  FieldSlice out;
  out.t = t;
  out.xs = xs;
  out.ys = ys;
  out.values.assign(xs.size() * ys.ny, 0.0);
  double lo, hi;
  if (p.data == DataModel::ExactAiry) {
    lo = p.window.psi1.lo;
    hi = p.window.psi1.hi;
  } else {
    lo = p.cut.chi0.lo;
    hi = p.cut.chi0.hi;
  }
  double yext = std::max(std::abs(ys.y0), std::abs(ys.at(ys.ny - 1)));
  int m = p.eta_nodes > 0
              ? p.eta_nodes
              : static_cast<int>(std::ceil(2.0 * (hi - lo) * (std::abs(t) * p.cut.zeta1 + 3.0 + yext) /
                                           (2.0 * kPi * p.h))) + 32;
  double de = (hi - lo) / (m + 1);
  std::vector<std::vector<cplx>> cols(m);
  std::vector<double> wts(m, 0.0);
  parallel_for(m, p.threads, [&](std::size_t j) {
    double eta = lo + de * (j + 1);
    double w = p.data == DataModel::ExactAiry ? p.window.amplitude * p.window.psi1(eta) / (2.0 * kPi * p.h)
                                              : eta * p.cut.chi0(eta) / std::pow(2.0 * kPi * p.h, 2.0);
    wts[j] = w * de;
    if (w != 0.0) cols[j] = eta_column(p, eta, t, xs, n_lo, n_hi);
  });
  // Direct transform onto the y grid, re-anchoring the phasor every 64 rows.
  for (int j = 0; j < m; ++j) {
    if (cols[j].empty()) continue;
    double eta = lo + de * (j + 1);
    cplx base = std::exp(kI * (ys.y0 * eta / p.h));
    cplx step = std::exp(kI * (ys.dy * eta / p.h));
    cplx ph = base;
    for (int iy = 0; iy < ys.ny; ++iy) {
      if (iy % 64 == 0) ph = std::exp(kI * (ys.at(iy) * eta / p.h));
      cplx f = wts[j] * ph;
      for (std::size_t ix = 0; ix < xs.size(); ++ix) out.values[ix * ys.ny + iy] += f * cols[j][ix];
      ph *= step;
    }
  }
  return out;
}

cplx parametrix_sum(const ParametrixParams& p, double t, double x, double y) {
  YGrid g;
  g.y0 = y;
  g.dy = 1.0;
  g.ny = 1;
  return parametrix_slice(p, t, {x}, g, p.n_min, reflection_budget(p)).values[0];
}

BoundaryReport parametrix_boundary_check(const ParametrixParams& p, const std::vector<double>& t_grid,
                                         const std::vector<double>& xs, const YGrid& ys) {
  BoundaryReport r;
  std::vector<double> rows{0.0};
  for (double x : xs)
    if (x > 0.0) rows.push_back(x);
  auto ratio = [&](double t, int n_lo, int n_hi) {
    FieldSlice s = parametrix_slice(p, t, rows, ys, n_lo, n_hi);
    double trace = 0.0;
    for (int iy = 0; iy < ys.ny; ++iy) trace = std::max(trace, std::abs(s.at(0, iy)));
    double sup = s.max_abs();
    return sup > 0.0 ? trace / sup : 0.0;
  };
  for (double t : t_grid) {
    r.t.push_back(t);
    r.ratio_full.push_back(ratio(t, p.n_min, reflection_budget(p)));
    r.ratio_single.push_back(ratio(t, 0, 0));
    r.max_full = std::max(r.max_full, r.ratio_full.back());
    r.max_single = std::max(r.max_single, r.ratio_single.back());
  }
  r.pass = r.max_full <= p.h * p.h;
  return r;
}

}  // namespace fw
