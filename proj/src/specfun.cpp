#include "fw/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fw/quad.hpp"

namespace fw {

namespace {

constexpr double kAi0 = 0.355028053887817239260063186004;
constexpr double kAip0 = -0.258819403792806798405183560189;
constexpr double kSqrtPi = 1.77245385090551602729816748334;
constexpr double kStep = 0.5;

double mag(double x) { return std::abs(x); }
double mag(cplx x) { return std::abs(x); }

// Coefficients u_k, v_k of the large-argument expansions.
struct AsymCoeffs {
  std::vector<double> u, v;
  AsymCoeffs() {
    const int n = 60;
    u.resize(n);
    v.resize(n);
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < n; ++k) {
      double kk = k;
      u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216.0 * kk);
      v[k] = -(6 * kk + 1) / (6 * kk - 1) * u[k];
    }
  }
};
const AsymCoeffs& coeffs() {
  static const AsymCoeffs c;
  return c;
}

template <class T>
void series_pair(T z, T& ai, T& aip) {
  T z3 = z * z * z;
  T f = 1.0, g = z, fp = z * z / 2.0, gp = 1.0;
  T tf = 1.0, tg = z, tfp = z * z / 2.0, tgp = 1.0;
  for (int k = 1; k < 400; ++k) {
    double kk = k;
    tf *= z3 / ((3 * kk - 1) * (3 * kk));
    tg *= z3 / ((3 * kk) * (3 * kk + 1));
    tgp *= z3 / ((3 * kk) * (3 * kk - 2));
    f += tf;
    g += tg;
    gp += tgp;
    if (k >= 2) {
      tfp *= z3 / ((3 * kk - 1) * (3 * kk - 3));
      fp += tfp;
    }
    double scale = mag(f) + mag(g) + mag(fp) + mag(gp);
    if (k > 3 && mag(tf) + mag(tg) + mag(tfp) + mag(tgp) < 1e-18 * scale) break;
  }
  ai = kAi0 * f + kAip0 * g;
  aip = kAi0 * fp + kAip0 * gp;
}

// Ai(z), Ai'(z) for |arg z| < pi from the exp(-zeta) expansion.
template <class T>
void asym_pair(T z, T& ai, T& aip) {
  const auto& c = coeffs();
  T sz = std::sqrt(z);
  T zeta = (2.0 / 3.0) * z * sz;
  T z14 = std::sqrt(sz);
  T inv = 1.0 / zeta;
  T su = 1.0, sv = 1.0, p = 1.0;
  double last = 1e300;
  for (std::size_t k = 1; k < c.u.size(); ++k) {
    p *= -inv;
    T tu = c.u[k] * p, tv = c.v[k] * p;
    double m = mag(tu) + mag(tv);
    if (m > last) break;
    su += tu;
    sv += tv;
    last = m;
    if (m < 1e-18) break;
  }
  T e = std::exp(-zeta);
  ai = e / (2.0 * kSqrtPi * z14) * su;
  aip = -z14 * e / (2.0 * kSqrtPi) * sv;
}

// Ai(-x), Ai'(-x) for large positive x.
void asym_neg_pair(double x, double& ai, double& aip) {
  const auto& c = coeffs();
  double sx = std::sqrt(x);
  double zeta = (2.0 / 3.0) * x * sx;
  double x14 = std::sqrt(sx);
  double inv = 1.0 / zeta;
  double P = 0, Q = 0, R = 0, S = 0;
  double p = 1.0;
  double last = 1e300;
  for (std::size_t k = 0; k + 1 < c.u.size(); k += 2) {
    double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    double p0 = p, p1 = p * inv;
    double t = std::abs(c.u[k] * p0) + std::abs(c.u[k + 1] * p1) + std::abs(c.v[k] * p0) +
               std::abs(c.v[k + 1] * p1);
    if (t > last) break;
    P += sgn * c.u[k] * p0;
    Q += sgn * c.u[k + 1] * p1;
    R += sgn * c.v[k] * p0;
    S += sgn * c.v[k + 1] * p1;
    last = t;
    if (t < 1e-18) break;
    p = p1 * inv;
  }
  double th = zeta - kPi / 4.0;
  double cs = std::cos(th), sn = std::sin(th);
  ai = (cs * P + sn * Q) / (kSqrtPi * x14);
  aip = x14 * (sn * R - cs * S) / kSqrtPi;
}

// Taylor continuation of a solution of y'' = z y from z0 to z0 + dz.
template <class T>
void taylor_step(T z0, T dz, T& y, T& yp) {
  // Coefficients obey c_{n+2} = (z0 c_n + c_{n-1}) / ((n+2)(n+1)).
  T c2 = z0 * y / 2.0;
  T ysum = y + yp * dz + c2 * dz * dz;
  T ypsum = yp + 2.0 * c2 * dz;
  T cn_1 = y, cn = yp, cn1 = c2;
  T pwn = dz * dz;  // dz^{n+1}
  int quiet = 0;
  for (int n = 1; n < 400; ++n) {
    T cnext = (z0 * cn + cn_1) / ((n + 2.0) * (n + 1.0));
    T pwprev = pwn;
    pwn *= dz;
    T ty = cnext * pwn;
    T typ = (n + 2.0) * cnext * pwprev;
    ysum += ty;
    ypsum += typ;
    cn_1 = cn;
    cn = cn1;
    cn1 = cnext;
    if (mag(ty) < 1e-18 * mag(ysum) && mag(typ) < 1e-18 * mag(ypsum)) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  y = ysum;
  yp = ypsum;
}

// March along the ray from radius r0 (values y, yp there) to radius r1.
template <class T>
void march(T dir, double r0, double r1, T& y, T& yp) {
  double span = r1 - r0;
  int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / kStep)));
  double h = span / n;
  for (int i = 0; i < n; ++i) {
    T z0 = dir * (r0 + h * i);
    taylor_step(z0, dir * h, y, yp);
  }
}

void check_growth(cplx z, const AiryOptions& opt) {
  double r = std::abs(z);
  if (r <= AiryRegions::asymptotic_radius) return;
  cplx zeta = (2.0 / 3.0) * z * std::sqrt(z);
  // exp(-zeta) with |arg z| > 2pi/3 is reached via the connection formula,
  // whose growth is governed by the same real part.
  double re = std::abs(std::arg(z)) > 2.0 * kPi / 3.0 ? -std::abs(zeta.real()) : zeta.real();
  if ((r > opt.z_max && re < 0.0) || re < -700.0)
    throw Error(ErrorKind::OverflowGuard, "Ai argument too large on the growing side");
}

void complex_pair(cplx z, cplx& ai, cplx& aip, const AiryOptions& opt) {
  double r = std::abs(z);
  check_growth(z, opt);
  if (r <= AiryRegions::inner_series_radius) {
    series_pair(z, ai, aip);
    return;
  }
  double ang = std::arg(z);
  cplx dir = z / r;
  if (std::abs(ang) <= kPi / 3.0) {
    if (r >= AiryRegions::asymptotic_radius) {
      asym_pair(z, ai, aip);
      return;
    }
    cplx z9 = dir * AiryRegions::asymptotic_radius;
    asym_pair(z9, ai, aip);
    march(dir, AiryRegions::asymptotic_radius, r, ai, aip);
    return;
  }
  if (r <= AiryRegions::series_radius) {
    series_pair(z, ai, aip);
    return;
  }
  if (r >= AiryRegions::asymptotic_radius) {
    if (std::abs(ang) <= 2.0 * kPi / 3.0) {
      asym_pair(z, ai, aip);
      return;
    }
    // Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z) with w chosen so both rotated
    // arguments land in |arg| <= 2pi/3.
    cplx w = ang > 0 ? std::polar(1.0, 2.0 * kPi / 3.0) : std::polar(1.0, -2.0 * kPi / 3.0);
    cplx w2 = w * w;
    cplx a1, d1, a2, d2;
    asym_pair(w * z, a1, d1);
    asym_pair(w2 * z, a2, d2);
    ai = -w * a1 - w2 * a2;
    aip = -w2 * d1 - w2 * w2 * d2;
    return;
  }
  cplx z5 = dir * AiryRegions::series_radius;
  series_pair(z5, ai, aip);
  march(dir, AiryRegions::series_radius, r, ai, aip);
}

void real_pair(double x, double& ai, double& aip, const AiryOptions& opt) {
  if (x >= 0.0) {
    if (x <= AiryRegions::inner_series_radius) {
      series_pair(x, ai, aip);
    } else if (x >= AiryRegions::asymptotic_radius) {
      if (x > 1e5) {
        ai = 0.0;
        aip = 0.0;
        return;
      }
      asym_pair(x, ai, aip);
    } else {
      asym_pair(AiryRegions::asymptotic_radius, ai, aip);
      march(1.0, AiryRegions::asymptotic_radius, x, ai, aip);
    }
    return;
  }
  double ax = -x;
  if (ax > opt.z_max * 1e4)
    throw Error(ErrorKind::OverflowGuard, "Ai argument too large for phase accuracy");
  if (ax <= AiryRegions::series_radius) {
    series_pair(x, ai, aip);
  } else if (ax >= AiryRegions::asymptotic_radius) {
    asym_neg_pair(ax, ai, aip);
  } else {
    series_pair(-AiryRegions::series_radius, ai, aip);
    march(-1.0, AiryRegions::series_radius, ax, ai, aip);
  }
}

}  // namespace

void airy_pair(double x, double& ai, double& aip, const AiryOptions& opt) { real_pair(x, ai, aip, opt); }

void airy_pair(cplx z, cplx& ai, cplx& aip, const AiryOptions& opt) {
  if (z.imag() == 0.0) {
    double a, d;
    real_pair(z.real(), a, d, opt);
    ai = cplx(a, 0.0);
    aip = cplx(d, 0.0);
    return;
  }
  complex_pair(z, ai, aip, opt);
}

double airy_ai(double x, const AiryOptions& opt) {
  double a, d;
  real_pair(x, a, d, opt);
  return a;
}

double airy_ai_prime(double x, const AiryOptions& opt) {
  double a, d;
  real_pair(x, a, d, opt);
  return d;
}

cplx airy_ai(cplx z, const AiryOptions& opt) {
  cplx a, d;
  airy_pair(z, a, d, opt);
  return a;
}

cplx airy_ai_prime(cplx z, const AiryOptions& opt) {
  cplx a, d;
  airy_pair(z, a, d, opt);
  return d;
}

cplx airy_ai_asymptotic(cplx z) {
  cplx a, d;
  double ang = std::arg(z);
  if (std::abs(ang) <= 2.0 * kPi / 3.0) {
    asym_pair(z, a, d);
    return a;
  }
  cplx w = ang > 0 ? std::polar(1.0, 2.0 * kPi / 3.0) : std::polar(1.0, -2.0 * kPi / 3.0);
  cplx a1, d1, a2, d2;
  asym_pair(w * z, a1, d1);
  asym_pair(w * w * z, a2, d2);
  return -w * a1 - w * w * a2;
}

cplx airy_ai_series(cplx z) {
  cplx a, d;
  series_pair(z, a, d);
  return a;
}

double AiryZeroTable::omega(int k) const {
  if (k < 1 || k > k_max())
    throw Error(ErrorKind::IndexOutOfTable, "zero index " + std::to_string(k) + " outside table");
  return zeros[k - 1];
}

double airy_zero_seed(int k) { return std::pow(3.0 * kPi * (4.0 * k - 1.0) / 8.0, 2.0 / 3.0); }

AiryZeroTable airy_zeros(int k_max) {
  if (k_max < 1) throw Error(ErrorKind::PreconditionViolated, "k_max must be >= 1");
  AiryZeroTable t;
  t.zeros.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) {
    double w = airy_zero_seed(k);
    double ai = 0, aip = 0;
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      airy_pair(-w, ai, aip);
      if (std::abs(ai) < 1e-12) {
        // One polishing step; kept only if it does not worsen the residual.
        double w2 = w + ai / aip;
        double ai2, aip2;
        airy_pair(-w2, ai2, aip2);
        if (std::abs(ai2) <= std::abs(ai)) {
          w = w2;
          ai = ai2;
          aip = aip2;
        }
        ok = true;
        break;
      }
      w += ai / aip;
    }
    if (!ok) throw Error(ErrorKind::ConvergenceFailure, "Newton failed for zero k=" + std::to_string(k));
    if (!t.zeros.empty() && w <= t.zeros.back())
      throw Error(ErrorKind::ConvergenceFailure, "zeros not increasing at k=" + std::to_string(k));
    t.zeros.push_back(w);
    t.residuals.push_back(std::abs(ai));
    t.aip.push_back(aip);
  }
  return t;
}

const AiryZeroTable& shared_zero_table(int k_min_size) {
  static std::mutex mu;
  static AiryZeroTable* table = nullptr;
  std::lock_guard<std::mutex> lock(mu);
  if (!table || table->k_max() < k_min_size) {
    int n = std::max(k_min_size, table ? 2 * table->k_max() : 512);
    auto* fresh = new AiryZeroTable(airy_zeros(n));
    // Old tables stay alive; references handed out earlier remain valid.
    table = fresh;
  }
  return *table;
}

cplx airy_branch(Branch b, cplx z) {
  cplx rot = b == Branch::Plus ? std::polar(1.0, -kPi / 3.0) : std::polar(1.0, kPi / 3.0);
  return rot * airy_ai(rot * z);
}

cplx airy_branch_prime(Branch b, cplx z) {
  cplx rot = b == Branch::Plus ? std::polar(1.0, -kPi / 3.0) : std::polar(1.0, kPi / 3.0);
  return rot * rot * airy_ai_prime(rot * z);
}

namespace {

cplx b_principal(double u) {
  double z = std::pow(u, 2.0 / 3.0);
  cplx ratio = airy_branch(Branch::Minus, z) / airy_branch(Branch::Plus, z);
  cplx r = ratio * cplx(0.0, -1.0) * std::polar(1.0, 4.0 * u / 3.0);
  return cplx(std::arg(r), -std::log(std::abs(r)));
}

}  // namespace

cplx phase_correction_B_complex(double u, const PhaseBOptions& opt) {
  if (!(u >= opt.u_min))
    throw Error(ErrorKind::PreconditionViolated, "B(u) requested below u_min");
  if (u >= opt.u_start) {
    cplx b = b_principal(u);
    if (std::abs(b.real()) > kPi / 2) throw Error(ErrorKind::BranchAmbiguity, "B not small at start point");
    return b;
  }
  cplx prev = b_principal(opt.u_start);
  if (std::abs(prev.real()) > kPi / 2) throw Error(ErrorKind::BranchAmbiguity, "B not small at start point");
  double uc = opt.u_start;
  while (true) {
    double un = uc / opt.ratio;
    if (un < u) un = u;
    cplx b = b_principal(un);
    double m = std::round((prev.real() - b.real()) / (2 * kPi));
    double re = b.real() + 2 * kPi * m;
    if (std::abs(re - prev.real()) > kPi / 2)
      throw Error(ErrorKind::BranchAmbiguity, "phase jump exceeds pi/2 while tracking B");
    prev = cplx(re, b.imag());
    uc = un;
    if (un == u) break;
  }
  return prev;
}

double phase_correction_B(double u, const PhaseBOptions& opt) { return phase_correction_B_complex(u, opt).real(); }

double phase_correction_B_prime(double u, const PhaseBOptions& opt) {
  double d = 1e-3 * u;
  PhaseBOptions o = opt;
  o.u_min = std::min(opt.u_min, u - 2 * d);
  double f2 = phase_correction_B(u + 2 * d, o), f1 = phase_correction_B(u + d, o);
  double m1 = phase_correction_B(u - d, o), m2 = phase_correction_B(u - 2 * d, o);
  return (-f2 + 8 * f1 - 8 * m1 + m2) / (12 * d);
}

PhaseBTable::PhaseBTable(double u_lo, double u_hi, int per_octave) : lo_(u_lo), hi_(u_hi) {
  step_ = std::log(2.0) / per_octave;
  int n = static_cast<int>(std::ceil(std::log(u_hi / u_lo) / step_)) + 1;
  val_.resize(n);
  der_.resize(n);
  double prev = 0.0;
  bool first = true;
  for (int i = n - 1; i >= 0; --i) {
    double u = u_lo * std::exp(step_ * i);
    cplx b = b_principal(u);
    double re = b.real();
    if (!first) {
      double m = std::round((prev - re) / (2 * kPi));
      re += 2 * kPi * m;
    }
    first = false;
    prev = re;
    val_[i] = re;
    // dB/du from the logarithmic derivatives of A_-, A_+.
    double z = std::pow(u, 2.0 / 3.0);
    cplx ap = airy_branch(Branch::Plus, z), am = airy_branch(Branch::Minus, z);
    cplx dp = airy_branch_prime(Branch::Plus, z), dm = airy_branch_prime(Branch::Minus, z);
    double dargdz = (dm / am - dp / ap).imag();
    der_[i] = (2.0 / 3.0) * std::pow(u, -1.0 / 3.0) * dargdz + 4.0 / 3.0;
  }
}

double PhaseBTable::B(double u) const {
  if (u <= lo_ || u >= hi_) return b_principal(u).real();
  double s = std::log(u / lo_) / step_;
  int i = std::min(static_cast<int>(s), static_cast<int>(val_.size()) - 2);
  double t = s - i;
  double u0 = lo_ * std::exp(step_ * i), u1 = lo_ * std::exp(step_ * (i + 1));
  double m0 = der_[i] * u0 * step_, m1 = der_[i + 1] * u1 * step_;
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * val_[i] + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * val_[i + 1] +
         (t3 - t2) * m1;
}

double PhaseBTable::Bprime(double u) const {
  if (u <= lo_ || u >= hi_) {
    double d = 1e-4 * u;
    return (b_principal(u + d).real() - b_principal(u - d).real()) / (2 * d);
  }
  double s = std::log(u / lo_) / step_;
  int i = std::min(static_cast<int>(s), static_cast<int>(val_.size()) - 2);
  double t = s - i;
  double u0 = lo_ * std::exp(step_ * i), u1 = lo_ * std::exp(step_ * (i + 1));
  double m0 = der_[i] * u0 * step_, m1 = der_[i + 1] * u1 * step_;
  double t2 = t * t;
  double dBds = ((6 * t2 - 6 * t) * val_[i] + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * val_[i + 1] +
                 (3 * t2 - 2 * t) * m1) /
                step_;
  return dBds / u;
}

const PhaseBTable& shared_B_table() {
  static const PhaseBTable t(0.01, 2e4, 96);
  return t;
}

std::size_t canonical_degree(CausticKind k) {
  switch (k) {
    case CausticKind::Fold: return 3;
    case CausticKind::Cusp: return 4;
    case CausticKind::Swallowtail: return 5;
  }
  return 3;
}

namespace {

template <class T>
T canon_phase(CausticKind k, const std::vector<double>& z, T s) {
  auto zc = [&](std::size_t i) { return i < z.size() ? z[i] : 0.0; };
  T s2 = s * s, s3 = s2 * s;
  switch (k) {
    case CausticKind::Fold: return s3 / 3.0 + zc(0) * s + zc(1);
    case CausticKind::Cusp: return s2 * s2 / 4.0 + zc(0) * s2 / 2.0 + zc(1) * s + zc(2);
    case CausticKind::Swallowtail:
      return s3 * s2 / 5.0 + zc(0) * s3 / 3.0 + zc(1) * s2 / 2.0 + zc(2) * s + zc(3);
  }
  return s;
}

// Bound on |roots| of the monic derivative polynomial (Cauchy).
double critical_bound(CausticKind k, const std::vector<double>& z) {
  double m = 0.0;
  std::size_t used = canonical_degree(k) - 1;
  for (std::size_t i = 0; i < std::min(used, z.size()); ++i) m = std::max(m, std::abs(z[i]));
  return 1.0 + m;
}

}  // namespace

double canonical_phase(CausticKind k, const std::vector<double>& z, double zeta) { return canon_phase(k, z, zeta); }
cplx canonical_phase(CausticKind k, const std::vector<double>& z, cplx zeta) { return canon_phase(k, z, zeta); }

cplx canonical_integral(CausticKind k, const std::vector<double>& z, double h, const CanonicalOptions& opt) {
  if (!(h > 0.0 && h <= 1.0)) throw Error(ErrorKind::PreconditionViolated, "h must lie in (0,1]");
  const int m = static_cast<int>(canonical_degree(k));
  const double L = std::max(opt.real_half_width, critical_bound(k, z));
  const double taper = opt.taper;
  auto integrand = [&](cplx s) {
    cplx ph = canon_phase(k, z, s);
    return std::exp(kI * ph / h - (s / taper) * (s / taper));
  };

  // Real segment: initial panels follow the phase variation.
  double var = 0.0;
  const int ns = 2000;
  double prev = canon_phase(k, z, -L);
  for (int i = 1; i <= ns; ++i) {
    double s = -L + 2 * L * i / ns;
    double cur = canon_phase(k, z, s);
    var += std::abs(cur - prev);
    prev = cur;
  }
  std::size_t panels = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(var / h / (2 * kPi))));
  QuadOptions qo;
  qo.tol = opt.tol;
  qo.max_nodes = opt.max_nodes;
  auto mid = gk_adaptive([&](double s) { return integrand(cplx(s, 0.0)); }, uniform_breaks(-L, L, panels), qo);
  if (!mid.converged) {
    Error e(ErrorKind::QuadratureFailure, "canonical integral real segment did not converge");
    e.partial_value = mid.value;
    e.partial_error = mid.error;
    throw e;
  }

  // Tails turned by pi/(2m) so that e^{i zeta^m / h} decays.
  double th = kPi / (2.0 * m);
  cplx dir_r = std::polar(1.0, th);
  cplx dir_l = (m % 2 == 1) ? std::polar(1.0, kPi - th) : std::polar(1.0, kPi + th);
  auto tail = [&](double start, cplx dir) {
    double rmax = 0.25;
    for (int it = 0; it < 200; ++it) {
      cplx s = start + rmax * dir;
      if (std::abs(integrand(s)) < 1e-22) break;
      rmax *= 1.5;
    }
    auto f = [&](double r) { return integrand(start + r * dir) * dir; };
    double dvar = std::abs(canon_phase(k, z, cplx(start, 0) + rmax * dir) - canon_phase(k, z, cplx(start, 0)));
    std::size_t p = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(dvar / h / (2 * kPi))));
    p = std::min<std::size_t>(p, 20000);
    auto r = gk_adaptive(f, uniform_breaks(0.0, rmax, p), qo);
    if (!r.converged) {
      Error e(ErrorKind::QuadratureFailure, "canonical integral tail did not converge");
      e.partial_value = r.value;
      e.partial_error = r.error;
      throw e;
    }
    return r.value;
  };
  cplx right = tail(L, dir_r);
  cplx left = tail(-L, dir_l);
  cplx total = mid.value + right - left;
  return total / std::sqrt(2 * kPi * h);
}

}  // namespace fw
