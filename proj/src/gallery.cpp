#include "fw/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fw/quad.hpp"
#include "fw/specfun.hpp"

namespace fw {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double Plateau::operator()(double v) const {
  if (v <= lo || v >= hi) return 0.0;
  return smooth_step((v - lo) / (plo - lo)) * smooth_step((hi - v) / (hi - phi));
}

ModeTruncation default_truncation(double h, double epsilon) {
  ModeTruncation t;
  t.epsilon = epsilon;
  t.k_min = 1;
  t.k_max = std::max(1, static_cast<int>(std::floor(epsilon / h)));
  return t;
}

double eigenvalue(int k, double eta) {
  const auto& tab = shared_zero_table(std::max(k, 1));
  double w = tab.omega(k);
  double ae = std::abs(eta);
  return eta * eta + w * std::pow(ae, 4.0 / 3.0);
}

GalleryMode gallery_mode(int k) {
  GalleryMode m;
  m.k = k;
  m.omega_k = shared_zero_table(k).omega(k);
  m.f_k = normalization(k);
  return m;
}

double eigenfunction(const GalleryMode& mode, double x, double eta) {
  if (x == 0.0) return 0.0;  // Dirichlet condition held exactly
  double e13 = std::cbrt(eta);
  return mode.f_k * e13 * std::pow(mode.k, -1.0 / 6.0) * airy_ai(e13 * e13 * x - mode.omega_k);
}

double eigenfunction(int k, double x, double eta) { return eigenfunction(gallery_mode(k), x, eta); }

namespace {

double normalization_identity(int k) {
  const auto& tab = shared_zero_table(k);
  return std::pow(static_cast<double>(k), 1.0 / 6.0) / std::abs(tab.aip[k - 1]);
}

}  // namespace

double normalization(int k) {
  if (k < 1) throw Error(ErrorKind::IndexOutOfTable, "mode index must be >= 1");
  // Each f_k is cross-checked once against quadrature and then cached.
  static std::mutex mu;
  static std::vector<double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (static_cast<int>(cache.size()) >= k && cache[k - 1] > 0.0) return cache[k - 1];
  }
  double fi = normalization_identity(k);
  double fq = normalization_quadrature(k);
  if (std::abs(fi - fq) > 1e-6 * fi)
    throw Error(ErrorKind::NormalizationMismatch, "f_k routes disagree at k=" + std::to_string(k));
  std::lock_guard<std::mutex> lock(mu);
  if (static_cast<int>(cache.size()) < k) cache.resize(k, 0.0);
  cache[k - 1] = fi;
  return fi;
}

double normalization_quadrature(int k) {
  double w = shared_zero_table(k).omega(k);
  // Breakpoints at the interior zeros keep panels free of sign changes.
  std::vector<double> br{0.0};
  for (int j = k - 1; j >= 1; --j) br.push_back(w - shared_zero_table(k).omega(j));
  br.push_back(w);
  br.push_back(w + 30.0);
  QuadOptions qo;
  qo.tol = 1e-14;
  auto r = gk_adaptive(
      [&](double t) {
        double a = airy_ai(t - w);
        return cplx(a * a, 0.0);
      },
      br, qo);
  return std::pow(static_cast<double>(k), 1.0 / 6.0) / std::sqrt(r.value.real());
}

std::vector<double> dirac_coefficients(double a, double eta, const ModeTruncation& trunc) {
  if (!(a > 0.0)) throw Error(ErrorKind::PreconditionViolated, "source distance a must be positive");
  std::vector<double> c;
  for (int k = trunc.k_min; k <= trunc.k_max; ++k) c.push_back(eigenfunction(gallery_mode(k), a, eta));
  return c;
}

double sobolev_sum(double b, int L) {
  const auto& tab = shared_zero_table(L);
  CompensatedSum s;
  for (int k = 1; k <= L; ++k) {
    double v = airy_ai(b - tab.omega(k));
    s.add(std::pow(static_cast<double>(k), -1.0 / 3.0) * v * v);
  }
  return s.value().real();
}

SobolevMax sobolev_sup(int L, double step) {
  const auto& tab = shared_zero_table(L);
  double lo = -5.0, hi = tab.omega(L) + 2.0;
  SobolevMax best{lo, -1.0};
  for (double b = lo; b <= hi; b += step) {
    double v = sobolev_sum(b, L);
    if (v > best.value) best = {b, v};
  }
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best.b - step, c = best.b + step;
  double x1 = c - g * (c - a), x2 = a + g * (c - a);
  double f1 = sobolev_sum(x1, L), f2 = sobolev_sum(x2, L);
  for (int i = 0; i < 40; ++i) {
    if (f1 > f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - g * (c - a);
      f1 = sobolev_sum(x1, L);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (c - a);
      f2 = sobolev_sum(x2, L);
    }
  }
  if (f1 > best.value) best = {x1, f1};
  if (f2 > best.value) best = {x2, f2};
  return best;
}

double mode_overlap(int k, int j, double eta) {
  GalleryMode mk = gallery_mode(k), mj = gallery_mode(j);
  double e23 = std::pow(eta, 2.0 / 3.0);
  double xmax = (std::max(mk.omega_k, mj.omega_k) + 30.0) / e23;
  std::size_t panels = static_cast<std::size_t>(std::max(k, j)) * 2 + 8;
  QuadOptions qo;
  qo.tol = 1e-13;
  auto r = gk_adaptive(
      [&](double x) { return cplx(eigenfunction(mk, x, eta) * eigenfunction(mj, x, eta), 0.0); },
      uniform_breaks(0.0, xmax, panels), qo);
  return r.value.real();
}

}  // namespace fw
