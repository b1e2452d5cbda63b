#include "fw/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>

namespace fw {

namespace {

const double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx val;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gk15(const CFun& f, double a, double b) {
  double c = 0.5 * (a + b), hl = 0.5 * (b - a);
  cplx fv[15];
  fv[7] = f(c);
  for (int j = 0; j < 7; ++j) {
    double dx = hl * kXgk[j];
    fv[j] = f(c - dx);
    fv[14 - j] = f(c + dx);
  }
  cplx rk = fv[7] * kWgk[7];
  cplx rg = fv[7] * kWg[3];
  double resabs = kWgk[7] * std::abs(fv[7]);
  for (int j = 0; j < 7; ++j) {
    cplx s = fv[j] + fv[14 - j];
    rk += kWgk[j] * s;
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  // QUADPACK-style error scaling.
  cplx mean = 0.5 * rk;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  resasc *= std::abs(hl);
  resabs *= std::abs(hl);
  double err = std::abs((rk - rg) * hl);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return Panel{a, b, rk * hl, err};
}

}  // namespace

QuadResult gk_adaptive(const CFun& f, const std::vector<double>& breaks, const QuadOptions& opt) {
  QuadResult res;
  std::priority_queue<Panel> heap;
  CompensatedSum total;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] == breaks[i]) continue;
    Panel p = gk15(f, breaks[i], breaks[i + 1]);
    res.nodes += 15;
    heap.push(p);
  }
  // Totals are recomputed from the heap at the end so that the summation
  // order does not depend on the refinement history.
  auto sum_heap = [&]() {
    std::vector<Panel> all;
    auto copy = heap;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    CompensatedSum s;
    double e = 0.0;
    for (auto& p : all) {
      s.add(p.val);
      e += p.err;
    }
    total = s;
    err = e;
  };
  cplx running{0.0, 0.0};
  double running_err = 0.0;
  {
    auto copy = heap;
    while (!copy.empty()) {
      running += copy.top().val;
      running_err += copy.top().err;
      copy.pop();
    }
  }
  bool met = false;
  while (!heap.empty()) {
    if (running_err <= opt.tol * (1.0 + std::abs(running))) {
      met = true;
      break;
    }
    if (res.nodes + 30 > opt.max_nodes) {
      res.converged = false;
      break;
    }
    Panel p = heap.top();
    heap.pop();
    double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      // Panel cannot be split further in double precision.
      heap.push(Panel{p.a, p.b, p.val, 0.0});
      running_err -= p.err;
      continue;
    }
    Panel l = gk15(f, p.a, m), r = gk15(f, m, p.b);
    res.nodes += 30;
    running += l.val + r.val - p.val;
    running_err += l.err + r.err - p.err;
    heap.push(l);
    heap.push(r);
  }
  sum_heap();
  res.value = total.value();
  res.error = err;
  // The running totals decide convergence; the recomputed error only
  // differs from them by rounding.
  res.converged = met || err <= opt.tol * (1.0 + std::abs(res.value));
  return res;
}

QuadResult gk_adaptive(const CFun& f, double a, double b, const QuadOptions& opt) {
  return gk_adaptive(f, std::vector<double>{a, b}, opt);
}

double gk_adaptive_real(const RFun& f, double a, double b, double tol, std::size_t max_nodes, double* err) {
  QuadOptions o;
  o.tol = tol;
  o.max_nodes = max_nodes;
  auto r = gk_adaptive([&](double x) { return cplx(f(x), 0.0); }, a, b, o);
  if (err) *err = r.error;
  return r.value.real();
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) {
      x = it->second.first;
      w = it->second.second;
      return;
    }
  }
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[n] = {x, w};
}

std::vector<double> uniform_breaks(double a, double b, std::size_t n) {
  if (n == 0) n = 1;
  std::vector<double> br(n + 1);
  for (std::size_t i = 0; i <= n; ++i) br[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  br[n] = b;
  return br;
}

}  // namespace fw
