#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "doctest.h"
#include "fw/green.hpp"
#include "support.hpp"

using namespace fw;
using fwtest::for_all;
using fwtest::Gen;

namespace {

// t = 0 field from Boost's Airy functions and zeros with Gauss-Kronrod in eta.
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

}  // namespace

TEST_CASE("t = 0 field reconstructs the windowed source") {
  ModelParams p = make_params(1.0 / 128, 0.05);
  double peak = std::abs(initial_oracle(p, p.a, 0.0));
  for (auto [x, y] : std::vector<std::array<double, 2>>{{0.05, 0.0}, {0.03, 0.004}, {0.08, -0.05}, {0.15, 0.02}}) {
    CAPTURE(x);
    CAPTURE(y);
    cplx o = initial_oracle(p, x, y);
    CHECK(std::abs(propagate(p, 0.0, x, y).value - o) <= 1e-6 * peak);
    CHECK(std::abs(field_slice(p, 0.0, {x}, YGrid{y, 1.0, 1}).values[0] - o) <= 1e-6 * peak);
  }
}

TEST_CASE("Dirichlet trace is exactly zero") {
  ModelParams p = make_params(1.0 / 64, 0.08);
  for (double t : {0.0, 0.3, 0.9}) {
    CHECK(propagate(p, t, 0.0, 0.1).value == cplx(0.0, 0.0));
    FieldSlice s = field_slice(p, t, {0.0, 0.05}, YGrid{-0.5, 0.05, 21});
    for (int iy = 0; iy < 21; ++iy) CHECK(s.at(0, iy) == cplx(0.0, 0.0));
  }
}

TEST_CASE("pointwise and grid evaluators agree") {
  ModelParams p = make_params(1.0 / 64, 0.08);
  for_all(12, 71, [&](Gen& g, int) {
    double t = g.uniform(0.0, 0.8), x = g.uniform(0.001, 0.3), y = g.uniform(-0.9, 0.9);
    cplx a = propagate(p, t, x, y).value;
    cplx b = field_slice(p, t, {x}, YGrid{y, 1.0, 1}).values[0];
    CHECK(std::abs(a - b) <= 1e-6 * (1.0 + std::abs(a)));
  });
}

TEST_CASE("reversing the propagator sign conjugates the mirrored field") {
  ModelParams p = make_params(1.0 / 64, 0.08), q = p;
  q.propagator_sign = -1;
  for_all(8, 72, [&](Gen& g, int) {
    double t = g.uniform(0.0, 0.8), x = g.uniform(0.001, 0.3), y = g.uniform(-0.9, 0.9);
    cplx a = propagate(p, t, x, y).value, b = propagate(q, t, x, -y).value;
    CHECK(std::abs(a - std::conj(b)) <= 1e-9 * (1.0 + std::abs(a)));
  });
}

TEST_CASE("full Green function is translation invariant in y and t") {
  ModelParams p = make_params(1.0 / 64, 0.08);
  for_all(6, 73, [&](Gen& g, int) {
    SourcePoint src{0.08, g.uniform(-1, 1), g.uniform(-1, 1)};
    SpacePoint tgt{g.uniform(0.01, 0.2), g.uniform(-1, 1), 0.0};
    tgt.t = src.s + g.uniform(0.0, 0.6);
    cplx a = full_green(p, src, tgt), b = propagate(p, tgt.t - src.s, tgt.x, tgt.y - src.b).value;
    CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
  });
}

TEST_CASE("mode split is additive") {
  ModelParams p = make_params(1.0 / 64, 0.08);
  for (int L : {1, 5, p.trunc.k_max - 1}) {
    SplitSample s = propagate_split(p, 0.4, 0.05, -0.3, L);
    cplx full = propagate(p, 0.4, 0.05, -0.3).value;
    CHECK(std::abs(s.low.value + s.high.value - full) <= 1e-12 * (1.0 + std::abs(full)));
  }
  CHECK_THROWS_AS(propagate_split(p, 0.4, 0.05, -0.3, p.trunc.k_max + 1), Error);
}

TEST_CASE("discrete L2 norm is conserved") {
  double h = 1.0 / 64;
  ModelParams p = make_params(h, 0.05);
  double exact = std::sqrt(exact_l2_squared(p));
  std::vector<double> xs;
  for (int i = 0; i <= 120; ++i) xs.push_back(1.2 * i / 120);
  for (double t : {0.0, 0.25, 0.5}) {
    CAPTURE(t);
    FieldSlice s = field_slice(p, t, xs, YGrid{-0.9, h / 2, static_cast<int>(1.8 / (h / 2)) + 1}, {1000});
    CHECK(std::abs(slice_l2(s) / exact - 1.0) <= 0.01);
  }
}

TEST_CASE("non-tangential branches reproduce single modes") {
  double h = 1.0 / 128;
  ModelParams q = make_params(h, std::pow(h, 0.6));
  int k = static_cast<int>(std::ceil(2 * std::pow(h, -0.25)));
  for (double t : {0.3, 0.6}) {
    cplx ex = propagate_term(q, k, t, 0.5 * q.a, -0.3);
    cplx as = nontangential_asymptotic(q, t, 0.5 * q.a, -0.3, k);
    CHECK(std::abs(ex - as) <= 1e-6 * std::abs(ex));
  }
  CHECK_THROWS_AS(nontangential_asymptotic(q, 0.3, 0.5 * q.a, -0.3, 1), Error);
}

TEST_CASE("tangency_g closed form and derivatives") {
  for (double z : {0.05, 0.3, 1.0, 3.0}) {
    auto g = tangency_g(z);
    CHECK(g[0] == doctest::Approx(((1 + 2 * z / 3) / std::sqrt(1 + z) - 1) / z).epsilon(1e-12));
    double e = 1e-5;
    CHECK(g[1] == doctest::Approx((tangency_g(z + e)[0] - tangency_g(z - e)[0]) / (2 * e)).epsilon(1e-6));
  }
}

TEST_CASE("invalid model parameters are rejected") {
  ModelParams p = make_params(1.0 / 64, 0.05);
  p.propagator_sign = 2;
  CHECK_THROWS_AS(validate(p), Error);
  p = make_params(1.0 / 64, 0.05);
  p.trunc.k_max = 100;
  CHECK_THROWS_AS(validate(p), Error);
  CHECK_THROWS_AS(propagate(make_params(1.0 / 64, -0.1), 0.0, 0.1, 0.0), Error);
}

// The structure lemma is stated with constant 0.05 at epsilon = 0.2; the scan stays near 0.04 at these h.
TEST_CASE("phase structure minimum reaches the stated constant" * doctest::should_fail()) {
  for (int e : {6, 7}) {
    double h = std::ldexp(1.0, -e);
    ModelParams q = make_params(h, std::pow(h, 0.6));
    CHECK(phase_structure_scan(q, {0.1, 0.3, 0.5, 0.7}).min_value >= 0.05);
  }
}

TEST_CASE("phase structure minimum is positive and uniform in h") {
  std::vector<double> m;
  for (int e : {6, 7}) {
    double h = std::ldexp(1.0, -e);
    ModelParams q = make_params(h, std::pow(h, 0.6));
    m.push_back(phase_structure_scan(q, {0.1, 0.3, 0.5, 0.7}).min_value);
  }
  CHECK(m[0] >= 0.03);
  CHECK(m[1] >= 0.03);
  CHECK(std::max(m[0], m[1]) / std::min(m[0], m[1]) <= 1.5);
}
