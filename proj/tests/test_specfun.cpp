#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "doctest.h"
#include "fw/specfun.hpp"
#include "support.hpp"

using namespace fw;
using fwtest::for_all;
using fwtest::Gen;

TEST_CASE("real Ai and Ai' agree with Boost") {
  for (double x = -40.0; x <= 8.0; x += 0.0371) {
    CAPTURE(x);
    double ref = boost::math::airy_ai(x), refp = boost::math::airy_ai_prime(x);
    // Oscillatory side: compare against the envelope, decaying side: relative.
    double env = x < 0 ? std::pow(-x, -0.25) / std::sqrt(kPi) : std::abs(ref);
    double envp = x < 0 ? std::pow(-x, 0.25) / std::sqrt(kPi) : std::abs(refp);
    CHECK(std::abs(airy_ai(x) - ref) <= 1e-11 * std::max(env, 1e-300) + 1e-300);
    CHECK(std::abs(airy_ai_prime(x) - refp) <= 1e-10 * std::max(envp, 1e-300) + 1e-300);
  }
}

TEST_CASE("complex Ai reduces to real Ai on the axis") {
  for (double x = -20.0; x <= 6.0; x += 0.173) {
    cplx v = airy_ai(cplx(x, 0.0));
    CHECK(std::abs(v.real() - airy_ai(x)) <= 1e-12 * (1.0 + std::abs(airy_ai(x))));
    CHECK(std::abs(v.imag()) <= 1e-12);
  }
}

TEST_CASE("Airy ODE residual in the complex plane") {
  // Ai'' = z Ai, with Ai'' from a centered stencil on Ai'.
  for_all(400, 11, [](Gen& g, int) {
    cplx z = std::polar(g.uniform(0.1, 15.0), g.uniform(-kPi, kPi));
    const double d = 1e-4;
    cplx app = (airy_ai_prime(z + d) - airy_ai_prime(z - d)) / (2 * d);
    cplx ai = airy_ai(z);
    double scale = std::abs(z * ai) + std::abs(airy_ai_prime(z)) + 1e-300;
    CHECK(std::abs(app - z * ai) <= 1e-7 * scale);
  });
}

TEST_CASE("region switches are continuous") {
  // Step across each switch radius and compare with the first-order Taylor prediction.
  const double d = 1e-6;
  for (double r : {AiryRegions::inner_series_radius, AiryRegions::series_radius, AiryRegions::asymptotic_radius})
    for (int i = 0; i < 360; ++i) {
      double th = 2 * kPi * i / 360;
      cplx zi = std::polar(r - d, th), zo = std::polar(r + d, th), zm = std::polar(r, th);
      cplx pred = airy_ai(zi) + airy_ai_prime(zm) * (zo - zi);
      CHECK(std::abs(airy_ai(zo) - pred) <= 1e-9 * std::abs(airy_ai(zm)));
    }
}

TEST_CASE("zero table against Boost and residuals") {
  AiryZeroTable t = airy_zeros(200);
  REQUIRE(t.k_max() == 200);
  CHECK(t.omega(1) == doctest::Approx(2.338107410459767).epsilon(1e-14));
  for (int k = 1; k <= 200; ++k) {
    CAPTURE(k);
    double ref = -boost::math::airy_ai_zero<double>(k);
    CHECK(std::abs(t.omega(k) - ref) <= 1e-12 * ref);
    CHECK(std::abs(airy_ai(-t.omega(k))) <= 1e-10);
    if (k > 1) CHECK(t.omega(k) > t.omega(k - 1));
  }
  CHECK_THROWS_AS(t.omega(0), Error);
  CHECK_THROWS_AS(t.omega(201), Error);
}

TEST_CASE("branch connection identity and conjugation symmetry") {
  for_all(500, 21, [](Gen& g, int) {
    cplx z(g.uniform(-12.0, 12.0), g.uniform(-6.0, 6.0));
    cplx p = airy_branch(Branch::Plus, z), m = airy_branch(Branch::Minus, z);
    cplx ref = airy_ai(-z);
    double scale = std::abs(p) + std::abs(m) + 1e-300;
    CHECK(std::abs(p + m - ref) <= 1e-9 * scale);
    CHECK(std::abs(m - std::conj(airy_branch(Branch::Plus, std::conj(z)))) <= 1e-12 * scale);
  });
}

TEST_CASE("B is real and smooth on [1, 500]") {
  double prev = phase_correction_B(1.0);
  for (double u = 1.0; u <= 500.0; u *= 1.013) {
    CAPTURE(u);
    cplx b = phase_correction_B_complex(u);
    CHECK(std::abs(b.imag()) <= 1e-9);
    CHECK(std::abs(b.real() - prev) < 0.05);
    prev = b.real();
  }
}

TEST_CASE("B table agrees with direct evaluation") {
  const PhaseBTable& tab = shared_B_table();
  for_all(60, 31, [&](Gen& g, int) {
    double u = g.log_uniform(1.0, 2e3);
    CHECK(std::abs(tab.B(u) - phase_correction_B(u)) <= 1e-9);
  });
}

TEST_CASE("B' matches a stencil of B") {
  for (double u : {1.5, 4.0, 20.0, 150.0}) {
    double d = 1e-4 * u;
    double fd = (phase_correction_B(u + d) - phase_correction_B(u - d)) / (2 * d);
    CHECK(std::abs(phase_correction_B_prime(u) - fd) <= 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("fold canonical integral is a scaled Airy function") {
  // With a wide taper the integral is (2 pi h)^{-1/2} 2 pi h^{1/3} Ai(z h^{-2/3}).
  CanonicalOptions opt;
  opt.taper = 1e4;
  for (double h : {0.1, 0.02})
    for (double z : {-1.0, -0.3, 0.0, 0.4}) {
      CAPTURE(h);
      CAPTURE(z);
      cplx v = canonical_integral(CausticKind::Fold, {z, 0.0}, h, opt);
      double ref = 2 * kPi * std::cbrt(h) * boost::math::airy_ai(z / std::cbrt(h * h)) / std::sqrt(2 * kPi * h);
      CHECK(std::abs(v - ref) <= 1e-7 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("canonical integral rejects bad h") {
  CHECK_THROWS_AS(canonical_integral(CausticKind::Cusp, {0, 0}, 0.0), Error);
  CHECK_THROWS_AS(canonical_integral(CausticKind::Cusp, {0, 0}, 2.0), Error);
}
