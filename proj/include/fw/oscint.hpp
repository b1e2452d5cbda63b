#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "fw/common.hpp"

namespace fw {

// One-dimensional oscillatory integral  int_lo^hi e^{i lambda Phi(xi)} g(xi) dxi.
struct PhaseSpec {
  int dimension = 1;
  std::function<double(double)> phase;
  // Optional analytic derivatives Phi^{(j)}(xi), j >= 1; stencils otherwise.
  std::function<double(double, int)> derivative;
  std::function<cplx(double)> symbol;
  double support_lo = -1.0;
  double support_hi = 1.0;
  // Optional analytic continuations. When all three are present the
  // evaluator may switch to steepest descent for large lambda.
  std::function<cplx(cplx)> phase_c;
  std::function<cplx(cplx)> dphase_c;
  std::function<cplx(cplx)> symbol_c;

  // Two-dimensional specs (dimension == 2) on the square [lo, hi]^2.
  std::function<double(double, double)> phase2;
  std::function<std::array<double, 2>(double, double)> grad2;
  std::function<std::array<double, 3>(double, double)> hess2;  // h11, h12, h22
  std::function<cplx(double, double)> symbol2;

  bool analytic() const { return phase_c && dphase_c && symbol_c; }
};

double phase_derivative(const PhaseSpec& spec, double x, int j);

// Smooth bump exp(1 - 1/(1 - t^2)) on (-1, 1) mapped to (lo, hi); equals 1 at the midpoint.
double bump(double x, double lo = -1.0, double hi = 1.0);

struct EvalOptions {
  double tol = 1e-8;
  std::size_t max_nodes = 20000000;
  double nsd_threshold = 1e4;  // lambda above which analytic specs use steepest descent
  int nsd_panels = 8;
  int nsd_nodes = 16;
};

struct EvalResult {
  cplx value{0.0, 0.0};
  double error = 0.0;
  std::size_t nodes = 0;
  bool steepest_descent = false;
};

EvalResult evaluate_detailed(const PhaseSpec& spec, double lambda, const EvalOptions& opt = {});
cplx evaluate(const PhaseSpec& spec, double lambda, const EvalOptions& opt = {});

// Steepest-descent evaluation of int_lo^hi g e^{i lambda phi}. `crit` lists
// real critical points strictly inside (lo, hi) with their multiplicity m
// (phi - phi(c) ~ c_m (xi - c)^m).
struct NsdPoint {
  double x;
  int m;
};
cplx nsd_integral(const std::function<cplx(cplx)>& phi, const std::function<cplx(cplx)>& dphi,
                  const std::function<cplx(cplx)>& g, double lo, double hi, const std::vector<NsdPoint>& crit,
                  double lambda, int panels = 8, int nodes = 16);

struct CriticalPoint {
  std::vector<double> location;
  int order = 1;          // smallest j >= 2 with Phi^{(j)} != 0, minus one
  int hessian_rank = 1;   // 2-D only; 1-D reports 1 if Phi'' != 0
  std::optional<CausticKind> classification;  // empty means nondegenerate
};

struct CriticalPointSet {
  std::vector<CriticalPoint> points;
  bool possibly_incomplete = false;
};

struct CriticalOptions {
  int scan_points = 1000;
  double grad_tol = 1e-10;
  double class_tol = 1e-6;
};

CriticalPointSet find_critical_points(const PhaseSpec& spec, const CriticalOptions& opt = {});

struct DecayFit {
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // max |log m_i - fitted line|
  std::vector<double> lambda_grid;
  std::vector<double> moduli;
};

DecayFit decay_fit(const std::vector<std::pair<double, double>>& values);

DecayFit van_der_corput_check(const PhaseSpec& spec, int k, double c0, const std::vector<double>& lambda_grid,
                              const EvalOptions& opt = {});

// Two-dimensional phase H for I(x, lambda) = int e^{i lambda (x.xi - H(xi))} a(xi) dxi.
// Callables take complex arguments so the inner integral can leave the real axis.
struct Phase2D {
  std::function<cplx(cplx, cplx)> H;
  std::function<std::array<cplx, 2>(cplx, cplx)> grad;
  std::function<std::array<cplx, 3>(cplx, cplx)> hess;  // h11, h12, h22
};

struct Fold2DOptions {
  double radius = 0.1;       // symbol a = amp * exp(-|xi|^4 / r^4)
  double amplitude = 1.0;
  double class_tol = 1e-6;
  double tol = 1e-7;
  int threads = 1;
};

struct Fold2DResult {
  CausticKind classification = CausticKind::Fold;
  double xprime_norm = 0.0;   // |X'(0)|
  double xsecond_norm = 0.0;  // |X''(0)|
  DecayFit fit;               // sup over the x samples of |I| against lambda
};

// Classification only (no integrals).
Fold2DResult classify_2d(const Phase2D& H, const Fold2DOptions& opt = {});

cplx integral_2d(const Phase2D& H, const std::array<double, 2>& x, double lambda, const Fold2DOptions& opt = {});

Fold2DResult fold_cusp_2d(const Phase2D& H, const std::vector<std::array<double, 2>>& xs,
                          const std::vector<double>& lambda_grid, const Fold2DOptions& opt = {});

// xi^k / k with a bump symbol on (-1, 1), and the 2-D normal forms a^2/2 + a b^2 + b^3 (fold) and
// a^2/2 + a b^2 + b^4 (cusp).
PhaseSpec monomial_phase(int k);
Phase2D fold_phase_2d();
Phase2D cusp_phase_2d();

// Sup-norm of the canonical integral near its organizing point, scanned over
// the self-similar neighbourhood, for each h. Returns (h, sup) pairs.
std::vector<std::pair<double, double>> canonical_sup_profile(CausticKind kind, const std::vector<double>& hs);

}  // namespace fw
