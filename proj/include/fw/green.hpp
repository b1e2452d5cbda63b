#pragma once

#include <array>
#include <vector>

#include "fw/common.hpp"
#include "fw/gallery.hpp"
#include "fw/oscint.hpp"

namespace fw {

struct ModelParams {
  double h = 1.0 / 128.0;
  double a = 0.05;
  int d = 2;
  SpectralWindow window;
  ModeTruncation trunc;
  int propagator_sign = +1;  // +1: e^{-it sqrt(-Delta)}, -1: e^{+it sqrt(-Delta)}
  double tangency_D = 2.0;   // k >= D max(h^{-1/4}, 1/t) in the non-tangential split
  EvalOptions eval;
};

// Defaults with k_max = floor(epsilon / h).
ModelParams make_params(double h, double a, double epsilon = 0.2);
void validate(const ModelParams& p);

struct WavefieldSample {
  double t = 0.0, x = 0.0, y = 0.0;
  cplx value{0.0, 0.0};
  double quadrature_error = 0.0;
  int k_terms = 0;
};

// tau_k(eta) = eta sqrt(1 + omega_k (h/eta)^{2/3}), the semiclassical frequency of mode k.
double tau_k(double omega_k, double h, double eta);

// Single mode contribution (k fixed), integrated over eta by oscint::evaluate with lambda = 1/h.
cplx propagate_term(const ModelParams& p, int k, double t, double x, double y, double* error = nullptr);

WavefieldSample propagate(const ModelParams& p, double t, double x, double y);

struct SpacePoint {
  double x, y, t;
};
struct SourcePoint {
  double a, b, s;
};
cplx full_green(const ModelParams& p, const SourcePoint& source, const SpacePoint& target);

struct SplitSample {
  WavefieldSample low, high;
};
SplitSample propagate_split(const ModelParams& p, double t, double x, double y, int L);

struct TangencyParams {
  double lambda_g = 0.0;  // t omega_k h^{-1/3}
  double mu_g = 0.0;      // a h^{-1/3} / (t omega_k^{1/2})
  double delta = 0.0;     // x / a
  double alpha = 0.0;     // a / (h^{2/3} omega_k)
  double s = 1.0;         // eta^{-2/3}
};
TangencyParams tangency_params(const ModelParams& p, int k, double t, double x, double eta);

// Smallest k allowed in the non-tangential split.
int tangential_threshold(const ModelParams& p, double t);

// Branch symbol sigma_k^{s1,s2}(eta) and phase (per unit 1/h) for s1, s2 in {+1, -1}.
// s1 labels the x factor, s2 the a factor; +1 carries e^{-i(2/3)X^{3/2}}.
cplx nontangential_symbol(const ModelParams& p, int k, double x, double eta, int s1, int s2);
double nontangential_phase(const ModelParams& p, int k, double t, double x, double y, double eta, int s1, int s2);

// (1/2 pi h) int e^{i phase / h} sigma deta for one branch.
cplx nontangential_branch(const ModelParams& p, int k, double t, double x, double y, int s1, int s2);

// Four-branch sum w_k. Throws RegimeViolation outside the non-tangential regime.
cplx nontangential_asymptotic(const ModelParams& p, double t, double x, double y, int k);

// g(z) with (1 + 2z/3)/sqrt(1+z) = 1 + z g(z), and its first two derivatives.
std::array<double, 3> tangency_g(double z);

// Closed forms for d_s d_eta phi and d_s^2 d_eta phi in the variable s = eta^{-2/3}.
std::array<double, 2> phase_s_derivatives(double z_scale, double mu, double delta, double alpha, double s, int s1,
                                          int s2);

struct StructureReport {
  double min_value = 0.0;  // min over the grid of |d_s d_eta phi| + |d_s^2 d_eta phi|
  int worst_s1 = 1, worst_s2 = 1;
  double worst_s = 0.0, worst_mu = 0.0, worst_delta = 0.0;
  std::size_t samples = 0;
};
// Scan over k in [tangential_threshold, k_max], t in t_grid, delta in [0, 1], s in [2^{-2/3}, 2^{2/3}].
StructureReport phase_structure_scan(const ModelParams& p, const std::vector<double>& t_grid, int n_delta = 11,
                                     int n_s = 41);

// Grid evaluator: trapezoid rule in eta (the integrand is compactly supported and smooth)
// followed by a direct transform onto a uniform y grid.
struct YGrid {
  double y0 = 0.0;
  double dy = 0.01;
  int ny = 1;
  double at(int m) const { return y0 + dy * m; }
};

struct FieldSlice {
  double t = 0.0;
  std::vector<double> xs;
  YGrid ys;
  std::vector<cplx> values;  // row-major: values[ix * ny + iy]
  cplx at(int ix, int iy) const { return values[static_cast<std::size_t>(ix) * ys.ny + iy]; }
  double max_abs() const;
};

struct SliceOptions {
  int eta_nodes = 2000;
  int k_min = 0;  // 0 means trunc.k_min
  int k_max = 0;  // 0 means trunc.k_max
  int threads = 1;
};

FieldSlice field_slice(const ModelParams& p, double t, const std::vector<double>& xs, const YGrid& ys,
                       const SliceOptions& opt = {});

// Discrete L^2(x, y) norm of a slice by the trapezoid rule in both directions.
double slice_l2(const FieldSlice& s);

// Exact squared norm of the windowed field, t-independent by orthonormality and Plancherel.
double exact_l2_squared(const ModelParams& p);

}  // namespace fw
