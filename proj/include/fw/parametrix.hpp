#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fw/common.hpp"
#include "fw/gallery.hpp"
#include "fw/green.hpp"

namespace fw {

// Cutoffs and the constants the construction leaves free.
struct CutoffSuite {
  double theta0 = 0.2;
  double zeta0 = 1.1;
  double zeta1 = 1.2;
  double beta = 0.5;
  double z0 = 1.2;
  double a0 = 0.2;
  double C0 = 4.0;    // reflection budget: N <= C0 / sqrt(a)
  double R0 = 8.0;
  double M0 = 40.0;
  double eps0 = 0.1;  // a mu^2 <= eps0 on the Lagrangian charts
  double N0 = 2.0;
  double C2 = 5.0;
  double alpha = 0.55;
  Plateau chi0{0.5, 1.0, 2.0, 2.5};

  double chi1(double theta) const;  // bump on (-theta0, theta0), also used as sigma_0
  double chi2(double u) const;      // 0 for u <= beta/2, 1 for u >= beta
  double chi3(double zeta) const;   // 1 on [3/4, zeta0], 0 for zeta <= 1/2 or zeta >= zeta1
  double chi4(double s) const;      // 1 on [-zeta1, zeta1], 0 beyond 2 zeta1
  double chi5(double z) const;      // 1 for z <= (1 + z0)/2, 0 for z >= z0
  void validate() const;
};

struct ScaleFrame {
  double a = 0.0, h = 0.0, eta = 1.0;
  double hbar = 0.0;          // h / eta
  double lambda = 0.0;        // a^{3/2} / hbar
  double lambda_tilde = 0.0;  // a^{3/2} / h
  double rho = 1.0;           // 1 + a

  static ScaleFrame make(double a, double h, double eta = 1.0);
  double t_of(double T) const { return std::sqrt(a) * T; }
  double x_of(double X) const { return a * X; }
  double y_of(double t, double Y) const { return -t * std::sqrt(rho) + a * std::sqrt(a) * Y; }
  double T_of(double t) const { return t / std::sqrt(a); }
  double X_of(double x) const { return x / a; }
  double Y_of(double t, double y) const { return (y + t * std::sqrt(rho)) / (a * std::sqrt(a)); }
};

// B(u) for every u >= 0 (table for u >= 1, direct Airy ratio below) and its derivative.
double phase_B_any(double u);
double phase_B_prime_any(double u);
// 1 - (3/4) B'(lambda z^{3/2})
double reflection_factor(double lambda, double z);

// Scale functions. psi_a(t') has psi_a' = sqrt(1 + a + theta^2) along t' = -2 theta sqrt(1 + a + theta^2).
double psi_a(double a, double tp);
double psi_a_prime(double a, double tp);
double psi_a_tilde(double a, double Tp);  // a^{-3/2}(psi_a(sqrt(a) T') - sqrt(a rho) T'), stable down to a = 0
double psi_a_tilde_prime(double a, double Tp);
double gamma_a(double a, double z);

double varphi(double a, int N, double lambda, double T, double X, double Tp, double sigma, double z);
// d/dT', d/dsigma, d/dz of varphi in closed form.
std::array<double, 3> varphi_gradient(double a, int N, double lambda, double T, double X, double Tp, double sigma,
                                      double z);
// The unscaled phase t zeta + s(x + 1 - zeta^2) + s^3/3 - t' zeta + psi_a(t') - (4/3) N (zeta^2-1)^{3/2}
// + hbar N B((zeta^2-1)^{3/2}/hbar).
double phi_hbar(double a, int N, double hbar, double t, double x, double tp, double s, double zeta);

double Phi_N_eps(double a, int N, double lambda, double T, double X, double z, int e1, int e2);

struct ScaleFunctions {
  double F0 = 0.0, G0 = 0.0, H0 = 0.0, F1 = 0.0;
};
ScaleFunctions scale_functions(double Ttilde, double a, int N, double Tp, double sigma);

// Reduced phase psi_{a,N,lambda} without the a N O_3 remainder.
double psi_aNlambda(double a, int N, double Ttilde, double X, double Tp, double sigma);
// Normal form G_a in (x, y) at parameters (p, q), without the a-remainder, and the Hessian determinant formula.
double G_a(double a, int N, double Ttilde, double p, double q, double x, double y);
double hessian_formula(double a, int N, double Ttilde, double x, double y);

// Lagrangian parametrization of the projection of Lambda_{a,N,h}.
double H1(double a, double mu);
double H2(double a, double mu);

struct LagrangianPoint {
  double sigma = 0.0, mu = 0.0, eta = 1.0;
  int N = 0;
  double X = 0.0, Y = 0.0, T = 0.0;
  double z = 1.0;
  double xi = 0.0, tau = 0.0;  // unscaled covector: xi = eta sqrt(a) sigma, tau = eta sqrt(1 + a z)
};
LagrangianPoint lagrangian_point(double a, int N, double h, double eta, double sigma, double mu,
                                 const CutoffSuite& cut = {});

enum class RootRegime { LargeR, MediumR, SmallRT };
const char* root_regime_name(RootRegime r);

struct RootSet {
  std::vector<cplx> mu;
  double R = 0.0;
  RootRegime regime = RootRegime::SmallRT;
};
// Residual of the mu-equation (Y - B0)^2 - (1 + mu^2 - X)(B1 + B2 (1 + mu^2 - X))^2.
cplx mu_equation(double X, double Y, double T, double a, cplx mu);
// Monic a = 0 quartic coefficients c[0..3] with mu^4 + c3 mu^3 + c2 mu^2 + c1 mu + c0.
std::array<double, 4> mu_quartic(double X, double Y, double T);
std::vector<cplx> polynomial_roots(const std::vector<cplx>& monic_low_to_high);
RootSet mu_roots(double X, double Y, double T, double a, const CutoffSuite& cut = {});

// sigma from the linear relation Y - B0 = sigma (B1 + B2 (1 + mu^2 - X)), and N from the T equation.
double sigma_on_root(double X, double Y, double T, double a, double mu);
double reflection_index(double X, double T, double a, double lambda, double mu, double sigma);

struct OverlapResult {
  std::vector<int> members;
  int count() const { return static_cast<int>(members.size()); }
  double window_hi = 0.0;  // T/2 + N0
};
OverlapResult overlap_count(double X, double Y, double T, double a, double h, const CutoffSuite& cut = {});

struct SwallowtailLocation {
  double X = 1.0, T = 0.0, x = 0.0, t = 0.0;
};
SwallowtailLocation swallowtail_condition(double a, int N);

// Wave fields.
enum class DataModel { ExactAiry, BumpSymbol };

struct ParametrixParams {
  double h = 1.0 / 256.0;
  double a = 0.0625;
  CutoffSuite cut;
  DataModel data = DataModel::ExactAiry;
  SpectralWindow window;  // psi1 and psi2 of the spectral field, used by ExactAiry
  int n_min = 0;
  int n_max = -1;         // -1: floor(C0 / sqrt(a))
  double nodes_per_radian = 0.6;
  int eta_nodes = 0;      // 0: chosen from the y extent
  int threads = 1;
  bool check_hypothesis = true;  // a in [h^alpha, a0]
};
ParametrixParams make_parametrix_params(double h, double a);
void validate(const ParametrixParams& p);
int reflection_budget(const ParametrixParams& p);

// zeta cut chi2((zeta^2 - 1)/a) chi3(zeta), and the matching spectral model.
double zeta_window(const CutoffSuite& cut, double a, double zeta);
ModelParams matched_spectral_params(const ParametrixParams& p);

// -A_-/A_+ at Z = hbar^{-2/3}(zeta^2 - 1), unit modulus for real Z.
cplx reflection_ratio(double Z);
// F_N / F_0 along both routes: through B, and through the Airy ratio.
cplx reflection_power_B(double zeta, double hbar, int N);
cplx reflection_power_airy(double zeta, double hbar, int N);
double reflection_identity_error(double hbar, int N, const CutoffSuite& cut, double a, int samples = 400);

// u_N at one eta (hbar = h/eta); the N-range is summed in closed form.
cplx wave_u_range(const ParametrixParams& p, double eta, double t, double x, int n_lo, int n_hi);
cplx wave_uN(const ParametrixParams& p, int N, double eta, double t, double x);
// Rescaled w_N(T, X) = sqrt(a) e^{-i t sqrt(rho)/hbar} u_N.
cplx wave_wN(const ParametrixParams& p, int N, double eta, double T, double X);

// v(t, x, y) over rows of x and a uniform y grid.
FieldSlice parametrix_slice(const ParametrixParams& p, double t, const std::vector<double>& xs, const YGrid& ys,
                            int n_lo, int n_hi);
cplx parametrix_sum(const ParametrixParams& p, double t, double x, double y);

struct BoundaryReport {
  std::vector<double> t;
  std::vector<double> ratio_full;    // max_y |v(t,0,y)| / sup |v(t,.)|
  std::vector<double> ratio_single;  // same for v_0 alone
  double max_full = 0.0, max_single = 0.0;
  bool pass = false;  // max_full <= h^2
};
BoundaryReport parametrix_boundary_check(const ParametrixParams& p, const std::vector<double>& t_grid,
                                         const std::vector<double>& xs, const YGrid& ys);

}  // namespace fw
