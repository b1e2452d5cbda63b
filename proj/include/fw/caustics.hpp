#pragma once

#include <array>
#include <vector>

#include "fw/common.hpp"
#include "fw/parametrix.hpp"

namespace fw {

struct CausticOptions {
  int mu_nodes = 2000;
  double eta_ref = 0.0;    // 0: centroid of eta chi0(eta)
  int t_steps = 200;
  double class_tol = 1e-2; // kernel cubic below this: swallowtail; up to 10x: ambiguous
  CutoffSuite cut;
};

// Frequency at which the lambda-dependent geometry is evaluated.
double reference_eta(const CausticOptions& opt);

struct WavefrontCurve {
  int N = 0;
  double t = 0.0;
  double eta = 1.0;
  std::vector<std::array<double, 2>> points;  // (x, y); x < 0 marks the continuation past the boundary
  std::vector<std::array<double, 2>> params;  // (sigma, mu)
};

// T(sigma, mu) = t / sqrt(a) is linear in sigma, so each mu node has exactly one solution.
WavefrontCurve wavefront_slice(double a, double h, int N, double t, const CausticOptions& opt = {});

struct CuspPoint {
  double mu = 0.0, X = 0.0, Y = 0.0;
};
// (x, y) of the point with parameter mu on the slice.
std::array<double, 2> slice_point(double a, double h, int N, double t, double mu, const CausticOptions& opt = {});

// Zeros of dX/dmu along the slice (the front velocity is dX/dmu (1, -sigma) as lambda -> infinity).
std::vector<CuspPoint> slice_cusps(double a, double h, int N, double t, const CausticOptions& opt = {});

struct CausticEvent {
  CausticKind kind = CausticKind::Swallowtail;
  double t = 0.0, x = 0.0, y = 0.0;
  int N = 0;
  double mu = 0.0;
  double velocity = 0.0;      // |d(X, Y)/dmu| at the event
  int hessian_rank = 0;       // of G_a at the origin
  double kernel_cubic = 0.0;  // third derivative of G_a along the Hessian kernel
  double p = 0.0, q = 0.0;
};

// Births of cusp pairs while t sweeps [t_lo, t_hi].
std::vector<CausticEvent> detect_caustics(double a, double h, int N, double t_lo, double t_hi,
                                          const CausticOptions& opt = {});

// Reflection window of N: t between (N - 1/2) and (N + 1/2) times 4 sqrt(a(1+a)).
std::array<double, 2> reflection_window(double a, int N);

// Smallest singular value of d(X, T, xi, tau)/d(sigma, mu) on Lambda_{a,N,h}.
double lagrangian_min_singular(double a, int N, double h, double eta, double sigma, double mu,
                               const CutoffSuite& cut = {});

}  // namespace fw
