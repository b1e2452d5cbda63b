#pragma once

#include <functional>
#include <vector>

#include "fw/common.hpp"

namespace fw {

struct GalleryMode {
  int k = 1;
  double omega_k = 0.0;
  double f_k = 0.0;  // e_k = f_k eta^{1/3} k^{-1/6} Ai(eta^{2/3} x - omega_k)
};

// C^infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

// Smooth plateau profile: 0 outside (lo, hi), 1 on [plo, phi], C^infinity,
// built from exp(-1/t).
struct Plateau {
  double lo, plo, phi, hi;
  double operator()(double v) const;
};

struct SpectralWindow {
  Plateau psi1{0.5, 0.75, 1.5, 2.0};  // in eta
  Plateau psi2{0.5, 1.0, 2.0, 2.5};   // in tau = eta sqrt(1 + omega_k (h/eta)^{2/3})
  double amplitude = 1.0;
  // Optional extra cut in zeta = tau / eta (empty means 1). The parametrix
  // comparison uses it to restrict to transverse modes.
  std::function<double(double)> zeta_cut;

  double weight(double eta, double tau) const {
    double w = amplitude * psi1(eta) * psi2(tau);
    if (w != 0.0 && zeta_cut) w *= zeta_cut(tau / eta);
    return w;
  }
};

struct ModeTruncation {
  int k_min = 1;
  int k_max = 1;
  double epsilon = 0.2;
};

// Largest admissible k_max = floor(epsilon / h).
ModeTruncation default_truncation(double h, double epsilon = 0.2);

double eigenvalue(int k, double eta);
GalleryMode gallery_mode(int k);
double eigenfunction(const GalleryMode& mode, double x, double eta);
double eigenfunction(int k, double x, double eta);

// f_k from the identity int_0^inf Ai^2(t - omega_k) dt = Ai'(-omega_k)^2,
// checked against direct quadrature.
double normalization(int k);
double normalization_quadrature(int k);

std::vector<double> dirac_coefficients(double a, double eta, const ModeTruncation& trunc);

double sobolev_sum(double b, int L);

struct SobolevMax {
  double b = 0.0;
  double value = 0.0;
};
// sup over b of sobolev_sum(b, L): grid scan then golden refinement.
SobolevMax sobolev_sup(int L, double step = 0.02);

// Overlap int_0^inf e_k e_j dx by adaptive quadrature up to the decay cutoff.
double mode_overlap(int k, int j, double eta);

}  // namespace fw
