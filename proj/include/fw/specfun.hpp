#pragma once

#include <vector>

#include "fw/common.hpp"

namespace fw {

struct AiryOptions {
  double z_max = 1e4;
};

// Ai and Ai' for real and complex arguments. Real input gives a real result.
double airy_ai(double x, const AiryOptions& opt = {});
double airy_ai_prime(double x, const AiryOptions& opt = {});
cplx airy_ai(cplx z, const AiryOptions& opt = {});
cplx airy_ai_prime(cplx z, const AiryOptions& opt = {});

// Both at once; cheaper when the caller needs the pair.
void airy_pair(double x, double& ai, double& aip, const AiryOptions& opt = {});
void airy_pair(cplx z, cplx& ai, cplx& aip, const AiryOptions& opt = {});

// Radii of the evaluation regions, exposed for tests.
struct AiryRegions {
  static constexpr double series_radius = 5.0;
  static constexpr double inner_series_radius = 2.0;
  static constexpr double asymptotic_radius = 9.0;
};

// Asymptotic expansions alone (no region switching); used to validate the
// switchover band.
cplx airy_ai_asymptotic(cplx z);
cplx airy_ai_series(cplx z);

struct AiryZeroTable {
  std::vector<double> zeros;      // omega_1 < omega_2 < ...
  std::vector<double> residuals;  // |Ai(-omega_k)|
  std::vector<double> aip;        // Ai'(-omega_k)
  int k_max() const { return static_cast<int>(zeros.size()); }
  double omega(int k) const;      // 1-based
};

double airy_zero_seed(int k);
AiryZeroTable airy_zeros(int k_max);

// Shared read-only table grown on demand (thread safe).
const AiryZeroTable& shared_zero_table(int k_min_size);

enum class Branch { Plus, Minus };

// A_+(z) = e^{-i pi/3} Ai(e^{-i pi/3} z),  A_-(z) = e^{i pi/3} Ai(e^{i pi/3} z).
// With this choice A_+ + A_- = Ai(-z) and A_-(z) = conj(A_+(conj z)).
cplx airy_branch(Branch b, cplx z);
cplx airy_branch_prime(Branch b, cplx z);

struct PhaseBOptions {
  double u_min = 1.0;
  double u_start = 2e4;   // B is taken on the principal branch here
  double ratio = 1.1;     // geometric tracking step
};

// B(u) from A_-/A_+ = i e^{-4iu/3} e^{iB(u)}, z = u^{2/3}; the returned
// complex value exposes the (tiny) imaginary part for checks.
cplx phase_correction_B_complex(double u, const PhaseBOptions& opt = {});
double phase_correction_B(double u, const PhaseBOptions& opt = {});
double phase_correction_B_prime(double u, const PhaseBOptions& opt = {});

// Precomputed B on a geometric grid with cubic interpolation in log u. Used
// in inner loops of the parametrix; agrees with phase_correction_B to ~1e-10.
class PhaseBTable {
 public:
  explicit PhaseBTable(double u_lo = 1.0, double u_hi = 2e4, int per_octave = 96);
  double B(double u) const;
  double Bprime(double u) const;

 private:
  double lo_, hi_, step_;
  std::vector<double> val_, der_;
};
const PhaseBTable& shared_B_table();

// Canonical caustic integrals u_h(z) = (2 pi h)^{-1/2} int e^{i Phi(z,zeta)/h} g(zeta) dzeta
// with the analytic taper g(zeta) = exp(-(zeta/taper)^2).
struct CanonicalOptions {
  double taper = 8.0;
  double real_half_width = 2.5;  // beyond this the contour turns into the complex plane
  double tol = 1e-10;
  std::size_t max_nodes = 4000000;
};

std::size_t canonical_degree(CausticKind k);
double canonical_phase(CausticKind k, const std::vector<double>& z, double zeta);
cplx canonical_phase(CausticKind k, const std::vector<double>& z, cplx zeta);
cplx canonical_integral(CausticKind k, const std::vector<double>& z, double h,
                        const CanonicalOptions& opt = {});

}  // namespace fw
