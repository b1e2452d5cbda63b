#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fw {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

enum class ErrorKind {
  OverflowGuard,
  ConvergenceFailure,
  BranchAmbiguity,
  QuadratureFailure,
  BudgetExceeded,
  PreconditionViolated,
  HypothesisViolated,
  DegenerateInput,
  IndexOutOfTable,
  NormalizationMismatch,
  RegimeViolation,
  DomainViolation,
  RootTrackingFailure,
  EmptySlice,
  ClassificationAmbiguous,
  PeakNotFound,
  LocalizationViolated,
  AdmissibilityViolated,
  ConfigError,
  IOError,
};

const char* error_kind_name(ErrorKind k);

// Numeric failures map to exit code 1, configuration/IO problems to 2.
int exit_code_for(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}
  ErrorKind kind() const { return kind_; }

  // Filled by quadrature routines that give up before reaching tolerance.
  cplx partial_value{0.0, 0.0};
  double partial_error = 0.0;

 private:
  ErrorKind kind_;
};

enum class CausticKind { Fold, Cusp, Swallowtail };

const char* caustic_kind_name(CausticKind k);

// Caustic order as the exponent loss relative to nondegenerate decay.
double caustic_order(CausticKind k);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// handled exactly once; callers write into preallocated slots so results do
// not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Neumaier summation, used wherever sums must be order-fixed and accurate.
class CompensatedSum {
 public:
  void add(cplx v) {
    add_part(re_, cre_, v.real());
    add_part(im_, cim_, v.imag());
  }
  cplx value() const { return {re_ + cre_, im_ + cim_}; }

 private:
  static void add_part(double& s, double& c, double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double re_ = 0.0, cre_ = 0.0, im_ = 0.0, cim_ = 0.0;
};

}  // namespace fw
