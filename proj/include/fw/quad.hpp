#pragma once

#include <functional>
#include <vector>

#include "fw/common.hpp"

namespace fw {

struct QuadOptions {
  double tol = 1e-8;               // stop when error <= tol * (1 + |I|)
  std::size_t max_nodes = 2000000;
};

struct QuadResult {
  cplx value{0.0, 0.0};
  double error = 0.0;
  std::size_t nodes = 0;
  bool converged = true;
};

using CFun = std::function<cplx(double)>;
using RFun = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7/15) bisection over the panels defined by
// consecutive breakpoints.
QuadResult gk_adaptive(const CFun& f, const std::vector<double>& breaks, const QuadOptions& opt = {});
QuadResult gk_adaptive(const CFun& f, double a, double b, const QuadOptions& opt = {});
double gk_adaptive_real(const RFun& f, double a, double b, double tol = 1e-12,
                        std::size_t max_nodes = 2000000, double* err = nullptr);

// Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Uniform breakpoints splitting [a, b] into n panels.
std::vector<double> uniform_breaks(double a, double b, std::size_t n);

}  // namespace fw
