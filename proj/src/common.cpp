#include "fw/common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace fw {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::OverflowGuard: return "OverflowGuard";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::IndexOutOfTable: return "IndexOutOfTable";
    case ErrorKind::NormalizationMismatch: return "NormalizationMismatch";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::RootTrackingFailure: return "RootTrackingFailure";
    case ErrorKind::EmptySlice: return "EmptySlice";
    case ErrorKind::ClassificationAmbiguous: return "ClassificationAmbiguous";
    case ErrorKind::PeakNotFound: return "PeakNotFound";
    case ErrorKind::LocalizationViolated: return "LocalizationViolated";
    case ErrorKind::AdmissibilityViolated: return "AdmissibilityViolated";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigError:
    case ErrorKind::IOError:
    case ErrorKind::RegimeViolation:
    case ErrorKind::AdmissibilityViolated:
    case ErrorKind::LocalizationViolated:
      return 2;
    default:
      return 1;
  }
}

const char* caustic_kind_name(CausticKind k) {
  switch (k) {
    case CausticKind::Fold: return "fold";
    case CausticKind::Cusp: return "cusp";
    case CausticKind::Swallowtail: return "swallowtail";
  }
  return "unknown";
}

double caustic_order(CausticKind k) {
  switch (k) {
    case CausticKind::Fold: return 1.0 / 6.0;
    case CausticKind::Cusp: return 1.0 / 4.0;
    case CausticKind::Swallowtail: return 3.0 / 10.0;  // 1/2 - 1/5 at the organizing center
  }
  return 0.0;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int nt = threads <= 0 ? hw : threads;
  nt = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(nt), n));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int w = 0; w < nt; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace fw
