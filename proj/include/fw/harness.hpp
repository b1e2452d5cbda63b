#pragma once

#include <string>
#include <vector>

#include "fw/caustics.hpp"
#include "fw/green.hpp"
#include "fw/parametrix.hpp"

namespace fw {

enum class Regime { Gallery, Parametrix };
enum class Evaluator { Spectral, Parametrix };
const char* regime_name(Regime r);
const char* evaluator_name(Evaluator e);

// Upper envelopes without their constants.
double gallery_bound(double h, double t);
double parametrix_bound(double h, double a, double t);

struct EnvelopeFit {
  std::string name;
  double exponent = 0.0;  // slope of log sup against log t
  double constant = 0.0;
  double residual = 0.0;  // rms of the log residual
};

struct PeakRecord {
  int n = 0;
  double t_peak = 0.0, t_pred = 0.0;
  double peak_value = 0.0;         // |u| in window-normalized units (t = 0 peak scaled to h^{-2})
  double raw_value = 0.0;
  double lower_bound_value = 0.0;  // a^{1/4} h^{-2} (h/t_n)^{1/4}
  bool in_theorem_range = false;   // n <= min(a^{-1/2}, a^{1/2} h^{-1/3})
  std::vector<double> t_scan, value_scan;
};

struct DecayReport {
  Regime regime = Regime::Gallery;
  Evaluator evaluator = Evaluator::Spectral;
  double h = 0.0, a = 0.0;
  int d = 2;
  std::vector<double> t_grid;
  std::vector<double> sup_values;
  std::vector<double> bound_values;  // envelope without the constant
  double normalization = 1.0;        // h^2 times the t = 0 peak of the windowed field
  double envelope_constant = 0.0;    // smallest C with C bound >= sup on the grid
  std::vector<EnvelopeFit> fits;
  std::vector<PeakRecord> peaks;
};

struct SweepOptions {
  Regime regime = Regime::Gallery;
  Evaluator evaluator = Evaluator::Spectral;
  double alpha = 0.55;
  double dx_over_h = 0.25;
  double dy_over_h = 0.25;
  double y_margin_over_h = 8.0;
  double fit_t_min_over_h = 4.0;  // the fit ignores t below this multiple of h
  int eta_nodes = 0;              // 0: 3/h nodes per unit of eta
  int threads = 1;
};

// Regime a <= h^{1/2} (gallery) or a >= h^alpha (parametrix); RegimeViolation otherwise.
void check_regime(Regime r, double h, double a, double alpha = 0.55);

// Spectral model used for a regime: the full window for the gallery regime, the zeta-cut window matched to the
// parametrix otherwise.
ModelParams regime_params(Regime r, double h, double a);

// y range of the front at time t for a given propagator sign.
YGrid front_window(double h, double a, double t, int sign, const SweepOptions& opt);

// max |u| over x in [0, a] and the front window.
double sup_at(const ModelParams& p, double t, const SweepOptions& opt);
double window_normalization(const ModelParams& p);

DecayReport sup_sweep(const ModelParams& p, const std::vector<double>& t_grid, const SweepOptions& opt = {});

// max over the grid restricted to t in [t_lo, t_hi] of sup / bound.
double window_constant(const DecayReport& r, double t_lo, double t_hi);

// Least squares fit of log y = log C + e log t on t >= t_min.
EnvelopeFit fit_power(const std::string& name, const std::vector<double>& t, const std::vector<double>& y, double t_min);

struct PeakOptions {
  double rel_window = 0.15;
  int t_steps = 31;
  double y_half_width_over_h = 2.0;
  double dy_over_h = 0.125;
  int eta_nodes = 0;
  int threads = 1;
};
// Local maxima of t -> max_{|y - y_front(t)| <= w} |u(t, a, y)|, y_front from the N = n sheet at mu = 0.
std::vector<PeakRecord> peak_scan(const ModelParams& p, const std::vector<int>& n_range, const PeakOptions& opt = {});

// d >= 3 envelope by the analytic angular factor (h / |y|)^{(d-2)/2} with |y| = y_norm t.
DecayReport dimension_report(const DecayReport& report2d, int d, double y_norm, double c0 = 0.1);
double predicted_exponent(int d);

struct StrichartzSample {
  double value = 0.0;
  std::vector<double> lr_norms;  // per t
};
bool strichartz_admissible(double q, double r, int d);
StrichartzSample strichartz_sample(const ModelParams& p, double q, double r, int d, const std::vector<double>& t_grid,
                                   const SweepOptions& opt = {});

// Spectral and parametrix fields at the largest local maxima of the spectral field.
struct CrossProbe {
  double t = 0.0, x = 0.0, y = 0.0;
  cplx spectral, parametrix;
  double rel_error = 0.0;
};
struct CrossValidation {
  std::vector<CrossProbe> probes;
  double max_rel_error = 0.0;
};
CrossValidation cross_validate(const ParametrixParams& pp, const std::vector<double>& t_list, int n_probes,
                               int eta_nodes = 0);

}  // namespace fw
