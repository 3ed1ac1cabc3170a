#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "egoe/observables.hpp"
#include "egoe/spectra.hpp"

namespace egoe {

// <z ln z> for z ~ chi^2_1, i.e. psi(3/2) + ln 2. Porter-Thomas fluctuations
// shift the information entropy by this constant: exp(-c) = 0.4821.
inline constexpr double kPorterThomasLogMoment = 0.7296371545385218;

struct FitQuality {
  double residual_norm = 0.0;
  double r_squared = 0.0;
  bool converged = false;
};

// Interpolating strength-function family (normalized Student-t shape):
//   F(e) = C(nu)/gamma * [1 + ((e - center)/gamma)^2 / nu]^(-(nu+1)/2),
// exactly Breit-Wigner (width 2*gamma) at nu = 1, Gaussian (sigma = gamma) as
// nu -> infinity.
struct AnsatzParams {
  double center = 0.0;
  double scale = 1.0;  // gamma > 0
  double shape = 1.0;  // nu >= 1
  FitQuality fit;
};

// Breit-Wigner (Lorentzian) density; `width` is the full width Gamma.
double bw_form(double e, double center, double width);

double gauss_form(double e, double center, double sigma);

double ansatz_form(double e, double center, double scale, double shape);
double ansatz_form(double e, const AnsatzParams& params);

struct FitOptions {
  bool constrain_breit_wigner = false;        // freeze nu = 1
  std::vector<double> shape_starts = {1.0, 2.0, 4.0, 8.0, 16.0, 64.0};
  double max_shape = 1e4;
  double quad_tol = 1e-10;
};

// Least-squares fit of the bin-averaged (bin-integrated, range-renormalized)
// ansatz to a strength histogram, multi-started over `shape_starts` with the
// best residual retained. A non-converged best fit is returned with
// fit.converged = false rather than thrown.
AnsatzParams fit_ansatz(const StrengthHistogram& hist,
                        const std::optional<AnsatzParams>& init = std::nullopt,
                        const FitOptions& options = {});

// One row of the Breit-Wigner width scan: a free-shape fit classifies the
// regime, a nu = 1 constrained fit extracts Gamma.
struct WidthPoint {
  double lambda = 0.0;
  double shape_free = 0.0;    // unconstrained fitted nu
  double gamma_std = 0.0;     // Gamma in standardized e_hat units
  double gamma_raw = 0.0;     // Gamma scaled back by sigma(lambda)
  double residual = 0.0;
  bool in_bw_domain = false;  // shape_free < 2
};

std::vector<WidthPoint> bw_width_scan(std::span<const double> lambdas,
                                      std::span<const StrengthHistogram> hists,
                                      std::span<const double> sigmas,
                                      const FitOptions& options = {});

struct PredictionOptions {
  double lo = -1.0;
  double hi = 1.0;
  int points = 41;
  double quad_tol = 1e-10;
};

// Participation ratio predicted from the fitted strength function via the
// Porter-Thomas convolution: basis-state centroids are Gaussian with standard
// deviation zeta, each carrying the ansatz profile; the local weights
// w(e|eps) = F(e - eps) / (d * (rho_c conv F)(e)) give
//   xi_2(e) = (d/3) * conv(e)^2 / int rho_c(eps) F(e - eps)^2 deps.
ObservableCurve predict_xi2(const AnsatzParams& params, const SpectralStats& stats,
                            std::int64_t dim, const PredictionOptions& options = {});

// Same weights for the entropy:
//   S(e) = ln(d * conv(e)) - <F ln F>_rho_c / conv(e) - <z ln z>_PT.
ObservableCurve predict_sinfo(const AnsatzParams& params, const SpectralStats& stats,
                              std::int64_t dim, const PredictionOptions& options = {});

}  // namespace egoe
