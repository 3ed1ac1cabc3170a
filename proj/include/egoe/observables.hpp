#pragma once

#include <Eigen/Core>
#include <span>
#include <string>

#include "egoe/spectra.hpp"

namespace egoe {

struct HistogramOptions {
  int bins = 51;
  double lo = -3.0;
  double hi = 3.0;
  double k_center = 0.0;     // target basis-state centroid (standardized)
  double k_halfwidth = 0.1;  // |e_hat_k - k_center| <= k_halfwidth selects k
};

// Ensemble-averaged strength function F_k(e_hat), aggregated over basis states
// k inside the k-window and over members. Density is renormalized to unit
// integral over [lo, hi]; in_range_fraction records the mass that fell inside
// before renormalization. Moments are taken from the raw weighted samples,
// tails included.
struct StrengthHistogram {
  Eigen::VectorXd bin_edges;    // bins + 1
  Eigen::VectorXd density;      // bins
  Eigen::VectorXd density_err;  // standard error over members (0 for 1 member)
  double centroid = 0.0;
  double variance = 0.0;
  double excess_kurtosis = 0.0;
  double in_range_fraction = 1.0;
  int members = 0;
  std::int64_t selected_states = 0;

  double bin_width() const { return bin_edges(1) - bin_edges(0); }
  Eigen::VectorXd bin_centers() const;
};

StrengthHistogram strength_function(std::span<const SpectralDecomposition> decomps,
                                    std::span<const StandardizedSpectrum> stds,
                                    const HistogramOptions& options = {});

// xi_2(alpha) = [sum_k C(k,alpha)^4]^{-1}, in [1, d].
Eigen::VectorXd participation_ratio(const SpectralDecomposition& decomp);

// S_info(alpha) = -sum_k C(k,alpha)^2 ln C(k,alpha)^2, in [0, ln d].
Eigen::VectorXd info_entropy(const SpectralDecomposition& decomp);

struct CurveOptions {
  double lo = -3.0;
  double hi = 3.0;
  int points = 61;
  double window = 0.2;  // full width of the moving average
};

// Moving-window average of per-eigenstate values on a fixed e_hat grid.
// Empty windows yield NaN gaps, not zeros.
struct ObservableCurve {
  Eigen::VectorXd e_hat;
  Eigen::VectorXd value;
  Eigen::VectorXd std_error;
  std::string basis_tag;
  int ensemble_size = 0;
};

ObservableCurve curve_over_energy(std::span<const double> values, std::span<const double> e_hat,
                                  const CurveOptions& options = {},
                                  std::string basis_tag = "mean-field", int ensemble_size = 1);

// Weak-basis (Fock) and strong-basis (V-eigenbasis) complexity measures of the
// same H eigenstates, per eigenstate.
struct DualPairValues {
  Eigen::VectorXd e_hat;
  Eigen::VectorXd xi2_weak, s_weak;
  Eigen::VectorXd xi2_strong, s_strong;
};

DualPairValues dual_pair(const SpectralDecomposition& h_decomp, const StandardizedSpectrum& h_std,
                         const SpectralDecomposition& v_decomp);

// Central-window means of the dual observables, transforming only the selected
// eigenvector columns (the d x d product is avoided; relevant at large d).
// evar_* is the energy variance of an eigenstate over the basis states, the
// second moment of its strength distribution in that basis.
struct DualWindowStats {
  std::int64_t n_states = 0;
  double xi2_weak = 0.0, xi2_strong = 0.0;
  double s_weak = 0.0, s_strong = 0.0;
  double evar_weak = 0.0, evar_strong = 0.0;
};

DualWindowStats dual_window_stats(const SpectralDecomposition& h_decomp,
                                  const StandardizedSpectrum& h_std,
                                  const SpectralDecomposition& v_decomp,
                                  double central_halfwidth = 0.1);

}  // namespace egoe
