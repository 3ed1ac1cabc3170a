#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

namespace egoe {

// Eigenvalues and eigenvector amplitudes C(k, alpha) = <basis k|eigenstate alpha>
// of one ensemble member, in a declared basis.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd amplitudes;   // column alpha = eigenstate alpha
  std::string basis_tag = "mean-field";

  std::int64_t dim() const { return eigenvalues.size(); }
};

// Dense symmetric eigendecomposition. Eigenvalues ascending; each column's
// sign is fixed so its largest-magnitude component is positive. Residuals
// satisfy |H c - E c| <= 1e-8 |H| per pair.
SpectralDecomposition diagonalize(const Eigen::MatrixXd& h);

struct SpectralStats {
  double centroid = 0.0;
  double sigma = 0.0;    // population convention
  double zeta_sq = 0.0;  // Var_k(H_kk) / sigma^2
};

// Member on the common scale e_hat = (E - centroid) / sigma. basis_e_hat holds
// the standardized diagonal energies H_kk recovered from the decomposition.
struct StandardizedSpectrum {
  Eigen::VectorXd e_hat;
  Eigen::VectorXd basis_e_hat;
  SpectralStats stats;
};

StandardizedSpectrum standardize(const SpectralDecomposition& decomp);

// Unfolded nearest-neighbour spacings with sample mean exactly 1. The
// cumulative staircase is fitted by a polynomial of `poly_degree`; spacings are
// kept on the central fraction after trimming `edge_trim` of the levels at each
// edge.
Eigen::VectorXd unfold(const Eigen::VectorXd& eigenvalues, double edge_trim = 0.025,
                       int poly_degree = 5);

// Re-expresses H eigenstates in the eigenbasis of V alone (the strong-mixing
// basis): amplitudes become C_V^T * C_H.
SpectralDecomposition v_eigenbasis(const SpectralDecomposition& v_decomp,
                                   const SpectralDecomposition& h_decomp);

// Kolmogorov-Smirnov distance between an empirical sample and a reference CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

double wigner_surmise_cdf(double s);
double poisson_spacing_cdf(double s);

}  // namespace egoe
