#include "egoe/spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "egoe/errors.hpp"

#ifdef EGOE_WITH_LAPACK
#include <lapacke.h>
#endif

namespace egoe {

namespace {

// Largest-magnitude component positive, first index winning ties.
void fix_column_signs(Eigen::MatrixXd& c) {
  for (Eigen::Index col = 0; col < c.cols(); ++col) {
    Eigen::Index imax = 0;
    c.col(col).cwiseAbs().maxCoeff(&imax);
    if (c(imax, col) < 0.0) c.col(col) = -c.col(col);
  }
}

}  // namespace

SpectralDecomposition diagonalize(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols()) throw NumericError("diagonalize: matrix is not square");
  const Eigen::Index d = h.rows();

  SpectralDecomposition out;
#ifdef EGOE_WITH_LAPACK
  out.amplitudes = h;
  out.eigenvalues.resize(d);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(d),
                     out.amplitudes.data(), static_cast<lapack_int>(d), out.eigenvalues.data());
  if (info != 0)
    throw NumericError("diagonalize: dsyevd failed with info = " + std::to_string(info));
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericError("diagonalize: eigensolver did not converge");
  out.eigenvalues = solver.eigenvalues();
  out.amplitudes = solver.eigenvectors();
#endif
  fix_column_signs(out.amplitudes);
  return out;
}

StandardizedSpectrum standardize(const SpectralDecomposition& decomp) {
  const Eigen::Index d = decomp.dim();
  if (d < 2) throw NumericError("standardize: need at least 2 levels");

  StandardizedSpectrum out;
  const double centroid = decomp.eigenvalues.mean();
  const double var = (decomp.eigenvalues.array() - centroid).square().mean();
  if (var <= 0.0) throw NumericError("standardize: zero-variance spectrum");
  const double sigma = std::sqrt(var);

  out.e_hat = (decomp.eigenvalues.array() - centroid) / sigma;

  // H_kk = sum_alpha C(k,alpha)^2 E_alpha recovers the diagonal in the working basis.
  const Eigen::VectorXd diag = decomp.amplitudes.array().square().matrix() * decomp.eigenvalues;
  out.basis_e_hat = (diag.array() - diag.mean()) / sigma;
  const double diag_var = (diag.array() - diag.mean()).square().mean();

  out.stats.centroid = centroid;
  out.stats.sigma = sigma;
  out.stats.zeta_sq = diag_var / var;
  return out;
}

Eigen::VectorXd unfold(const Eigen::VectorXd& eigenvalues, double edge_trim, int poly_degree) {
  const Eigen::Index d = eigenvalues.size();
  if (poly_degree < 1) throw NumericError("unfold: polynomial degree must be >= 1");
  if (d < poly_degree + 2)
    throw NumericError("unfold: " + std::to_string(d) + " levels cannot support degree " +
                       std::to_string(poly_degree));
  if (edge_trim < 0.0 || edge_trim >= 0.5) throw NumericError("unfold: edge_trim out of range");

  // Fit the staircase N(E_i) = i + 1/2 with a polynomial in the rescaled
  // abscissa (conditioning), then difference the smooth fit.
  const double mean = eigenvalues.mean();
  const double scale = std::sqrt((eigenvalues.array() - mean).square().mean());
  if (scale <= 0.0) throw NumericError("unfold: zero-variance spectrum");

  Eigen::MatrixXd vander(d, poly_degree + 1);
  const Eigen::ArrayXd x = (eigenvalues.array() - mean) / scale;
  vander.col(0).setOnes();
  for (int p = 1; p <= poly_degree; ++p) vander.col(p) = vander.col(p - 1).array() * x;

  Eigen::VectorXd staircase(d);
  for (Eigen::Index i = 0; i < d; ++i) staircase(i) = static_cast<double>(i) + 0.5;
  const Eigen::VectorXd coef = vander.colPivHouseholderQr().solve(staircase);
  const Eigen::VectorXd smooth = vander * coef;

  const Eigen::Index cut = static_cast<Eigen::Index>(std::floor(edge_trim * d));
  const Eigen::Index lo = cut, hi = d - cut;  // retained levels [lo, hi)
  if (hi - lo < 2) throw NumericError("unfold: trim leaves fewer than 2 levels");

  Eigen::VectorXd spacings(hi - lo - 1);
  for (Eigen::Index i = lo; i + 1 < hi; ++i) spacings(i - lo) = smooth(i + 1) - smooth(i);
  const double s_mean = spacings.mean();
  if (s_mean <= 0.0) throw NumericError("unfold: non-increasing smooth staircase");
  spacings /= s_mean;
  return spacings;
}

SpectralDecomposition v_eigenbasis(const SpectralDecomposition& v_decomp,
                                   const SpectralDecomposition& h_decomp) {
  if (v_decomp.dim() != h_decomp.dim())
    throw NumericError("v_eigenbasis: dimension mismatch");
  SpectralDecomposition out;
  out.eigenvalues = h_decomp.eigenvalues;
  out.amplitudes = v_decomp.amplitudes.transpose() * h_decomp.amplitudes;
  out.basis_tag = "V-eigenbasis";
  return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw NumericError("ks_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double wigner_surmise_cdf(double s) {
  if (s <= 0.0) return 0.0;
  return 1.0 - std::exp(-0.25 * 3.14159265358979323846 * s * s);
}

double poisson_spacing_cdf(double s) {
  if (s <= 0.0) return 0.0;
  return 1.0 - std::exp(-s);
}

}  // namespace egoe
