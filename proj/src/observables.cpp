#include "egoe/observables.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "egoe/errors.hpp"

namespace egoe {

Eigen::VectorXd StrengthHistogram::bin_centers() const {
  const Eigen::Index n = density.size();
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = 0.5 * (bin_edges(i) + bin_edges(i + 1));
  return c;
}

StrengthHistogram strength_function(std::span<const SpectralDecomposition> decomps,
                                    std::span<const StandardizedSpectrum> stds,
                                    const HistogramOptions& options) {
  if (decomps.empty() || decomps.size() != stds.size())
    throw NumericError("strength_function: need a non-empty, matched ensemble");
  if (options.bins < 20) throw NumericError("strength_function: need at least 20 bins");
  if (!(options.hi > options.lo)) throw NumericError("strength_function: bad bin range");

  const int bins = options.bins;
  const double width = (options.hi - options.lo) / bins;

  StrengthHistogram hist;
  hist.bin_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) hist.bin_edges(b) = options.lo + b * width;

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(bins);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(bins);
  double w_total = 0.0, w_in = 0.0;
  double m1 = 0.0;
  std::int64_t selected = 0;
  int used_members = 0;

  for (std::size_t mem = 0; mem < decomps.size(); ++mem) {
    const auto& c = decomps[mem].amplitudes;
    const auto& st = stds[mem];
    const Eigen::Index d = decomps[mem].dim();

    std::vector<Eigen::Index> ks;
    for (Eigen::Index k = 0; k < d; ++k)
      if (std::abs(st.basis_e_hat(k) - options.k_center) <= options.k_halfwidth) ks.push_back(k);
    if (ks.empty()) continue;

    Eigen::VectorXd member_bins = Eigen::VectorXd::Zero(bins);
    for (const Eigen::Index k : ks) {
      for (Eigen::Index a = 0; a < d; ++a) {
        const double w = c(k, a) * c(k, a);
        const double x = st.e_hat(a);
        w_total += w;
        m1 += w * x;
        if (x >= options.lo && x < options.hi) {
          const int b = std::min(bins - 1, static_cast<int>((x - options.lo) / width));
          member_bins(b) += w;
          w_in += w;
        }
      }
    }
    member_bins /= static_cast<double>(ks.size()) * width;  // per-member density
    sum += member_bins;
    sum_sq += member_bins.cwiseProduct(member_bins);
    selected += static_cast<std::int64_t>(ks.size());
    ++used_members;
  }

  if (used_members == 0 || selected == 0)
    throw NumericError("strength_function: empty k-window selection");

  const double mean_x = m1 / w_total;
  // Second pass moments around the mean (central variance and kurtosis).
  double c2 = 0.0, c4 = 0.0;
  for (std::size_t mem = 0; mem < decomps.size(); ++mem) {
    const auto& c = decomps[mem].amplitudes;
    const auto& st = stds[mem];
    const Eigen::Index d = decomps[mem].dim();
    for (Eigen::Index k = 0; k < d; ++k) {
      if (std::abs(st.basis_e_hat(k) - options.k_center) > options.k_halfwidth) continue;
      for (Eigen::Index a = 0; a < d; ++a) {
        const double w = c(k, a) * c(k, a);
        const double dx = st.e_hat(a) - mean_x;
        c2 += w * dx * dx;
        c4 += w * dx * dx * dx * dx;
      }
    }
  }
  c2 /= w_total;
  c4 /= w_total;

  hist.centroid = mean_x;
  hist.variance = c2;
  hist.excess_kurtosis = (c2 > 0.0) ? c4 / (c2 * c2) - 3.0 : 0.0;
  hist.members = used_members;
  hist.selected_states = selected;
  hist.in_range_fraction = w_in / w_total;

  Eigen::VectorXd mean_density = sum / used_members;
  Eigen::VectorXd err = Eigen::VectorXd::Zero(bins);
  if (used_members > 1) {
    const Eigen::VectorXd var =
        (sum_sq - sum.cwiseProduct(sum) / used_members) / (used_members - 1);
    err = (var / used_members).cwiseMax(0.0).cwiseSqrt();
  }

  const double mass = mean_density.sum() * width;
  if (mass <= 0.0) throw NumericError("strength_function: no weight inside the bin range");
  hist.density = mean_density / mass;
  hist.density_err = err / mass;
  return hist;
}

Eigen::VectorXd participation_ratio(const SpectralDecomposition& decomp) {
  const Eigen::MatrixXd sq = decomp.amplitudes.array().square();
  const Eigen::VectorXd inv = sq.array().square().colwise().sum();
  return inv.cwiseInverse();
}

Eigen::VectorXd info_entropy(const SpectralDecomposition& decomp) {
  const Eigen::Index d = decomp.dim();
  Eigen::VectorXd s(decomp.amplitudes.cols());
  for (Eigen::Index a = 0; a < decomp.amplitudes.cols(); ++a) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double w = decomp.amplitudes(k, a) * decomp.amplitudes(k, a);
      if (w > 0.0) acc -= w * std::log(w);
    }
    s(a) = acc;
  }
  return s;
}

ObservableCurve curve_over_energy(std::span<const double> values, std::span<const double> e_hat,
                                  const CurveOptions& options, std::string basis_tag,
                                  int ensemble_size) {
  if (values.size() != e_hat.size())
    throw NumericError("curve_over_energy: value/energy length mismatch");
  if (options.points < 1 || !(options.hi >= options.lo) || options.window <= 0.0)
    throw NumericError("curve_over_energy: bad grid options");

  ObservableCurve curve;
  curve.basis_tag = std::move(basis_tag);
  curve.ensemble_size = ensemble_size;
  curve.e_hat.resize(options.points);
  curve.value.resize(options.points);
  curve.std_error.resize(options.points);

  const double step =
      options.points > 1 ? (options.hi - options.lo) / (options.points - 1) : 0.0;
  const double half = 0.5 * options.window;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int g = 0; g < options.points; ++g) {
    const double center = options.lo + g * step;
    double acc = 0.0, acc_sq = 0.0;
    std::int64_t n = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::abs(e_hat[i] - center) > half) continue;
      acc += values[i];
      acc_sq += values[i] * values[i];
      ++n;
    }
    curve.e_hat(g) = center;
    if (n == 0) {
      curve.value(g) = nan;
      curve.std_error(g) = nan;
    } else {
      const double mean = acc / n;
      curve.value(g) = mean;
      curve.std_error(g) =
          n > 1 ? std::sqrt(std::max(0.0, (acc_sq - n * mean * mean) / (n - 1)) / n) : 0.0;
    }
  }
  return curve;
}

DualPairValues dual_pair(const SpectralDecomposition& h_decomp, const StandardizedSpectrum& h_std,
                         const SpectralDecomposition& v_decomp) {
  DualPairValues out;
  out.e_hat = h_std.e_hat;
  out.xi2_weak = participation_ratio(h_decomp);
  out.s_weak = info_entropy(h_decomp);
  const SpectralDecomposition strong = v_eigenbasis(v_decomp, h_decomp);
  out.xi2_strong = participation_ratio(strong);
  out.s_strong = info_entropy(strong);
  return out;
}

namespace {

struct ColumnStats {
  double xi2 = 0.0, s = 0.0, evar = 0.0;
};

ColumnStats column_stats(const Eigen::Ref<const Eigen::VectorXd>& col,
                         const Eigen::Ref<const Eigen::VectorXd>& basis_e) {
  double p4 = 0.0, ent = 0.0, mu = 0.0, mom2 = 0.0;
  for (Eigen::Index k = 0; k < col.size(); ++k) {
    const double w = col(k) * col(k);
    p4 += w * w;
    if (w > 0.0) ent -= w * std::log(w);
    mu += w * basis_e(k);
    mom2 += w * basis_e(k) * basis_e(k);
  }
  return {1.0 / p4, ent, mom2 - mu * mu};
}

}  // namespace

DualWindowStats dual_window_stats(const SpectralDecomposition& h_decomp,
                                  const StandardizedSpectrum& h_std,
                                  const SpectralDecomposition& v_decomp,
                                  double central_halfwidth) {
  const Eigen::Index d = h_decomp.dim();
  std::vector<Eigen::Index> sel;
  for (Eigen::Index a = 0; a < d; ++a)
    if (std::abs(h_std.e_hat(a)) <= central_halfwidth) sel.push_back(a);

  DualWindowStats out;
  out.n_states = static_cast<std::int64_t>(sel.size());
  if (sel.empty()) return out;

  Eigen::MatrixXd central(d, sel.size());
  for (std::size_t c = 0; c < sel.size(); ++c) central.col(c) = h_decomp.amplitudes.col(sel[c]);

  // Strong-basis amplitudes for the selected columns only.
  const Eigen::MatrixXd strong = v_decomp.amplitudes.transpose() * central;

  const double v_mean = v_decomp.eigenvalues.mean();
  const double v_sigma =
      std::sqrt((v_decomp.eigenvalues.array() - v_mean).square().mean());
  const Eigen::VectorXd v_e_hat = (v_decomp.eigenvalues.array() - v_mean) / v_sigma;

  for (std::size_t c = 0; c < sel.size(); ++c) {
    const ColumnStats w = column_stats(central.col(c), h_std.basis_e_hat);
    const ColumnStats s = column_stats(strong.col(c), v_e_hat);
    out.xi2_weak += w.xi2;
    out.s_weak += w.s;
    out.evar_weak += w.evar;
    out.xi2_strong += s.xi2;
    out.s_strong += s.s;
    out.evar_strong += s.evar;
  }
  const double n = static_cast<double>(sel.size());
  out.xi2_weak /= n;
  out.s_weak /= n;
  out.evar_weak /= n;
  out.xi2_strong /= n;
  out.s_strong /= n;
  out.evar_strong /= n;
  return out;
}

}  // namespace egoe
