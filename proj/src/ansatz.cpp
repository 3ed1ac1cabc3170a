#include "egoe/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "egoe/errors.hpp"
#include "egoe/levmar.hpp"
#include "egoe/quadrature.hpp"

namespace egoe {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp_inverse_shape(double u, double max_shape) {
  return std::clamp(u, 1.0 / max_shape, 1.0);
}

// log of the Student-t normalization C(nu) = Gamma((nu+1)/2) / (sqrt(nu pi) Gamma(nu/2))
double log_t_norm(double nu) {
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * kPi);
}

struct ShapeEval {
  double center;
  double scale;
  double nu;
  double log_norm;  // log(C(nu)/gamma)

  double operator()(double e) const {
    const double z = (e - center) / scale;
    // log1p keeps the Gaussian limit accurate when nu is large and z^2/nu tiny.
    const double log_f = log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
    return std::exp(log_f);
  }
};

ShapeEval make_eval(double center, double scale, double nu) {
  return ShapeEval{center, scale, nu, log_t_norm(nu) - std::log(scale)};
}

// Half width at half maximum of the ansatz in units of gamma (exact identity).
double hwhm_factor(double nu) {
  return std::sqrt(nu * (std::pow(2.0, 2.0 / (nu + 1.0)) - 1.0));
}

// Crude HWHM read off the histogram, used only to seed the fit.
double estimate_hwhm(const StrengthHistogram& hist) {
  const auto centers = hist.bin_centers();
  const auto n = static_cast<int>(hist.density.size());
  int peak = 0;
  for (int b = 1; b < n; ++b) {
    if (hist.density[b] > hist.density[peak]) peak = b;
  }
  const double half = 0.5 * hist.density[peak];
  double right = hist.bin_edges(hist.bin_edges.size() - 1);
  for (int b = peak + 1; b < n; ++b) {
    if (hist.density[b] < half) {
      const double d0 = hist.density[b - 1];
      const double d1 = hist.density[b];
      const double frac = (d0 - half) / std::max(d0 - d1, 1e-300);
      right = centers[b - 1] + frac * (centers[b] - centers[b - 1]);
      break;
    }
  }
  double left = hist.bin_edges(0);
  for (int b = peak - 1; b >= 0; --b) {
    if (hist.density[b] < half) {
      const double d0 = hist.density[b + 1];
      const double d1 = hist.density[b];
      const double frac = (d0 - half) / std::max(d0 - d1, 1e-300);
      left = centers[b + 1] - frac * (centers[b + 1] - centers[b]);
      break;
    }
  }
  return std::max(0.5 * (right - left), hist.bin_width());
}

// Residuals of the bin-averaged, range-renormalized model against the
// histogram densities. Parameters: (center, log gamma, 1/nu).
class BinnedResiduals {
 public:
  BinnedResiduals(const StrengthHistogram& hist, double max_shape, double quad_tol)
      : hist_(hist), max_shape_(max_shape), quad_tol_(quad_tol) {}

  Eigen::VectorXd operator()(const Eigen::VectorXd& theta) const {
    const double center = theta[0];
    const double scale = std::exp(theta[1]);
    const double nu = 1.0 / clamp_inverse_shape(theta[2], max_shape_);
    const auto eval = make_eval(center, scale, nu);

    const auto bins = static_cast<int>(hist_.density.size());
    Eigen::VectorXd integrals(bins);
    double mass = 0.0;
    for (int b = 0; b < bins; ++b) {
      integrals[b] = integrate([&](double e) { return eval(e); }, hist_.bin_edges[b],
                               hist_.bin_edges[b + 1], quad_tol_);
      mass += integrals[b];
    }
    if (!(mass > 0.0)) throw NumericError("ansatz fit: model mass vanished in histogram range");

    const double width = hist_.bin_width();
    Eigen::VectorXd r(bins);
    for (int b = 0; b < bins; ++b) {
      r[b] = integrals[b] / (mass * width) - hist_.density[b];
    }
    return r;
  }

 private:
  const StrengthHistogram& hist_;
  double max_shape_;
  double quad_tol_;
};

double coefficient_of_determination(const StrengthHistogram& hist, double residual_norm) {
  const auto n = static_cast<double>(hist.density.size());
  double mean = 0.0;
  for (double d : hist.density) mean += d;
  mean /= n;
  double sst = 0.0;
  for (double d : hist.density) sst += (d - mean) * (d - mean);
  if (sst <= 0.0) return 0.0;
  return 1.0 - residual_norm * residual_norm / sst;
}

}  // namespace

double bw_form(double e, double center, double width) {
  const double x = e - center;
  return (width / (2.0 * kPi)) / (x * x + 0.25 * width * width);
}

double gauss_form(double e, double center, double sigma) {
  const double z = (e - center) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

double ansatz_form(double e, double center, double scale, double shape) {
  if (!(scale > 0.0) || !(shape >= 1.0)) {
    throw ConfigError("ansatz_form: requires scale > 0 and shape >= 1");
  }
  return make_eval(center, scale, shape)(e);
}

double ansatz_form(double e, const AnsatzParams& params) {
  return ansatz_form(e, params.center, params.scale, params.shape);
}

AnsatzParams fit_ansatz(const StrengthHistogram& hist,
                        const std::optional<AnsatzParams>& init,
                        const FitOptions& options) {
  const auto bins = static_cast<int>(hist.density.size());
  if (bins < 2 || static_cast<int>(hist.bin_edges.size()) != bins + 1) {
    throw ConfigError("fit_ansatz: malformed histogram");
  }
  int nonempty = 0;
  for (double d : hist.density) {
    if (d > 0.0) ++nonempty;
  }
  if (nonempty <= 1) {
    throw NumericError("fit_ansatz: degenerate histogram (all weight in one bin)");
  }
  if (nonempty < 20) {
    throw NumericError("fit_ansatz: fewer than 20 nonempty bins; widen the window or add members");
  }

  const double hwhm = estimate_hwhm(hist);
  const BinnedResiduals residuals(hist, options.max_shape, options.quad_tol);

  struct Start {
    double center, scale, inv_shape;
  };
  std::vector<Start> starts;
  if (options.constrain_breit_wigner) {
    starts.push_back({hist.centroid, hwhm, 1.0});
  } else {
    for (double nu : options.shape_starts) {
      const double nu_c = std::clamp(nu, 1.0, options.max_shape);
      starts.push_back({hist.centroid, hwhm / hwhm_factor(nu_c), 1.0 / nu_c});
    }
    if (init) {
      starts.push_back({init->center, init->scale,
                        clamp_inverse_shape(1.0 / init->shape, options.max_shape)});
    }
  }

  std::vector<bool> mask;
  if (options.constrain_breit_wigner) mask = {true, true, false};

  LevMarOptions lm;
  lm.max_iterations = 300;

  bool have_best = false;
  LevMarResult best;
  for (const auto& s : starts) {
    Eigen::VectorXd x0(3);
    x0 << s.center, std::log(std::max(s.scale, 1e-6)), s.inv_shape;
    LevMarResult run;
    try {
      run = levmar(residuals, x0, lm, mask);
    } catch (const NumericError&) {
      continue;  // a start may push the model mass out of range; others recover
    }
    if (!have_best || run.residual_norm < best.residual_norm) {
      best = run;
      have_best = true;
    }
  }
  if (!have_best) throw NumericError("fit_ansatz: no start produced a usable fit");

  AnsatzParams out;
  out.center = best.x[0];
  out.scale = std::exp(best.x[1]);
  out.shape = 1.0 / clamp_inverse_shape(best.x[2], options.max_shape);
  out.fit.residual_norm = best.residual_norm;
  out.fit.r_squared = coefficient_of_determination(hist, best.residual_norm);
  out.fit.converged = best.converged;
  return out;
}

std::vector<WidthPoint> bw_width_scan(std::span<const double> lambdas,
                                      std::span<const StrengthHistogram> hists,
                                      std::span<const double> sigmas,
                                      const FitOptions& options) {
  if (lambdas.size() != hists.size() || lambdas.size() != sigmas.size()) {
    throw ConfigError("bw_width_scan: lambda/histogram/sigma arrays must align");
  }
  std::vector<WidthPoint> table;
  table.reserve(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    FitOptions free_opts = options;
    free_opts.constrain_breit_wigner = false;
    const AnsatzParams free_fit = fit_ansatz(hists[i], std::nullopt, free_opts);

    FitOptions bw_opts = options;
    bw_opts.constrain_breit_wigner = true;
    const AnsatzParams bw_fit = fit_ansatz(hists[i], std::nullopt, bw_opts);

    WidthPoint p;
    p.lambda = lambdas[i];
    p.shape_free = free_fit.shape;
    p.gamma_std = 2.0 * bw_fit.scale;  // BW full width Gamma = 2 gamma at nu = 1
    p.gamma_raw = p.gamma_std * sigmas[i];
    p.residual = bw_fit.fit.residual_norm;
    p.in_bw_domain = free_fit.shape < 2.0;
    table.push_back(p);
  }
  return table;
}

namespace {

// Convolution moments of the fitted profile against the Gaussian basis-state
// centroid density of width zeta (standardized units).
struct ConvolutionKernels {
  ShapeEval eval;
  double zeta;
  double quad_tol;

  double conv(double e) const { return moment(e, [](double f) { return f; }); }
  double square(double e) const { return moment(e, [](double f) { return f * f; }); }
  double f_log_f(double e) const {
    return moment(e, [](double f) { return f > 0.0 ? f * std::log(f) : 0.0; });
  }

  template <typename Map>
  double moment(double e, Map map) const {
    if (zeta <= 0.0) return map(eval(e));
    // substitute eps = zeta t; the standard-normal factor kills |t| > 8
    auto integrand = [&](double t) {
      const double phi = std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi);
      return phi * map(eval(e - zeta * t));
    };
    return integrate(integrand, -8.0, 8.0, quad_tol);
  }
};

ConvolutionKernels make_kernels(const AnsatzParams& params, const SpectralStats& stats,
                                double quad_tol) {
  if (!(stats.zeta_sq >= 0.0) || stats.zeta_sq >= 1.0) {
    throw NumericError("prediction requires 0 <= zeta^2 < 1");
  }
  return ConvolutionKernels{make_eval(params.center, params.scale, params.shape),
                            std::sqrt(stats.zeta_sq), quad_tol};
}

ObservableCurve prediction_grid(const PredictionOptions& options) {
  if (options.points < 2 || !(options.hi > options.lo)) {
    throw ConfigError("prediction grid requires points >= 2 and hi > lo");
  }
  ObservableCurve curve;
  curve.basis_tag = "prediction";
  curve.ensemble_size = 0;
  curve.e_hat.resize(options.points);
  curve.value.resize(options.points);
  curve.std_error = Eigen::VectorXd::Zero(options.points);
  const double step = (options.hi - options.lo) / (options.points - 1);
  for (int i = 0; i < options.points; ++i) curve.e_hat(i) = options.lo + i * step;
  return curve;
}

}  // namespace

ObservableCurve predict_xi2(const AnsatzParams& params, const SpectralStats& stats,
                            std::int64_t dim, const PredictionOptions& options) {
  if (dim < 2) throw ConfigError("predict_xi2: dim must be >= 2");
  const auto kernels = make_kernels(params, stats, options.quad_tol);
  ObservableCurve curve = prediction_grid(options);
  for (Eigen::Index i = 0; i < curve.e_hat.size(); ++i) {
    const double e = curve.e_hat(i);
    const double c = kernels.conv(e);
    const double m2 = kernels.square(e);
    if (!(c > 0.0) || !(m2 > 0.0)) {
      throw NumericError("predict_xi2: convolution vanished inside the window");
    }
    curve.value(i) = (static_cast<double>(dim) / 3.0) * c * c / m2;
  }
  return curve;
}

ObservableCurve predict_sinfo(const AnsatzParams& params, const SpectralStats& stats,
                              std::int64_t dim, const PredictionOptions& options) {
  if (dim < 2) throw ConfigError("predict_sinfo: dim must be >= 2");
  const auto kernels = make_kernels(params, stats, options.quad_tol);
  ObservableCurve curve = prediction_grid(options);
  for (Eigen::Index i = 0; i < curve.e_hat.size(); ++i) {
    const double e = curve.e_hat(i);
    const double c = kernels.conv(e);
    if (!(c > 0.0)) throw NumericError("predict_sinfo: convolution vanished inside the window");
    const double il = kernels.f_log_f(e);
    curve.value(i) =
        std::log(static_cast<double>(dim) * c) - il / c - kPorterThomasLogMoment;
  }
  return curve;
}

}  // namespace egoe
