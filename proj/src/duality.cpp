#include "egoe/duality.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "egoe/errors.hpp"
#include "egoe/observables.hpp"
#include "egoe/parallel.hpp"
#include "egoe/spectra.hpp"

namespace egoe {

std::string to_string(DualObservable obs) {
  switch (obs) {
    case DualObservable::xi2: return "xi2";
    case DualObservable::info_entropy: return "info_entropy";
    case DualObservable::strength_variance: return "strength_variance";
  }
  throw ConfigError("unknown DualObservable");
}

DualObservable dual_observable_from_string(const std::string& name) {
  if (name == "xi2") return DualObservable::xi2;
  if (name == "info_entropy") return DualObservable::info_entropy;
  if (name == "strength_variance") return DualObservable::strength_variance;
  throw ConfigError("unknown duality observable '" + name +
                    "' (expected xi2 | info_entropy | strength_variance)");
}

double DualityPoint::weak(DualObservable obs) const {
  switch (obs) {
    case DualObservable::xi2: return xi2_weak;
    case DualObservable::info_entropy: return s_weak;
    case DualObservable::strength_variance: return evar_weak;
  }
  throw ConfigError("unknown DualObservable");
}

double DualityPoint::strong(DualObservable obs) const {
  switch (obs) {
    case DualObservable::xi2: return xi2_strong;
    case DualObservable::info_entropy: return s_strong;
    case DualObservable::strength_variance: return evar_strong;
  }
  throw ConfigError("unknown DualObservable");
}

double DualityPoint::weak_err(DualObservable obs) const {
  switch (obs) {
    case DualObservable::xi2: return xi2_weak_err;
    case DualObservable::info_entropy: return s_weak_err;
    case DualObservable::strength_variance: return evar_weak_err;
  }
  throw ConfigError("unknown DualObservable");
}

double DualityPoint::strong_err(DualObservable obs) const {
  switch (obs) {
    case DualObservable::xi2: return xi2_strong_err;
    case DualObservable::info_entropy: return s_strong_err;
    case DualObservable::strength_variance: return evar_strong_err;
  }
  throw ConfigError("unknown DualObservable");
}

DualityScan run_scan(const SpaceSpec& space, const MeanField& mean_field, double v_scale,
                     std::span<const double> lambdas, int members, std::uint64_t master_seed,
                     const DualityOptions& options) {
  space.validate();
  if (members < 2) throw ConfigError("run_scan: needs >= 2 members for standard errors");
  if (lambdas.empty()) throw ConfigError("run_scan: empty lambda grid");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("run_scan: lambda values must be positive");
  }

  const FockBasis basis(space);
  const Eigen::VectorXd h1 = build_h1(mean_field, basis);
  const auto n_lambda = static_cast<int>(lambdas.size());

  // slot(member, lambda) layout keeps aggregation order fixed
  std::vector<DualWindowStats> slots(static_cast<std::size_t>(members) * n_lambda);

  parallel_for(members, options.workers, [&](int member) {
    const SeedPolicy seeds{master_seed, static_cast<std::uint64_t>(member)};
    const TwoBodyMatrix two_body = sample_two_body(space, seeds, v_scale);
    const Eigen::MatrixXd v_emb = embed_two_body(two_body, basis);
    SpectralDecomposition v_decomp = diagonalize(v_emb);
    v_decomp.basis_tag = "V-eigenbasis";
    for (int l = 0; l < n_lambda; ++l) {
      const Hamiltonian h = assemble(h1, v_emb, lambdas[l]);
      const SpectralDecomposition h_decomp = diagonalize(h.matrix);
      const StandardizedSpectrum h_std = standardize(h_decomp);
      slots[static_cast<std::size_t>(member) * n_lambda + l] =
          dual_window_stats(h_decomp, h_std, v_decomp, options.central_halfwidth);
    }
  });

  DualityScan scan;
  scan.space = space;
  scan.members = members;
  scan.master_seed = master_seed;
  scan.v_scale = v_scale;
  scan.points.resize(n_lambda);

  for (int l = 0; l < n_lambda; ++l) {
    // mean and standard error over members, observable by observable
    auto accumulate = [&](auto pick) {
      double mean = 0.0;
      for (int m = 0; m < members; ++m) {
        mean += pick(slots[static_cast<std::size_t>(m) * n_lambda + l]);
      }
      mean /= members;
      double var = 0.0;
      for (int m = 0; m < members; ++m) {
        const double d = pick(slots[static_cast<std::size_t>(m) * n_lambda + l]) - mean;
        var += d * d;
      }
      var /= (members - 1);
      return std::pair<double, double>{mean, std::sqrt(var / members)};
    };

    DualityPoint& p = scan.points[l];
    p.lambda = lambdas[l];
    std::tie(p.xi2_weak, p.xi2_weak_err) =
        accumulate([](const DualWindowStats& s) { return s.xi2_weak; });
    std::tie(p.xi2_strong, p.xi2_strong_err) =
        accumulate([](const DualWindowStats& s) { return s.xi2_strong; });
    std::tie(p.s_weak, p.s_weak_err) =
        accumulate([](const DualWindowStats& s) { return s.s_weak; });
    std::tie(p.s_strong, p.s_strong_err) =
        accumulate([](const DualWindowStats& s) { return s.s_strong; });
    std::tie(p.evar_weak, p.evar_weak_err) =
        accumulate([](const DualWindowStats& s) { return s.evar_weak; });
    std::tie(p.evar_strong, p.evar_strong_err) =
        accumulate([](const DualWindowStats& s) { return s.evar_strong; });
  }
  return scan;
}

namespace {

struct Difference {
  std::vector<double> x;      // ln lambda
  std::vector<double> delta;  // weak - strong (log scale where positive-definite)
  std::vector<double> err;
};

Difference build_difference(const DualityScan& scan, DualObservable obs) {
  const bool log_scale = obs != DualObservable::info_entropy;
  Difference d;
  for (const DualityPoint& p : scan.points) {
    const double w = p.weak(obs);
    const double s = p.strong(obs);
    const double we = p.weak_err(obs);
    const double se = p.strong_err(obs);
    d.x.push_back(std::log(p.lambda));
    if (log_scale) {
      if (!(w > 0.0) || !(s > 0.0)) {
        throw NumericError("find_crossing: log-scale observable must be positive");
      }
      d.delta.push_back(std::log(w) - std::log(s));
      d.err.push_back(std::sqrt((we / w) * (we / w) + (se / s) * (se / s)));
    } else {
      d.delta.push_back(w - s);
      d.err.push_back(std::sqrt(we * we + se * se));
    }
  }
  return d;
}

// Quadratic least-squares refit through the points nearest the bracket; the
// shift of the root against the linear estimate is the interpolation error.
double quadratic_shift(const Difference& d, int bracket, double x_linear) {
  const int n = static_cast<int>(d.x.size());
  int lo = std::max(0, bracket - 1);
  int hi = std::min(n - 1, bracket + 2);
  if (hi - lo + 1 < 3) return 0.0;

  Eigen::MatrixXd a(hi - lo + 1, 3);
  Eigen::VectorXd b(hi - lo + 1);
  for (int i = lo; i <= hi; ++i) {
    const double t = d.x[i] - x_linear;
    a.row(i - lo) << 1.0, t, t * t;
    b[i - lo] = d.delta[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  // root of c0 + c1 t + c2 t^2 nearest t = 0
  const double disc = c[1] * c[1] - 4.0 * c[2] * c[0];
  if (std::abs(c[2]) < 1e-14 * std::abs(c[1])) {
    if (std::abs(c[1]) < 1e-300) return 0.0;
    return std::abs(-c[0] / c[1]);
  }
  if (disc < 0.0) return 0.0;
  const double sq = std::sqrt(disc);
  const double r1 = (-c[1] + sq) / (2.0 * c[2]);
  const double r2 = (-c[1] - sq) / (2.0 * c[2]);
  return std::min(std::abs(r1), std::abs(r2));
}

}  // namespace

CrossingResult find_crossing(const DualityScan& scan, DualObservable obs) {
  if (scan.points.size() < 2) throw ConfigError("find_crossing: needs >= 2 lambda points");
  const Difference d = build_difference(scan, obs);
  const int n = static_cast<int>(d.x.size());

  CrossingResult result;
  int crossings = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const bool sign_change = (d.delta[i] > 0.0) != (d.delta[i + 1] > 0.0);
    if (!sign_change && d.delta[i] != 0.0) continue;
    ++crossings;
    if (result.bracket_index >= 0) continue;  // keep the first
    result.bracket_index = i;
  }

  if (crossings == 0) {
    result.status = "no-crossing";
    result.lambda_d = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  result.status = crossings == 1 ? "ok" : "multiple-crossings";

  const int i = result.bracket_index;
  const double dx = d.x[i + 1] - d.x[i];
  const double denom = d.delta[i] - d.delta[i + 1];
  const double t = denom != 0.0 ? d.delta[i] / denom : 0.0;
  const double x_star = d.x[i] + t * dx;
  result.lambda_d = std::exp(x_star);

  if (denom != 0.0) {
    const double dt_d0 = -d.delta[i + 1] / (denom * denom);
    const double dt_d1 = d.delta[i] / (denom * denom);
    const double var_x = dx * dx *
        (dt_d0 * dt_d0 * d.err[i] * d.err[i] + dt_d1 * dt_d1 * d.err[i + 1] * d.err[i + 1]);
    result.stat_err = result.lambda_d * std::sqrt(var_x);
  }
  result.interp_err = result.lambda_d * quadratic_shift(d, i, x_star);
  result.err = std::hypot(result.stat_err, result.interp_err);
  return result;
}

ScalingFit scaling_fit(std::span<const ScalingPoint> points) {
  if (points.size() < 3) throw ConfigError("scaling_fit: needs >= 3 (m, lambda_d) points");
  double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const ScalingPoint& p : points) {
    if (p.m < 2 || !(p.lambda_d > 0.0)) {
      throw ConfigError("scaling_fit: requires m >= 2 and lambda_d > 0");
    }
    if (!(p.err > 0.0)) throw ConfigError("scaling_fit: uncertainties must be positive");
    const double x = std::log(static_cast<double>(p.m));
    const double y = std::log(p.lambda_d);
    const double sigma = p.err / p.lambda_d;  // err on ln(lambda_d)
    const double w = 1.0 / (sigma * sigma);
    s += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double det = s * sxx - sx * sx;
  if (!(det > 0.0)) throw NumericError("scaling_fit: degenerate design (identical m values?)");

  ScalingFit fit;
  fit.exponent = (s * sxy - sx * sy) / det;
  const double log_a = (sxx * sy - sx * sxy) / det;
  fit.amplitude = std::exp(log_a);
  fit.exponent_err = std::sqrt(s / det);
  fit.amplitude_err = fit.amplitude * std::sqrt(sxx / det);
  fit.dof = static_cast<int>(points.size()) - 2;

  for (const ScalingPoint& p : points) {
    const double x = std::log(static_cast<double>(p.m));
    const double y = std::log(p.lambda_d);
    const double sigma = p.err / p.lambda_d;
    const double r = (y - (log_a + fit.exponent * x)) / sigma;
    fit.chi2 += r * r;
  }
  // inflate errors when the straight line underfits (standard WLS practice)
  if (fit.dof > 0 && fit.chi2 / fit.dof > 1.0) {
    const double scale = std::sqrt(fit.chi2 / fit.dof);
    fit.exponent_err *= scale;
    fit.amplitude_err *= scale;
  }
  return fit;
}

}  // namespace egoe
