#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "egoe/ensemble.hpp"
#include "egoe/fock.hpp"

namespace egoe {

// Observables whose weak-basis (Fock) and strong-basis (V-eigenbasis) values
// cross at the duality point.
enum class DualObservable { xi2, info_entropy, strength_variance };

std::string to_string(DualObservable obs);
DualObservable dual_observable_from_string(const std::string& name);

struct DualityOptions {
  double central_halfwidth = 0.1;  // |e_hat| window selecting central eigenstates
  int workers = 1;
};

// Ensemble means and standard errors at one lambda, both bases, all three
// observables (one scan serves every crossing definition).
struct DualityPoint {
  double lambda = 0.0;
  double xi2_weak = 0.0, xi2_strong = 0.0;
  double s_weak = 0.0, s_strong = 0.0;
  double evar_weak = 0.0, evar_strong = 0.0;
  double xi2_weak_err = 0.0, xi2_strong_err = 0.0;
  double s_weak_err = 0.0, s_strong_err = 0.0;
  double evar_weak_err = 0.0, evar_strong_err = 0.0;

  double weak(DualObservable obs) const;
  double strong(DualObservable obs) const;
  double weak_err(DualObservable obs) const;
  double strong_err(DualObservable obs) const;
};

struct DualityScan {
  SpaceSpec space;
  int members = 0;
  std::uint64_t master_seed = 0;
  double v_scale = 0.0;
  std::vector<DualityPoint> points;
};

// Runs the full weak/strong scan: per member, V is sampled and diagonalized
// once; each lambda reuses the embedded V. Members are distributed over
// `options.workers` threads with per-slot accumulation, so results do not
// depend on scheduling.
DualityScan run_scan(const SpaceSpec& space, const MeanField& mean_field, double v_scale,
                     std::span<const double> lambdas, int members, std::uint64_t master_seed,
                     const DualityOptions& options = {});

struct CrossingResult {
  double lambda_d = 0.0;
  double stat_err = 0.0;    // propagated ensemble errors
  double interp_err = 0.0;  // linear-vs-quadratic grid systematic
  double err = 0.0;         // quadrature sum of the two
  int bracket_index = -1;   // left grid index of the crossing interval
  std::string status;       // "ok", "no-crossing", "multiple-crossings"
};

// Locates the weak/strong crossing of the chosen observable by linear
// interpolation in ln(lambda). xi2 and strength_variance are compared on a log
// scale (same root, better linearity); entropy is already logarithmic.
// Absent or multiple sign changes are reported through `status`, not thrown.
CrossingResult find_crossing(const DualityScan& scan, DualObservable obs);

struct ScalingPoint {
  int m = 0;  // fermion number
  double lambda_d = 0.0;
  double err = 0.0;
};

// Weighted least-squares fit of lambda_d = a * m^p in log-log space.
struct ScalingFit {
  double exponent = 0.0;
  double exponent_err = 0.0;
  double amplitude = 0.0;
  double amplitude_err = 0.0;
  double chi2 = 0.0;
  int dof = 0;
};

ScalingFit scaling_fit(std::span<const ScalingPoint> points);

}  // namespace egoe
