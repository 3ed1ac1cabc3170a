#include "egoe/pipeline.hpp"

#include <span>

#include "egoe/errors.hpp"
#include "egoe/parallel.hpp"

namespace egoe {

LambdaEnsemble collect_members(const EnsembleSetup& setup, double lambda) {
  setup.space.validate();
  if (setup.members < 1) throw ConfigError("collect_members: members must be >= 1");
  if (!(lambda > 0.0)) throw ConfigError("collect_members: lambda must be positive");

  const FockBasis basis(setup.space);
  const Eigen::VectorXd h1 = build_h1(setup.mean_field, basis);

  LambdaEnsemble ensemble;
  ensemble.lambda = lambda;
  ensemble.decomps.resize(setup.members);
  ensemble.stds.resize(setup.members);

  parallel_for(setup.members, setup.workers, [&](int member) {
    const SeedPolicy seeds{setup.master_seed, static_cast<std::uint64_t>(member)};
    const TwoBodyMatrix two_body = sample_two_body(setup.space, seeds, setup.v_scale);
    const Hamiltonian h = assemble(h1, embed_two_body(two_body, basis), lambda);
    ensemble.decomps[member] = diagonalize(h.matrix);
    ensemble.stds[member] = standardize(ensemble.decomps[member]);
  });

  for (const auto& s : ensemble.stds) {
    ensemble.mean_sigma += s.stats.sigma;
    ensemble.mean_zeta_sq += s.stats.zeta_sq;
  }
  ensemble.mean_sigma /= setup.members;
  ensemble.mean_zeta_sq /= setup.members;
  return ensemble;
}

StrengthHistogram LambdaEnsemble::histogram(const HistogramOptions& options) const {
  return strength_function(decomps, stds, options);
}

namespace {

ObservableCurve ensemble_curve(const LambdaEnsemble& ensemble, bool entropy,
                               const CurveOptions& options) {
  std::vector<double> values;
  std::vector<double> e_hat;
  for (std::size_t m = 0; m < ensemble.decomps.size(); ++m) {
    const Eigen::VectorXd v = entropy ? info_entropy(ensemble.decomps[m])
                                      : participation_ratio(ensemble.decomps[m]);
    const Eigen::VectorXd& e = ensemble.stds[m].e_hat;
    values.insert(values.end(), v.data(), v.data() + v.size());
    e_hat.insert(e_hat.end(), e.data(), e.data() + e.size());
  }
  return curve_over_energy(values, e_hat, options, "mean-field",
                           static_cast<int>(ensemble.decomps.size()));
}

}  // namespace

ObservableCurve LambdaEnsemble::xi2_curve(const CurveOptions& options) const {
  return ensemble_curve(*this, false, options);
}

ObservableCurve LambdaEnsemble::sinfo_curve(const CurveOptions& options) const {
  return ensemble_curve(*this, true, options);
}

}  // namespace egoe
