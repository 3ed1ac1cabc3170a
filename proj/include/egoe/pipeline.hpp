#pragma once

#include <cstdint>
#include <vector>

#include "egoe/ensemble.hpp"
#include "egoe/fock.hpp"
#include "egoe/observables.hpp"
#include "egoe/spectra.hpp"

namespace egoe {

struct EnsembleSetup {
  SpaceSpec space;
  MeanField mean_field;
  double v_scale = 1.0;
  int members = 10;
  std::uint64_t master_seed = 1;
  int workers = 1;
};

// All members of the ensemble at one lambda, decomposed and standardized.
// Everything is kept in memory; sized for desk-scale dimensions (d ~ 1e3).
struct LambdaEnsemble {
  double lambda = 0.0;
  std::vector<SpectralDecomposition> decomps;
  std::vector<StandardizedSpectrum> stds;
  double mean_sigma = 0.0;    // spectrum width averaged over members
  double mean_zeta_sq = 0.0;  // correlation coefficient averaged over members

  StrengthHistogram histogram(const HistogramOptions& options = {}) const;
  ObservableCurve xi2_curve(const CurveOptions& options = {}) const;
  ObservableCurve sinfo_curve(const CurveOptions& options = {}) const;
};

// Samples, embeds, assembles, and diagonalizes every member at the given
// lambda. Member i always uses stream seed i regardless of worker count, so
// results are reproducible and ensembles at different lambdas share their V.
LambdaEnsemble collect_members(const EnsembleSetup& setup, double lambda);

}  // namespace egoe
