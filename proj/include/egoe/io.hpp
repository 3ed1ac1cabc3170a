#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "egoe/ansatz.hpp"
#include "egoe/duality.hpp"
#include "egoe/observables.hpp"

namespace egoe {

// Comment header written into every output file: config hash + master seed.
struct OutputMeta {
  std::string config_hash;
  std::uint64_t master_seed = 0;

  std::string comment_line() const;
};

// --- EGOE-H v1: portable text Hamiltonians ------------------------------
// Line 1 is exactly "EGOE-H v1"; '#' comments may follow anywhere after it;
// then "dim <d>" and d(d+1)/2 lower-triangular values, row-major.

void save_hamiltonian(const std::string& path, const Eigen::MatrixXd& h,
                      const std::vector<std::string>& comments = {});

// Parse errors (malformed header, count mismatch, non-finite values) carry the
// offending line number and the expected value count.
Eigen::MatrixXd load_external_hamiltonian(const std::string& path);

// --- EGOE-F v1: externally supplied strength functions ------------------
// Line 1 is exactly "EGOE-F v1"; then rows "e_hat_center density" with
// ascending centers on a uniform grid and density >= 0.

struct ExternalStrength {
  Eigen::VectorXd centers;
  Eigen::VectorXd density;    // unit-normalized (trapezoid) on load
  double norm_factor = 1.0;   // the integral divided out

  // Uniform-bin histogram view suitable for fit_ansatz.
  StrengthHistogram to_histogram() const;
};

ExternalStrength load_external_strength(const std::string& path);
void save_strength(const std::string& path, const Eigen::VectorXd& centers,
                   const Eigen::VectorXd& density,
                   const std::vector<std::string>& comments = {});

// --- CSV writers (pinned headers, deterministic %.12g formatting) -------

// header: e_hat,density,stderr
void write_histogram_csv(const std::string& path, const StrengthHistogram& hist,
                         const OutputMeta& meta);

// header: e_hat,value,stderr,basis ; curves are concatenated
void write_curves_csv(const std::string& path, std::span<const ObservableCurve> curves,
                      const OutputMeta& meta);

// header: lambda,xi2_weak,xi2_strong,s_weak,s_strong,evar_weak,evar_strong,
//         xi2_weak_err,xi2_strong_err,s_weak_err,s_strong_err,evar_weak_err,evar_strong_err
void write_duality_csv(const std::string& path, const DualityScan& scan,
                       const OutputMeta& meta);

// header: m,lambda_d,err
void write_scaling_csv(const std::string& path, std::span<const ScalingPoint> points,
                       const OutputMeta& meta);

void write_text_file(const std::string& path, const std::string& content);

std::string format_g12(double v);

}  // namespace egoe
