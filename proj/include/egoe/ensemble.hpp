#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>

#include "egoe/fock.hpp"
#include "egoe/rng.hpp"

namespace egoe {

// One-body part h(1), defined by its single-particle energies.
struct MeanField {
  Eigen::VectorXd sp_energies;
};

// Default near-uniform spectrum with slight anharmonicity:
// eps_i = (i+1) + 1/(i+1), i = 0..N-1.
MeanField default_mean_field(int n_sp);

// Identifies one ensemble member's random stream. Identical
// (master_seed, member_index) gives a bit-identical TwoBodyMatrix
// within one build.
struct SeedPolicy {
  std::uint64_t master_seed = 0;
  std::uint64_t member_index = 0;

  // SplitMix64-avalanche mix of the two fields.
  std::uint64_t stream_seed() const {
    return splitmix_avalanche(master_seed + 0x9E3779B97F4A7C15ULL * (member_index + 1));
  }
};

// Pair-space indexing for ordered orbital pairs (i < j). Pairs are ordered by
// ascending bitmask value (1<<i)|(1<<j), i.e. by j then i, so that for m = 2
// the Fock basis and the pair space coincide index-by-index.
inline int pair_count(int n_sp) { return n_sp * (n_sp - 1) / 2; }
inline int pair_index(int i, int j) { return j * (j - 1) / 2 + i; }
std::pair<int, int> pair_orbitals(int p);

// Random two-body interaction V(2): a GOE-convention real symmetric matrix in
// pair space, variance v^2 off-diagonal and 2 v^2 on the diagonal.
struct TwoBodyMatrix {
  Eigen::MatrixXd elements;  // P x P, symmetric
  double variance = 1.0;     // v^2
};

TwoBodyMatrix sample_two_body(const SpaceSpec& spec, const SeedPolicy& seeds, double v);

// Diagonal of h(1) in the Fock basis: entry for state s is the sum of the
// occupied single-particle energies.
Eigen::VectorXd build_h1(const MeanField& mean_field, const FockBasis& basis);

// Embeds V(2) into the m-fermion space:
//   <s'|V|s> = sum_{i<j, k<l} V_(ij),(kl) * phase(a†_i a†_j a_l a_k : s -> s').
Eigen::MatrixXd embed_two_body(const TwoBodyMatrix& v, const FockBasis& basis);

struct Provenance {
  enum class Kind { sampled, external };
  Kind kind = Kind::sampled;
  std::uint64_t master_seed = 0;
  std::uint64_t member_index = 0;

  std::string to_string() const;
};

struct Hamiltonian {
  Eigen::MatrixXd matrix;  // dense symmetric d x d
  double lambda = 0.0;
  Provenance provenance;
};

// H = diag(h1) + lambda * V_embedded. V is sampled once per member and shared
// across a lambda grid; lambda only scales it here.
Hamiltonian assemble(const Eigen::VectorXd& h1, const Eigen::MatrixXd& v_embedded, double lambda);

}  // namespace egoe
