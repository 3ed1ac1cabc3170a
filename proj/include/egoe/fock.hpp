#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace egoe {

// Occupation bit-set over single-particle orbitals; orbital 0 is the
// least-significant bit.
using FockState = std::uint64_t;

std::int64_t binomial(int n, int k);

// m spinless fermions in N single-particle states. N is capped at 63 so an
// occupation always fits one machine word.
struct SpaceSpec {
  int n_sp = 0;       // N
  int n_fermions = 0; // m

  std::int64_t dim() const { return binomial(n_sp, n_fermions); }
  void validate() const;  // throws ConfigError on violation
};

// All binomial(N, m) occupation states, sorted ascending by integer value.
class FockBasis {
 public:
  explicit FockBasis(SpaceSpec spec);

  const SpaceSpec& space() const { return spec_; }
  std::int64_t size() const { return static_cast<std::int64_t>(states_.size()); }
  FockState state(std::int64_t i) const { return states_[static_cast<std::size_t>(i)]; }
  const std::vector<FockState>& states() const { return states_; }

  // Position of `s` in the sorted state list; -1 if absent.
  std::int64_t index(FockState s) const;

 private:
  SpaceSpec spec_;
  std::vector<FockState> states_;
};

FockBasis enumerate_basis(const SpaceSpec& spec);

struct PairOpResult {
  int phase;        // ±1
  FockState state;
};

// Applies the normal-ordered two-body term a†_i a†_j a_l a_k (i<j, k<l) to `s`.
// Operators act right to left: a_k, a_l, a†_j, a†_i. Each elementary step
// contributes (−1)^(number of occupied orbitals strictly below the acted
// orbital); with orbital 0 in the least-significant bit this is a popcount of
// the masked word. Returns nullopt when an annihilator misses or a creator
// collides.
std::optional<PairOpResult> apply_pair_op(int i, int j, int k, int l, FockState s, int n_sp);

}  // namespace egoe
