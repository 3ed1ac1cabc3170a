#include "egoe/fock.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "egoe/errors.hpp"

namespace egoe {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    if (result > INT64_MAX / (n - k + i))
      throw ConfigError("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                        ") overflows 64 bits");
    result = result * (n - k + i) / i;  // exact: product of i consecutive ints divisible by i!
  }
  return result;
}

void SpaceSpec::validate() const {
  if (n_sp < 0 || n_sp > 63)
    throw ConfigError("SpaceSpec: n_sp must be in [0, 63], got " + std::to_string(n_sp));
  if (n_fermions < 0 || n_fermions > n_sp)
    throw ConfigError("SpaceSpec: n_fermions must be in [0, n_sp], got " +
                      std::to_string(n_fermions));
}

FockBasis::FockBasis(SpaceSpec spec) : spec_(spec) {
  spec.validate();
  const int n = spec.n_sp;
  const int m = spec.n_fermions;
  states_.reserve(static_cast<std::size_t>(spec.dim()));
  if (m == 0) {
    states_.push_back(0);
    return;
  }
  // Gosper's hack walks same-popcount words in ascending order.
  FockState state = (FockState{1} << m) - 1;
  const FockState limit = (n == 63) ? ~FockState{0} : (FockState{1} << n) - 1;
  while (state <= limit) {
    states_.push_back(state);
    const FockState c = state & (~state + 1);
    const FockState r = state + c;
    if (r > limit || r < state) break;  // overflow past the orbital window
    state = (((r ^ state) >> 2) / c) | r;
  }
}

std::int64_t FockBasis::index(FockState s) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), s);
  if (it == states_.end() || *it != s) return -1;
  return static_cast<std::int64_t>(it - states_.begin());
}

FockBasis enumerate_basis(const SpaceSpec& spec) { return FockBasis(spec); }

namespace {

inline int sign_below(FockState s, int orbital) {
  const FockState mask = (FockState{1} << orbital) - 1;
  return (std::popcount(s & mask) & 1) ? -1 : 1;
}

}  // namespace

std::optional<PairOpResult> apply_pair_op(int i, int j, int k, int l, FockState s, int n_sp) {
  if (i < 0 || j >= n_sp || k < 0 || l >= n_sp || i >= j || k >= l)
    throw std::out_of_range("apply_pair_op: need 0 <= i < j < N and 0 <= k < l < N");

  int phase = 1;
  const FockState bk = FockState{1} << k;
  const FockState bl = FockState{1} << l;
  const FockState bi = FockState{1} << i;
  const FockState bj = FockState{1} << j;

  if (!(s & bk)) return std::nullopt;
  phase *= sign_below(s, k);
  s ^= bk;
  if (!(s & bl)) return std::nullopt;
  phase *= sign_below(s, l);
  s ^= bl;
  if (s & bj) return std::nullopt;
  phase *= sign_below(s, j);
  s |= bj;
  if (s & bi) return std::nullopt;
  phase *= sign_below(s, i);
  s |= bi;

  return PairOpResult{phase, s};
}

}  // namespace egoe
