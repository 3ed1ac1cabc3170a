#include "egoe/ensemble.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "egoe/errors.hpp"

namespace egoe {

MeanField default_mean_field(int n_sp) {
  if (n_sp < 1) throw ConfigError("default_mean_field: n_sp must be >= 1");
  Eigen::VectorXd eps(n_sp);
  for (int i = 0; i < n_sp; ++i) eps(i) = (i + 1) + 1.0 / (i + 1);
  return MeanField{std::move(eps)};
}

std::pair<int, int> pair_orbitals(int p) {
  int j = 1;
  while (pair_index(0, j + 1) <= p) ++j;
  return {p - pair_index(0, j), j};
}

TwoBodyMatrix sample_two_body(const SpaceSpec& spec, const SeedPolicy& seeds, double v) {
  if (v <= 0.0) throw ConfigError("sample_two_body: v must be > 0");
  const int p = pair_count(spec.n_sp);
  GaussianStream gauss(seeds.stream_seed());
  Eigen::MatrixXd el(p, p);
  const double diag_sd = v * std::sqrt(2.0);
  for (int a = 0; a < p; ++a) {
    for (int b = a; b < p; ++b) {
      const double x = (a == b ? diag_sd : v) * gauss.next();
      el(a, b) = x;
      el(b, a) = x;
    }
  }
  return TwoBodyMatrix{std::move(el), v * v};
}

Eigen::VectorXd build_h1(const MeanField& mean_field, const FockBasis& basis) {
  const int n = basis.space().n_sp;
  if (mean_field.sp_energies.size() != n)
    throw ConfigError("build_h1: mean field has " + std::to_string(mean_field.sp_energies.size()) +
                      " energies for N = " + std::to_string(n));
  const std::int64_t d = basis.size();
  Eigen::VectorXd h1 = Eigen::VectorXd::Zero(d);
  for (std::int64_t s = 0; s < d; ++s) {
    FockState occ = basis.state(s);
    double sum = 0.0;
    while (occ) {
      const int orb = std::countr_zero(occ);
      sum += mean_field.sp_energies(orb);
      occ &= occ - 1;
    }
    h1(s) = sum;
  }
  return h1;
}

Eigen::MatrixXd embed_two_body(const TwoBodyMatrix& v, const FockBasis& basis) {
  const int n = basis.space().n_sp;
  const int p = pair_count(n);
  if (v.elements.rows() != p || v.elements.cols() != p)
    throw ConfigError("embed_two_body: V is " + std::to_string(v.elements.rows()) +
                      "x" + std::to_string(v.elements.cols()) + ", expected " +
                      std::to_string(p));

  const std::int64_t d = basis.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);

  // Occupied-pair list per column state, then every creation pair on top.
  std::vector<std::pair<int, int>> occ_pairs;
  occ_pairs.reserve(static_cast<std::size_t>(pair_count(basis.space().n_fermions)));
  for (std::int64_t col = 0; col < d; ++col) {
    const FockState s = basis.state(col);
    occ_pairs.clear();
    for (int l = 1; l < n; ++l) {
      if (!(s >> l & 1)) continue;
      for (int k = 0; k < l; ++k)
        if (s >> k & 1) occ_pairs.emplace_back(k, l);
    }
    for (const auto& [k, l] : occ_pairs) {
      const int q = pair_index(k, l);
      for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
          const auto res = apply_pair_op(i, j, k, l, s, n);
          if (!res) continue;
          const std::int64_t row = basis.index(res->state);
          out(row, col) += res->phase * v.elements(pair_index(i, j), q);
        }
      }
    }
  }

  // Row/column accumulation orders differ, so symmetrize the last bits away.
  out = ((out + out.transpose()) * 0.5).eval();
  return out;
}

std::string Provenance::to_string() const {
  if (kind == Kind::external) return "external";
  return "seed " + std::to_string(master_seed) + " member " + std::to_string(member_index);
}

Hamiltonian assemble(const Eigen::VectorXd& h1, const Eigen::MatrixXd& v_embedded, double lambda) {
  if (h1.size() != v_embedded.rows() || v_embedded.rows() != v_embedded.cols())
    throw NumericError("assemble: dimension mismatch between h1 and embedded V");
  Hamiltonian h;
  h.matrix = lambda * v_embedded;
  h.matrix.diagonal() += h1;
  h.lambda = lambda;
  return h;
}

}  // namespace egoe
