// Tests for the mean field, pair-space indexing, GOE sampling conventions,
// and the two-body embedding.

#include <bit>
#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "egoe/ensemble.hpp"
#include "egoe/errors.hpp"

namespace {

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("default mean field: eps_i = (i+1) + 1/(i+1)") {
  const egoe::MeanField one = egoe::default_mean_field(1);
  REQUIRE(one.sp_energies.size() == 1);
  CHECK(one.sp_energies(0) == doctest::Approx(2.0).epsilon(1e-15));

  const egoe::MeanField three = egoe::default_mean_field(3);
  REQUIRE(three.sp_energies.size() == 3);
  CHECK(three.sp_energies(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(three.sp_energies(1) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(three.sp_energies(2) == doctest::Approx(3.0 + 1.0 / 3.0).epsilon(1e-15));

  const egoe::MeanField twelve = egoe::default_mean_field(12);
  REQUIRE(twelve.sp_energies.size() == 12);
  CHECK(twelve.sp_energies(11) == doctest::Approx(12.0 + 1.0 / 12.0).epsilon(1e-15));
  for (int i = 1; i < 12; ++i)  // strictly increasing: level spacings stay positive
    CHECK(twelve.sp_energies(i) > twelve.sp_energies(i - 1));

  CHECK_THROWS_AS((void)egoe::default_mean_field(0), egoe::ConfigError);
}

TEST_CASE("pair indexing: round trip and bitmask ordering") {
  CHECK(egoe::pair_count(8) == 28);
  CHECK(egoe::pair_count(2) == 1);
  CHECK(egoe::pair_index(0, 1) == 0);
  CHECK(egoe::pair_index(0, 2) == 1);
  CHECK(egoe::pair_index(1, 2) == 2);
  CHECK(egoe::pair_index(0, 3) == 3);

  const int n = 9;
  egoe::FockState prev_mask = 0;
  for (int p = 0; p < egoe::pair_count(n); ++p) {
    const auto [i, j] = egoe::pair_orbitals(p);
    CHECK(i < j);
    CHECK(j < n);
    CHECK(egoe::pair_index(i, j) == p);
    const egoe::FockState mask = (egoe::FockState{1} << i) | (egoe::FockState{1} << j);
    CHECK(mask > prev_mask);  // ascending bitmask order
    prev_mask = mask;
  }
}

TEST_CASE("pair space coincides with the m = 2 Fock basis index-by-index") {
  const egoe::FockBasis basis(egoe::SpaceSpec{8, 2});
  REQUIRE(basis.size() == egoe::pair_count(8));
  for (std::int64_t p = 0; p < basis.size(); ++p) {
    const auto [i, j] = egoe::pair_orbitals(static_cast<int>(p));
    const egoe::FockState mask = (egoe::FockState{1} << i) | (egoe::FockState{1} << j);
    CHECK(basis.state(p) == mask);
  }
}

TEST_CASE("two-body sampling is deterministic in (master_seed, member_index)") {
  const egoe::SpaceSpec spec{8, 4};
  const auto a = egoe::sample_two_body(spec, {42, 3}, 1.0);
  const auto b = egoe::sample_two_body(spec, {42, 3}, 1.0);
  const auto other_member = egoe::sample_two_body(spec, {42, 4}, 1.0);
  const auto other_master = egoe::sample_two_body(spec, {43, 3}, 1.0);

  REQUIRE(a.elements.rows() == 28);
  CHECK(max_abs_diff(a.elements, b.elements) == 0.0);  // bitwise reproducible
  CHECK(max_abs_diff(a.elements, other_member.elements) > 0.0);
  CHECK(max_abs_diff(a.elements, other_master.elements) > 0.0);

  const auto scaled = egoe::sample_two_body(spec, {42, 3}, 0.7);
  CHECK(scaled.variance == doctest::Approx(0.49).epsilon(1e-15));
  CHECK_THROWS_AS((void)egoe::sample_two_body(spec, {42, 3}, 0.0), egoe::ConfigError);
}

TEST_CASE("GOE convention: off-diagonal variance v^2, diagonal 2 v^2") {
  // N = 24 gives a 276-dimensional pair space: 37950 independent off-diagonal
  // entries in one draw, and 276 diagonal entries per member.
  const egoe::SpaceSpec spec{24, 2};
  const auto v = egoe::sample_two_body(spec, {2024, 0}, 1.0);
  const int p = static_cast<int>(v.elements.rows());
  REQUIRE(p == 276);
  CHECK(max_abs_diff(v.elements, v.elements.transpose()) == 0.0);

  double sum = 0.0, sum_sq = 0.0;
  std::int64_t n_off = 0;
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      sum += v.elements(a, b);
      sum_sq += v.elements(a, b) * v.elements(a, b);
      ++n_off;
    }
  }
  const double mean_off = sum / static_cast<double>(n_off);
  const double var_off = sum_sq / static_cast<double>(n_off) - mean_off * mean_off;
  CHECK(std::abs(mean_off) <= 0.02);
  CHECK(var_off == doctest::Approx(1.0).epsilon(0.05));

  double dsum = 0.0, dsum_sq = 0.0;
  std::int64_t n_diag = 0;
  for (int member = 0; member < 50; ++member) {
    const auto w = egoe::sample_two_body(spec, {2024, static_cast<std::uint64_t>(member)}, 1.0);
    for (int a = 0; a < p; ++a) {
      dsum += w.elements(a, a);
      dsum_sq += w.elements(a, a) * w.elements(a, a);
      ++n_diag;
    }
  }
  const double mean_diag = dsum / static_cast<double>(n_diag);
  const double var_diag = dsum_sq / static_cast<double>(n_diag) - mean_diag * mean_diag;
  CHECK(var_diag == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("build_h1 sums the occupied single-particle energies") {
  const egoe::FockBasis basis(egoe::SpaceSpec{4, 2});
  egoe::MeanField mf;
  mf.sp_energies = Eigen::Vector4d{1.0, 2.0, 3.0, 4.0};
  const Eigen::VectorXd h1 = egoe::build_h1(mf, basis);
  REQUIRE(h1.size() == 6);

  CHECK(h1(basis.index(0b0011)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(h1(basis.index(0b1100)) == doctest::Approx(7.0).epsilon(1e-15));
  // Each orbital is occupied in C(3,1) = 3 of the 6 states, so the mean is
  // (m/N) * sum(eps) = (2/4) * 10.
  CHECK(h1.mean() == doctest::Approx(5.0).epsilon(1e-15));

  const egoe::FockBasis vacuum(egoe::SpaceSpec{4, 0});
  const Eigen::VectorXd empty = egoe::build_h1(mf, vacuum);
  REQUIRE(empty.size() == 1);
  CHECK(empty(0) == 0.0);

  egoe::MeanField wrong;
  wrong.sp_energies = Eigen::Vector3d{1.0, 2.0, 3.0};
  CHECK_THROWS_AS((void)egoe::build_h1(wrong, basis), egoe::ConfigError);
}

TEST_CASE("m = 2 embedding reproduces the pair matrix element-by-element") {
  const egoe::SpaceSpec spec{6, 2};
  const egoe::FockBasis basis(spec);
  const auto v = egoe::sample_two_body(spec, {7, 3}, 1.0);
  const Eigen::MatrixXd emb = egoe::embed_two_body(v, basis);

  REQUIRE(emb.rows() == v.elements.rows());
  CHECK(max_abs_diff(emb, v.elements) <= 1e-12);
  const std::int64_t s01 = basis.index(0b0011);
  CHECK(emb(s01, s01) == doctest::Approx(v.elements(0, 0)).epsilon(1e-12));
}

TEST_CASE("full space (m = N): the single diagonal element sums all V_pp") {
  const egoe::SpaceSpec spec{3, 3};
  const egoe::FockBasis basis(spec);
  const auto v = egoe::sample_two_body(spec, {11, 0}, 1.0);
  const Eigen::MatrixXd emb = egoe::embed_two_body(v, basis);
  REQUIRE(emb.rows() == 1);
  // With every orbital occupied only (i,j) = (k,l) survives, each with
  // phase +1, so the lone matrix element is the trace of the pair matrix.
  CHECK(emb(0, 0) == doctest::Approx(v.elements.trace()).epsilon(1e-12));
}

TEST_CASE("unit pair interaction embeds as a pair-occupancy counter") {
  // V = |q><q| in pair space acts as the number-operator product n_k n_l,
  // so the embedded matrix is diagonal with entry 1 iff both orbitals of
  // pair q are occupied.
  const egoe::SpaceSpec spec{6, 3};
  const egoe::FockBasis basis(spec);
  const int q = egoe::pair_index(1, 4);
  egoe::TwoBodyMatrix v;
  v.elements = Eigen::MatrixXd::Zero(egoe::pair_count(6), egoe::pair_count(6));
  v.elements(q, q) = 1.0;
  const Eigen::MatrixXd emb = egoe::embed_two_body(v, basis);

  for (std::int64_t r = 0; r < basis.size(); ++r) {
    for (std::int64_t c = 0; c < basis.size(); ++c) {
      const egoe::FockState s = basis.state(c);
      const bool occ = (s >> 1 & 1) && (s >> 4 & 1);
      const double expect = (r == c && occ) ? 1.0 : 0.0;
      CHECK(std::abs(emb(r, c) - expect) <= 1e-12);
    }
  }
}

TEST_CASE("embedded matrix is symmetric and satisfies the trace identity") {
  const egoe::SpaceSpec spec{6, 3};
  const egoe::FockBasis basis(spec);
  const auto v = egoe::sample_two_body(spec, {5, 1}, 1.0);
  const Eigen::MatrixXd emb = egoe::embed_two_body(v, basis);

  const double scale = emb.cwiseAbs().maxCoeff();
  CHECK(max_abs_diff(emb, emb.transpose()) <= 1e-14 * scale);

  // trace(V_embedded) = sum over states of sum over occupied pairs of V_pp,
  // worked out here straight from the bitmasks.
  double expected = 0.0;
  for (std::int64_t s = 0; s < basis.size(); ++s) {
    const egoe::FockState occ = basis.state(s);
    for (int l = 1; l < spec.n_sp; ++l) {
      if (!(occ >> l & 1)) continue;
      for (int k = 0; k < l; ++k) {
        if (!(occ >> k & 1)) continue;
        const int p = egoe::pair_index(k, l);
        expected += v.elements(p, p);
      }
    }
  }
  CHECK(emb.trace() == doctest::Approx(expected).epsilon(1e-12));

  const egoe::TwoBodyMatrix wrong_size{Eigen::MatrixXd::Zero(3, 3), 1.0};
  CHECK_THROWS_AS((void)egoe::embed_two_body(wrong_size, basis), egoe::ConfigError);
}

TEST_CASE("assemble composes the diagonal h1 with the scaled interaction") {
  const egoe::SpaceSpec spec{4, 2};
  const egoe::FockBasis basis(spec);
  const Eigen::VectorXd h1 = egoe::build_h1(egoe::default_mean_field(4), basis);
  const auto v = egoe::sample_two_body(spec, {1, 0}, 1.0);
  const Eigen::MatrixXd emb = egoe::embed_two_body(v, basis);

  const egoe::Hamiltonian off = egoe::assemble(h1, emb, 0.0);
  CHECK(off.lambda == 0.0);
  CHECK(max_abs_diff(off.matrix, Eigen::MatrixXd(h1.asDiagonal())) == 0.0);

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(basis.size());
  const egoe::Hamiltonian pure = egoe::assemble(zero, emb, 1.0);
  CHECK(max_abs_diff(pure.matrix, emb) == 0.0);

  const egoe::Hamiltonian mixed = egoe::assemble(h1, emb, 0.5);
  Eigen::MatrixXd expected = 0.5 * emb;
  expected.diagonal() += h1;
  CHECK(max_abs_diff(mixed.matrix, expected) <= 1e-15 * expected.cwiseAbs().maxCoeff());
  CHECK(mixed.matrix.trace() ==
        doctest::Approx(h1.sum() + 0.5 * emb.trace()).epsilon(1e-12));

  CHECK_THROWS_AS((void)egoe::assemble(h1, Eigen::MatrixXd::Zero(3, 3), 1.0),
                  egoe::NumericError);
}

TEST_CASE("provenance renders seeds or the external tag") {
  egoe::Provenance p;
  p.master_seed = 42;
  p.member_index = 7;
  CHECK(p.to_string() == "seed 42 member 7");
  p.kind = egoe::Provenance::Kind::external;
  CHECK(p.to_string() == "external");
}
