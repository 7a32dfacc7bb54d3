#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bqs/bits.h"
#include "bqs/qstate.h"
#include "bqs/rng.h"

namespace bqs {

/// Seed of the two-universal family {x -> M x over GF(2)}: an ell x n binary
/// matrix stored row-major.
class HashSeed {
 public:
  HashSeed(std::size_t n, std::size_t ell, BitString matrix);

  std::size_t input_bits() const { return n_; }
  std::size_t output_bits() const { return ell_; }
  int at(std::size_t row, std::size_t col) const { return matrix_[row * n_ + col]; }
  /// Row-major bits; ell * n of them. This is what goes on the wire.
  const BitString &matrix() const { return matrix_; }

  bool operator==(const HashSeed &) const = default;

 private:
  std::size_t n_;
  std::size_t ell_;
  BitString matrix_;
};

/// Uniform ell x n matrix. Requires 1 <= ell <= n.
HashSeed sample_hash_seed(std::size_t n, std::size_t ell, Rng &rng);

/// y = M x over GF(2). |x| must equal n; callers zero-pad shorter inputs.
BitString hash(const HashSeed &seed, const BitString &x);

/// Pr_S[h(S, x0) = h(S, x1)] for distinct x0, x1. Exhaustive over all
/// 2^(n ell) seeds when n * ell <= 24; otherwise the closed form for the
/// linear family.
double collision_probability(std::size_t n, std::size_t ell, const BitString &x0, const BitString &x1);

/// Counts seeds M with M x0 = M x1 by walking every matrix.
std::uint64_t count_colliding_seeds(std::size_t n, std::size_t ell, const BitString &x0,
                                    const BitString &x1);

/// For this family M (x0 ^ x1) is uniform on {0,1}^ell whenever
/// x0 != x1, so the collision probability is exactly 2^-ell.
double linear_family_collision_probability(std::size_t ell);

/// Largest output length that privacy amplification allows:
/// floor(h_min - q - 2 log2(1/eps)), clamped at 0. The output is then
/// (eps + 2 eps')-close to uniform when h_min is the eps'-smooth
/// min-entropy of the source.
std::int64_t pa_extractable_length(double h_min, std::int64_t q, double eps);

/// Row space of some ell x n matrices, in reduced row echelon form, with the
/// number of ell x n matrices that share it. Two matrices with the same row
/// space induce the same partition of the inputs, so per-seed quantities
/// that only depend on that partition can be averaged over the row spaces.
struct RowSpaceClass {
  std::vector<std::uint64_t> basis_rows;  // each row packs n bits, MSB = column 0
  std::uint64_t multiplicity;
};

/// Every row space of dimension <= min(ell, n) in GF(2)^n. Multiplicities
/// sum to 2^(n ell).
std::vector<RowSpaceClass> enumerate_row_spaces(std::size_t n, std::size_t ell);

/// Applies packed rows to a packed n-bit input; output bit i is row i.
std::uint64_t apply_rows(const std::vector<std::uint64_t> &rows, std::uint64_t x);

/// Exact statistical distance of (h(S, X), S, Z) from (U_ell, S, Z) for a
/// uniform seed S. pxz[x][z] = P(X = x, Z = z) with x an n-bit value
/// (bit 0 most significant). Each row-space class is evaluated once and
/// weighted by its multiplicity. ell = 0 gives 0.
double pa_distance(const std::vector<std::vector<double>> &pxz, std::size_t n, std::size_t ell);

/// Same with quantum side information: weighted[x][z] = P(x, z) rho_{x,z}
/// (subnormalized, all of one dimension). The distance is the trace
/// distance of the cq-states, averaged over seeds.
double pa_distance_quantum(const std::vector<std::vector<Operator>> &weighted, std::size_t n,
                           std::size_t ell);

}  // namespace bqs
