#pragma once

#include <cmath>
#include <numbers>

#include "bqs/qstate.h"
#include "bqs/rng.h"

namespace bqs::testing {

inline double gaussian(Rng &rng) {
  double u1 = 1.0 - rng.uniform();
  double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Amplitudes random_amplitudes(std::size_t qubits, Rng &rng) {
  Amplitudes a(std::size_t{1} << qubits);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a[i] = Complex(gaussian(rng), gaussian(rng));
  }
  return a / a.norm();
}

inline Labels labels(std::size_t qubits, const std::string &prefix = "r") {
  Labels out;
  for (std::size_t i = 0; i < qubits; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline QuantumState random_pure(std::size_t qubits, Rng &rng, const std::string &prefix = "r") {
  return QuantumState::pure(labels(qubits, prefix), random_amplitudes(qubits, rng));
}

/// Ginibre-style random density matrix of rank up to `rank`.
inline QuantumState random_mixed(std::size_t qubits, Rng &rng, std::size_t rank = 0,
                                 const std::string &prefix = "r") {
  auto dim = std::size_t{1} << qubits;
  if (rank == 0) rank = dim;
  Operator g(dim, rank);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(gaussian(rng), gaussian(rng));
  Operator rho = g * g.adjoint();
  rho /= rho.trace().real();
  return QuantumState::mixed(labels(qubits, prefix), 0.5 * (rho + rho.adjoint()));
}

/// Haar-ish random unitary via QR of a complex Gaussian matrix.
inline Operator random_unitary(std::size_t qubits, Rng &rng) {
  auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  Operator g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(gaussian(rng), gaussian(rng));
  Eigen::HouseholderQR<Operator> qr(g);
  Operator q = qr.householderQ();
  return q;
}

}  // namespace bqs::testing
