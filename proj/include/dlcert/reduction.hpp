#pragma once

#include "dlcert/linalg.hpp"

#include <optional>

namespace dlcert {

// A distributed-delay system whose kernel has unit mass keeps every vector of
// ker(A + A1) (continuous time) or ker(A + A1 - I) (discrete time) as a
// constant solution, so no LMI certifying asymptotic stability of the full
// state can be strictly feasible. When that subspace is invariant under A
// and A1 separately, the dynamics project onto its orthogonal complement;
// stability of the projected system means convergence to the equilibrium
// subspace.
struct EquilibriumQuotient {
  Matrix equilibria; // n x k orthonormal basis of the equilibrium subspace
  Matrix basis;      // n x (n-k) orthonormal basis of its complement
  Matrix A;          // basis^T A basis
  Matrix A1;         // basis^T A1 basis
};

enum class TimeDomain { Continuous, Discrete };

// Orthonormal n x k basis of ker(A + A1) or ker(A + A1 - I); k may be 0.
Matrix equilibrium_directions(const Matrix &A, const Matrix &A1, TimeDomain domain,
                              double tol = 1e-10);

// Empty when the equilibrium subspace is trivial or not invariant under both
// matrices. Throws InputError when every state is an equilibrium.
std::optional<EquilibriumQuotient> equilibrium_quotient(const Matrix &A, const Matrix &A1,
                                                        TimeDomain domain, double tol = 1e-10);

} // namespace dlcert
