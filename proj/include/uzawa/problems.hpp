#pragma once

#include <cstdint>
#include <string>

#include "uzawa/saddle.hpp"

namespace uzawa {

// Plane-strain elasticity on the unit square with a stiff square inclusion
// (coefficient 1000 inside (0.25,0.75)^2), displacement-pressure form on an
// n by n cell grid: velocity dimension 2n(n-1), pressure dimension n^2.
// f = 0, g = ones.
SaddleProblem gen_elasticity(int n, double mu = 1.0);

// Elasticity plus a skew-symmetric convection block scaled by b/(4h).
// b = 0 reproduces gen_elasticity exactly and keeps the symmetric flag.
SaddleProblem gen_convection(int n, double b, double mu = 1.0);

// Q1-P0 lid-driven cavity with pressure stabilization beta*h^2 (beta = 0.25
// matches the benchmarks): velocity dimension 2(n-1)^2, pressure n^2.
SaddleProblem gen_stokes_q1p0(int n, double nu, double beta = 0.25);

// Dense-banded Gaussian-kernel matrix A (sigma = 1.5), B = [T; 0] with
// T = tridiag(1,4,1)/1000, D = I; the exact solution is all ones.
SaddleProblem gen_algebraic(int n, int m);

// Seeded SPD A = L*Lt + I, Gaussian B with full column rank (reseeded up to
// five times), D = eps*I, with a stored random exact solution.
SaddleProblem gen_random_qp(int n, int m, double eps, std::uint64_t seed);

// Writes A/B/D/f/g (and the solution when stored) in Matrix Market format
// plus a meta.json sidecar into dir, creating it if needed.
void export_problem(const SaddleProblem& P, const std::string& name, const std::string& dir);

}  // namespace uzawa
