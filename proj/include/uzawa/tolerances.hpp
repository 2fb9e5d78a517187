#pragma once

// Single source for every gated comparison: the benchmark tables, the theory
// corpus, and the acceptance binary all read from here.

namespace uzawa::tol {

// Algebraic benchmark (table 3): exact rows match to a couple of iterations,
// Jacobi rows as relative deviations.
inline constexpr int kT3ExactAbs = 2;
inline constexpr double kT3JacobiSmallTheta = 0.15;  // theta = 0.05 rows
inline constexpr double kT3JacobiRest = 0.25;

// Elasticity benchmark (table 1).
inline constexpr int kT1ExactAbs = 2;
inline constexpr double kT1JacobiRel = 0.25;

// Stokes benchmark (table 2).
inline constexpr double kT2ExactRel = 0.15;
inline constexpr double kT2ExactNuSmallRel = 0.20;  // nu = 0.01 reference cell
inline constexpr double kT2JacobiRel = 0.30;

// Convection benchmark (table 4).
inline constexpr double kT4ExactRel = 0.30;

// Instrumented theory runs.
inline constexpr double kLemmaSlack = 1e-10;   // interval and scalar bounds
inline constexpr double kRate1Slack = 1e-9;    // contraction inequality
inline constexpr double kFiBoundSlack = 1e-9;  // explicit two-sided rate bound
inline constexpr double kThetaMargin = 1e-12;  // rho < 1 margin under the hypothesis

// Diagonal rate construction.
inline constexpr double kCorollaryRel = 0.10;
inline constexpr double kZClusterEps = 1e-3;

// Inner-solver equivalence of the nonlinear variants.
inline constexpr double kEquivInnerTol = 1e-14;
inline constexpr int kEquivIterAbs = 1;

}  // namespace uzawa::tol
