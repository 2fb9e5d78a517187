#include "uzawa/saddle.hpp"

namespace uzawa {

void validate(const SaddleProblem& p) {
  require(p.A.rows == p.A.cols, "validate: A not square");
  require(p.D.rows == p.D.cols, "validate: D not square");
  require(p.B.rows == p.A.rows && p.B.cols == p.D.rows, "validate: B dims");
  require(static_cast<int>(p.f.size()) == p.A.rows, "validate: |f| != n");
  require(static_cast<int>(p.g.size()) == p.D.rows, "validate: |g| != m");
  require_finite(p.f, "validate f");
  require_finite(p.g, "validate g");
  if (p.symmetric_a) {
    const double tol = 1e-12 * std::max(1e-300, max_abs(p.A));
    require(asymmetry(p.A) <= tol, "validate: A asymmetric beyond tolerance");
  }
  require(asymmetry(p.D) <= 1e-12 * std::max(1e-300, max_abs(p.D)),
          "validate: D asymmetric beyond tolerance");
  // positive semidefiniteness probe
  Rng rng(0x5add1eULL);
  const double scl = std::max(1.0, max_abs(p.D));
  for (int t = 0; t < 20; ++t) {
    Vector z = rng.gaussian_vector(p.D.rows);
    const double nz = norm2(z);
    if (nz == 0.0) continue;
    for (double& x : z) x /= nz;
    const double q = dot(matvec(p.D, z), z);
    require(q >= -1e-12 * scl, "validate: D indefinite on probe");
  }
  if (p.has_solution) {
    require(static_cast<int>(p.x_star.size()) == p.A.rows &&
                static_cast<int>(p.y_star.size()) == p.D.rows,
            "validate: stored solution dims");
  }
}

}  // namespace uzawa
