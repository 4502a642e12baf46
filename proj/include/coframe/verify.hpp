#pragma once

#include <string>
#include <vector>

#include "coframe/catalog.hpp"
#include "coframe/solvers.hpp"

namespace coframe {

struct VerifyEntry {
  std::string family;
  std::string equation;
  double max_relative_residual = 0;
  bool pass = false;
  int samples = 0;
};

// The default verification grid: 50 log-spaced radii on
// [r0 (1 + 1e-3), 100], a single sample on the compact flag manifold.
std::vector<double> default_grid(const Instantiated& inst, int count = 50,
                                 double rmax = 100.0);

// Evaluates every residual of the family's equation on the grid and reports
// the worst relative residual. Closed payloads are checked directly;
// implicit payloads are branch-tracked with the boundary filter and checked
// under substitution (value and implicit derivative); the ODE payload is
// checked against the closed reference on the cone (c = k = 0) and by step
// halving otherwise, with pass bound max(tol, 1e-6).
VerifyEntry verify_family(const Instantiated& inst,
                          const std::vector<double>& grid, double tol);

}  // namespace coframe
