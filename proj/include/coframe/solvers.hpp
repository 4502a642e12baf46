#pragma once

#include <utility>
#include <vector>

#include "coframe/catalog.hpp"

namespace coframe {

// Real roots of a low-degree polynomial (ascending coefficients c0..cd,
// degree <= 4 after trimming) via companion-matrix eigenvalues with
// multiplicity-aware Newton polish.
struct RootSet {
  std::vector<double> roots;         // one entry per distinct root, sorted
  std::vector<int> multiplicity;
};

RootSet poly_real_roots(std::vector<double> coeffs);

// A root of an implicit polynomial family tracked continuously in r.
struct BranchCurve {
  int branch_id = 0;
  std::vector<double> r;
  std::vector<double> value;
  bool spans_grid = false;
  bool boundary_match = false;
  double boundary_limit = 0;          // extrapolated value at r0
  std::vector<double> discriminant;   // polynomial discriminant per sample
};

struct TrackResult {
  std::vector<BranchCurve> branches;
  int global_count = 0;     // branches spanning the grid and matching the
                            // boundary condition (when one is present)
  int bolt_multiplicity = 0;  // multiplicity of the boundary root at r0
};

// Per grid point solve the polynomial, chain roots by nearest-value
// continuation with adaptive refinement, then filter by the boundary
// condition as a right-limit at r0.
TrackResult track_branches(const ImplicitPayload& spec,
                           const std::vector<double>& grid,
                           const ParamEnv& env, bool boundary_filter,
                           double r0);

// a'(r) from implicit differentiation of the polynomial at a root.
double implicit_derivative(const ImplicitPayload& spec, double r, double a,
                           const ParamEnv& env);

struct OdeTrace {
  std::vector<double> r;
  std::vector<double> p;
};

// Adaptive embedded Dormand-Prince 5(4) for p' = num/den; local error
// controlled by tol (mixed absolute/relative). Dense output on out_grid via
// cubic Hermite interpolation when provided.
OdeTrace integrate_ode(const OdePayload& ode, double r0, double p0,
                       double rmax, double tol, const ParamEnv& env,
                       const std::vector<double>* out_grid = nullptr);

// Even-power series p(r) = sum_j c_j r^(2j) around r = 0, solved order by
// order from the ODE residual. Returns c_0..c_order with c_0 = a.
std::vector<double> series_coeffs(const OdePayload& ode, double a, int order,
                                  const ParamEnv& env);

// Certifies that d/dr(first_integral) is a scalar multiple mu(r,a) of the
// ODE residual: max over random samples of the misfit after a per-sample
// least-squares fit of mu. Both expressions use the formal symbol `unknown`
// (and its primed derivative).
double exactness_check(const ExprPtr& ode_residual,
                       const ExprPtr& first_integral,
                       const std::string& unknown, const ParamEnv& env,
                       std::pair<double, double> r_range = {1.5, 4.0},
                       std::pair<double, double> a_range = {-3.0, 3.0},
                       int nsamples = 64, unsigned seed = 12345);

}  // namespace coframe
