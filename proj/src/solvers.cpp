#include "coframe/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>

namespace coframe {

namespace {

double peval(const std::vector<double>& c, double x) {
  double v = 0;
  for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

// Same Horner pass on |c_i| |x|^i; sets the scale for smallness tests.
double peval_abs(const std::vector<double>& c, double x) {
  double v = 0;
  for (size_t i = c.size(); i-- > 0;) v = v * std::abs(x) + std::abs(c[i]);
  return v;
}

std::vector<double> pderiv(const std::vector<double>& c) {
  std::vector<double> out;
  for (size_t i = 1; i < c.size(); ++i) out.push_back(c[i] * i);
  if (out.empty()) out.push_back(0);
  return out;
}

std::vector<std::complex<double>> complex_roots(std::vector<double> c) {
  double cmax = 0;
  for (double v : c) cmax = std::max(cmax, std::abs(v));
  if (cmax == 0) throw DegenerateAllZero();
  // Only exactly-vanishing leading coefficients are trimmed (phase factors
  // like sin(0) produce exact zeros); the coefficients are otherwise
  // balanced by a root-magnitude substitution a = s y, since e.g. the
  // om2 quartic carries c0 ~ r^16 against c4 ~ r^8.
  while (c.size() > 1 && std::abs(c.back()) <= 1e-300) c.pop_back();
  int d = static_cast<int>(c.size()) - 1;
  if (d == 0) return {};
  if (d > 4) throw Error("poly_real_roots handles degree <= 4");
  double s = 0;
  for (int m = 0; m < d; ++m)
    if (c[m] != 0)
      s = std::max(s, std::pow(std::abs(c[m] / c[d]), 1.0 / (d - m)));
  if (s == 0) return std::vector<std::complex<double>>(d, 0.0);
  std::vector<double> b(c.size());
  double sp = 1;
  for (int m = 0; m <= d; ++m) {
    b[m] = c[m] * sp;
    sp *= s;
  }
  double bmax = 0;
  for (double v : b) bmax = std::max(bmax, std::abs(v));
  for (double& v : b) v /= bmax;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -b[i] / b[d];
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < d; ++i) out.push_back(es.eigenvalues()[i] * s);
  return out;
}

double newton_polish(const std::vector<double>& c, const std::vector<double>& dc,
                     double x0) {
  double x = x0;
  for (int it = 0; it < 60; ++it) {
    double f = peval(c, x), df = peval(dc, x);
    if (df == 0) break;
    double step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-15 * (1 + std::abs(x))) break;
  }
  return x;
}

}  // namespace

RootSet poly_real_roots(std::vector<double> coeffs) {
  auto zs = complex_roots(coeffs);
  while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-300)
    coeffs.pop_back();
  RootSet out;
  if (zs.empty()) return out;

  std::vector<std::vector<double>> derivs{coeffs};
  for (size_t i = 0; i + 1 < coeffs.size(); ++i)
    derivs.push_back(pderiv(derivs.back()));

  // Near-real eigenvalues are the candidates; the polish decides.
  std::vector<double> cands;
  for (const auto& z : zs)
    if (std::abs(z.imag()) <= 1e-5 * (1 + std::abs(z.real())))
      cands.push_back(z.real());
  std::sort(cands.begin(), cands.end());

  // Loose clustering, then multiplicity-aware refinement: a root of
  // multiplicity m is a simple root of the (m-1)-th derivative, and all the
  // lower derivatives must vanish there.
  size_t i = 0;
  while (i < cands.size()) {
    size_t j = i + 1;
    while (j < cands.size() &&
           std::abs(cands[j] - cands[j - 1]) <= 1e-4 * (1 + std::abs(cands[j])))
      ++j;
    int group = static_cast<int>(j - i);
    double center = 0;
    for (size_t k = i; k < j; ++k) center += cands[k];
    center /= group;
    int left = group;
    size_t take_from = i;
    while (left > 0) {
      bool placed = false;
      for (int m = left; m >= 1 && !placed; --m) {
        double z = newton_polish(derivs[m - 1], derivs[m],
                                 m == left ? center : cands[take_from]);
        bool ok = true;
        for (int l = 0; l < m; ++l) {
          double scale = 1 + peval_abs(derivs[l], z);
          if (std::abs(peval(derivs[l], z)) > 1e-9 * scale) {
            ok = false;
            break;
          }
        }
        // the m-th derivative must not vanish as well
        if (ok && m < static_cast<int>(coeffs.size()) - 1) {
          double scale = 1 + peval_abs(derivs[m], z);
          if (std::abs(peval(derivs[m], z)) <= 1e-12 * scale) ok = false;
        }
        if (ok) {
          out.roots.push_back(z);
          out.multiplicity.push_back(m);
          left -= m;
          take_from += m;
          placed = true;
        }
      }
      if (!placed) {
        // not a real root (come in shallow complex pairs); drop one candidate
        left -= 1;
        take_from += 1;
      }
    }
    i = j;
  }
  // sort by value, merging any residual coincidences within 1e-7
  std::vector<std::pair<double, int>> pairs;
  for (size_t k = 0; k < out.roots.size(); ++k)
    pairs.emplace_back(out.roots[k], out.multiplicity[k]);
  std::sort(pairs.begin(), pairs.end());
  out.roots.clear();
  out.multiplicity.clear();
  for (const auto& [v, m] : pairs) {
    if (!out.roots.empty() &&
        std::abs(v - out.roots.back()) <= 1e-7 * (1 + std::abs(v))) {
      out.multiplicity.back() += m;
    } else {
      out.roots.push_back(v);
      out.multiplicity.push_back(m);
    }
  }
  return out;
}

namespace {

std::vector<double> epoly_at(const ImplicitPayload& spec, double r,
                             const ParamEnv& env) {
  std::vector<double> c;
  c.reserve(spec.poly.size());
  for (const auto& e : spec.poly) c.push_back(eval(e, r, env));
  return c;
}

std::vector<double> flat_roots(const std::vector<double>& coeffs) {
  RootSet rs = poly_real_roots(coeffs);
  std::vector<double> out;
  for (size_t i = 0; i < rs.roots.size(); ++i)
    for (int m = 0; m < rs.multiplicity[i]; ++m) out.push_back(rs.roots[i]);
  return out;
}

double poly_discriminant(const std::vector<double>& coeffs) {
  auto zs = complex_roots(coeffs);
  int d = static_cast<int>(zs.size());
  if (d < 2) return 1.0;
  std::vector<double> c = coeffs;
  while (c.size() > 1 && std::abs(c.back()) <= 1e-300) c.pop_back();
  std::complex<double> prod = 1;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      std::complex<double> diff = zs[i] - zs[j];
      prod *= diff * diff;
    }
  return std::pow(c.back(), 2 * d - 2) * prod.real();
}

}  // namespace

double implicit_derivative(const ImplicitPayload& spec, double r, double a,
                           const ParamEnv& env) {
  double dr = 0, da = 0, xp = 1;
  for (size_t m = 0; m < spec.poly.size(); ++m) {
    dr += eval(deriv(spec.poly[m]), r, env) * xp;
    if (m + 1 < spec.poly.size())
      da += (m + 1) * eval(spec.poly[m + 1], r, env) * xp;
    xp *= a;
  }
  if (da == 0) return std::copysign(1e30, -dr);
  return -dr / da;
}

TrackResult track_branches(const ImplicitPayload& spec,
                           const std::vector<double>& grid,
                           const ParamEnv& env, bool boundary_filter,
                           double r0) {
  if (grid.size() < 2) throw Error("track_branches needs a grid");
  TrackResult result;

  struct Alive {
    int curve;
    double value;
  };
  std::vector<Alive> active;
  std::vector<double> disc_samples;

  auto roots_at = [&](double r) { return flat_roots(epoly_at(spec, r, env)); };

  auto slope_at = [&](double r, double value) {
    // conditioned implicit derivative: near a multiple root dp/da collapses
    // and the slope is untrustworthy, so predict flat there
    double p_r = 0, p_a = 0, p_a_abs = 0, xp = 1;
    try {
      for (size_t m = 0; m < spec.poly.size(); ++m) {
        p_r += eval(deriv(spec.poly[m]), r, env) * xp;
        if (m + 1 < spec.poly.size()) {
          double cm1 = eval(spec.poly[m + 1], r, env);
          p_a += (m + 1) * cm1 * xp;
          p_a_abs += (m + 1) * std::abs(cm1) * std::abs(xp);
        }
        xp *= value;
      }
    } catch (const Error&) {
      return 0.0;
    }
    if (std::abs(p_a) <= 1e-6 * (1 + p_a_abs)) return 0.0;
    double s = -p_r / p_a;
    return std::max(-1e6, std::min(1e6, s));
  };

  // Advance the active set from (r_a, values) to r_b with first-order
  // tangent prediction; crossings of distinct root curves are resolved by
  // the predicted values, and ambiguous steps are subdivided.
  std::function<bool(double, double, int)> advance = [&](double ra, double rb,
                                                         int depth) -> bool {
    std::vector<double> roots = roots_at(rb);
    std::sort(roots.begin(), roots.end());

    double dr = rb - ra;
    std::vector<double> pred, tol;
    for (const auto& al : active) {
      double s = slope_at(ra, al.value);
      pred.push_back(al.value + s * dr);
      // Near a fold two roots separate like sqrt(dr); the matching window
      // needs the sqrt(|p_r / p''|) rate on top of the linear prediction.
      double p_r = 0, p_aa = 0, xp = 1;
      try {
        for (size_t m = 0; m < spec.poly.size(); ++m) {
          p_r += eval(deriv(spec.poly[m]), ra, env) * xp;
          if (m + 2 < spec.poly.size())
            p_aa += (m + 2) * (m + 1) * eval(spec.poly[m + 2], ra, env) * xp;
          xp *= al.value;
        }
      } catch (const Error&) {
      }
      double fold = p_aa != 0 ? 3 * std::sqrt(std::abs(p_r / p_aa) * dr) : 0.0;
      // floor at the root-resolution scale: merged near-double roots jitter
      // by about the clustering width between adjacent solves
      tol.push_back(12 * (std::abs(s) + 1) * dr +
                    2e-4 * (1 + std::abs(al.value)) + fold);
    }

    bool clean = roots.size() == active.size();
    if (clean) {
      for (size_t i = 0; i < pred.size(); ++i)
        if (std::abs(roots[i] - pred[i]) > tol[i]) clean = false;
    }
    if (!clean && depth < 40 && dr > 1e-12 * (1 + std::abs(rb))) {
      double mid = 0.5 * (ra + rb);
      if (!advance(ra, mid, depth + 1)) return false;
      return advance(mid, rb, depth + 1);
    }
    if (!clean && roots.size() == active.size() && depth >= 40)
      throw BranchAmbiguity("refinement exhausted near r = " +
                            std::to_string(rb));

    // Optimal assignment over the (at most 4 x 4) active/root sets:
    // matching an active to a root within its window costs the distance,
    // a death costs the window itself. Exhaustive search; no greedy theft.
    size_t na = active.size(), nr = roots.size();
    std::vector<int> assign(na, -1), best_assign(na, -1);
    double best_cost = 1e300;
    std::function<void(size_t, unsigned, double)> search =
        [&](size_t i, unsigned used_mask, double cost) {
          if (cost >= best_cost) return;
          if (i == na) {
            best_cost = cost;
            best_assign = assign;
            return;
          }
          for (size_t k = 0; k < nr; ++k) {
            if (used_mask & (1u << k)) continue;
            double dd = std::abs(roots[k] - pred[i]);
            if (dd > tol[i]) continue;
            assign[i] = static_cast<int>(k);
            search(i + 1, used_mask | (1u << k), cost + dd);
          }
          assign[i] = -1;
          search(i + 1, used_mask, cost + tol[i]);
        };
    search(0, 0, 0.0);
    std::vector<bool> used(nr, false);
    std::vector<Alive> next;
    for (size_t i = 0; i < na; ++i) {
      int k = best_assign[i];
      if (k >= 0) {
        used[k] = true;
        next.push_back({active[i].curve, roots[k]});
      }
      // otherwise the branch ends here (fold: the pair went complex)
    }
    for (size_t k = 0; k < nr; ++k)
      if (!used[k]) {
        result.branches.push_back(BranchCurve{});
        result.branches.back().branch_id =
            static_cast<int>(result.branches.size()) - 1;
        next.push_back({result.branches.back().branch_id, roots[k]});
      }
    std::sort(next.begin(), next.end(),
              [](const Alive& a, const Alive& b) { return a.value < b.value; });
    active = std::move(next);
    return true;
  };

  // Seed at the first grid point.
  {
    std::vector<double> roots = roots_at(grid[0]);
    std::sort(roots.begin(), roots.end());
    for (double v : roots) {
      result.branches.push_back(BranchCurve{});
      result.branches.back().branch_id =
          static_cast<int>(result.branches.size()) - 1;
      active.push_back({result.branches.back().branch_id, v});
    }
  }
  auto record = [&](double r) {
    double disc = poly_discriminant(epoly_at(spec, r, env));
    for (const auto& al : active) {
      BranchCurve& b = result.branches[al.curve];
      b.r.push_back(r);
      b.value.push_back(al.value);
      b.discriminant.push_back(disc);
    }
  };
  record(grid[0]);
  for (size_t gi = 1; gi < grid.size(); ++gi) {
    advance(grid[gi - 1], grid[gi], 0);
    record(grid[gi]);
  }
  std::erase_if(result.branches,
                [](const BranchCurve& b) { return b.r.empty(); });
  for (size_t i = 0; i < result.branches.size(); ++i)
    result.branches[i].branch_id = static_cast<int>(i);
  for (auto& b : result.branches)
    b.spans_grid = b.r.size() == grid.size();

  // Boundary limits by chaining down to r0 and sqrt-aware extrapolation.
  bool has_boundary = static_cast<bool>(spec.boundary_value);
  double bv = has_boundary ? eval(spec.boundary_value, r0, env) : 0.0;
  if (has_boundary && r0 > 0) {
    std::vector<double> deltas;
    for (double delta = grid[0] / r0 - 1; delta > 4.2e-7; delta *= 0.5)
      deltas.push_back(delta);
    deltas.push_back(4e-7);
    deltas.push_back(1e-7);
    std::vector<std::vector<double>> ladder;
    for (double delta : deltas) {
      auto roots = roots_at(r0 * (1 + delta));
      std::sort(roots.begin(), roots.end());
      ladder.push_back(std::move(roots));
    }
    for (auto& b : result.branches) {
      if (!b.spans_grid) continue;
      double v = b.value.front();
      double rr = grid[0];
      double v_eps = 0;
      for (size_t li = 0; li < ladder.size(); ++li) {
        double r_next = r0 * (1 + deltas[li]);
        double p = v + slope_at(rr, v) * (r_next - rr);
        double best = v, bestd = 1e300;
        for (double cand : ladder[li]) {
          double dd = std::abs(cand - p);
          if (dd < bestd) {
            bestd = dd;
            best = cand;
          }
        }
        v = best;
        rr = r_next;
        if (li + 2 == ladder.size()) v_eps = v;  // value at delta = 4e-7
      }
      // v at 1e-7 and 4e-7: 2 v(eps/4) - v(eps) lands on the limit for both
      // smooth and sqrt-type branches
      b.boundary_limit = 2 * v - v_eps;
      b.boundary_match =
          std::abs(b.boundary_limit - bv) <= 1e-6 * (1 + std::abs(bv));
    }
  } else {
    for (auto& b : result.branches) {
      b.boundary_match = b.spans_grid;
      b.boundary_limit = b.spans_grid ? b.value.front() : 0.0;
    }
  }
  for (const auto& b : result.branches)
    if (b.spans_grid && (!boundary_filter || b.boundary_match))
      ++result.global_count;

  // Multiplicity of the boundary root at exactly r0.
  if (has_boundary) {
    try {
      RootSet rs = poly_real_roots(epoly_at(spec, r0, env));
      for (size_t k = 0; k < rs.roots.size(); ++k)
        if (std::abs(rs.roots[k] - bv) <= 1e-5 * (1 + std::abs(bv)))
          result.bolt_multiplicity += rs.multiplicity[k];
    } catch (const Error&) {
      result.bolt_multiplicity = 0;
    }
  }
  return result;
}

OdeTrace integrate_ode(const OdePayload& ode, double r0, double p0,
                       double rmax, double tol, const ParamEnv& env,
                       const std::vector<double>* out_grid) {
  if (!(r0 > 0)) throw Error("integrate_ode needs r0 > 0");
  auto rhs = [&](double r, double p) {
    ParamEnv e = env;
    e.set("p", p);
    double num = eval(ode.num, r, e);
    double den = eval(ode.den, r, e);
    if (std::abs(den) <= 1e-12 * (1 + std::abs(num)))
      throw DenominatorVanished(r, p);
    return num / den;
  };

  // Dormand-Prince 5(4) coefficients.
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                      e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                      e6 = 187.0 / 2100, e7 = 1.0 / 40;

  struct Node {
    double r, p, f;
  };
  std::vector<Node> nodes;
  double r = r0, p = p0;
  double f = rhs(r, p);
  nodes.push_back({r, p, f});
  double h = std::min(1e-3 * (1 + r0), (rmax - r0) / 10);
  int rejects_in_a_row = 0;
  while (r < rmax) {
    h = std::min(h, rmax - r);
    double k1 = f;
    double k2 = rhs(r + h / 5, p + h * a21 * k1);
    double k3 = rhs(r + 3 * h / 10, p + h * (a31 * k1 + a32 * k2));
    double k4 = rhs(r + 4 * h / 5, p + h * (a41 * k1 + a42 * k2 + a43 * k3));
    double k5 = rhs(r + 8 * h / 9,
                    p + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    double k6 =
        rhs(r + h, p + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                            a65 * k5));
    double p5 = p + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    double k7 = rhs(r + h, p5);
    double p4 = p + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                         e7 * k7);
    double sc = tol + tol * std::max(std::abs(p), std::abs(p5));
    double err = std::abs(p5 - p4) / sc;
    if (err <= 1.0) {
      r += h;
      p = p5;
      f = k7;
      nodes.push_back({r, p, f});
      rejects_in_a_row = 0;
    } else if (++rejects_in_a_row > 60) {
      throw StepFailure("step control stalled at r = " + std::to_string(r));
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::min(5.0, std::max(0.2, fac));
    if (h < 1e-14 * (1 + r))
      throw StepFailure("step underflow at r = " + std::to_string(r));
  }

  OdeTrace trace;
  if (!out_grid) {
    for (const auto& n : nodes) {
      trace.r.push_back(n.r);
      trace.p.push_back(n.p);
    }
    return trace;
  }
  // cubic Hermite dense output
  size_t seg = 0;
  for (double rq : *out_grid) {
    if (rq < r0 - 1e-12 || rq > rmax + 1e-9) continue;
    while (seg + 2 < nodes.size() && nodes[seg + 1].r < rq) ++seg;
    const Node& n0 = nodes[seg];
    const Node& n1 = nodes[seg + 1];
    double hh = n1.r - n0.r;
    double t = (rq - n0.r) / hh;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    trace.r.push_back(rq);
    trace.p.push_back(h00 * n0.p + h10 * hh * n0.f + h01 * n1.p +
                      h11 * hh * n1.f);
  }
  return trace;
}

namespace {

// Dense truncated power series in r.
struct TS {
  std::vector<double> c;
  explicit TS(int n) : c(n + 1, 0.0) {}
};

TS ts_const(double v, int n) {
  TS t(n);
  t.c[0] = v;
  return t;
}

TS ts_mul(const TS& a, const TS& b) {
  int n = static_cast<int>(a.c.size()) - 1;
  TS out(n);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) out.c[i + j] += a.c[i] * b.c[j];
  return out;
}

TS ts_add(const TS& a, const TS& b) {
  TS out = a;
  for (size_t i = 0; i < out.c.size(); ++i) out.c[i] += b.c[i];
  return out;
}

TS ts_pow(const TS& a, const Rational& q) {
  int n = static_cast<int>(a.c.size()) - 1;
  if (q.is_integer() && q.num() >= 0) {
    TS out = ts_const(1, n);
    for (long long i = 0; i < q.num(); ++i) out = ts_mul(out, a);
    return out;
  }
  double c0 = a.c[0];
  if (c0 <= 0)
    throw SingularCoefficient("series power needs a positive constant term");
  // a^q = c0^q sum_m binom(q, m) t^m with t = a/c0 - 1
  TS t(n);
  for (int i = 1; i <= n; ++i) t.c[i] = a.c[i] / c0;
  TS out = ts_const(1, n);
  TS tp = ts_const(1, n);
  double qd = q.to_double(), coeff = 1;
  for (int m = 1; m <= n; ++m) {
    coeff *= (qd - (m - 1)) / m;
    tp = ts_mul(tp, t);
    for (int i = 0; i <= n; ++i) out.c[i] += coeff * tp.c[i];
  }
  for (double& v : out.c) v *= std::pow(c0, qd);
  return out;
}

TS ts_eval(const ExprPtr& e, const TS& p, const TS& dp, const ParamEnv& env,
           int n) {
  switch (e->kind) {
    case ExprKind::Const:
      return ts_const(e->value.to_double(), n);
    case ExprKind::Param:
      return ts_const(env.lookup(e->name), n);
    case ExprKind::Radial: {
      TS t(n);
      if (n >= 1) t.c[1] = 1;
      return t;
    }
    case ExprKind::Formal:
      if (e->name == "p") return p;
      if (e->name == "p'") return dp;
      throw Error("series evaluation knows only p and p'");
    case ExprKind::Sum: {
      TS out(n);
      for (const auto& k : e->kids) out = ts_add(out, ts_eval(k, p, dp, env, n));
      return out;
    }
    case ExprKind::Product: {
      TS out = ts_const(1, n);
      for (const auto& k : e->kids) out = ts_mul(out, ts_eval(k, p, dp, env, n));
      return out;
    }
    case ExprKind::Power:
      return ts_pow(ts_eval(e->kids[0], p, dp, env, n), e->exponent);
    case ExprKind::LambertW:
      throw Error("series evaluation does not support Lambert W");
  }
  throw Error("unreachable");
}

}  // namespace

std::vector<double> series_coeffs(const OdePayload& ode, double a, int order,
                                  const ParamEnv& env) {
  if (a == 0) throw SingularCoefficient("series needs a nonzero value at 0");
  int n = 2 * order + 2;
  TS p(n);
  p.c[0] = a;
  auto dp_of = [&](const TS& s) {
    TS d(n);
    for (int i = 0; i + 1 <= n; ++i) d.c[i] = s.c[i + 1] * (i + 1);
    return d;
  };
  std::vector<double> out{a};
  for (int j = 1; j <= order; ++j) {
    auto residual_with = [&](double bj) {
      TS pj = p;
      pj.c[2 * j] = bj;
      return ts_eval(ode.residual, pj, dp_of(pj), env, n);
    };
    TS r0s = residual_with(0.0);
    TS r1s = residual_with(1.0);
    double scale = 1e-300;
    for (double v : r0s.c) scale = std::max(scale, std::abs(v));
    for (double v : r1s.c) scale = std::max(scale, std::abs(v));
    int slot = 2 * j - 1;
    double slope = r1s.c[slot] - r0s.c[slot];
    if (std::abs(slope) <= 1e-9 * scale) {
      slot = 2 * j + 1;
      slope = r1s.c[slot] - r0s.c[slot];
      if (std::abs(slope) <= 1e-9 * scale)
        throw SingularCoefficient("series recurrence is degenerate at order " +
                                  std::to_string(2 * j));
    }
    double bj = -r0s.c[slot] / slope;
    p.c[2 * j] = bj;
    out.push_back(bj);
  }
  return out;
}

double exactness_check(const ExprPtr& ode_residual,
                       const ExprPtr& first_integral,
                       const std::string& unknown, const ParamEnv& env,
                       std::pair<double, double> r_range,
                       std::pair<double, double> a_range, int nsamples,
                       unsigned seed) {
  ExprPtr dfi = deriv(first_integral);
  std::string dname = unknown + "'";
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> rs(r_range.first, r_range.second);
  std::uniform_real_distribution<double> as(a_range.first, a_range.second);
  double worst = 0;
  int done = 0;
  for (int i = 0; i < nsamples * 4 && done < nsamples; ++i) {
    double r = rs(rng), a = as(rng);
    ParamEnv e0 = env, e1 = env;
    e0.set(unknown, a);
    e0.set(dname, 0.0);
    e1.set(unknown, a);
    e1.set(dname, 1.0);
    double A, B, C, D;
    try {
      A = eval(dfi, r, e0);
      B = eval(dfi, r, e1) - A;
      C = eval(ode_residual, r, e0);
      D = eval(ode_residual, r, e1) - C;
    } catch (const DomainError&) {
      continue;
    }
    if (!std::isfinite(A) || !std::isfinite(B) || !std::isfinite(C) ||
        !std::isfinite(D))
      continue;
    ++done;
    double denom = C * C + D * D;
    double mu = denom > 0 ? (A * C + B * D) / denom : 0.0;
    double mis = std::hypot(A - mu * C, B - mu * D);
    worst = std::max(worst, mis / (1 + std::hypot(A, B)));
  }
  if (done < nsamples / 2)
    throw Error("exactness_check could not draw enough valid samples");
  return worst;
}

}  // namespace coframe
