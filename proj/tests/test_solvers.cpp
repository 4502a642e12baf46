#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coframe/solvers.hpp"
#include "coframe/verify.hpp"

using namespace coframe;

namespace {

const ImplicitPayload& implicit_of(const std::string& id) {
  for (const auto& f : registry())
    if (f.id == id) return std::get<ImplicitPayload>(f.payload);
  throw UnknownFamily(id);
}

const OdePayload& ode_of(const std::string& id) {
  for (const auto& f : registry())
    if (f.id == id) return std::get<OdePayload>(f.payload);
  throw UnknownFamily(id);
}

ParamEnv env_of(std::initializer_list<std::pair<const char*, double>> kv) {
  ParamEnv e;
  for (const auto& [k, v] : kv) e.set(k, v);
  return e;
}

ParamEnv with_phase(ParamEnv e, double theta) {
  e.set("theta", theta);
  e.set("sin_theta", std::sin(theta));
  e.set("cos_theta", std::cos(theta));
  return e;
}

double lambert_ref(double r) {
  return 10 * std::pow(r, 1.2) /
         (3 * std::sqrt(lambert_w0(std::pow(r, 128.0 / 45))));
}

}  // namespace

TEST_CASE("poly_real_roots basics") {
  RootSet rs = poly_real_roots({-1, 0, 1});  // x^2 - 1
  REQUIRE(rs.roots.size() == 2);
  CHECK(rs.roots[0] == doctest::Approx(-1.0));
  CHECK(rs.roots[1] == doctest::Approx(1.0));
  CHECK(rs.multiplicity[0] == 1);
  CHECK(rs.multiplicity[1] == 1);
  // no real roots
  CHECK(poly_real_roots({1, 0, 1}).roots.empty());
  // all-zero input
  CHECK_THROWS_AS(poly_real_roots({0, 0, 0}), DegenerateAllZero);
  // exact double root
  RootSet dd = poly_real_roots({4, -4, 1});  // (x-2)^2
  REQUIRE(dd.roots.size() == 1);
  CHECK(dd.roots[0] == doctest::Approx(2.0));
  CHECK(dd.multiplicity[0] == 2);
  // wildly unbalanced coefficients keep the huge real roots
  RootSet big = poly_real_roots({-1e16, 0, 1e-2, 0, 1e-8});
  bool found = false;
  for (double r : big.roots) found = found || std::abs(r) > 1e3;
  CHECK(found);
}

TEST_CASE("bolt quartic: triple root at the degenerate phase") {
  const ImplicitPayload& spec = implicit_of("tcp2_dhym_om1");
  double r0 = std::sqrt(2.0);
  // tan(theta) = 3/4 with c = 1, k = 3: a = 3 triple, a = -11/3 simple
  ParamEnv env = with_phase(env_of({{"c", 1}, {"k", 3}}), std::atan(0.75));
  std::vector<double> coeffs;
  for (const auto& e : spec.poly) coeffs.push_back(eval(e, r0, env));
  RootSet rs = poly_real_roots(coeffs);
  REQUIRE(rs.roots.size() == 2);
  CHECK(rs.roots[0] == doctest::Approx(-11.0 / 3).epsilon(1e-9));
  CHECK(rs.multiplicity[0] == 1);
  CHECK(rs.roots[1] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(rs.multiplicity[1] == 3);
  // generic phase: a = k is a double root
  ParamEnv env2 = with_phase(env_of({{"c", 1}, {"k", 3}}), 0.5);
  coeffs.clear();
  for (const auto& e : spec.poly) coeffs.push_back(eval(e, r0, env2));
  RootSet rs2 = poly_real_roots(coeffs);
  bool saw_double_at_k = false;
  for (size_t i = 0; i < rs2.roots.size(); ++i)
    if (std::abs(rs2.roots[i] - 3.0) < 1e-7 && rs2.multiplicity[i] == 2)
      saw_double_at_k = true;
  CHECK(saw_double_at_k);
}

TEST_CASE("track_branches on the om1 family") {
  const ImplicitPayload& spec = implicit_of("tcp2_dhym_om1");
  double r0 = std::sqrt(2.0);
  std::vector<double> grid;
  for (int i = 0; i < 120; ++i)
    grid.push_back(r0 * 1.001 * std::pow(60.0 / (r0 * 1.001), i / 119.0));

  // theta = 0: the boundary-matched branches are 2ck/r^2 and
  // +sqrt(r^4 - 4c^2 + 4k^2)/2
  ParamEnv env = with_phase(env_of({{"c", 1}, {"k", 3}}), 0.0);
  TrackResult tr = track_branches(spec, grid, env, true, r0);
  CHECK(tr.global_count == 2);
  CHECK(tr.bolt_multiplicity == 2);
  int matched = 0;
  for (const auto& b : tr.branches) {
    if (!(b.spans_grid && b.boundary_match)) continue;
    bool is_hyper = true, is_sqrt = true;
    for (size_t i = 0; i < b.r.size(); ++i) {
      double r = b.r[i];
      if (std::abs(b.value[i] - 6.0 / (r * r)) > 1e-7 * (1 + b.value[i]))
        is_hyper = false;
      double sq = 0.5 * std::sqrt(r * r * r * r + 32.0);
      if (std::abs(b.value[i] - sq) > 1e-7 * (1 + sq)) is_sqrt = false;
    }
    CHECK((is_hyper || is_sqrt));
    ++matched;
  }
  CHECK(matched == 2);

  // theta = 2: two global branches (second figure regime)
  TrackResult t2 = track_branches(
      spec, grid, with_phase(env_of({{"c", 1}, {"k", 3}}), 2.0), true, r0);
  CHECK(t2.global_count == 2);

  // triple-root phase: degeneracy flagged at the bolt
  TrackResult t3 = track_branches(
      spec, grid, with_phase(env_of({{"c", 1}, {"k", 3}}), std::atan(0.75)),
      true, r0);
  CHECK(t3.bolt_multiplicity == 3);
}

TEST_CASE("track_branches: om2 and the cone cubic") {
  const ImplicitPayload& om2 = implicit_of("tcp2_dhym_om2");
  double r0 = std::sqrt(2.0);
  std::vector<double> grid;
  for (int i = 0; i < 150; ++i)
    grid.push_back(r0 * 1.001 * std::pow(80.0 / (r0 * 1.001), i / 149.0));
  ParamEnv env = with_phase(env_of({{"c", 1}, {"k", 1}}), std::atan(2.0));
  TrackResult tr = track_branches(om2, grid, env, true, r0);
  CHECK(tr.global_count == 4);

  const ImplicitPayload& cubic = implicit_of("cone_hk_dspin7_pfamily");
  ParamEnv cenv = env_of({{"C0", 1}, {"C3", 1}, {"C4", 1}, {"c", 0}});
  std::vector<double> cgrid;
  for (int i = 0; i < 150; ++i)
    cgrid.push_back(1e-2 * std::pow(50.0 / 1e-2, i / 149.0));
  TrackResult ct = track_branches(cubic, cgrid, cenv, true, 0.0);
  CHECK(ct.global_count == 1);
  // C0 = 0 degenerates to p = 0, +-r^2 (the elementary branches)
  ParamEnv cenv0 = env_of({{"C0", 0}, {"C3", 1}, {"C4", 1}, {"c", 0}});
  TrackResult ct0 = track_branches(cubic, cgrid, cenv0, true, 0.0);
  CHECK(ct0.global_count == 3);
}

TEST_CASE("root substitution closure") {
  const ImplicitPayload& spec = implicit_of("tcp2_dhym_om1");
  double r0 = std::sqrt(2.0);
  ParamEnv env = with_phase(env_of({{"c", 1}, {"k", 3}}), 2.0);
  std::vector<double> grid;
  for (int i = 0; i < 60; ++i)
    grid.push_back(r0 * 1.001 * std::pow(40.0 / (r0 * 1.001), i / 59.0));
  TrackResult tr = track_branches(spec, grid, env, false, r0);
  for (const auto& b : tr.branches)
    for (size_t i = 0; i < b.r.size(); ++i) {
      std::vector<double> c;
      for (const auto& e : spec.poly) c.push_back(eval(e, b.r[i], env));
      double v = 0, xp = 1, mono = 0;
      for (double cm : c) {
        v += cm * xp;
        mono = std::max(mono, std::abs(cm * xp));
        xp *= b.value[i];
      }
      CHECK(std::abs(v) <= 1e-9 * (1 + mono));
    }
}

TEST_CASE("implicit derivative matches finite differences of the branch") {
  const ImplicitPayload& spec = implicit_of("tcp2_dhym_om1");
  ParamEnv env = with_phase(env_of({{"c", 1}, {"k", 3}}), 2.0);
  for (double r : {2.0, 3.5, 7.0}) {
    std::vector<double> c;
    for (const auto& e : spec.poly) c.push_back(eval(e, r, env));
    RootSet rs = poly_real_roots(c);
    for (double a : rs.roots) {
      double da = implicit_derivative(spec, r, a, env);
      double h = 1e-5 * r;
      auto root_near = [&](double rr, double guess) {
        std::vector<double> cc;
        for (const auto& e : spec.poly) cc.push_back(eval(e, rr, env));
        RootSet r2 = poly_real_roots(cc);
        double best = r2.roots[0];
        for (double cand : r2.roots)
          if (std::abs(cand - guess) < std::abs(best - guess)) best = cand;
        return best;
      };
      double fd =
          (root_near(r + h, a + da * h) - root_near(r - h, a - da * h)) /
          (2 * h);
      CHECK(std::abs(fd - da) <= 1e-5 * (1 + std::abs(da)));
    }
  }
}

TEST_CASE("integrate_ode tracks the closed cone solution") {
  const OdePayload& ode = ode_of("bs_dspin7_ode");
  ParamEnv env = env_of({{"c", 0}, {"k", 0}, {"C2", 1}, {"C3", 0}, {"C4", 0}});
  std::vector<double> out;
  for (int i = 0; i < 80; ++i) out.push_back(1.0 + 49.0 * i / 79.0);
  OdeTrace tr =
      integrate_ode(ode, 1.0, lambert_ref(1.0), 50.0, 1e-10, env, &out);
  REQUIRE(tr.r.size() == out.size());
  for (size_t i = 0; i < tr.r.size(); ++i) {
    double expect = lambert_ref(tr.r[i]);
    CHECK(std::abs(tr.p[i] - expect) <= 1e-6 * (1 + std::abs(expect)));
  }
  // p0 = 0 with k = 0 stays identically zero
  OdeTrace zero = integrate_ode(ode, 1.0, 0.0, 20.0, 1e-10, env, &out);
  for (double p : zero.p) CHECK(std::abs(p) <= 1e-14);
}

TEST_CASE("series bootstrap agrees with the integrator") {
  const OdePayload& ode = ode_of("bs_dspin7_ode");
  ParamEnv env = env_of({{"c", 1}, {"k", 0}, {"C2", 1}, {"C3", 0}, {"C4", 0}});
  double a = 10.0;
  auto coeffs = series_coeffs(ode, a, 3, env);
  auto p_series = [&](double r) {
    double acc = 0, rp = 1;
    for (double cc : coeffs) {
      acc += cc * rp;
      rp *= r * r;
    }
    return acc;
  };
  double r_start = 1e-3;
  std::vector<double> out{0.1};
  OdeTrace tr =
      integrate_ode(ode, r_start, p_series(r_start), 0.1, 1e-12, env, &out);
  REQUIRE(tr.r.size() == 1);
  CHECK(std::abs(tr.p[0] - p_series(0.1)) <= 1e-6);
}

TEST_CASE("series coefficients reproduce the closed recurrence") {
  const OdePayload& ode = ode_of("bs_dspin7_ode");
  ParamEnv env = env_of({{"c", 1}, {"k", 0}, {"C2", 1}, {"C3", 0}, {"C4", 0}});
  for (double a : {1.0, 3.0, 10.0}) {
    auto cs = series_coeffs(ode, a, 2, env);
    double b2 = -(a * a - 100) / (10 * a);
    double b4 = (a * a * a * a - 2000) / (20 * a * a * a);
    CHECK(std::abs(cs[1] - b2) <= 1e-10 * (1 + std::abs(b2)));
    CHECK(std::abs(cs[2] - b4) <= 1e-10 * (1 + std::abs(b4)));
  }
  // a = 10 kills the r^2 coefficient
  auto cs10 = series_coeffs(ode, 10.0, 1, env);
  CHECK(std::abs(cs10[1]) <= 1e-12);
  CHECK_THROWS_AS(series_coeffs(ode, 0.0, 2, env), SingularCoefficient);
}

TEST_CASE("integrator order is at least 4 (step halving)") {
  const OdePayload& ode = ode_of("bs_dspin7_ode");
  ParamEnv env = env_of({{"c", 0}, {"k", 0}, {"C2", 1}, {"C3", 0}, {"C4", 0}});
  // classic fixed-step RK4 on the same rhs; global error should scale ~h^4
  auto rhs = [&](double r, double p) {
    ParamEnv e = env;
    e.set("p", p);
    return eval(ode.num, r, e) / eval(ode.den, r, e);
  };
  auto rk4 = [&](int steps) {
    double r = 1.0, p = lambert_ref(1.0);
    double h = 4.0 / steps;
    for (int i = 0; i < steps; ++i) {
      double k1 = rhs(r, p);
      double k2 = rhs(r + h / 2, p + h / 2 * k1);
      double k3 = rhs(r + h / 2, p + h / 2 * k2);
      double k4 = rhs(r + h, p + h * k3);
      p += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      r += h;
    }
    return std::abs(p - lambert_ref(5.0));
  };
  double e1 = rk4(40), e2 = rk4(80);
  CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("exactness certificates") {
  // Eguchi-Hanson om1 first integral vs its quoted ODE
  ExprPtr T = param("T");
  ExprPtr f = formal("f");
  ExprPtr csq = sum({product({param("C2"), param("C2")}),
                     product({param("C3"), param("C3")})});
  ExprPtr ehdisc = sum({power(radial(), Rational(4)),
                        product({constant(-1), param("c")})});
  ExprPtr fi = sum(
      {product({constant(2), T, f, f}),
       product({power(radial(), Rational(2)), f}),
       product({constant(-1, 8), T,
                sum({power(radial(), Rational(4)),
                     product({constant(-16), csq,
                              power(ehdisc, Rational(-1))})})})});
  ExprPtr ode = sum(
      {product({constant(2),
                sum({power(radial(), Rational(2)),
                     product({constant(4), f, T})}),
                formal("f'")}),
       product({constant(4), radial(), f}),
       product({constant(-1), power(radial(), Rational(3)),
                sum({constant(1),
                     product({constant(16), csq,
                              power(ehdisc, Rational(-2))})}),
                T})});
  ParamEnv env;
  env.set("T", 0.7);
  env.set("C2", 0.4);
  env.set("C3", -1.1);
  env.set("c", 1.0);
  CHECK(exactness_check(ode, fi, "f", env) <= 1e-9);
  // deliberately broken first integral
  ExprPtr bad = sum({fi, product({constant(1, 100), f, f, f})});
  CHECK(exactness_check(ode, bad, "f", env) > 1e-3);
}
