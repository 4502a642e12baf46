#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <thread>

#include "coframe/verify.hpp"

using namespace coframe;

TEST_CASE("registry enumeration") {
  auto ids = list_families();
  CHECK(ids.size() >= 25);
  auto has = [&](const char* id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
  };
  CHECK(has("cone_bs_dspin7"));
  CHECK(has("tcp2_dhym_om1"));
  CHECK(has("tcp2_dspin7_phi2_a3family"));
  CHECK(has("bs_dspin7_ode"));
  CHECK(has("eh_dhym_3"));
  CHECK(has("flag_dhym"));
  // every id resolves with its documented defaults
  for (const auto& id : ids) {
    Instantiated inst = instantiate(id, ParamEnv{});
    CHECK(inst.family->id == id);
    CHECK(inst.geom != nullptr);
  }
  CHECK_THROWS_AS(instantiate("no_such_family", ParamEnv{}), UnknownFamily);
}

TEST_CASE("instantiate: hyper-holomorphic coefficients") {
  ParamEnv user;
  user.set("c", 1);
  user.set("k", 3);
  Instantiated inst = instantiate("tcp2_hyperholo", user);
  const ExprPtr& a2 = inst.ansatz.coeffs.at("th2");
  for (double r : {1.5, 2.0, 4.0})
    CHECK(eval(a2, r, inst.env) ==
          doctest::Approx(6.0 / (r * r)).epsilon(1e-14));
}

TEST_CASE("instantiate: Lambert W closed form on the cone") {
  ParamEnv user;
  user.set("C0", 1);
  user.set("C2", 1);
  user.set("C3", 0);
  user.set("C4", 0);
  Instantiated inst = instantiate("cone_bs_dspin7", user);
  const ExprPtr& a2 = inst.ansatz.coeffs.at("th2");
  for (double r : {1.0, 2.5, 10.0}) {
    double expect = 10 * std::pow(r, 1.2) /
                    (3 * std::sqrt(lambert_w0(std::pow(r, 128.0 / 45))));
    CHECK(eval(a2, r, inst.env) == doctest::Approx(expect).epsilon(1e-13));
  }
  // th3/th4 coefficients vanish for this direction
  CHECK(eval(inst.ansatz.coeffs.at("th3"), 2.0, inst.env) == 0.0);
  ParamEnv bad = user;
  bad.set("C0", -1);
  CHECK_THROWS_AS(instantiate("cone_bs_dspin7", bad), BadParams);
}

TEST_CASE("instantiate: strict p-family") {
  ParamEnv user;
  user.set("c", 1);
  user.set("k", 2);
  user.set("C3", 1);
  user.set("C4", 0);
  Instantiated inst = instantiate("tcp2_dspin7_phi1_pfamily", user);
  const ExprPtr& a3 = inst.ansatz.coeffs.at("th3");
  for (double r : {1.6, 2.2, 5.0}) {
    double r4 = r * r * r * r;
    double expect = std::sqrt((r4 + 16) * (r4 - 4)) / (2 * r * r);
    CHECK(eval(a3, r, inst.env) == doctest::Approx(expect).epsilon(1e-13));
  }
  ParamEnv bad = user;
  bad.set("C3", 0);
  CHECK_THROWS_AS(instantiate("tcp2_dspin7_phi1_pfamily", bad), BadParams);
}

TEST_CASE("cone families pin c to zero") {
  ParamEnv user;
  user.set("c", 1.0);
  CHECK_THROWS_AS(instantiate("cone_hk_spin7", user), BadParams);
  CHECK_THROWS_AS(instantiate("tcp2_hyperholo",
                              [] {
                                ParamEnv e;
                                e.set("nope", 1);
                                return e;
                              }()),
                  BadParams);
}

TEST_CASE("phase_of_flag") {
  CHECK(phase_of_flag(0, 0) == 0.0);
  // (0,1): eigenvalue product (1+i)^3 has phase 3 pi/4 and tan -1
  std::complex<double> prod =
      (1.0 + std::complex<double>(0, 1)) * (1.0 + std::complex<double>(0, 1)) *
      (1.0 + std::complex<double>(0, 1));
  CHECK(phase_of_flag(0, 1) ==
        doctest::Approx(std::arg(prod)).epsilon(1e-14));
  long long num, den;
  REQUIRE(flag_phase_tan(0, 1, &num, &den));
  CHECK(num == -2);
  CHECK(den == 2);
  CHECK(std::tan(phase_of_flag(0, 1)) == doctest::Approx(-1.0).epsilon(1e-12));
  // (2,1): tan = 3
  REQUIRE(flag_phase_tan(2, 1, &num, &den));
  CHECK(static_cast<double>(num) / den == doctest::Approx(3.0));
}

TEST_CASE("arctan-sum and rational phase formulas agree off the pole set") {
  int poles = 0;
  for (long long a1 = -10; a1 <= 10; ++a1)
    for (long long a3 = -10; a3 <= 10; ++a3) {
      long long num, den;
      if (!flag_phase_tan(a1, a3, &num, &den)) {
        ++poles;
        continue;
      }
      double lhs = std::tan(phase_of_flag(a1, a3));
      double rhs = static_cast<double>(num) / den;
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(rhs)));
    }
  // 3 a3^2 - a1^2 = 1 has no integer solutions (squares are 0 or 1 mod 3),
  // so the cot(theta) = 0 line passes between the lattice points.
  CHECK(poles == 0);
}

TEST_CASE("every closed family passes its equation at 50 samples") {
  for (const auto& fam : registry()) {
    if (!std::holds_alternative<ClosedPayload>(fam.payload)) continue;
    Instantiated inst = instantiate(fam.id, ParamEnv{});
    VerifyEntry e = verify_family(inst, default_grid(inst), 1e-9);
    INFO(fam.id);
    CHECK(e.pass);
    CHECK(e.max_relative_residual <= 1e-9);
  }
}

TEST_CASE("every instanton family satisfies the first deformed equation") {
  // pi47(F ^ F) vanishes for genuine Spin(7) instantons.
  for (const auto& fam : registry()) {
    if (fam.equation.kind != Equation::Spin7) continue;
    Instantiated inst = instantiate(fam.id, ParamEnv{});
    Form phi = fam.equation.index == 0
                   ? inst.geom->form("Phi")
                   : spin7_from_triple(*inst.geom, fam.equation.index);
    auto grid = default_grid(inst, 12, 40.0);
    DSpin7Report rep = residual_dspin7(inst.ansatz, phi, grid, inst.env);
    INFO(fam.id);
    for (double v : rep.pi47_relative) CHECK(v <= 1e-10);
  }
}

TEST_CASE("concurrent evaluation of shared immutable structures") {
  Geometry g = calabi(1.0);
  ParamEnv base = g.params;
  base.set("k", 2.0);
  auto ansatz = make_ansatz(std::make_shared<Geometry>(g),
                            {{"th1", param("k")},
                             {"th2", product({constant(2), param("c"),
                                              param("k"),
                                              power(radial(), Rational(-2))})}});
  Residual res = residual_dhym(ansatz, 1, constant(0), constant(1));
  std::vector<std::thread> workers;
  std::array<double, 8> worst{};
  for (int t = 0; t < 8; ++t)
    workers.emplace_back([&, t] {
      ParamEnv env = base;
      double w = 0;
      for (int i = 0; i < 40; ++i) {
        double r = 1.5 + 0.07 * i + 0.003 * t;
        w = std::max(w, relative_residual(res, r, env));
      }
      worst[t] = w;
    });
  for (auto& th : workers) th.join();
  for (double w : worst) CHECK(w <= 1e-11);
}

TEST_CASE("implicit families pass under substitution") {
  for (const char* id : {"tcp2_dhym_om1", "tcp2_dhym_om2", "tcp2_dhym_om3",
                         "cone_hk_dspin7_pfamily"}) {
    Instantiated inst = instantiate(id, ParamEnv{});
    VerifyEntry e = verify_family(inst, default_grid(inst), 1e-9);
    INFO(id);
    CHECK(e.pass);
    CHECK(e.samples > 0);
  }
}

TEST_CASE("boundary conditions at the bolt") {
  // a2(sqrt(2c)) = k for the om1 bolt value; the closed dhym branch on
  // Eguchi-Hanson takes f1(c^(1/4)) = k with the rule-selected sign.
  ParamEnv user;
  user.set("c", 1);
  user.set("k", 3);
  user.set("theta", 0.8);
  Instantiated eh1 = instantiate("eh_dhym_1", user);
  double r0 = 1.0;
  CHECK(eval(eh1.ansatz.coeffs.at("eta1"), r0, eh1.env) ==
        doctest::Approx(3.0).epsilon(1e-10));
  // negative branch rule: 4 k tan(theta) + sqrt(c) < 0
  ParamEnv user2;
  user2.set("c", 1);
  user2.set("k", -3);
  user2.set("theta", 0.8);
  Instantiated eh1b = instantiate("eh_dhym_1", user2);
  CHECK(eh1b.env.lookup("sign") == -1.0);
  CHECK(eval(eh1b.ansatz.coeffs.at("eta1"), r0, eh1b.env) ==
        doctest::Approx(-3.0).epsilon(1e-10));
  // eh_dhym_2 boundary: f2(c^(1/4)) = 0 via the sqrt(r^4-c) prefactor,
  // f1 = sqrt(c) k / r^2 -> k
  Instantiated eh2 = instantiate("eh_dhym_2", user);
  CHECK(eval(eh2.ansatz.coeffs.at("eta2"), r0, eh2.env) ==
        doctest::Approx(0.0));
  CHECK(eval(eh2.ansatz.coeffs.at("eta1"), r0, eh2.env) ==
        doctest::Approx(3.0));
  // a2family sign rule keeps a2(sqrt(2c)) = k on both sides of the rule
  for (double C : {0.25, 2.0}) {
    ParamEnv u3;
    u3.set("c", 1);
    u3.set("k", 1);
    u3.set("C", C);
    Instantiated fam = instantiate("tcp2_dspin7_phi1_a2family", u3);
    CHECK(eval(fam.ansatz.coeffs.at("th2"), std::sqrt(2.0), fam.env) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("cross-identity: om1 dhym branches = phi1 a2family") {
  // tan(theta) = 2C/(C^2-1); the two global om1 branches match the closed
  // a2family evaluated at C and -1/C.
  double c = 1, k = 1;
  for (double C : {0.5, 2.0}) {
    double tan_th = 2 * C / (C * C - 1);
    double theta = std::atan(tan_th);
    ParamEnv user;
    user.set("c", c);
    user.set("k", k);
    user.set("theta", theta);
    Instantiated om1 = instantiate("tcp2_dhym_om1", user);
    const auto& spec = std::get<ImplicitPayload>(om1.family->payload);
    double r0 = om1.geom->domain_min_value();
    std::vector<double> grid;
    for (int i = 0; i < 80; ++i)
      grid.push_back(r0 * 1.001 * std::pow(30.0 / (r0 * 1.001), i / 79.0));
    TrackResult tr = track_branches(spec, grid, om1.env, true, r0);
    std::vector<const BranchCurve*> global;
    for (const auto& b : tr.branches)
      if (b.spans_grid && b.boundary_match) global.push_back(&b);
    REQUIRE(global.size() == 2);
    for (double Cval : {C, -1.0 / C}) {
      ParamEnv u2;
      u2.set("c", c);
      u2.set("k", k);
      u2.set("C", Cval);
      Instantiated fam = instantiate("tcp2_dspin7_phi1_a2family", u2);
      const ExprPtr& a2 = fam.ansatz.coeffs.at("th2");
      double best = 1e300;
      for (const BranchCurve* b : global) {
        double worst = 0;
        for (size_t i = 0; i < b->r.size(); ++i) {
          double expect = eval(a2, b->r[i], fam.env);
          worst = std::max(worst, std::abs(b->value[i] - expect) /
                                      (1 + std::abs(expect)));
        }
        best = std::min(best, worst);
      }
      CHECK(best <= 1e-8);
    }
  }
}

TEST_CASE("cross-identity: om2 dhym branches = phi2 a3family") {
  double c = 1, k = 1;
  for (double C : {0.5, 2.0}) {
    double theta = std::atan(2 * C / (C * C - 1));
    ParamEnv user;
    user.set("c", c);
    user.set("k", k);
    user.set("theta", theta);
    Instantiated om2 = instantiate("tcp2_dhym_om2", user);
    const auto& spec = std::get<ImplicitPayload>(om2.family->payload);
    double r0 = om2.geom->domain_min_value();
    std::vector<double> grid;
    for (int i = 0; i < 80; ++i)
      grid.push_back(r0 * 1.001 * std::pow(30.0 / (r0 * 1.001), i / 79.0));
    TrackResult tr = track_branches(spec, grid, om2.env, true, r0);
    std::vector<const BranchCurve*> global;
    for (const auto& b : tr.branches)
      if (b.spans_grid && b.boundary_match) global.push_back(&b);
    REQUIRE(global.size() == 4);
    for (double Cval : {C, -1.0 / C})
      for (double sign : {1.0, -1.0}) {
        ParamEnv u2;
        u2.set("c", c);
        u2.set("k", k);
        u2.set("C", Cval);
        u2.set("sign", sign);
        Instantiated fam = instantiate("tcp2_dspin7_phi2_a3family", u2);
        const ExprPtr& a3 = fam.ansatz.coeffs.at("th3");
        double best = 1e300;
        for (const BranchCurve* b : global) {
          double worst = 0;
          for (size_t i = 0; i < b->r.size(); ++i) {
            double expect = eval(a3, b->r[i], fam.env);
            worst = std::max(worst, std::abs(b->value[i] - expect) /
                                        (1 + std::abs(expect)));
          }
          best = std::min(best, worst);
        }
        CHECK(best <= 1e-8);
      }
  }
}
