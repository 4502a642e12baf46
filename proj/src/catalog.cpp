#include "coframe/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace coframe {

namespace {

ExprPtr P(const char* n) { return param(n); }
ExprPtr rp(long long p, long long q = 1) {
  return power(radial(), Rational(p, q));
}
ExprPtr C(long long n, long long d = 1) { return constant(Rational(n, d)); }

// r^4 - 4c^2
ExprPtr disc_tcp2() { return sum({rp(4), product({C(-4), P("c"), P("c")})}); }
// r^4 - c
ExprPtr disc_eh() { return sum({rp(4), product({C(-1), P("c")})}); }

ExprPtr tan_t() {
  return product({P("sin_theta"), power(P("cos_theta"), Rational(-1))});
}
ExprPtr sec2_t() { return power(P("cos_theta"), Rational(-2)); }

// 2ck/r^2
ExprPtr hyperholo_a2() { return product({C(2), P("c"), P("k"), rp(-2)}); }

ExprPtr sq(const ExprPtr& e) { return product({e, e}); }

// Polynomials in the tracked unknown with Expr coefficients.
using EPoly = std::vector<ExprPtr>;

EPoly padd(const EPoly& a, const EPoly& b) {
  EPoly out(std::max(a.size(), b.size()), constant(0));
  for (size_t i = 0; i < a.size(); ++i) out[i] = sum({out[i], a[i]});
  for (size_t i = 0; i < b.size(); ++i) out[i] = sum({out[i], b[i]});
  return out;
}

EPoly pscale(const EPoly& a, const ExprPtr& s) {
  EPoly out;
  out.reserve(a.size());
  for (const auto& c : a) out.push_back(product({s, c}));
  return out;
}

EPoly pmul(const EPoly& a, const EPoly& b) {
  EPoly out(a.size() + b.size() - 1, constant(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      out[i + j] = sum({out[i + j], product({a[i], b[j]})});
  return out;
}

SolutionFamily closed(std::string id, std::string geom, bool cone,
                      EquationId eq, std::map<std::string, ExprPtr> coeffs,
                      std::vector<std::string> params, ParamEnv defaults,
                      std::string note) {
  SolutionFamily f;
  f.id = std::move(id);
  f.geometry_id = std::move(geom);
  f.cone = cone;
  f.equation = eq;
  f.payload = ClosedPayload{std::move(coeffs)};
  f.params = std::move(params);
  f.defaults = std::move(defaults);
  f.note = std::move(note);
  return f;
}

ParamEnv defs(std::initializer_list<std::pair<const char*, double>> kv) {
  ParamEnv e;
  for (const auto& [k, v] : kv) e.set(k, v);
  return e;
}

std::vector<SolutionFamily> build_registry() {
  std::vector<SolutionFamily> reg;

  // ---- Eguchi-Hanson HYM families --------------------------------------
  {
    ExprPtr inv_sqrt_eh = power(disc_eh(), Rational(-1, 2));
    ExprPtr f1_trace = product({sum({product({P("lambda"), rp(4)}), P("C1")}),
                                power(product({C(4), rp(2)}), Rational(-1))});
    ExprPtr f2_trace =
        product({sum({product({P("lambda"), disc_eh()}), P("C2")}),
                 power(product({C(4), sqrt_of(disc_eh())}), Rational(-1))});
    ExprPtr f3_trace =
        product({sum({product({P("lambda"), disc_eh()}), P("C3")}),
                 power(product({C(4), sqrt_of(disc_eh())}), Rational(-1))});
    reg.push_back(closed(
        "eh_hym_1", "eh", false, {Equation::HYM, 1},
        {{"eta1", f1_trace},
         {"eta2", product({P("C2"), inv_sqrt_eh})},
         {"eta3", product({P("C3"), inv_sqrt_eh})}},
        {"c", "lambda", "C1", "C2", "C3"},
        defs({{"c", 1}, {"lambda", 0.5}, {"C1", 1}, {"C2", 1}, {"C3", 1}}),
        "om1 trace on eta1, meromorphic tails on eta2/eta3"));
    reg.push_back(closed(
        "eh_hym_2", "eh", false, {Equation::HYM, 2},
        {{"eta1", product({P("C1"), rp(-2)})},
         {"eta2", f2_trace},
         {"eta3", product({P("C3"), inv_sqrt_eh})}},
        {"c", "lambda", "C1", "C2", "C3"},
        defs({{"c", 1}, {"lambda", 0.5}, {"C1", 1}, {"C2", 1}, {"C3", 1}}),
        "om2 trace on eta2"));
    reg.push_back(closed(
        "eh_hym_3", "eh", false, {Equation::HYM, 3},
        {{"eta1", product({P("C1"), rp(-2)})},
         {"eta2", product({P("C2"), inv_sqrt_eh})},
         {"eta3", f3_trace}},
        {"c", "lambda", "C1", "C2", "C3"},
        defs({{"c", 1}, {"lambda", 0.5}, {"C1", 1}, {"C2", 1}, {"C3", 1}}),
        "om3 trace on eta3"));
  }

  // ---- Eguchi-Hanson dHYM families -------------------------------------
  {
    ExprPtr under =
        sum({product({sec2_t(), rp(4)}),
             product({sq(tan_t()), sum({product({C(16), P("k"), P("k")}),
                                        product({C(-1), P("c")})})}),
             product({C(8), P("k"), sqrt_of(P("c")), tan_t()})});
    ExprPtr f1 = product({sum({product({C(-1), rp(2)}),
                               product({P("sign"), sqrt_of(under)})}),
                          power(product({C(4), tan_t()}), Rational(-1))});
    reg.push_back(closed("eh_dhym_1", "eh", false, {Equation::DHYM, 1},
                         {{"eta1", f1}}, {"c", "k", "theta"},
                         defs({{"c", 1}, {"k", 1}, {"theta", 0.5}}),
                         "quadratic branch on eta1; sign fixed by the rule "
                         "on 4 k tan(theta) + sqrt(c)"));
    ExprPtr under23 = sum({product({sec2_t(), rp(4)}),
                           product({C(16), P("k"), P("k"), sq(tan_t())})});
    ExprPtr f23 =
        product({sqrt_of(disc_eh()),
                 sum({product({C(-1), rp(2)}),
                      product({P("sign"), sqrt_of(under23)})}),
                 power(product({C(4), rp(2), tan_t()}), Rational(-1))});
    ExprPtr f1_hh = product({sqrt_of(P("c")), P("k"), rp(-2)});
    reg.push_back(closed(
        "eh_dhym_2", "eh", false, {Equation::DHYM, 2},
        {{"eta1", f1_hh}, {"eta2", f23}}, {"c", "k", "theta", "sign"},
        defs({{"c", 1}, {"k", 1}, {"theta", 0.5}, {"sign", 1}}),
        "both signs extend globally"));
    reg.push_back(closed(
        "eh_dhym_3", "eh", false, {Equation::DHYM, 3},
        {{"eta1", f1_hh}, {"eta3", f23}}, {"c", "k", "theta", "sign"},
        defs({{"c", 1}, {"k", 1}, {"theta", 0.5}, {"sign", 1}}),
        "index swap of eh_dhym_2"));
  }

  // ---- flag manifold ----------------------------------------------------
  reg.push_back(closed("flag_dhym", "flag", false, {Equation::DHYM, 1},
                       {{"th1", P("a1")}, {"th3", P("a3")}}, {"a1", "a3"},
                       defs({{"a1", 0}, {"a3", 1}}),
                       "phase determined by the integer pair (a1, a3)"));

  // ---- T*CP^2 closed families -------------------------------------------
  reg.push_back(closed("tcp2_hyperholo", "calabi", false,
                       {Equation::HyperHolo, 0},
                       {{"th1", P("k")}, {"th2", hyperholo_a2()}}, {"c", "k"},
                       defs({{"c", 1}, {"k", 3}}),
                       "the unique invariant hyper-holomorphic connection"));

  {
    ExprPtr d4 = disc_tcp2();
    ExprPtr a2_hym1 = product(
        {sum({P("C0"), product({C(-1), d4,
                                sum({product({P("lambda"), d4}),
                                     product({C(-4), P("c"), P("k")})})})}),
         power(product({C(2), rp(2), d4}), Rational(-1))});
    reg.push_back(closed("tcp2_hym_1", "calabi", false, {Equation::HYM, 1},
                         {{"th1", P("k")}, {"th2", a2_hym1}},
                         {"c", "k", "lambda", "C0"},
                         defs({{"c", 1}, {"k", 1}, {"lambda", 0.5}, {"C0", 1}}),
                         "extends globally only when C0 = 0"));
    ExprPtr tail = product(
        {sum({P("C0"), product({C(-1), P("lambda"), sq(d4)})}),
         power(product({C(2), power(d4, Rational(3, 2))}), Rational(-1))});
    reg.push_back(closed(
        "tcp2_hym_2", "calabi", false, {Equation::HYM, 2},
        {{"th1", P("k")}, {"th2", hyperholo_a2()}, {"th3", tail}},
        {"c", "k", "lambda", "C0"},
        defs({{"c", 1}, {"k", 1}, {"lambda", 0.5}, {"C0", 1}}),
        "om2 trace on th3"));
    reg.push_back(closed(
        "tcp2_hym_3", "calabi", false, {Equation::HYM, 3},
        {{"th1", P("k")}, {"th2", hyperholo_a2()}, {"th4", tail}},
        {"c", "k", "lambda", "C0"},
        defs({{"c", 1}, {"k", 1}, {"lambda", 0.5}, {"C0", 1}}),
        "index swap of tcp2_hym_2"));
  }

  // ---- T*CP^2 Spin(7) instanton families ---------------------------------
  {
    ExprPtr d4 = disc_tcp2();
    ExprPtr tail32 = power(d4, Rational(-3, 2));
    reg.push_back(closed(
        "tcp2_spin7_1", "calabi", false, {Equation::Spin7, 1},
        {{"th1", P("k")},
         {"th2", product({sum({product({P("C1"), d4}),
                               product({C(2), P("c"), P("k")})}),
                          rp(-2)})},
         {"th3", product({P("C2"), tail32})},
         {"th4", product({P("C3"), tail32})}},
        {"c", "k", "C1", "C2", "C3"},
        defs({{"c", 1}, {"k", 1}, {"C1", 1}, {"C2", 1}, {"C3", 1}}),
        "general Phi1 instanton on the open set"));
    ExprPtr a2_26 = sum({hyperholo_a2(),
                         product({P("C1"), rp(-2), power(d4, Rational(-1))})});
    reg.push_back(closed(
        "tcp2_spin7_2", "calabi", false, {Equation::Spin7, 2},
        {{"th1", P("k")},
         {"th2", a2_26},
         {"th3", product({P("C2"), sqrt_of(d4)})},
         {"th4", product({P("C3"), tail32})}},
        {"c", "k", "C1", "C2", "C3"},
        defs({{"c", 1}, {"k", 1}, {"C1", 1}, {"C2", 1}, {"C3", 1}}),
        "general Phi2 instanton on the open set"));
    reg.push_back(closed(
        "tcp2_spin7_3", "calabi", false, {Equation::Spin7, 3},
        {{"th1", P("k")},
         {"th2", a2_26},
         {"th3", product({P("C2"), tail32})},
         {"th4", product({P("C3"), sqrt_of(d4)})}},
        {"c", "k", "C1", "C2", "C3"},
        defs({{"c", 1}, {"k", 1}, {"C1", 1}, {"C2", 1}, {"C3", 1}}),
        "general Phi3 instanton on the open set"));
  }

  // ---- T*CP^2 implicit dHYM families -------------------------------------
  {
    // sin (Q^2 - P^2) - 2 cos P Q, P = a r^2 - 2ck,
    // Q = a^2 - r^4/4 + c^2 - k^2
    EPoly Pp{product({C(-2), P("c"), P("k")}), rp(2)};
    EPoly Q{sum({product({C(-1, 4), rp(4)}), sq(P("c")),
                 product({C(-1), sq(P("k"))})}),
            constant(0), constant(1)};
    EPoly R = padd(pscale(padd(pmul(Q, Q), pscale(pmul(Pp, Pp), C(-1))),
                          P("sin_theta")),
                   pscale(pmul(Pp, Q), product({C(-2), P("cos_theta")})));
    SolutionFamily f;
    f.id = "tcp2_dhym_om1";
    f.geometry_id = "calabi";
    f.equation = {Equation::DHYM, 1};
    f.payload = ImplicitPayload{
        "a2", R, {{"th1", P("k")}, {"th2", formal("a2")}}, P("k")};
    f.params = {"c", "k", "theta"};
    f.defaults = defs({{"c", 1}, {"k", 3}, {"theta", 0}});
    f.note = "quartic in a2; boundary value k at the bolt";
    reg.push_back(std::move(f));
  }
  {
    // sin (P^2 - Q^2) - 2 cos P Q, P = 4 a r^4 sqrt(r^4 - 4c^2),
    // Q = r^8 - 4 r^4 (a^2 + c^2 - k^2) - 16 c^2 k^2
    EPoly Pp{constant(0), product({C(4), rp(4), sqrt_of(disc_tcp2())})};
    EPoly Q{sum({rp(8),
                 product({C(-4), rp(4),
                          sum({sq(P("c")), product({C(-1), sq(P("k"))})})}),
                 product({C(-16), sq(P("c")), sq(P("k"))})}),
            constant(0), product({C(-4), rp(4)})};
    EPoly R = padd(pscale(padd(pmul(Pp, Pp), pscale(pmul(Q, Q), C(-1))),
                          P("sin_theta")),
                   pscale(pmul(Pp, Q), product({C(-2), P("cos_theta")})));
    SolutionFamily f2;
    f2.id = "tcp2_dhym_om2";
    f2.geometry_id = "calabi";
    f2.equation = {Equation::DHYM, 2};
    f2.payload = ImplicitPayload{
        "a3", R,
        {{"th1", P("k")}, {"th2", hyperholo_a2()}, {"th3", formal("a3")}},
        constant(0)};
    f2.params = {"c", "k", "theta"};
    f2.defaults = defs({{"c", 1}, {"k", 1}, {"theta", std::atan(2.0)}});
    f2.note = "quartic in a3; boundary value 0 at the bolt";
    reg.push_back(f2);
    SolutionFamily f3 = f2;
    f3.id = "tcp2_dhym_om3";
    f3.equation = {Equation::DHYM, 3};
    ImplicitPayload p3 = std::get<ImplicitPayload>(f2.payload);
    p3.unknown = "a4";
    p3.coeffs = {{"th1", P("k")},
                 {"th2", hyperholo_a2()},
                 {"th4", formal("a4")}};
    f3.payload = std::move(p3);
    f3.note = "index swap of tcp2_dhym_om2";
    reg.push_back(std::move(f3));
  }

  // ---- T*CP^2 deformed Spin(7) families -----------------------------------
  for (int phi = 1; phi <= 3; ++phi) {
    std::string tag = "tcp2_dspin7_phi" + std::to_string(phi);
    reg.push_back(closed(
        tag + "_hyperholo", "calabi", false, {Equation::DSpin7, phi},
        {{"th1", P("k")}, {"th2", hyperholo_a2()}}, {"c", "k"},
        defs({{"c", 1}, {"k", 1}}),
        "hyper-holomorphic connection as a deformed instanton"));
  }
  {
    ExprPtr d4 = disc_tcp2();
    ExprPtr csq = sum({sq(P("C3")), sq(P("C4"))});
    ExprPtr pfull = product(
        {sqrt_of(product({sum({rp(4), product({C(4), sq(P("k"))})}), d4})),
         power(product({C(2), rp(2), sqrt_of(csq)}), Rational(-1))});
    reg.push_back(closed("tcp2_dspin7_phi1_pfamily", "calabi", false,
                         {Equation::DSpin7, 1},
                         {{"th1", P("k")},
                          {"th2", hyperholo_a2()},
                          {"th3", product({P("C3"), pfull})},
                          {"th4", product({P("C4"), pfull})}},
                         {"c", "k", "C3", "C4"},
                         defs({{"c", 1}, {"k", 1}, {"C3", 1}, {"C4", 1}}),
                         "strict family mixing th3 and th4"));
    ExprPtr under = sum({product({sq(P("C")), rp(4)}),
                         product({C(-8), P("C"), P("c"), P("k")}), rp(4),
                         product({C(-4), sq(P("c"))}),
                         product({C(4), sq(P("k"))})});
    ExprPtr a2fam = sum({product({C(1, 2), P("C"), rp(2)}),
                         product({C(1, 2), P("sign"), sqrt_of(under)})});
    reg.push_back(closed("tcp2_dspin7_phi1_a2family", "calabi", false,
                         {Equation::DSpin7, 1},
                         {{"th1", P("k")}, {"th2", a2fam}}, {"c", "k", "C"},
                         defs({{"c", 1}, {"k", 1}, {"C", 1}}),
                         "coincides with the om1 dHYM branches; sign fixed "
                         "by the rule on cC - k"));
  }
  for (int phi = 2; phi <= 3; ++phi) {
    std::string tag = "tcp2_dspin7_phi" + std::to_string(phi);
    ExprPtr d4 = disc_tcp2();
    const char* main_lab = phi == 2 ? "th4" : "th3";   // mixed direction
    const char* other_lab = phi == 2 ? "th3" : "th4";  // plain direction
    ExprPtr om1b = product(
        {C(1, 2), P("sign"),
         sqrt_of(sum({rp(4), product({C(-4), sq(P("c"))}),
                      product({C(4), sq(P("k"))})}))});
    reg.push_back(closed(
        tag + "_om1branch", "calabi", false, {Equation::DSpin7, phi},
        {{"th1", P("k")}, {"th2", om1b}}, {"c", "k", "sign"},
        defs({{"c", 1}, {"k", 1}, {"sign", 1}}),
        "phase-1 om1 dHYM branches as deformed instantons"));
    ExprPtr under_m = sum({product({sq(P("C")),
                                    sum({rp(4), product({C(-4), sq(P("c"))}),
                                         product({C(4), sq(P("k"))})})}),
                           rp(4), product({C(4), sq(P("k"))})});
    ExprPtr amain = product(
        {sum({product({C(4), P("C"), P("c"), P("k")}),
              product({P("sign"), rp(2), sqrt_of(under_m)})}),
         sqrt_of(d4),
         power(sum({product({C(-2), sq(P("C")), d4}),
                    product({C(-2), rp(4)})}),
               Rational(-1))});
    ExprPtr a2m = sum({hyperholo_a2(),
                       product({P("C"), amain, sqrt_of(d4), rp(-2)})});
    std::string mixed_id = tag + (phi == 2 ? "_a4family" : "_a3family");
    reg.push_back(closed(mixed_id, "calabi", false, {Equation::DSpin7, phi},
                         {{"th1", P("k")}, {"th2", a2m}, {main_lab, amain}},
                         {"c", "k", "C", "sign"},
                         defs({{"c", 1}, {"k", 1}, {"C", 0.5}, {"sign", 1}}),
                         "mixed family; C = 0 gives a plain dHYM branch"));
    ExprPtr under_p = sum({product({sum({sq(P("C")), C(1)}), rp(4)}),
                           product({C(4), sq(P("k"))})});
    ExprPtr aplain = product(
        {sum({product({P("C"), rp(2)}),
              product({P("sign"), sqrt_of(under_p)})}),
         sqrt_of(d4), power(product({C(2), rp(2)}), Rational(-1))});
    std::string plain_id = tag + (phi == 2 ? "_a3family" : "_a4family");
    reg.push_back(closed(plain_id, "calabi", false, {Equation::DSpin7, phi},
                         {{"th1", P("k")},
                          {"th2", hyperholo_a2()},
                          {other_lab, aplain}},
                         {"c", "k", "C", "sign"},
                         defs({{"c", 1}, {"k", 1}, {"C", 0.5}, {"sign", 1}}),
                         "coincides with the om2 dHYM branches under the "
                         "phase substitution"));
  }

  // ---- Bryant-Salamon ODE and the cones ----------------------------------
  {
    ExprPtr csq = sum({sq(P("C2")), sq(P("C3")), sq(P("C4"))});
    ExprPtr w = sum({rp(2), P("c")});
    ExprPtr pp = formal("p");
    ExprPtr den =
        sum({product({sum({product({C(9), rp(2)}), product({C(10), P("c")})}),
                      csq, sq(pp)}),
             product({sq(P("k")), rp(2)}),
             product({C(100), rp(2), power(w, Rational(6, 5))})});
    ExprPtr num =
        sum({product({C(40), radial(),
                      sum({product({C(3), rp(2)}), product({C(5), P("c")})}),
                      power(w, Rational(1, 5)), pp}),
             product({C(-2), radial(),
                      sum({product({csq, sq(pp)}),
                           product({C(-1), sq(P("k"))})}),
                      pp})});
    OdePayload ode;
    ode.coeffs = {{"th1", P("k")},
                  {"th2", product({P("C2"), pp})},
                  {"th3", product({P("C3"), pp})},
                  {"th4", product({P("C4"), pp})}};
    ode.num = num;
    ode.den = den;
    ode.residual = sum({product({den, formal("p'")}), product({C(-1), num})});
    SolutionFamily f;
    f.id = "bs_dspin7_ode";
    f.geometry_id = "bs";
    f.equation = {Equation::DSpin7, 0};
    f.payload = std::move(ode);
    f.params = {"c", "k", "C2", "C3", "C4"};
    f.defaults = defs({{"c", 0}, {"k", 0}, {"C2", 1}, {"C3", 0}, {"C4", 0}});
    f.note = "reduction of the deformed equations on the spinor bundle";
    reg.push_back(std::move(f));
  }
  {
    ExprPtr csq = sum({sq(P("C2")), sq(P("C3")), sq(P("C4"))});
    ExprPtr warg = product({P("C0"), rp(128, 45)});
    ExprPtr pexp =
        product({C(10, 3), rp(6, 5), power(lambert_w(warg), Rational(-1, 2))});
    ExprPtr norm = power(csq, Rational(-1, 2));
    reg.push_back(closed(
        "cone_bs_dspin7", "bs", true, {Equation::DSpin7, 0},
        {{"th2", product({P("C2"), norm, pexp})},
         {"th3", product({P("C3"), norm, pexp})},
         {"th4", product({P("C4"), norm, pexp})}},
        {"C0", "C2", "C3", "C4"},
        defs({{"C0", 1}, {"C2", 1}, {"C3", 1}, {"C4", 1}}),
        "closed deformed instanton family on the nearly parallel cone"));
    reg.push_back(closed("cone_bs_spin7", "bs", true, {Equation::Spin7, 0},
                         {{"th2", product({P("C2"), rp(6, 5)})},
                          {"th3", product({P("C3"), rp(6, 5)})},
                          {"th4", product({P("C4"), rp(6, 5)})}},
                         {"C2", "C3", "C4"},
                         defs({{"C2", 1}, {"C3", 1}, {"C4", 1}}),
                         "instanton family on the nearly parallel cone"));
  }
  {
    reg.push_back(closed(
        "cone_hk_dspin7_om1comp", "calabi", true, {Equation::DSpin7, 1},
        {{"th2", product({P("C2"), rp(2)})}}, {"C2"}, defs({{"C2", 1}}),
        "curvature proportional to om1 on the 3-Sasakian cone"));
    ExprPtr csq = sum({sq(P("C3")), sq(P("C4"))});
    ExprPtr half_norm = power(product({C(2), sqrt_of(csq)}), Rational(-1));
    SolutionFamily f;
    f.id = "cone_hk_dspin7_pfamily";
    f.geometry_id = "calabi";
    f.cone = true;
    f.equation = {Equation::DSpin7, 1};
    f.payload = ImplicitPayload{
        "p",
        {product({C(-1), P("C0"), rp(-2)}), product({C(-1), rp(4)}),
         constant(0), constant(1)},
        {{"th3", product({P("C3"), half_norm, formal("p")})},
         {"th4", product({P("C4"), half_norm, formal("p")})}},
        nullptr};
    f.params = {"C0", "C3", "C4"};
    f.defaults = defs({{"C0", 1}, {"C3", 1}, {"C4", 1}});
    f.note = "cubic with exactly one branch defined on all of R+";
    reg.push_back(std::move(f));
    reg.push_back(closed("cone_hk_spin7", "calabi", true,
                         {Equation::Spin7, 1},
                         {{"th2", product({P("C2"), rp(2)})},
                          {"th3", product({P("C3"), rp(-6)})},
                          {"th4", product({P("C4"), rp(-6)})}},
                         {"C2", "C3", "C4"},
                         defs({{"C2", 1}, {"C3", 1}, {"C4", 1}}),
                         "instanton family on the 3-Sasakian cone"));
  }

  return reg;
}

}  // namespace

const std::vector<SolutionFamily>& registry() {
  static const std::vector<SolutionFamily> reg = build_registry();
  return reg;
}

std::vector<std::string> list_families() {
  std::vector<std::string> out;
  for (const auto& f : registry()) out.push_back(f.id);
  return out;
}

std::string equation_name(const EquationId& id) {
  auto suffix = [&](const char* base) {
    if (id.index == 0) return std::string(base) + "(PhiBS)";
    return std::string(base) + "(" + std::to_string(id.index) + ")";
  };
  switch (id.kind) {
    case Equation::Holomorphic:
      return suffix("holomorphic");
    case Equation::HYM:
      return suffix("hym");
    case Equation::DHYM:
      return suffix("dhym");
    case Equation::Spin7:
      return suffix("spin7");
    case Equation::DSpin7:
      return suffix("dspin7");
    case Equation::HyperHolo:
      return "hyper-holomorphic";
  }
  return "?";
}

namespace {

const SolutionFamily& find_family(const std::string& id) {
  for (const auto& f : registry())
    if (f.id == id) return f;
  throw UnknownFamily(id);
}

}  // namespace

Instantiated instantiate(const std::string& id, const ParamEnv& user) {
  const SolutionFamily& fam = find_family(id);
  ParamEnv env = fam.defaults;
  for (const auto& [k, v] : user.values) {
    bool known = k == "c" ||
                 std::find(fam.params.begin(), fam.params.end(), k) !=
                     fam.params.end();
    if (!known) throw BadParams("family " + id + " has no parameter " + k);
    if (fam.cone && k == "c" && v != 0.0)
      throw BadParams("cone families fix c = 0");
    env.set(k, v);
  }
  double c = fam.cone ? 0.0 : (env.has("c") ? env.lookup("c") : 0.0);
  if (c < 0) throw BadParams("c must be nonnegative");
  env.set("c", c);

  // Resolve the phase into the (sin, cos) pair; theta = pi/2 is first-class.
  if (env.has("theta")) {
    double th = env.lookup("theta");
    env.set("sin_theta", std::sin(th));
    env.set("cos_theta", std::cos(th));
  }
  if (fam.id == "flag_dhym") {
    long long a1 = llround(env.lookup("a1")), a3 = llround(env.lookup("a3"));
    double th = phase_of_flag(a1, a3);
    env.set("theta", th);
    env.set("sin_theta", std::sin(th));
    env.set("cos_theta", std::cos(th));
  }

  // Per-family validation and sign-selection rules.
  if (fam.id.starts_with("eh_dhym")) {
    double t = std::tan(env.lookup("theta"));
    if (std::abs(t) < 1e-12) throw BadParams(fam.id + " needs tan(theta) != 0");
    if (fam.id == "eh_dhym_1") {
      double crit = 4 * env.lookup("k") * t + std::sqrt(c);
      env.set("sign", crit >= 0 ? 1.0 : -1.0);
    }
  }
  if (fam.id == "tcp2_dspin7_phi1_a2family")
    env.set("sign", c * env.lookup("C") >= env.lookup("k") ? -1.0 : 1.0);
  if (env.has("sign")) {
    double s = env.lookup("sign");
    if (s != 1.0 && s != -1.0) throw BadParams("sign must be +1 or -1");
  }
  if (fam.id == "tcp2_dspin7_phi1_pfamily" ||
      fam.id == "cone_hk_dspin7_pfamily") {
    if (env.lookup("C3") == 0 && env.lookup("C4") == 0)
      throw BadParams(fam.id + " needs C3^2 + C4^2 > 0");
  }
  if (fam.id == "cone_bs_dspin7") {
    if (env.lookup("C0") <= 0) throw BadParams("C0 must be positive");
    if (env.lookup("C2") == 0 && env.lookup("C3") == 0 &&
        env.lookup("C4") == 0)
      throw BadParams("cone_bs_dspin7 needs a nonzero direction");
  }

  GeometryPtr geom;
  if (fam.geometry_id == "eh")
    geom = std::make_shared<Geometry>(eguchi_hanson(c));
  else if (fam.geometry_id == "flag")
    geom = std::make_shared<Geometry>(flag_ke());
  else if (fam.geometry_id == "calabi")
    geom = std::make_shared<Geometry>(calabi(c));
  else if (fam.geometry_id == "bs")
    geom = std::make_shared<Geometry>(bryant_salamon(c));
  else
    throw Error("unknown geometry id " + fam.geometry_id);

  const std::map<std::string, ExprPtr>* coeffs = nullptr;
  if (const auto* cp = std::get_if<ClosedPayload>(&fam.payload))
    coeffs = &cp->coeffs;
  else if (const auto* ip = std::get_if<ImplicitPayload>(&fam.payload))
    coeffs = &ip->coeffs;
  else
    coeffs = &std::get<OdePayload>(fam.payload).coeffs;
  ConnectionAnsatz ansatz = make_ansatz(geom, *coeffs);
  return Instantiated{&fam, geom, std::move(env), std::move(ansatz)};
}

double phase_of_flag(long long a1, long long a3) {
  double th = std::atan(static_cast<double>(a3)) +
              std::atan(static_cast<double>(a3 + a1)) +
              std::atan(static_cast<double>(a3 - a1));
  const double two_pi = 2 * M_PI;
  while (th > M_PI) th -= two_pi;
  while (th <= -M_PI) th += two_pi;
  return th;
}

bool flag_phase_tan(long long a1, long long a3, long long* num,
                    long long* den) {
  *num = a3 * (a3 * a3 - a1 * a1 - 3);
  *den = 3 * a3 * a3 - a1 * a1 - 1;
  return *den != 0;
}

}  // namespace coframe
