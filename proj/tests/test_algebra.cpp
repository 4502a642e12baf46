#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "coframe/algebra.hpp"

using namespace coframe;

namespace {

double rel_form_diff(const Form& a, const Form& b, double r,
                     const ParamEnv& env) {
  Eigen::VectorXd va = eval_form(a, r, env), vb = eval_form(b, r, env);
  return (va - vb).lpNorm<Eigen::Infinity>() /
         (1 + vb.lpNorm<Eigen::Infinity>());
}

// J_i on raw-coordinate tangent vectors: e_lab = f_lab ehat_slot, so
// (JX)_tgt = X_lab sigma f_lab / f_tgt.
Eigen::VectorXd j_vector(const Eigen::VectorXd& x, const Geometry& g, int i,
                         double r, const ParamEnv& env) {
  JTable t = j_table(g);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (size_t s = 0; s < t.slot_label.size(); ++s) {
    int lab = t.slot_label[s];
    auto [tgt_slot, sgn] = t.map[i - 1][s];
    int tgt = t.slot_label[tgt_slot];
    double fl = eval(g.metric.scale(lab), r, env);
    double ft = eval(g.metric.scale(tgt), r, env);
    out[tgt] += x[lab] * sgn * fl / ft;
  }
  return out;
}

// iota_X of a form, with the components of X bound as parameters x0..xn.
Form contract_vector(const Eigen::VectorXd& x, const Form& a) {
  Form out(a.coframe(), a.degree() - 1);
  for (int lab = 0; lab < a.coframe()->size(); ++lab) {
    if (x[lab] == 0) continue;
    Form piece = contract_plain(a.coframe()->labels()[lab], a);
    out = out + piece.scaled(param("x" + std::to_string(lab)));
  }
  return out;
}

}  // namespace

TEST_CASE("defining relation of the J_i") {
  // iota_X (om_j^2 - om_k^2)/2 = iota_{J_i X} (om_j ^ om_k)
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> comp(-2, 2);
  for (Geometry g : {calabi(1.0), eguchi_hanson(1.0)}) {
    ParamEnv env = g.params;
    int n = g.cf->size();
    for (int i = 1; i <= 3; ++i) {
      int j = i % 3 + 1, k = j % 3 + 1;
      const Form& oj = g.form("om" + std::to_string(j));
      const Form& ok = g.form("om" + std::to_string(k));
      Form lhs_form = (wedge(oj, oj) - wedge(ok, ok)).scaled(constant(1, 2));
      Form rhs_form = wedge(oj, ok);
      for (double r : {1.7, 2.9}) {
        for (int trial = 0; trial < 4; ++trial) {
          Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
          for (int lab = 0; lab < n; ++lab)
            if (g.metric.scales[lab]) x[lab] = comp(rng);
          Eigen::VectorXd jx = j_vector(x, g, i, r, env);
          ParamEnv ex = env, ejx = env;
          for (int lab = 0; lab < n; ++lab) {
            ex.set("x" + std::to_string(lab), x[lab]);
            ejx.set("x" + std::to_string(lab), jx[lab]);
          }
          Form lhs = contract_vector(x, lhs_form);
          Form rhs = contract_vector(jx, rhs_form);
          Eigen::VectorXd vl = eval_form(lhs, r, ex);
          Eigen::VectorXd vr = eval_form(rhs, r, ejx);
          CHECK((vl - vr).lpNorm<Eigen::Infinity>() <=
                1e-10 * (1 + vl.lpNorm<Eigen::Infinity>()));
        }
      }
    }
  }
}

TEST_CASE("j_action on the triple and the E generators") {
  Geometry g = calabi(1.0);
  ParamEnv env = g.params;
  const Form& om1 = g.form("om1");
  const Form& om2 = g.form("om2");
  for (double r : {1.6, 3.2}) {
    CHECK(rel_form_diff(j_action(om1, g, 1), om1, r, env) <= 1e-12);
    CHECK(rel_form_diff(j_action(om2, g, 1), -om2, r, env) <= 1e-12);
    Form a1 = invariant_e_generator(g, 1);
    CHECK(rel_form_diff(j_action(a1, g, 1), a1, r, env) <= 1e-12);
    CHECK(rel_form_diff(j_action(a1, g, 2), -a1, r, env) <= 1e-12);
    CHECK(rel_form_diff(j_action(a1, g, 3), -a1, r, env) <= 1e-12);
  }
}

TEST_CASE("j_action squares to the identity on even degrees") {
  Geometry g = calabi(1.0);
  ParamEnv env = g.params;
  std::mt19937 rng(29);
  IndexMask defined = g.metric.defined_mask();
  for (int deg : {2, 4}) {
    auto idx = index_enumeration(*g.cf, deg);
    Form f(g.cf, deg);
    std::uniform_int_distribution<long long> cc(-3, 3);
    for (IndexMask m : idx) {
      if (m & ~defined) continue;
      f.add(m, constant(cc(rng)));
    }
    for (int i = 1; i <= 3; ++i) {
      Form jj = j_action(j_action(f, g, i), g, i);
      CHECK(rel_form_diff(jj, f, 2.1, env) <= 1e-11);
    }
  }
  // th1 support is rejected
  Form bad(g.cf, 2);
  bad.add_labels({g.cf->index_of("th1"), g.cf->index_of("th2")}, constant(1));
  CHECK_THROWS_AS(j_action(bad, g, 1), MetricUndefined);
  CHECK_THROWS_AS(j_action(flag_ke().form("om1"), flag_ke(), 1), MissingTriple);
}

TEST_CASE("decompose_two_form buckets") {
  Geometry g = calabi(1.0);
  ParamEnv env = g.params;
  double r = 2.3;
  // om1 is purely <om1>
  auto c1 = decompose_two_form(g.form("om1"), g, r, env);
  CHECK(c1.omega[0].norm() > 1e-6);
  CHECK(c1.omega[1].norm() <= 1e-10 * c1.omega[0].norm());
  CHECK(c1.E[0].norm() <= 1e-10 * c1.omega[0].norm());
  CHECK(c1.lambda10.norm() <= 1e-10 * c1.omega[0].norm());
  // alpha2 is purely E_2
  Form a2 = invariant_e_generator(g, 2);
  auto c2 = decompose_two_form(a2, g, r, env);
  CHECK(c2.E[1].norm() > 1e-6);
  CHECK(c2.E[0].norm() <= 1e-10 * c2.E[1].norm());
  CHECK(c2.E[2].norm() <= 1e-10 * c2.E[1].norm());
  CHECK(c2.omega[1].norm() <= 1e-10 * c2.E[1].norm());
  CHECK(c2.lambda10.norm() <= 1e-10 * c2.E[1].norm());
  // components sum to the input
  Form th23(g.cf, 2);
  th23.add_labels({g.cf->index_of("th2"), g.cf->index_of("th3")}, constant(1));
  auto c3 = decompose_two_form(th23, g, r, env);
  Eigen::VectorXd total = c3.lambda10;
  for (int i = 0; i < 3; ++i) total += c3.omega[i] + c3.E[i];
  Eigen::VectorXd in = metric_coords(th23, g, r, env);
  CHECK((total - in).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("dimension split (3,1,1,1,4) of the invariant two-forms") {
  Geometry g = calabi(1.0);
  ParamEnv env = g.params;
  double r = 1.9;
  auto forms = invariant_two_forms(InvariantSpace::TCP2);
  long n = static_cast<long>(metric_indices(g, 2).size());
  Eigen::MatrixXd om_mat(n, 10), e_mat[3], l10_mat(n, 10);
  for (auto& m : e_mat) m.resize(n, 10);
  Eigen::MatrixXd om_all(n, 10);
  for (int idx = 0; idx < 10; ++idx) {
    auto comp = decompose_two_form(forms[idx], g, r, env);
    om_all.col(idx) = comp.omega[0] + comp.omega[1] + comp.omega[2];
    for (int i = 0; i < 3; ++i) e_mat[i].col(idx) = comp.E[i];
    l10_mat.col(idx) = comp.lambda10;
  }
  auto rank = [](const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    double smax = svd.singularValues().maxCoeff();
    long rk = 0;
    for (long i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-8 * smax) ++rk;
    return rk;
  };
  CHECK(rank(om_all) == 3);
  CHECK(rank(e_mat[0]) == 1);
  CHECK(rank(e_mat[1]) == 1);
  CHECK(rank(e_mat[2]) == 1);
  CHECK(rank(l10_mat) == 4);
}

TEST_CASE("pi27 eigen-identities for Phi3") {
  Geometry g = calabi(1.0);
  ParamEnv env = g.params;
  Form phi3 = spin7_from_triple(g, 3);
  const Form& om1 = g.form("om1");
  const Form& om3 = g.form("om3");
  Form a3 = invariant_e_generator(g, 3);
  Form z(g.cf, 2);
  for (double r : {1.7, 2.8}) {
    CHECK(rel_form_diff(pi27(om3, phi3, g.metric), z, r, env) <= 1e-11);
    CHECK(rel_form_diff(pi27(om1, phi3, g.metric), om1, r, env) <= 1e-11);
    CHECK(rel_form_diff(pi27(a3, phi3, g.metric), a3, r, env) <= 1e-11);
  }
}

TEST_CASE("pi27 idempotence and complementarity") {
  Geometry g = calabi(1.0);
  ParamEnv env = g.params;
  Form phi1 = spin7_from_triple(g, 1);
  std::mt19937 rng(31);
  std::uniform_int_distribution<long long> cc(-3, 3);
  auto forms = invariant_two_forms(InvariantSpace::TCP2);
  for (int trial = 0; trial < 8; ++trial) {
    Form a(g.cf, 2);
    for (const Form& b : forms) a = a + b.scaled(constant(cc(rng)));
    Form p = pi27(a, phi1, g.metric);
    Form pp = pi27(p, phi1, g.metric);
    // pi21 = (3a - *(a ^ Phi))/4
    Form q = (a.scaled(constant(3)) -
              hodge(wedge(a, phi1), g.metric)).scaled(constant(1, 4));
    for (double r : {1.8, 3.5}) {
      CHECK(rel_form_diff(pp, p, r, env) <= 1e-12);
      CHECK(rel_form_diff(p + q, a, r, env) <= 1e-12);
    }
  }
}

TEST_CASE("lambda47 basis and invariant slice") {
  Geometry g = calabi(1.0);
  ParamEnv env = g.params;
  double r = 2.2;
  Form phi1 = spin7_from_triple(g, 1);
  Lambda47 l47(g, phi1);
  Eigen::MatrixXd basis = l47.basis(r, env);
  CHECK(basis.cols() == 7);
  // <Phi, v> = 0 for every basis vector
  Eigen::VectorXd w4 = orthonormal_weights(g, 4, r, env);
  Eigen::VectorXd phic = metric_coords(phi1, g, r, env).cwiseProduct(w4);
  for (long j = 0; j < basis.cols(); ++j) {
    Eigen::VectorXd col = basis.col(j).cwiseProduct(w4);
    CHECK(std::abs(phic.dot(col)) <= 1e-9 * phic.norm());
  }
  // invariant slice of Lambda^4_7(Phi1): alpha2 ^ om3, om1 ^ om2, om1 ^ om3
  Form a2 = invariant_e_generator(g, 2);
  for (const Form& v : {wedge(a2, g.form("om3")),
                        wedge(g.form("om1"), g.form("om2")),
                        wedge(g.form("om1"), g.form("om3"))}) {
    double full = metric_coords(v, g, r, env).cwiseProduct(w4).norm();
    CHECK(l47.project_norm(v, r, env) == doctest::Approx(full).epsilon(1e-9));
  }
  // pi47 examples
  CHECK(pi47_norm(phi1, phi1, g, r, env) <=
        1e-9 * metric_coords(phi1, g, r, env).cwiseProduct(w4).norm());
  CHECK(pi47_norm(wedge(g.form("om1"), g.form("om2")), phi1, g, r, env) >
        1e-3);
  // Phi3 span contains om1^om3 and om2^om3
  Form phi3 = spin7_from_triple(g, 3);
  Lambda47 l3(g, phi3);
  for (const Form& v : {wedge(g.form("om1"), g.form("om3")),
                        wedge(g.form("om2"), g.form("om3"))}) {
    double full = metric_coords(v, g, r, env).cwiseProduct(w4).norm();
    CHECK(l3.project_norm(v, r, env) == doctest::Approx(full).epsilon(1e-9));
  }
  // a non-Spin(7) 4-form is rejected
  Form bogus = wedge(g.form("om1"), g.form("om2"));
  CHECK_THROWS_AS(lambda47_basis(bogus, g, r, env), NotSpin7);
}

TEST_CASE("f3plus three-step algorithm") {
  Geometry g = calabi(1.0);
  ParamEnv env = g.params;
  double r = 2.0;
  Form a1 = invariant_e_generator(g, 1);
  Form a2 = invariant_e_generator(g, 2);
  Form a1om2 = wedge(a1, g.form("om2"));
  Form a2om1 = wedge(a2, g.form("om1"));
  // a1 ^ om2 lies in F3+ already, and the invariant slice is the line
  // spanned by a2 ^ om1 as well.
  Eigen::VectorXd p = f3plus_project(a1om2, g, r, env);
  Eigen::VectorXd v = metric_coords(a1om2, g, r, env);
  CHECK((p - v).lpNorm<Eigen::Infinity>() <=
        1e-9 * (1 + v.lpNorm<Eigen::Infinity>()));
  Eigen::VectorXd u = metric_coords(a2om1, g, r, env);
  double cosang = std::abs(p.dot(u)) / (p.norm() * u.norm());
  CHECK(cosang == doctest::Approx(1.0).epsilon(1e-9));
  // Phi3 has no F3+ component
  Form phi3 = spin7_from_triple(g, 3);
  CHECK(f3plus_project(phi3, g, r, env).norm() <=
        1e-9 * metric_coords(phi3, g, r, env).norm());
}

TEST_CASE("diamond span equals the J-algorithm span for Phi3") {
  Geometry g = calabi(1.0);
  ParamEnv env = g.params;
  Form phi3 = spin7_from_triple(g, 3);
  Lambda47 l3(g, phi3);
  for (double r : {1.8, 2.7}) {
    Eigen::MatrixXd dspan = l3.basis(r, env);
    // J route: F3+ images of all pointwise 4-form basis elements, plus
    // om1 ^ om3 and om2 ^ om3.
    auto idx4 = metric_indices(g, 4);
    long n4 = static_cast<long>(idx4.size());
    Eigen::MatrixXd jspan(n4, idx4.size() + 2);
    for (size_t j = 0; j < idx4.size(); ++j) {
      Form b(g.cf, 4);
      b.add(idx4[j], constant(1));
      jspan.col(static_cast<long>(j)) = f3plus_project(b, g, r, env);
    }
    jspan.col(static_cast<long>(idx4.size())) =
        metric_coords(wedge(g.form("om1"), g.form("om3")), g, r, env);
    jspan.col(static_cast<long>(idx4.size()) + 1) =
        metric_coords(wedge(g.form("om2"), g.form("om3")), g, r, env);
    Eigen::VectorXd w4 = orthonormal_weights(g, 4, r, env);
    double angle = max_principal_angle(dspan, jspan, w4);
    CHECK(angle <= 1e-8);
  }
}

TEST_CASE("lambda47 works on the Bryant-Salamon structure") {
  Geometry g = bryant_salamon(1.0);
  ParamEnv env = g.params;
  const Form& phi = g.form("Phi");
  Lambda47 l(g, phi);
  for (double r : {1.5, 4.0}) {
    CHECK(l.basis(r, env).cols() == 7);
    CHECK(pi47_norm(phi, phi, g, r, env) <=
          1e-8 * metric_coords(phi, g, r, env)
                     .cwiseProduct(orthonormal_weights(g, 4, r, env))
                     .norm());
  }
}
