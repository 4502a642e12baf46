#include "coframe/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace coframe {

namespace {

const std::set<std::string>& permitted_labels(const std::string& geom_id) {
  static const std::set<std::string> tcp2{"th1", "th2", "th3", "th4"};
  static const std::set<std::string> eh{"eta1", "eta2", "eta3"};
  static const std::set<std::string> flag{"th1", "th3"};
  if (geom_id == "eh") return eh;
  if (geom_id == "flag") return flag;
  return tcp2;
}

Form omega_power(const Form& om, int m) {
  Form out = om;
  for (int i = 1; i < m; ++i) out = wedge(out, om);
  return out;
}

}  // namespace

ConnectionAnsatz make_ansatz(GeometryPtr g,
                             std::map<std::string, ExprPtr> coeffs) {
  if (!g) throw Error("ansatz needs a geometry");
  const auto& ok = permitted_labels(g->id);
  for (const auto& [lab, c] : coeffs) {
    if (!ok.count(lab))
      throw Error("label " + lab + " is outside the invariant ansatz for " +
                  g->id);
    g->cf->index_of(lab);  // validates
  }
  return ConnectionAnsatz{std::move(g), std::move(coeffs)};
}

Form curvature(const ConnectionAnsatz& a) {
  Form one_form(a.geom->cf, 1);
  for (const auto& [lab, c] : a.coeffs)
    one_form.add_labels({a.geom->cf->index_of(lab)}, c);
  return d(one_form);
}

double relative_residual(const Residual& res, double r, const ParamEnv& env) {
  double scale = 0;
  for (const Form& t : res.scale_terms)
    scale = std::max(scale, sup_norm(t, r, env));
  return sup_norm(res.form, r, env) / (1 + scale);
}

double max_relative_residual(const Residual& res, std::span<const double> grid,
                             const ParamEnv& env) {
  double m = 0;
  for (double r : grid) m = std::max(m, relative_residual(res, r, env));
  return m;
}

std::pair<Residual, Residual> residual_holomorphic(const ConnectionAnsatz& a,
                                                   int i) {
  const Geometry& g = *a.geom;
  if (!g.has_triple) throw MissingTriple(g.id);
  int j = i % 3 + 1, k = j % 3 + 1;
  const Form& oj = g.form("om" + std::to_string(j));
  const Form& ok = g.form("om" + std::to_string(k));
  Form F = curvature(a);
  int m = g.complex_dim / 2;
  if (m == 1) {
    Form re = wedge(F, oj), im = wedge(F, ok);
    std::vector<Form> scale{re, im};
    return {Residual{re, scale}, Residual{im, scale}};
  }
  // (om_j + i om_k)^2 = om_j^2 - om_k^2 + 2i om_j ^ om_k
  Form jj = wedge(oj, oj), kk = wedge(ok, ok), jk = wedge(oj, ok);
  Form re = wedge(F, jj - kk);
  Form im = wedge(F, jk).scaled(constant(2));
  Residual rre{re, {wedge(F, jj), wedge(F, kk)}};
  Residual rim{im, {im, wedge(F, jj)}};
  return {rre, rim};
}

Residual residual_dhym(const ConnectionAnsatz& a, int i, const ExprPtr& sin_t,
                       const ExprPtr& cos_t) {
  const Geometry& g = *a.geom;
  if (!g.is_kahler) throw MissingKahler(g.id);
  const Form& om = g.form("om" + std::to_string(i));
  Form F = curvature(a);
  int n = g.complex_dim;
  // Binomial expansion of (om + iF)^n over real forms.
  std::vector<Form> om_pow{Form(g.cf, 0)}, f_pow{Form(g.cf, 0)};
  om_pow[0].add(0, constant(1));
  f_pow[0].add(0, constant(1));
  for (int m = 1; m <= n; ++m) {
    om_pow.push_back(wedge(om_pow[m - 1], om));
    f_pow.push_back(wedge(f_pow[m - 1], F));
  }
  static const long long binom[5][5] = {{1, 0, 0, 0, 0},
                                        {1, 1, 0, 0, 0},
                                        {1, 2, 1, 0, 0},
                                        {1, 3, 3, 1, 0},
                                        {1, 4, 6, 4, 1}};
  int dim = g.metric.dimension();
  Form re(g.cf, dim), im(g.cf, dim);
  std::vector<Form> terms;
  for (int m = 0; m <= n; ++m) {
    Form t = wedge(om_pow[n - m], f_pow[m]).scaled(constant(binom[n][m]));
    terms.push_back(t);
    // i^m cycles 1, i, -1, -i
    switch (m % 4) {
      case 0: re = re + t; break;
      case 1: im = im + t; break;
      case 2: re = re - t; break;
      case 3: im = im - t; break;
    }
  }
  return Residual{im.scaled(cos_t) - re.scaled(sin_t), std::move(terms)};
}

Residual residual_hym(const ConnectionAnsatz& a, int i, const ExprPtr& lambda) {
  const Geometry& g = *a.geom;
  if (!g.is_kahler) throw MissingKahler(g.id);
  const Form& om = g.form("om" + std::to_string(i));
  Form F = curvature(a);
  int n = g.complex_dim;
  Form trace = wedge(F, omega_power(om, n - 1));
  Form top = omega_power(om, n).scaled(lambda);
  return Residual{trace - top, {trace, omega_power(om, n)}};
}

Residual residual_spin7(const ConnectionAnsatz& a, const Form& Phi) {
  const Geometry& g = *a.geom;
  Form F = curvature(a);
  Form star = hodge(wedge(F, Phi), g.metric);
  return Residual{(F + star).scaled(constant(1, 4)), {F, star}};
}

DSpin7Parts dspin7_parts(const ConnectionAnsatz& a, const Form& Phi) {
  const Geometry& g = *a.geom;
  Form F = curvature(a);
  Form FF = wedge(F, F);
  Form F3 = wedge(FF, F);
  Form starF3 = hodge(F3, g.metric).scaled(constant(1, 6));
  Residual eq2{pi27(F - starF3, Phi, g.metric), {F, starF3}};
  return DSpin7Parts{std::move(FF), std::move(eq2)};
}

double pi47_relative(const Lambda47& l47, const Form& ff, const Geometry& g,
                     double r, const ParamEnv& env) {
  Eigen::VectorXd w4 = orthonormal_weights(g, 4, r, env);
  Eigen::VectorXd raw = metric_coords(ff, g, r, env);
  double denom = 1 + raw.cwiseProduct(w4).norm();
  return l47.project_norm(raw, r, env) / denom;
}

DSpin7Report residual_dspin7(const ConnectionAnsatz& a, const Form& Phi,
                             std::span<const double> grid,
                             const ParamEnv& env) {
  const Geometry& g = *a.geom;
  DSpin7Parts parts = dspin7_parts(a, Phi);
  std::vector<double> pi47;
  Lambda47 l47(g, Phi);
  for (double r : grid)
    pi47.push_back(pi47_relative(l47, parts.ff, g, r, env));
  return DSpin7Report{std::move(pi47), std::move(parts.eq2)};
}

ExprPtr f4_over_vol(const ConnectionAnsatz& a) {
  const Geometry& g = *a.geom;
  Form F = curvature(a);
  Form F4 = wedge(wedge(F, F), wedge(F, F));
  const Form& vol = g.form("vol");
  IndexMask top = vol.terms().begin()->first;
  for (const auto& [m, c] : F4.terms())
    if (m != top) throw MetricUndefined("F^4 escapes the volume slot");
  if (F4.empty()) return constant(0);
  return product({F4.coeff(top),
                  power(vol.terms().begin()->second, Rational(-1))});
}

}  // namespace coframe
