#include "coframe/geometry.hpp"

#include <cmath>

namespace coframe {

const Form& Geometry::form(const std::string& name) const {
  auto it = forms.find(name);
  if (it == forms.end()) {
    if (name == "om1" || name == "om2" || name == "om3")
      throw MissingTriple(id);
    throw Error("geometry " + id + " has no form " + name);
  }
  return it->second;
}

double Geometry::domain_min_value() const {
  if (!domain_min) return 0.0;
  return eval(domain_min, 0.0, params);
}

std::vector<double> Geometry::sample_grid(int count, double rmax,
                                          double margin) const {
  if (cf->radial() < 0) return {1.0};
  double r0 = domain_min_value();
  double lo = r0 > 0 ? r0 * (1.0 + margin) : 1e-2;
  if (lo >= rmax) throw Error("empty sample range");
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(lo * std::pow(rmax / lo, t));
  }
  return out;
}

namespace {

ExprPtr rpow(long long p, long long q = 1) {
  return power(radial(), Rational(p, q));
}

Form two(const CoframePtr& cf, const char* a, const char* b, ExprPtr c) {
  Form f(cf, 2);
  f.add_labels({cf->index_of(a), cf->index_of(b)}, std::move(c));
  return f;
}

}  // namespace

Geometry eguchi_hanson(double c) {
  Geometry g;
  g.id = "eh";
  g.cf = su2_coframe();
  g.complex_dim = 2;
  g.has_triple = true;
  g.is_kahler = true;
  g.params.set("c", c);
  g.domain_min = power(param("c"), Rational(1, 4));

  // u = 1 - c r^-4
  ExprPtr u = sum({constant(1), product({constant(-1), param("c"), rpow(-4)})});
  ExprPtr half_r = product({constant(1, 2), radial()});
  ExprPtr quarter_r2 = product({constant(1, 4), rpow(2)});

  g.metric.cf = g.cf;
  g.metric.scales.resize(4);
  g.metric.scales[g.cf->index_of("dr")] = power(u, Rational(-1, 2));
  g.metric.scales[g.cf->index_of("eta1")] = product({half_r, sqrt_of(u)});
  g.metric.scales[g.cf->index_of("eta2")] = half_r;
  g.metric.scales[g.cf->index_of("eta3")] = half_r;
  g.metric.orientation = {0, 1, 2, 3};

  Form om1 = two(g.cf, "dr", "eta1", half_r) +
             two(g.cf, "eta2", "eta3", quarter_r2);
  Form om2 = two(g.cf, "dr", "eta2",
                 product({half_r, power(u, Rational(-1, 2))})) +
             two(g.cf, "eta3", "eta1", product({quarter_r2, sqrt_of(u)}));
  Form om3 = two(g.cf, "dr", "eta3",
                 product({half_r, power(u, Rational(-1, 2))})) +
             two(g.cf, "eta1", "eta2", product({quarter_r2, sqrt_of(u)}));
  g.forms.emplace("om1", std::move(om1));
  g.forms.emplace("om2", std::move(om2));
  g.forms.emplace("om3", std::move(om3));
  g.forms.emplace("vol", g.metric.volume_form());
  return g;
}

Geometry flag_ke() {
  Geometry g;
  g.id = "flag";
  g.cf = su3_coframe(false);
  g.complex_dim = 3;
  g.is_kahler = true;

  g.metric.cf = g.cf;
  g.metric.scales.resize(8);
  ExprPtr sqrt2 = sqrt_of(constant(2));
  for (const char* lab : {"th2", "th4"})
    g.metric.scales[g.cf->index_of(lab)] = sqrt2;
  for (const char* lab : {"th5", "th6", "th7", "th8"})
    g.metric.scales[g.cf->index_of(lab)] = constant(1);
  g.metric.orientation = {g.cf->index_of("th2"), g.cf->index_of("th4"),
                          g.cf->index_of("th5"), g.cf->index_of("th6"),
                          g.cf->index_of("th7"), g.cf->index_of("th8")};

  // om_KE = d th3 = 2 th24 - th57 + th68
  Form om(g.cf, 2);
  om.add_labels({g.cf->index_of("th2"), g.cf->index_of("th4")}, constant(2));
  om.add_labels({g.cf->index_of("th5"), g.cf->index_of("th7")}, constant(-1));
  om.add_labels({g.cf->index_of("th6"), g.cf->index_of("th8")}, constant(1));
  g.forms.emplace("om1", std::move(om));
  g.forms.emplace("vol", g.metric.volume_form());
  return g;
}

Geometry calabi(double c) {
  Geometry g;
  g.id = "calabi";
  g.cf = su3_coframe(true);
  g.complex_dim = 4;
  g.has_triple = true;
  g.is_kahler = true;
  g.params.set("c", c);
  g.domain_min = sqrt_of(product({constant(2), param("c")}));

  // v = 1 - 4 c^2 r^-4
  ExprPtr v = sum({constant(1), product({constant(-4), param("c"), param("c"),
                                         rpow(-4)})});
  ExprPtr f0 = product({constant(-1), power(v, Rational(-1, 2))});
  ExprPtr f2 = product({radial(), sqrt_of(v)});
  ExprPtr f3 = radial();
  ExprPtr f5 = sqrt_of(sum({product({constant(1, 2), rpow(2)}), param("c")}));
  ExprPtr f7 = sqrt_of(
      sum({product({constant(1, 2), rpow(2)}), product({constant(-1), param("c")})}));

  g.metric.cf = g.cf;
  g.metric.scales.resize(9);
  auto set = [&](const char* lab, ExprPtr e) {
    g.metric.scales[g.cf->index_of(lab)] = std::move(e);
  };
  set("dr", f0);
  set("th2", f2);
  set("th3", f3);
  set("th4", f3);
  set("th5", f5);
  set("th6", f5);
  set("th7", f7);
  set("th8", f7);
  g.metric.orientation = {0, 2, 3, 4, 5, 6, 7, 8};  // dr, th2..th8 (no th1)

  ExprPtr f3sq = product({f3, f3});
  ExprPtr f5sq = product({f5, f5});
  ExprPtr f7sq = product({f7, f7});
  ExprPtr f5f7 = product({f5, f7});

  Form om1 = two(g.cf, "dr", "th2", product({f0, f2})) +
             two(g.cf, "th3", "th4", f3sq) +
             two(g.cf, "th5", "th6", f5sq) +
             two(g.cf, "th7", "th8", f7sq);
  Form om2 = two(g.cf, "dr", "th3", product({f0, f3})) +
             two(g.cf, "th4", "th2", product({f2, f3})) +
             sigma2_form().scaled(f5f7);
  Form om3 = two(g.cf, "dr", "th4", product({f0, f3})) +
             two(g.cf, "th2", "th3", product({f2, f3})) +
             sigma3_form().scaled(f5f7);
  g.forms.emplace("om1", std::move(om1));
  g.forms.emplace("om2", std::move(om2));
  g.forms.emplace("om3", std::move(om3));
  g.forms.emplace("vol", g.metric.volume_form());
  return g;
}

Geometry bryant_salamon(double c) {
  Geometry g;
  g.id = "bs";
  g.cf = su3_coframe(true);
  g.complex_dim = 4;
  g.params.set("c", c);
  g.domain_min = constant(0);

  // w = r^2 + c
  ExprPtr w = sum({rpow(2), param("c")});
  ExprPtr h0 = product({constant(2), power(w, Rational(-1, 5))});
  ExprPtr h2 = product({constant(2), radial(), power(w, Rational(-1, 5))});
  ExprPtr h5 = product({sqrt_of(constant(10)), power(w, Rational(3, 10))});

  g.metric.cf = g.cf;
  g.metric.scales.resize(9);
  auto set = [&](const char* lab, ExprPtr e) {
    g.metric.scales[g.cf->index_of(lab)] = std::move(e);
  };
  set("dr", h0);
  set("th2", h2);
  set("th3", h2);
  set("th4", h2);
  set("th5", h5);
  set("th6", h5);
  set("th7", h5);
  set("th8", h5);
  g.metric.orientation = {0, 2, 3, 4, 5, 6, 7, 8};

  auto idx = [&](const char* lab) { return g.cf->index_of(lab); };
  Form phi(g.cf, 4);
  ExprPtr h0h23 = product({h0, h2, h2, h2});
  ExprPtr h0h2h52 = product({h0, h2, h5, h5});
  ExprPtr h22h52 = product({h2, h2, h5, h5});
  ExprPtr h54 = product({h5, h5, h5, h5});
  auto add4 = [&](const char* a, const char* b, const char* cc, const char* dd,
                  long long sgn, const ExprPtr& coeff) {
    phi.add_labels({idx(a), idx(b), idx(cc), idx(dd)},
                   product({constant(sgn), coeff}));
  };
  add4("dr", "th2", "th3", "th4", 1, h0h23);
  add4("dr", "th2", "th5", "th6", -1, h0h2h52);
  add4("dr", "th2", "th7", "th8", -1, h0h2h52);
  add4("dr", "th3", "th5", "th7", -1, h0h2h52);
  add4("dr", "th3", "th6", "th8", 1, h0h2h52);
  add4("dr", "th4", "th5", "th8", -1, h0h2h52);
  add4("dr", "th4", "th6", "th7", -1, h0h2h52);
  add4("th2", "th3", "th5", "th8", -1, h22h52);
  add4("th2", "th3", "th6", "th7", -1, h22h52);
  add4("th2", "th4", "th5", "th7", 1, h22h52);
  add4("th2", "th4", "th6", "th8", -1, h22h52);
  add4("th3", "th4", "th5", "th6", -1, h22h52);
  add4("th3", "th4", "th7", "th8", -1, h22h52);
  add4("th5", "th6", "th7", "th8", 1, h54);
  g.forms.emplace("Phi", std::move(phi));
  g.forms.emplace("vol", g.metric.volume_form());
  return g;
}

Form spin7_from_triple(const Geometry& g, int i) {
  if (!g.has_triple) throw MissingTriple(g.id);
  if (i < 1 || i > 3) throw Error("spin7_from_triple index must be 1..3");
  int j = i % 3 + 1, k = j % 3 + 1;
  auto name = [](int m) { return "om" + std::to_string(m); };
  const Form& oi = g.form(name(i));
  const Form& oj = g.form(name(j));
  const Form& ok = g.form(name(k));
  Form out = wedge(oi, oi).scaled(constant(-1, 2)) +
             wedge(oj, oj).scaled(constant(1, 2)) +
             wedge(ok, ok).scaled(constant(1, 2));
  return out;
}

}  // namespace coframe
