#include "coframe/algebra.hpp"

#include <bit>
#include <cmath>

namespace coframe {

namespace {

Form basis_form(const CoframePtr& cf, IndexMask mask, int degree) {
  Form f(cf, degree);
  f.add(mask, constant(1));
  return f;
}

}  // namespace

JTable j_table(const Geometry& g) {
  if (!g.has_triple) throw MissingTriple(g.id);
  JTable t;
  if (g.id == "eh") {
    t.slot_label = {0, 1, 2, 3};
    t.map[0] = {{1, 1}, {0, -1}, {3, 1}, {2, -1}};
    t.map[1] = {{2, 1}, {3, -1}, {0, -1}, {1, 1}};
    t.map[2] = {{3, 1}, {2, 1}, {1, -1}, {0, -1}};
  } else {
    // (dr, th2, th3, th4, th5, th6, th7, th8)
    t.slot_label.resize(8);
    t.slot_label[0] = g.cf->index_of("dr");
    for (int a = 2; a <= 8; ++a)
      t.slot_label[a - 1] = g.cf->index_of("th" + std::to_string(a));
    t.map[0] = {{1, 1}, {0, -1}, {3, 1}, {2, -1},
                {5, 1}, {4, -1}, {7, 1}, {6, -1}};
    t.map[1] = {{2, 1}, {3, -1}, {0, -1}, {1, 1},
                {6, 1}, {7, -1}, {4, -1}, {5, 1}};
    t.map[2] = {{3, 1}, {2, 1}, {1, -1}, {0, -1},
                {7, 1}, {6, 1}, {5, -1}, {4, -1}};
  }
  // J_i on vectors squares to -1; the covector map below relies on the
  // tables being sign-consistent involutions.
  for (int i = 0; i < 3; ++i)
    for (size_t s = 0; s < t.map[i].size(); ++s) {
      auto [tgt, sgn] = t.map[i][s];
      auto [back, sgn2] = t.map[i][tgt];
      if (back != static_cast<int>(s) || sgn * sgn2 != -1)
        throw Error("inconsistent J table");
    }
  return t;
}

Form j_action(const Form& a, const Geometry& g, int i) {
  if (i < 1 || i > 3) throw Error("j_action index must be 1..3");
  if (a.degree() % 2 != 0) throw Error("j_action needs even degree");
  JTable t = j_table(g);
  std::vector<int> label_slot(g.cf->size(), -1);
  for (size_t s = 0; s < t.slot_label.size(); ++s)
    label_slot[t.slot_label[s]] = static_cast<int>(s);
  const auto& jm = t.map[i - 1];

  Form out(a.coframe(), a.degree());
  for (const auto& [mask, coeff] : a.terms()) {
    std::vector<int> new_labels;
    std::vector<ExprPtr> factors{coeff};
    int sign = 1;
    for (IndexMask rest = mask; rest;) {
      int lab = std::countr_zero(static_cast<unsigned>(rest));
      rest &= static_cast<IndexMask>(rest - 1);
      int s = label_slot[lab];
      if (s < 0) throw MetricUndefined(g.cf->labels()[lab]);
      // Covector map: J' e^s = -sigma_s e^(pi(s)).
      auto [tgt, sgn] = jm[s];
      sign *= -sgn;
      int new_lab = t.slot_label[tgt];
      new_labels.push_back(new_lab);
      // g' e^(I') = g prod(1/f_old) [orthonormal coords] prod(f_new)
      factors.push_back(power(g.metric.scale(lab), Rational(-1)));
      factors.push_back(g.metric.scale(new_lab));
    }
    if (sign < 0) factors.push_back(constant(-1));
    out.add_labels(new_labels, product(std::move(factors)));
  }
  return out;
}

Form invariant_e_generator(const Geometry& g, int i) {
  if (!g.has_triple || g.id == "eh")
    throw Error("invariant E generators are defined on the T*CP^2 triple");
  const CoframePtr& cf = g.cf;
  auto sc = [&](const char* lab) { return g.metric.scale(cf->index_of(lab)); };
  auto two = [&](const char* a, const char* b, ExprPtr c) {
    Form f(cf, 2);
    f.add_labels({cf->index_of(a), cf->index_of(b)}, std::move(c));
    return f;
  };
  ExprPtr f0 = sc("dr"), f2 = sc("th2"), f3 = sc("th3"), f5 = sc("th5"),
          f7 = sc("th7");
  switch (i) {
    case 1:
      return two("dr", "th2", product({f0, f2})) +
             two("th3", "th4", product({f3, f3})) +
             two("th5", "th6", product({constant(-1), f5, f5})) +
             two("th7", "th8", product({constant(-1), f7, f7}));
    case 2:
      return two("dr", "th3", product({f0, f3})) +
             two("th4", "th2", product({f2, f3})) +
             sigma2_form().scaled(product({constant(-1), f5, f7}));
    case 3:
      return two("dr", "th4", product({f0, f3})) +
             two("th2", "th3", product({f2, f3})) +
             sigma3_form().scaled(product({constant(-1), f5, f7}));
  }
  throw Error("invariant_e_generator index must be 1..3");
}

std::vector<IndexMask> metric_indices(const Geometry& g, int degree) {
  IndexMask defined = g.metric.defined_mask();
  std::vector<IndexMask> out;
  for (IndexMask m : index_enumeration(*g.cf, degree))
    if (!(m & ~defined)) out.push_back(m);
  return out;
}

Eigen::VectorXd metric_coords(const Form& a, const Geometry& g, double r,
                              const ParamEnv& env) {
  auto idx = metric_indices(g, a.degree());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<long>(idx.size()));
  std::map<IndexMask, long> where;
  for (size_t i = 0; i < idx.size(); ++i) where[idx[i]] = static_cast<long>(i);
  for (const auto& [m, c] : a.terms()) {
    auto it = where.find(m);
    if (it == where.end())
      throw MetricUndefined("form escapes the metric labels");
    v[it->second] = eval(c, r, env);
  }
  return v;
}

Eigen::VectorXd orthonormal_weights(const Geometry& g, int degree, double r,
                                    const ParamEnv& env) {
  auto idx = metric_indices(g, degree);
  Eigen::VectorXd w(static_cast<long>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) {
    double prod = 1;
    for (IndexMask rest = idx[i]; rest;) {
      int lab = std::countr_zero(static_cast<unsigned>(rest));
      rest &= static_cast<IndexMask>(rest - 1);
      prod /= std::abs(eval(g.metric.scale(lab), r, env));
    }
    w[static_cast<long>(i)] = prod;
  }
  return w;
}

namespace {

// T = *(. ^ om^2) over the pointwise 2-form space, in orthonormal coords.
Eigen::MatrixXd t_operator(const Geometry& g, const Form& om_sq, double r,
                           const ParamEnv& env, const Eigen::VectorXd& w) {
  auto idx = metric_indices(g, 2);
  long n = static_cast<long>(idx.size());
  Eigen::MatrixXd m(n, n);
  for (long j = 0; j < n; ++j) {
    Form col = hodge(wedge(basis_form(g.cf, idx[j], 2), om_sq), g.metric);
    m.col(j) = metric_coords(col, g, r, env);
  }
  Eigen::MatrixXd out = w.asDiagonal() * m * w.cwiseInverse().asDiagonal();
  return 0.5 * (out + out.transpose());
}

int nearest_eigenvalue(double x) {
  double best = 6;
  for (double cand : {6.0, 2.0, -2.0})
    if (std::abs(x - cand) < std::abs(x - best)) best = cand;
  if (std::abs(x - best) > 1e-6 * 6) throw Error("unclassified T eigenvalue");
  return static_cast<int>(best);
}

}  // namespace

TwoFormComponents decompose_two_form(const Form& a, const Geometry& g, double r,
                                     const ParamEnv& env) {
  if (!g.has_triple) throw MissingTriple(g.id);
  if (a.degree() != 2) throw Error("decompose_two_form needs a 2-form");
  Eigen::VectorXd w = orthonormal_weights(g, 2, r, env);
  std::array<Eigen::MatrixXd, 3> T;
  for (int i = 0; i < 3; ++i) {
    const Form& om = g.form("om" + std::to_string(i + 1));
    T[i] = t_operator(g, wedge(om, om), r, env, w);
  }
  // Joint eigenvectors through a generic combination of the commuting T_i.
  Eigen::MatrixXd combo = T[0] + std::sqrt(2.0) * T[1] + std::sqrt(3.0) * T[2];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(combo);
  const Eigen::MatrixXd& V = es.eigenvectors();

  Eigen::VectorXd input = metric_coords(a, g, r, env).cwiseProduct(w);
  long n = input.size();
  TwoFormComponents out;
  for (auto& v : out.omega) v = Eigen::VectorXd::Zero(n);
  for (auto& v : out.E) v = Eigen::VectorXd::Zero(n);
  out.lambda10 = Eigen::VectorXd::Zero(n);

  for (long j = 0; j < n; ++j) {
    Eigen::VectorXd v = V.col(j);
    int eig[3];
    for (int i = 0; i < 3; ++i)
      eig[i] = nearest_eigenvalue(v.dot(T[i] * v));
    Eigen::VectorXd piece = v * v.dot(input);
    int sixes = 0, minus = 0, six_at = -1, minus_at = -1;
    for (int i = 0; i < 3; ++i) {
      if (eig[i] == 6) {
        ++sixes;
        six_at = i;
      }
      if (eig[i] == -2) {
        ++minus;
        minus_at = i;
      }
    }
    if (sixes == 1 && minus == 0)
      out.omega[six_at] += piece;
    else if (sixes == 0 && minus == 1)
      out.E[minus_at] += piece;
    else if (minus == 3)
      out.lambda10 += piece;
    else
      throw Error("unexpected joint eigenvalue pattern");
  }
  for (auto& v : out.omega) v = v.cwiseQuotient(w);
  for (auto& v : out.E) v = v.cwiseQuotient(w);
  out.lambda10 = out.lambda10.cwiseQuotient(w);
  return out;
}

Form pi27(const Form& a, const Form& Phi, const DiagonalMetric& g) {
  if (a.degree() != 2) throw Error("pi27 needs a 2-form");
  Form s = hodge(wedge(a, Phi), g);
  return (a + s).scaled(constant(1, 4));
}

Lambda47::Lambda47(const Geometry& g, const Form& Phi) : g_(&g) {
  auto idx = metric_indices(g, 2);
  star_wedge_.reserve(idx.size());
  diamond_.reserve(idx.size());
  for (IndexMask m : idx) {
    Form b = basis_form(g.cf, m, 2);
    star_wedge_.push_back(hodge(wedge(b, Phi), g.metric));
    int la = std::countr_zero(static_cast<unsigned>(m));
    int lb = std::countr_zero(
        static_cast<unsigned>(m & static_cast<IndexMask>(m - 1)));
    // (e^a ^ e^b) diamond Phi = e^a ^ (sharp e^b _| Phi) - e^b ^ (sharp e^a _| Phi)
    const std::string& la_name = g.cf->labels()[la];
    const std::string& lb_name = g.cf->labels()[lb];
    Form da = wedge(basis_form(g.cf, static_cast<IndexMask>(1u << la), 1),
                    contract(lb_name, Phi, g.metric));
    Form db = wedge(basis_form(g.cf, static_cast<IndexMask>(1u << lb), 1),
                    contract(la_name, Phi, g.metric));
    diamond_.push_back(da - db);
  }
}

Eigen::MatrixXd Lambda47::basis(double r, const ParamEnv& env) const {
  const Geometry& g = *g_;
  auto idx2 = metric_indices(g, 2);
  long n2 = static_cast<long>(idx2.size());
  Eigen::VectorXd w2 = orthonormal_weights(g, 2, r, env);
  Eigen::MatrixXd S(n2, n2);
  for (long j = 0; j < n2; ++j)
    S.col(j) = metric_coords(star_wedge_[j], g, r, env);
  Eigen::MatrixXd St = w2.asDiagonal() * S * w2.cwiseInverse().asDiagonal();
  St = 0.5 * (St + St.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(St);
  double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<long> in_l27;
  for (long j = 0; j < n2; ++j)
    if (std::abs(es.eigenvalues()[j] - 3.0) <= 1e-6 * std::max(scale, 1.0))
      in_l27.push_back(j);
  if (in_l27.size() != 7)
    throw NotSpin7("eigenvalue-3 eigenspace has dimension " +
                   std::to_string(in_l27.size()));

  auto idx4 = metric_indices(g, 4);
  long n4 = static_cast<long>(idx4.size());
  Eigen::VectorXd w4 = orthonormal_weights(g, 4, r, env);
  Eigen::MatrixXd D(n4, static_cast<long>(in_l27.size()));
  Eigen::MatrixXd diamonds(n4, n2);
  for (long j = 0; j < n2; ++j)
    diamonds.col(j) = metric_coords(diamond_[j], g, r, env);
  for (size_t k = 0; k < in_l27.size(); ++k) {
    Eigen::VectorXd gamma_raw =
        es.eigenvectors().col(in_l27[k]).cwiseQuotient(w2);
    D.col(static_cast<long>(k)) = diamonds * gamma_raw;
  }
  // Orthonormalize the span in the weighted inner product.
  Eigen::MatrixXd Dw = w4.asDiagonal() * D;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Dw, Eigen::ComputeThinU);
  double smax = svd.singularValues().maxCoeff();
  long rank = 0;
  for (long i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-10 * smax) ++rank;
  if (rank != 7)
    throw NotSpin7("diamond span has rank " + std::to_string(rank));
  Eigen::MatrixXd Q = svd.matrixU().leftCols(rank);
  return w4.cwiseInverse().asDiagonal() * Q;
}

double Lambda47::project_norm(const Form& a, double r,
                              const ParamEnv& env) const {
  return project_norm(metric_coords(a, *g_, r, env), r, env);
}

double Lambda47::project_norm(const Eigen::VectorXd& raw, double r,
                              const ParamEnv& env) const {
  Eigen::VectorXd w4 = orthonormal_weights(*g_, 4, r, env);
  Eigen::MatrixXd B = w4.asDiagonal() * basis(r, env);
  Eigen::VectorXd v = raw.cwiseProduct(w4);
  return (B.transpose() * v).norm();
}

std::vector<Eigen::VectorXd> lambda47_basis(const Form& Phi, const Geometry& g,
                                            double r, const ParamEnv& env) {
  Lambda47 l(g, Phi);
  Eigen::MatrixXd B = l.basis(r, env);
  std::vector<Eigen::VectorXd> out;
  out.reserve(B.cols());
  for (long j = 0; j < B.cols(); ++j) out.push_back(B.col(j));
  return out;
}

double pi47_norm(const Form& a, const Form& Phi, const Geometry& g, double r,
                 const ParamEnv& env) {
  if (a.degree() != 4) throw Error("pi47_norm needs a 4-form");
  Lambda47 l(g, Phi);
  return l.project_norm(a, r, env);
}

Eigen::VectorXd f3plus_project(const Form& a, const Geometry& g, double r,
                               const ParamEnv& env) {
  if (!g.has_triple) throw MissingTriple(g.id);
  if (a.degree() != 4) throw Error("f3plus_project needs a 4-form");
  Form sd = (a + hodge(a, g.metric)).scaled(constant(1, 2));
  Form combo = sd - j_action(sd, g, 1) - j_action(sd, g, 2) +
               j_action(sd, g, 3);
  combo = combo.scaled(constant(1, 4));
  Eigen::VectorXd v = metric_coords(combo, g, r, env);
  Eigen::VectorXd w4 = orthonormal_weights(g, 4, r, env);
  Form om12 = wedge(g.form("om1"), g.form("om2"));
  Eigen::VectorXd u = metric_coords(om12, g, r, env).cwiseProduct(w4);
  Eigen::VectorXd vw = v.cwiseProduct(w4);
  vw -= u * (u.dot(vw) / u.squaredNorm());
  return vw.cwiseQuotient(w4);
}

double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::VectorXd& weights) {
  auto orth = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd mw = weights.asDiagonal() * m;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mw, Eigen::ComputeThinU);
    double smax = svd.singularValues().maxCoeff();
    long rank = 0;
    for (long i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-10 * smax) ++rank;
    return Eigen::MatrixXd(svd.matrixU().leftCols(rank));
  };
  Eigen::MatrixXd qa = orth(a), qb = orth(b);
  if (qa.cols() != qb.cols())
    throw Error("principal angles between spans of different dimension");
  // sin(theta_max) = ||(I - Qa Qa^T) Qb||_2; accurate for tiny angles where
  // acos of the cosine matrix would bottom out near sqrt(eps).
  Eigen::MatrixXd res = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(res);
  double s = std::min(1.0, svd.singularValues().maxCoeff());
  return std::asin(s);
}

}  // namespace coframe
