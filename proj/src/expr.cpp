#include "coframe/expr.hpp"

#include <cmath>
#include <sstream>

namespace coframe {

namespace {

ExprPtr make(ExprKind k) { return std::make_shared<Expr>(k); }

std::shared_ptr<Expr> make_mut(ExprKind k) { return std::make_shared<Expr>(k); }

const ExprPtr& zero_expr() {
  static const ExprPtr z = [] {
    auto e = make_mut(ExprKind::Const);
    e->value = Rational(0);
    return ExprPtr(e);
  }();
  return z;
}

const ExprPtr& one_expr() {
  static const ExprPtr o = [] {
    auto e = make_mut(ExprKind::Const);
    e->value = Rational(1);
    return ExprPtr(e);
  }();
  return o;
}

}  // namespace

ExprPtr constant(Rational v) {
  if (v.is_zero()) return zero_expr();
  if (v.is_one()) return one_expr();
  auto e = make_mut(ExprKind::Const);
  e->value = v;
  return e;
}

ExprPtr radial() {
  static const ExprPtr r = make(ExprKind::Radial);
  return r;
}

ExprPtr param(const std::string& name) {
  auto e = make_mut(ExprKind::Param);
  e->name = name;
  return e;
}

ExprPtr formal(const std::string& name) {
  auto e = make_mut(ExprKind::Formal);
  e->name = name;
  e->deriv_name = name + "'";
  return e;
}

ExprPtr sum(std::vector<ExprPtr> kids) {
  std::vector<ExprPtr> flat;
  Rational c(0);
  for (auto& k : kids) {
    if (!k) throw Error("null expression in sum");
    if (k->kind == ExprKind::Const) {
      c = c + k->value;
    } else if (k->kind == ExprKind::Sum) {
      for (auto& g : k->kids) {
        if (g->kind == ExprKind::Const)
          c = c + g->value;
        else
          flat.push_back(g);
      }
    } else {
      flat.push_back(k);
    }
  }
  if (!c.is_zero()) flat.push_back(constant(c));
  if (flat.empty()) return zero_expr();
  if (flat.size() == 1) return flat[0];
  auto e = make_mut(ExprKind::Sum);
  e->kids = std::move(flat);
  return e;
}

ExprPtr product(std::vector<ExprPtr> kids) {
  std::vector<ExprPtr> flat;
  Rational c(1);
  for (auto& k : kids) {
    if (!k) throw Error("null expression in product");
    if (k->kind == ExprKind::Const) {
      c = c * k->value;
    } else if (k->kind == ExprKind::Product) {
      for (auto& g : k->kids) {
        if (g->kind == ExprKind::Const)
          c = c * g->value;
        else
          flat.push_back(g);
      }
    } else {
      flat.push_back(k);
    }
  }
  if (c.is_zero()) return zero_expr();
  if (flat.empty()) return constant(c);
  if (!c.is_one()) flat.insert(flat.begin(), constant(c));
  if (flat.size() == 1) return flat[0];
  auto e = make_mut(ExprKind::Product);
  e->kids = std::move(flat);
  return e;
}

ExprPtr power(ExprPtr base, Rational exp) {
  if (!base) throw Error("null expression in power");
  if (exp.is_zero()) return one_expr();
  if (exp.is_one()) return base;
  if (base->kind == ExprKind::Const) {
    const Rational& c = base->value;
    if (c.is_one()) return one_expr();
    if (c.is_zero() && Rational(0) < exp) return zero_expr();
    if (exp.is_integer() && !c.is_zero()) return constant(c.pow_int(exp.num()));
  }
  auto e = make_mut(ExprKind::Power);
  e->kids.push_back(std::move(base));
  e->exponent = exp;
  return e;
}

ExprPtr lambert_w(ExprPtr arg) {
  if (!arg) throw Error("null expression in lambert_w");
  if (arg->kind == ExprKind::Const && arg->value.is_zero()) return zero_expr();
  auto e = make_mut(ExprKind::LambertW);
  e->kids.push_back(std::move(arg));
  return e;
}

bool is_zero(const ExprPtr& e) {
  return e && e->kind == ExprKind::Const && e->value.is_zero();
}

bool is_constant_value(const ExprPtr& e) {
  return e && e->kind == ExprKind::Const;
}

ExprPtr deriv(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Const:
    case ExprKind::Param:
      return zero_expr();
    case ExprKind::Radial:
      return one_expr();
    case ExprKind::Formal:
      return formal(e->deriv_name);
    case ExprKind::Sum: {
      std::vector<ExprPtr> ds;
      ds.reserve(e->kids.size());
      for (auto& k : e->kids) ds.push_back(deriv(k));
      return sum(std::move(ds));
    }
    case ExprKind::Product: {
      std::vector<ExprPtr> terms;
      for (size_t i = 0; i < e->kids.size(); ++i) {
        ExprPtr di = deriv(e->kids[i]);
        if (is_zero(di)) continue;
        std::vector<ExprPtr> fac;
        fac.reserve(e->kids.size());
        for (size_t j = 0; j < e->kids.size(); ++j)
          fac.push_back(j == i ? di : e->kids[j]);
        terms.push_back(product(std::move(fac)));
      }
      return sum(std::move(terms));
    }
    case ExprKind::Power: {
      // d(u^q) = q u^(q-1) u'
      const ExprPtr& u = e->kids[0];
      ExprPtr du = deriv(u);
      if (is_zero(du)) return zero_expr();
      return product(
          {constant(e->exponent), power(u, e->exponent - Rational(1)), du});
    }
    case ExprKind::LambertW: {
      // d W(u) = W(u) u' / (u (1 + W(u)))
      const ExprPtr& u = e->kids[0];
      ExprPtr du = deriv(u);
      if (is_zero(du)) return zero_expr();
      ExprPtr w = lambert_w(u);
      return product({w, du, power(u, Rational(-1)),
                      power(sum({one_expr(), w}), Rational(-1))});
    }
  }
  throw Error("unreachable expr kind");
}

namespace {

double ipow(double base, long long exp) {
  if (exp < 0) {
    if (base == 0.0) throw DomainError("0 raised to negative power");
    return 1.0 / ipow(base, -exp);
  }
  double out = 1.0, b = base;
  while (exp > 0) {
    if (exp & 1) out *= b;
    b *= b;
    exp >>= 1;
  }
  return out;
}

}  // namespace

double eval(const ExprPtr& e, double r, const ParamEnv& env) {
  switch (e->kind) {
    case ExprKind::Const:
      return e->value.to_double();
    case ExprKind::Radial:
      return r;
    case ExprKind::Param:
    case ExprKind::Formal:
      return env.lookup(e->name);
    case ExprKind::Sum: {
      double s = 0;
      for (auto& k : e->kids) s += eval(k, r, env);
      return s;
    }
    case ExprKind::Product: {
      double p = 1;
      for (auto& k : e->kids) p *= eval(k, r, env);
      return p;
    }
    case ExprKind::Power: {
      double b = eval(e->kids[0], r, env);
      const Rational& q = e->exponent;
      if (q.is_integer()) return ipow(b, q.num());
      if (b < 0)
        throw DomainError("negative base under fractional power: " +
                          std::to_string(b));
      if (b == 0.0) {
        if (Rational(0) < q) return 0.0;
        throw DomainError("0 raised to negative power");
      }
      return std::pow(b, q.to_double());
    }
    case ExprKind::LambertW:
      return lambert_w0(eval(e->kids[0], r, env));
  }
  throw Error("unreachable expr kind");
}

double lambert_w0(double x) {
  if (x < 0) throw DomainError("lambert_w0 argument < 0");
  if (x == 0.0) return 0.0;
  double w = std::log1p(x);
  for (int it = 0; it < 50; ++it) {
    // Halley on f(w) = w e^w - x, written to avoid e^w overflow for w >= 0.
    double t = (w - x * std::exp(-w)) / (1.0 + w);
    double u = (2.0 + w) / (2.0 * (1.0 + w));
    double step = t / (1.0 - t * u);
    w -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

namespace {

void print(const ExprPtr& e, std::ostream& os) {
  switch (e->kind) {
    case ExprKind::Const:
      os << e->value.str();
      return;
    case ExprKind::Radial:
      os << "r";
      return;
    case ExprKind::Param:
    case ExprKind::Formal:
      os << e->name;
      return;
    case ExprKind::Sum: {
      os << "(";
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << " + ";
        print(e->kids[i], os);
      }
      os << ")";
      return;
    }
    case ExprKind::Product: {
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << "*";
        print(e->kids[i], os);
      }
      return;
    }
    case ExprKind::Power: {
      os << "(";
      print(e->kids[0], os);
      os << ")^(" << e->exponent.str() << ")";
      return;
    }
    case ExprKind::LambertW: {
      os << "W(";
      print(e->kids[0], os);
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::ostringstream os;
  print(e, os);
  return os.str();
}

}  // namespace coframe
