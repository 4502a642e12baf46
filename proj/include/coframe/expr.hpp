#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "coframe/errors.hpp"
#include "coframe/rational.hpp"

namespace coframe {

// Closed scalar expressions in the radial variable r, with named parameters
// and formal unknowns (a2, a2', ...). Immutable after construction; the smart
// constructors below do constant folding and Sum/Product flattening, nothing
// more. Division is Power(., -1), square roots Power(., 1/2).

enum class ExprKind { Const, Radial, Param, Formal, Sum, Product, Power, LambertW };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
 public:
  ExprKind kind;
  Rational value;              // Const
  std::string name;            // Param / Formal
  std::string deriv_name;      // Formal: name of d/dr of this symbol
  std::vector<ExprPtr> kids;   // Sum / Product; Power and LambertW use kids[0]
  Rational exponent;           // Power

  explicit Expr(ExprKind k) : kind(k) {}
};

// Bindings for parameters and formal symbols. Lookup of an unbound name
// throws; nothing is silently treated as zero.
struct ParamEnv {
  std::map<std::string, double> values;

  double lookup(const std::string& n) const {
    auto it = values.find(n);
    if (it == values.end()) throw UnboundName(n);
    return it->second;
  }
  bool has(const std::string& n) const { return values.count(n) != 0; }
  void set(const std::string& n, double v) { values[n] = v; }

  // Entries of `extra` override entries of *this.
  ParamEnv merged(const ParamEnv& extra) const {
    ParamEnv out = *this;
    for (const auto& [k, v] : extra.values) out.values[k] = v;
    return out;
  }
};

ExprPtr constant(Rational v);
inline ExprPtr constant(long long n) { return constant(Rational(n)); }
inline ExprPtr constant(long long n, long long d) { return constant(Rational(n, d)); }
ExprPtr radial();
ExprPtr param(const std::string& name);
ExprPtr formal(const std::string& name);  // derivative symbol is name + "'"
ExprPtr sum(std::vector<ExprPtr> kids);
ExprPtr product(std::vector<ExprPtr> kids);
ExprPtr power(ExprPtr base, Rational exp);
ExprPtr lambert_w(ExprPtr arg);

inline ExprPtr operator+(const ExprPtr& a, const ExprPtr& b) { return sum({a, b}); }
inline ExprPtr operator*(const ExprPtr& a, const ExprPtr& b) { return product({a, b}); }
inline ExprPtr operator-(const ExprPtr& a) { return product({constant(-1), a}); }
inline ExprPtr operator-(const ExprPtr& a, const ExprPtr& b) { return sum({a, -b}); }
inline ExprPtr operator/(const ExprPtr& a, const ExprPtr& b) {
  return product({a, power(b, Rational(-1))});
}
inline ExprPtr sqrt_of(const ExprPtr& a) { return power(a, Rational(1, 2)); }

bool is_zero(const ExprPtr& e);
bool is_constant_value(const ExprPtr& e);  // Const node only

// Symbolic d/dr. Formal symbols chain: a2 -> a2' -> a2''.
ExprPtr deriv(const ExprPtr& e);

// Numeric evaluation. Power with a non-integer exponent requires base >= 0;
// LambertW requires a nonnegative argument.
double eval(const ExprPtr& e, double r, const ParamEnv& env);

// Principal-branch Lambert W on x >= 0: log1p initial guess + Halley.
double lambert_w0(double x);

std::string to_string(const ExprPtr& e);

}  // namespace coframe
