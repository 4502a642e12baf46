#include "coframe/exterior.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace coframe {

namespace {

int popcount(IndexMask m) { return std::popcount(static_cast<unsigned>(m)); }

// Exact rational forms, used only for the d^2 = 0 structure check.
using RatForm = std::map<IndexMask, Rational>;

void rat_add(RatForm& f, IndexMask m, const Rational& c) {
  auto [it, inserted] = f.emplace(m, c);
  if (!inserted) {
    it->second = it->second + c;
    if (it->second.is_zero()) f.erase(it);
  }
}

}  // namespace

int wedge_sign(IndexMask a, IndexMask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (IndexMask rest = b; rest;) {
    int bit = std::countr_zero(static_cast<unsigned>(rest));
    rest &= static_cast<IndexMask>(rest - 1);
    inversions += popcount(static_cast<IndexMask>(a >> (bit + 1)));
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

CoframePtr Coframe::create(std::vector<std::string> labels,
                           const std::string& radial_label,
                           const std::map<std::string, StructRow>& rows) {
  auto cf = std::shared_ptr<Coframe>(new Coframe());
  cf->labels_ = std::move(labels);
  if (cf->labels_.size() > 16) throw Error("coframe too large for IndexMask");
  if (!radial_label.empty()) cf->radial_ = cf->index_of(radial_label);
  cf->d_rows_.resize(cf->labels_.size());
  for (const auto& [label, row] : rows) {
    int a = cf->index_of(label);
    for (const auto& [l1, l2, c] : row) {
      int i = cf->index_of(l1), j = cf->index_of(l2);
      if (i == j) throw Error("degenerate structure term on " + label);
      Rational coeff = c;
      if (i > j) {
        std::swap(i, j);
        coeff = -coeff;
      }
      cf->d_rows_[a].push_back(
          {static_cast<IndexMask>((1u << i) | (1u << j)), coeff});
    }
  }
  // Jacobi identity: d(d e^a) = 0 exactly, for every basis label.
  for (int a = 0; a < cf->size(); ++a) {
    RatForm dd;
    for (const auto& t : cf->d_rows_[a]) {
      // d(e^i ^ e^j) = d e^i ^ e^j - e^i ^ d e^j
      int i = std::countr_zero(static_cast<unsigned>(t.mask));
      int j = std::countr_zero(static_cast<unsigned>(
          t.mask & static_cast<IndexMask>(t.mask - 1)));
      auto expand = [&](int src, int other, const Rational& sign) {
        for (const auto& s : cf->d_rows_[src]) {
          int ws = wedge_sign(s.mask, static_cast<IndexMask>(1u << other));
          if (ws == 0) continue;
          rat_add(dd, static_cast<IndexMask>(s.mask | (1u << other)),
                  t.coeff * s.coeff * sign * Rational(ws));
        }
      };
      expand(i, j, Rational(1));
      expand(j, i, Rational(-1));
    }
    if (!dd.empty())
      throw Error("structure constants violate d^2=0 on label " +
                  cf->labels_[a]);
  }
  return cf;
}

int Coframe::index_of(const std::string& label) const {
  for (size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return static_cast<int>(i);
  throw Error("unknown coframe label: " + label);
}

Form::Form(CoframePtr cf, int degree) : cf_(std::move(cf)), degree_(degree) {
  if (!cf_) throw Error("form needs a coframe");
  if (degree_ < 0 || degree_ > cf_->size()) throw Error("bad form degree");
}

void Form::add(IndexMask mask, ExprPtr coeff) {
  if (popcount(mask) != degree_) throw Error("mask degree mismatch");
  if (is_zero(coeff)) return;
  auto it = terms_.find(mask);
  if (it == terms_.end()) {
    terms_.emplace(mask, std::move(coeff));
  } else {
    ExprPtr merged = sum({it->second, coeff});
    if (is_zero(merged))
      terms_.erase(it);
    else
      it->second = std::move(merged);
  }
}

void Form::add_labels(const std::vector<int>& labels, ExprPtr coeff) {
  if (static_cast<int>(labels.size()) != degree_)
    throw Error("label count degree mismatch");
  // Insertion sort with swap counting.
  std::vector<int> idx = labels;
  int swaps = 0;
  for (size_t i = 1; i < idx.size(); ++i)
    for (size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      ++swaps;
    }
  IndexMask mask = 0;
  for (size_t i = 0; i < idx.size(); ++i) {
    if (i > 0 && idx[i] == idx[i - 1]) return;  // repeated label
    if (idx[i] < 0 || idx[i] >= cf_->size()) throw Error("label out of range");
    mask |= static_cast<IndexMask>(1u << idx[i]);
  }
  if (swaps % 2) coeff = product({constant(-1), std::move(coeff)});
  add(mask, std::move(coeff));
}

ExprPtr Form::coeff(IndexMask mask) const {
  auto it = terms_.find(mask);
  return it == terms_.end() ? constant(0) : it->second;
}

Form Form::operator+(const Form& o) const {
  if (cf_ != o.cf_) throw CoframeMismatch();
  if (degree_ != o.degree_) throw Error("form degree mismatch in +");
  Form out = *this;
  for (const auto& [m, c] : o.terms_) out.add(m, c);
  return out;
}

Form Form::operator-(const Form& o) const { return *this + (-o); }

Form Form::operator-() const { return scaled(constant(-1)); }

Form Form::scaled(const ExprPtr& s) const {
  Form out(cf_, degree_);
  for (const auto& [m, c] : terms_) out.add(m, product({s, c}));
  return out;
}

IndexMask DiagonalMetric::defined_mask() const {
  IndexMask m = 0;
  for (size_t i = 0; i < scales.size(); ++i)
    if (scales[i]) m |= static_cast<IndexMask>(1u << i);
  return m;
}

const ExprPtr& DiagonalMetric::scale(int label_index) const {
  if (label_index < 0 || label_index >= static_cast<int>(scales.size()) ||
      !scales[label_index])
    throw MetricUndefined(cf->labels()[label_index]);
  return scales[label_index];
}

Form DiagonalMetric::volume_form() const {
  Form vol(cf, dimension());
  std::vector<ExprPtr> fs;
  IndexMask m = 0;
  for (int lab : orientation) {
    fs.push_back(scale(lab));
    m |= static_cast<IndexMask>(1u << lab);
  }
  // Orientation lists are ascending in label order, so the mask is canonical.
  vol.add(m, product(std::move(fs)));
  return vol;
}

Form wedge(const Form& a, const Form& b) {
  if (a.coframe() != b.coframe()) throw CoframeMismatch();
  Form out(a.coframe(), a.degree() + b.degree());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      ExprPtr c = product({ca, cb});
      if (s < 0) c = product({constant(-1), std::move(c)});
      out.add(static_cast<IndexMask>(ma | mb), std::move(c));
    }
  return out;
}

Form d(const Form& a) {
  const CoframePtr& cf = a.coframe();
  Form out(cf, a.degree() + 1);
  for (const auto& [mask, c] : a.terms()) {
    // Radial derivative of the coefficient: f' dr ^ e^I.
    ExprPtr dc = deriv(c);
    if (!is_zero(dc)) {
      if (cf->radial() < 0)
        throw Error("non-constant coefficient on a coframe without dr");
      IndexMask drbit = static_cast<IndexMask>(1u << cf->radial());
      int s = wedge_sign(drbit, mask);
      if (s != 0) {
        if (s < 0) dc = product({constant(-1), std::move(dc)});
        out.add(static_cast<IndexMask>(drbit | mask), std::move(dc));
      }
    }
    // Structural part: sum_j (-1)^(j-1) d e^(i_j) ^ e^(I \ i_j).
    int pos = 0;
    for (IndexMask rest = mask; rest; ++pos) {
      int bit = std::countr_zero(static_cast<unsigned>(rest));
      rest &= static_cast<IndexMask>(rest - 1);
      IndexMask remaining = static_cast<IndexMask>(mask & ~(1u << bit));
      Rational sign = (pos % 2 == 0) ? Rational(1) : Rational(-1);
      for (const auto& st : cf->d_row(bit)) {
        int ws = wedge_sign(st.mask, remaining);
        if (ws == 0) continue;
        out.add(static_cast<IndexMask>(st.mask | remaining),
                product({constant(sign * st.coeff * Rational(ws)), c}));
      }
    }
  }
  return out;
}

Form hodge(const Form& a, const DiagonalMetric& g) {
  if (a.coframe() != g.cf) throw CoframeMismatch();
  IndexMask defined = g.defined_mask();
  Form out(a.coframe(), g.dimension() - a.degree());
  for (const auto& [mask, c] : a.terms()) {
    if (mask & ~defined) {
      IndexMask bad = static_cast<IndexMask>(mask & ~defined);
      throw MetricUndefined(
          g.cf->labels()[std::countr_zero(static_cast<unsigned>(bad))]);
    }
    IndexMask comp = static_cast<IndexMask>(defined & ~mask);
    int s = wedge_sign(mask, comp);
    std::vector<ExprPtr> factors{c};
    if (s < 0) factors.push_back(constant(-1));
    for (IndexMask rest = comp; rest;) {
      int bit = std::countr_zero(static_cast<unsigned>(rest));
      rest &= static_cast<IndexMask>(rest - 1);
      factors.push_back(g.scale(bit));
    }
    for (IndexMask rest = mask; rest;) {
      int bit = std::countr_zero(static_cast<unsigned>(rest));
      rest &= static_cast<IndexMask>(rest - 1);
      factors.push_back(power(g.scale(bit), Rational(-1)));
    }
    out.add(comp, product(std::move(factors)));
  }
  return out;
}

double inner(const Form& a, const Form& b, const DiagonalMetric& g, double r,
             const ParamEnv& env) {
  if (a.coframe() != b.coframe() || a.coframe() != g.cf)
    throw CoframeMismatch();
  if (a.degree() != b.degree()) throw Error("inner needs equal degrees");
  IndexMask defined = g.defined_mask();
  double total = 0;
  for (const auto& [mask, ca] : a.terms()) {
    if (mask & ~defined) {
      IndexMask bad = static_cast<IndexMask>(mask & ~defined);
      throw MetricUndefined(
          g.cf->labels()[std::countr_zero(static_cast<unsigned>(bad))]);
    }
    auto it = b.terms().find(mask);
    if (it == b.terms().end()) continue;
    double w = 1;
    for (IndexMask rest = mask; rest;) {
      int bit = std::countr_zero(static_cast<unsigned>(rest));
      rest &= static_cast<IndexMask>(rest - 1);
      double f = eval(g.scale(bit), r, env);
      w /= f * f;
    }
    total += eval(ca, r, env) * eval(it->second, r, env) * w;
  }
  return total;
}

namespace {

Form interior(int lab, const Form& a, const ExprPtr& factor) {
  Form out(a.coframe(), a.degree() - 1);
  IndexMask bit = static_cast<IndexMask>(1u << lab);
  for (const auto& [mask, c] : a.terms()) {
    if (!(mask & bit)) continue;
    int pos = popcount(static_cast<IndexMask>(mask & (bit - 1)));
    std::vector<ExprPtr> fac{c};
    if (factor) fac.push_back(factor);
    if (pos % 2) fac.push_back(constant(-1));
    out.add(static_cast<IndexMask>(mask & ~bit), product(std::move(fac)));
  }
  return out;
}

}  // namespace

Form contract(const std::string& label, const Form& a, const DiagonalMetric& g) {
  int lab = g.cf->index_of(label);
  return interior(lab, a, power(g.scale(lab), Rational(-2)));
}

Form contract_plain(const std::string& label, const Form& a) {
  return interior(a.coframe()->index_of(label), a, nullptr);
}

std::vector<IndexMask> index_enumeration(const Coframe& cf, int degree) {
  std::vector<IndexMask> out;
  int n = cf.size();
  std::vector<int> comb(degree);
  for (int i = 0; i < degree; ++i) comb[i] = i;
  if (degree == 0) return {IndexMask(0)};
  while (true) {
    IndexMask m = 0;
    for (int i : comb) m |= static_cast<IndexMask>(1u << i);
    out.push_back(m);
    int i = degree - 1;
    while (i >= 0 && comb[i] == n - degree + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < degree; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

Eigen::VectorXd eval_form(const Form& a, double r, const ParamEnv& env) {
  auto idx = index_enumeration(*a.coframe(), a.degree());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<long>(idx.size()));
  std::map<IndexMask, long> where;
  for (size_t i = 0; i < idx.size(); ++i) where[idx[i]] = static_cast<long>(i);
  for (const auto& [m, c] : a.terms()) v[where.at(m)] = eval(c, r, env);
  return v;
}

double sup_norm(const Form& a, double r, const ParamEnv& env) {
  double m = 0;
  for (const auto& [mask, c] : a.terms())
    m = std::max(m, std::abs(eval(c, r, env)));
  return m;
}

std::string to_string(const Form& a) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [mask, c] : a.terms()) {
    if (!first) os << " + ";
    first = false;
    os << to_string(c) << " ";
    bool fl = true;
    for (IndexMask rest = mask; rest;) {
      int bit = std::countr_zero(static_cast<unsigned>(rest));
      rest &= static_cast<IndexMask>(rest - 1);
      if (!fl) os << "^";
      fl = false;
      os << a.coframe()->labels()[bit];
    }
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace coframe
