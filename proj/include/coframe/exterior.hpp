#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "coframe/expr.hpp"

namespace coframe {

// A multi-index over coframe labels, stored as a bitmask (label i <-> bit i).
// All coframes here have at most 9 labels.
using IndexMask = uint16_t;

struct StructTerm {
  IndexMask mask;  // exactly two bits
  Rational coeff;
};

class Coframe;
using CoframePtr = std::shared_ptr<const Coframe>;

// A fixed basis of invariant 1-forms plus an optional radial label dr.
// The structure table gives d of every basis label as a rational 2-form;
// d^2 = 0 is checked exactly at construction.
class Coframe {
 public:
  using StructRow = std::vector<std::tuple<std::string, std::string, Rational>>;

  static CoframePtr create(std::vector<std::string> labels,
                           const std::string& radial_label,
                           const std::map<std::string, StructRow>& rows);

  const std::vector<std::string>& labels() const { return labels_; }
  int size() const { return static_cast<int>(labels_.size()); }
  int radial() const { return radial_; }
  int index_of(const std::string& label) const;
  const std::vector<StructTerm>& d_row(int label_index) const {
    return d_rows_[label_index];
  }

 private:
  Coframe() = default;
  std::vector<std::string> labels_;
  int radial_ = -1;
  std::vector<std::vector<StructTerm>> d_rows_;
};

// Sign of e^A wedge e^B relative to the canonical (ascending) order of A|B.
// Returns 0 when the masks intersect.
int wedge_sign(IndexMask a, IndexMask b);

// Homogeneous differential form: sparse map from ascending multi-indices to
// coefficient expressions.
class Form {
 public:
  Form(CoframePtr cf, int degree);

  const CoframePtr& coframe() const { return cf_; }
  int degree() const { return degree_; }
  const std::map<IndexMask, ExprPtr>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // Accumulate coeff on an already-canonical mask.
  void add(IndexMask mask, ExprPtr coeff);
  // Accumulate coeff on labels given in arbitrary order; the permutation sign
  // is folded into the coefficient. Repeated labels contribute nothing.
  void add_labels(const std::vector<int>& labels, ExprPtr coeff);

  ExprPtr coeff(IndexMask mask) const;

  Form operator+(const Form& o) const;
  Form operator-(const Form& o) const;
  Form operator-() const;
  Form scaled(const ExprPtr& s) const;

 private:
  CoframePtr cf_;
  int degree_;
  std::map<IndexMask, ExprPtr> terms_;
};

// Diagonal metric g = sum f_a^2 (e^a)^2 on a subset of the coframe labels,
// with an orientation fixing the volume form vol = prod f_a e^(orientation).
// Scales are kept with their displayed signs.
struct DiagonalMetric {
  CoframePtr cf;
  std::vector<ExprPtr> scales;   // indexed by label; nullptr = outside metric
  std::vector<int> orientation;  // label indices, ascending in all cases here

  IndexMask defined_mask() const;
  int dimension() const { return static_cast<int>(orientation.size()); }
  const ExprPtr& scale(int label_index) const;
  Form volume_form() const;
};

Form wedge(const Form& a, const Form& b);
Form d(const Form& a);
Form hodge(const Form& a, const DiagonalMetric& g);
double inner(const Form& a, const Form& b, const DiagonalMetric& g, double r,
             const ParamEnv& env);
// Interior product with the metric dual of e^label: (1/f^2) iota_{e_label}.
Form contract(const std::string& label, const Form& a, const DiagonalMetric& g);
// Plain interior product iota_{e_label} (no metric factor).
Form contract_plain(const std::string& label, const Form& a);

// Canonical enumeration of degree-k multi-indices (lexicographic in label
// order), and the dense coefficient vector of a form in that enumeration.
std::vector<IndexMask> index_enumeration(const Coframe& cf, int degree);
Eigen::VectorXd eval_form(const Form& a, double r, const ParamEnv& env);

// Max |coefficient| over the form's sparse terms.
double sup_norm(const Form& a, double r, const ParamEnv& env);

std::string to_string(const Form& a);

}  // namespace coframe
