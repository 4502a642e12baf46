#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "coframe/geometry.hpp"

namespace coframe {

// Irreducible Sp(2)/Spin(7) pieces of 2- and 4-forms, the projections pi^2_7
// and pi^4_7, the J actions and the diamond action. Decompositions are
// numeric per radius; only wedge/d/star/pi27 stay symbolic.

// Signed permutation realizing J_i on the orthonormal coframe slots
// (f0 dr, f2 th2, f3 th3, f3 th4, f5 th5, f5 th6, f7 th7, f7 th8) for the
// 8-dimensional triples, (f0 dr, f1 eta1, f2 eta2, f3 eta3) for
// Eguchi-Hanson. map[i][slot] = (target slot, sign) for J_i e_slot.
struct JTable {
  std::vector<int> slot_label;  // coframe label index per slot
  std::array<std::vector<std::pair<int, int>>, 3> map;
};

JTable j_table(const Geometry& g);

// alpha |-> alpha(J_i ., ..., J_i .) on even-degree invariant forms, with
// scale ratios converting between the raw and orthonormal coframes.
Form j_action(const Form& a, const Geometry& g, int i);

// The invariant generator of E_i on T*CP^2: the om_i companion with flipped
// fiber terms (alpha_1 = f0f2 dr^th2 + f3^2 th34 - f5^2 th56 - f7^2 th78 and
// cyclic analogues).
Form invariant_e_generator(const Geometry& g, int i);

// Enumeration of degree-k multi-indices supported on the metric labels, and
// raw/orthonormal coordinate vectors of a form over that enumeration.
std::vector<IndexMask> metric_indices(const Geometry& g, int degree);
Eigen::VectorXd metric_coords(const Form& a, const Geometry& g, double r,
                              const ParamEnv& env);
// Weights sqrt(prod 1/f_i^2) converting raw coords to orthonormal coords.
Eigen::VectorXd orthonormal_weights(const Geometry& g, int degree, double r,
                                    const ParamEnv& env);

struct TwoFormComponents {
  // Raw coordinates over metric_indices(g, 2); the seven components sum to
  // the input.
  std::array<Eigen::VectorXd, 3> omega;
  std::array<Eigen::VectorXd, 3> E;
  Eigen::VectorXd lambda10;
};

// Joint eigenspace split of the commuting operators T_i = *(. ^ om_i^2):
// eigenvalue pattern (6,2,2) on <om_i>, (-2,2,2) on E_i, (-2,-2,-2) on
// Lambda^2_10.
TwoFormComponents decompose_two_form(const Form& a, const Geometry& g, double r,
                                     const ParamEnv& env);

// pi^2_7(alpha) = (alpha + *(alpha ^ Phi)) / 4, symbolic.
Form pi27(const Form& a, const Form& Phi, const DiagonalMetric& g);

// Pointwise basis machinery for Lambda^4_7 = span of Lambda^2_7 diamond Phi.
// Columns are orthonormal (in the metric inner product) raw-coordinate
// vectors over metric_indices(g, 4).
class Lambda47 {
 public:
  Lambda47(const Geometry& g, const Form& Phi);
  Eigen::MatrixXd basis(double r, const ParamEnv& env) const;
  // Norm of the orthogonal projection of a 4-form onto Lambda^4_7.
  double project_norm(const Form& a, double r, const ParamEnv& env) const;
  double project_norm(const Eigen::VectorXd& raw_coords, double r,
                      const ParamEnv& env) const;

 private:
  const Geometry* g_;
  std::vector<Form> star_wedge_;  // *(e^ab ^ Phi) per 2-form basis element
  std::vector<Form> diamond_;     // (e^ab) diamond Phi
};

std::vector<Eigen::VectorXd> lambda47_basis(const Form& Phi, const Geometry& g,
                                            double r, const ParamEnv& env);
double pi47_norm(const Form& a, const Form& Phi, const Geometry& g, double r,
                 const ParamEnv& env);

// The F3+ component of a 4-form by the three-step algorithm: self-dualize,
// take (id - J1 - J2 + J3)/4, remove the om1^om2 component. Raw coordinates
// over metric_indices(g, 4).
Eigen::VectorXd f3plus_project(const Form& a, const Geometry& g, double r,
                               const ParamEnv& env);

// Largest principal angle (radians) between the column spans of two bases,
// given in raw coordinates with a common orthonormal weight vector.
double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::VectorXd& weights);

// Tags for the remaining irreducible 4-form summands. Only Lambda^4_7 has a
// constructive role in the equations; the others are reachable numerically
// as orthogonal complements if ever needed.
enum class FourFormModule {
  PhiSpan,       // <Phi>
  Lambda4_7,     // diamond span, see Lambda47
  Lambda4_27,    // orthogonal complement of the rest
  Lambda4_35,    // anti-self-dual part
  F1Plus,
  F2Plus,
  F3Plus,
  Lambda4Plus14,
  Lambda4Minus5,
  K1Minus,
  K2Minus,
  K3Minus,
};

}  // namespace coframe
