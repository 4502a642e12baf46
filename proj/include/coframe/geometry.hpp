#pragma once

#include <map>
#include <memory>
#include <string>

#include "coframe/exterior.hpp"
#include "coframe/homogeneous.hpp"

namespace coframe {

// A coframe together with a diagonal metric and the named distinguished forms
// (om1/om2/om3 for hyperKahler triples, Phi for Spin(7), vol always).
// Coefficients reference the parameter "c", bound in `params`.
struct Geometry {
  std::string id;
  CoframePtr cf;
  DiagonalMetric metric;
  std::map<std::string, Form> forms;
  int complex_dim = 0;  // n in (omega + i F)^n
  bool has_triple = false;
  bool is_kahler = false;
  ExprPtr domain_min;  // null for the compact flag manifold
  ParamEnv params;

  const Form& form(const std::string& name) const;
  ParamEnv env_with(const ParamEnv& extra) const { return params.merged(extra); }
  double domain_min_value() const;
  // Log-spaced samples on [r0 (1+margin), rmax]; single dummy sample when
  // there is no radial direction.
  std::vector<double> sample_grid(int count, double rmax,
                                  double margin = 1e-3) const;
};

using GeometryPtr = std::shared_ptr<const Geometry>;

// T*CP^1 with the Eguchi-Hanson hyperKahler triple; domain r > c^(1/4).
Geometry eguchi_hanson(double c);
// The flag manifold SU(3)/T^2 with its Kahler-Einstein structure.
Geometry flag_ke();
// T*CP^2 with the Calabi hyperKahler triple; domain r >= sqrt(2c). c = 0
// gives the 3-Sasakian cone over N_{1,1}.
Geometry calabi(double c);
// Orbi-spinor bundle of CP^2 with the Bryant-Salamon Spin(7) 4-form; c = 0
// gives the cone over the squashed nearly parallel G2 structure.
Geometry bryant_salamon(double c);

// Phi_i = (1/2)(-om_i^2 + om_j^2 + om_k^2) for a cyclic permutation (i,j,k).
Form spin7_from_triple(const Geometry& g, int i);

}  // namespace coframe
