#include "coframe/homogeneous.hpp"

namespace coframe {

namespace {

Coframe::StructRow row(std::initializer_list<std::tuple<long long, const char*, const char*>> ts) {
  Coframe::StructRow out;
  for (const auto& [c, a, b] : ts) out.emplace_back(a, b, Rational(c));
  return out;
}

std::map<std::string, Coframe::StructRow> su3_rows() {
  // dθ1 = -θ56+θ78, dθ2 = -2θ34-θ56-θ78, dθ3 = 2θ24-θ57+θ68,
  // dθ4 = -2θ23-θ58-θ67, dθ5 = 3θ16+θ26+θ37+θ48, dθ6 = -3θ15-θ25-θ38+θ47,
  // dθ7 = -3θ18+θ28-θ35-θ46, dθ8 = 3θ17-θ27+θ36-θ45.
  return {
      {"th1", row({{-1, "th5", "th6"}, {1, "th7", "th8"}})},
      {"th2", row({{-2, "th3", "th4"}, {-1, "th5", "th6"}, {-1, "th7", "th8"}})},
      {"th3", row({{2, "th2", "th4"}, {-1, "th5", "th7"}, {1, "th6", "th8"}})},
      {"th4", row({{-2, "th2", "th3"}, {-1, "th5", "th8"}, {-1, "th6", "th7"}})},
      {"th5", row({{3, "th1", "th6"}, {1, "th2", "th6"}, {1, "th3", "th7"}, {1, "th4", "th8"}})},
      {"th6", row({{-3, "th1", "th5"}, {-1, "th2", "th5"}, {-1, "th3", "th8"}, {1, "th4", "th7"}})},
      {"th7", row({{-3, "th1", "th8"}, {1, "th2", "th8"}, {-1, "th3", "th5"}, {-1, "th4", "th6"}})},
      {"th8", row({{3, "th1", "th7"}, {-1, "th2", "th7"}, {1, "th3", "th6"}, {-1, "th4", "th5"}})},
  };
}

}  // namespace

CoframePtr su3_coframe(bool with_radial) {
  static const CoframePtr with_dr = Coframe::create(
      {"dr", "th1", "th2", "th3", "th4", "th5", "th6", "th7", "th8"}, "dr",
      su3_rows());
  static const CoframePtr bare = Coframe::create(
      {"th1", "th2", "th3", "th4", "th5", "th6", "th7", "th8"}, "", su3_rows());
  return with_radial ? with_dr : bare;
}

CoframePtr su2_coframe() {
  // dη_i = ε_ijk η_jk / 2: dη1 = η23, dη2 = η31, dη3 = η12.
  static const CoframePtr cf = Coframe::create(
      {"dr", "eta1", "eta2", "eta3"}, "dr",
      {
          {"eta1", row({{1, "eta2", "eta3"}})},
          {"eta2", row({{-1, "eta1", "eta3"}})},
          {"eta3", row({{1, "eta1", "eta2"}})},
      });
  return cf;
}

Form sigma2_form() {
  CoframePtr cf = su3_coframe(true);
  Form s(cf, 2);
  s.add_labels({cf->index_of("th5"), cf->index_of("th7")}, constant(1));
  s.add_labels({cf->index_of("th8"), cf->index_of("th6")}, constant(1));
  return s;
}

Form sigma3_form() {
  CoframePtr cf = su3_coframe(true);
  Form s(cf, 2);
  s.add_labels({cf->index_of("th5"), cf->index_of("th8")}, constant(1));
  s.add_labels({cf->index_of("th6"), cf->index_of("th7")}, constant(1));
  return s;
}

std::vector<Form> invariant_two_forms(InvariantSpace space) {
  std::vector<Form> out;
  if (space == InvariantSpace::TCP2) {
    CoframePtr cf = su3_coframe(true);
    auto two = [&](const char* a, const char* b) {
      Form f(cf, 2);
      f.add_labels({cf->index_of(a), cf->index_of(b)}, constant(1));
      return f;
    };
    out.push_back(two("dr", "th2"));
    out.push_back(two("dr", "th3"));
    out.push_back(two("dr", "th4"));
    out.push_back(two("th2", "th3"));
    out.push_back(two("th2", "th4"));
    out.push_back(two("th3", "th4"));
    out.push_back(two("th5", "th6"));
    out.push_back(two("th7", "th8"));
    out.push_back(sigma2_form());
    out.push_back(sigma3_form());
  } else {
    CoframePtr cf = su2_coframe();
    auto two = [&](const char* a, const char* b) {
      Form f(cf, 2);
      f.add_labels({cf->index_of(a), cf->index_of(b)}, constant(1));
      return f;
    };
    out.push_back(two("dr", "eta1"));
    out.push_back(two("dr", "eta2"));
    out.push_back(two("dr", "eta3"));
    out.push_back(two("eta2", "eta3"));
    out.push_back(two("eta3", "eta1"));
    out.push_back(two("eta1", "eta2"));
  }
  return out;
}

}  // namespace coframe
