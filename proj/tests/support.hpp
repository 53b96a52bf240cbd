#ifndef SKELPOT_TESTS_SUPPORT_HPP
#define SKELPOT_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "skelpot/log.hpp"
#include "skelpot/skeleton.hpp"

namespace skelpot::testing {

inline CVector random_complex(std::mt19937_64& rng, int n) {
  std::normal_distribution<Real> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

inline std::vector<CoefficientField> global_extensions(const Discretization& disc,
                                                       const CoefficientField& global) {
  std::vector<CoefficientField> out;
  for (int j : disc.subdomains()) out.push_back(extend(disc.mesh(), global, j, ExtensionMode::Global));
  return out;
}

inline CoefficientField checkerboard_field(const PartitionedMesh& mesh, Real a, Real b, int n) {
  return sample_coefficients(
      mesh, {},
      {fields::isotropic(fields::checkerboard(a, b, n, mesh.box_half_width()), mesh.dim()),
       fields::constant(1.0)});
}

// Silences warnings for the lifetime of the object.
class QuietWarnings {
 public:
  QuietWarnings() : previous_(set_warning_sink(nullptr)) {}
  ~QuietWarnings() { set_warning_sink(previous_); }

 private:
  WarningSink previous_;
};

}  // namespace skelpot::testing

#endif
