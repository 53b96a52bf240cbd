#ifndef SKELPOT_POTENTIALS_HPP
#define SKELPOT_POTENTIALS_HPP

#include <vector>

#include "skelpot/assembly.hpp"
#include "skelpot/linsolve.hpp"

namespace skelpot {

// Frequency-scaled Cauchy data of one subdomain: Dirichlet then Neumann.
struct CauchyData {
  DirichletTrace dirichlet;
  NeumannTrace neumann;
};

// Newton, single-layer and double-layer potentials of subdomain j at a
// fixed frequency. Holds one factorization of the conforming system.
class SubdomainPotentials {
 public:
  SubdomainPotentials(const SubdomainForms& forms, Frequency s, SolverOptions options = {});

  const SubdomainForms& forms() const { return *forms_; }
  const BrokenSpace& space() const { return forms_->space(); }
  int subdomain() const { return forms_->subdomain(); }
  Frequency frequency() const { return s_; }
  const LinearSolver& solver() const { return solver_; }

  // Solves l_j(s)(u, w) = load(w) for every conforming w; `load` holds the
  // values on the conforming hat functions.
  ConformingField newton(const CVector& load) const;
  // l_j(s)(S phi, w) = <phi, gamma_D(s) w>.
  ConformingField single_layer(const NeumannTrace& phi) const;
  // Zero-extension lifting of s^{-1/2} psi to the plus side plus the
  // conforming correction; the Dirichlet jump equals psi exactly.
  BrokenField double_layer(const DirichletTrace& psi) const;
  // Same potential built from an arbitrary broken lifting of psi.
  BrokenField double_layer(const BrokenField& lifting) const;
  // S psi_N - D psi_D.
  BrokenField green(const CauchyData& data) const;

 private:
  const SubdomainForms* forms_;
  Frequency s_;
  LinearSolver solver_;
};

struct JumpsAndMeans {
  DirichletTrace jump_dirichlet;  // gamma_D^+(s) - gamma_D^-(s)
  NeumannTrace jump_neumann;      // -gamma_N^+(s) - gamma_N^-(s)
  DirichletTrace mean_dirichlet;  // (gamma_D^+(s) + gamma_D^-(s)) / 2
  NeumannTrace mean_neumann;      // (-gamma_N^+(s) + gamma_N^-(s)) / 2
};

// Jumps and means across Gamma_j. Neumann traces are taken with respect to
// the normal of Gamma_j pointing out of subdomain j.
JumpsAndMeans jump_and_mean(const SubdomainForms& forms, const BrokenField& u);

// Interior Cauchy data gamma_C^-(s) u of a broken field.
CauchyData interior_cauchy_data(const SubdomainForms& forms, const BrokenField& u);

// Discrete solution of the homogeneous equation on one side of Gamma_j with
// frequency-scaled Dirichlet data on Gamma_j; zero on the other side.
BrokenField side_solution(const SubdomainForms& forms, Side side, const DirichletTrace& data,
                          Frequency s);

// Dual norm sup |load(w)| / ||w||_{H^1;s} over conforming w.
Real dual_norm(const BrokenSpace& space, const CVector& load, Frequency s);

// Partial jumps on Gamma_{j,k}: Dirichlet data_j - data_k and Neumann
// -data_j - data_k at the shared nodes (ascending vertex id). Empty when
// Gamma_{j,k} has measure zero.
struct PartialJump {
  std::vector<int> vertices;
  CVector dirichlet;
  CVector neumann;
};

PartialJump partial_jump(const TraceSpace& trace_j, const CauchyData& data_j,
                         const TraceSpace& trace_k, const CauchyData& data_k);

}  // namespace skelpot

#endif
