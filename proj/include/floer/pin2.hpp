#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "floer/floer_core.hpp"

namespace floer {

// The involution j: a kind- and grading-preserving bijection on manifolds
// together with a compatible involutive bijection on assembled cell labels.
struct Involution {
  std::map<std::string, std::string> manifold_map;
  std::map<std::string, std::string> cell_map;  // "manifold:cell" labels
};

// Thrown by classify_image_i when the window cannot certify all three
// tower minima; callers map this to the dedicated exit code.
struct InconclusiveWindow : std::runtime_error {
  explicit InconclusiveWindow(const std::string& what)
      : std::runtime_error(what) {}
};

struct InvolutionReport {
  bool passed = true;
  std::vector<std::string> errors;
};

// Checks: involutivity, kind/grading/tower compatibility, chain-map
// property on all three assembled complexes, and operator intertwining
// (the class-total of every operator block commutes with j).
InvolutionReport validate_involution(const FloerData& d, const Involution& inv,
                                     const Window& window);

struct Subcomplex {
  GradedComplex complex;
  GradedMap inclusion;  // into the ambient complex
};

// Kernel of (id + j) with the restricted differential.
Subcomplex invariant_subcomplex(const GradedComplex& c, const GradedMap& j);

// Image of (id + j); inclusion target is the invariant subcomplex.
Subcomplex image_subcomplex(const GradedComplex& c, const GradedMap& j);

// Gysin data: homology-level maps of
//   ... -> HS_{k+1} -e-> HS_k -iota-> HM_k -pi-> HS_k -e-> HS_{k-1} -> ...
// built from 0 -> C^inv -> C -> (id+j)C -> 0.
struct GysinReport {
  Homology hs;            // homology of the invariant subcomplex
  Homology hm;            // homology of the full complex
  GradedMap e;            // HS -> HS, degree -1
  GradedMap iota;         // HS -> HM, degree 0
  GradedMap pi;           // HM -> HS, degree 0
  ExactnessReport exactness;
  bool quasi_isomorphism_ok = true;  // H((1+j)C) = H(C^inv) via inclusion
};

GysinReport gysin_sequence(const FloerData& d, const Involution& inv,
                           Flavor flavor, const Window& window);

// Graded module over R = F[[V]][Q]/(Q^3) presented by homology-level
// operator actions.
struct RModuleStructure {
  GradedVectorSpace space;
  GradedMap q_action;  // degree -1
  GradedMap v_action;  // degree -4
};

// Homology of the invariant subcomplex of the chosen flavor together with
// the actions induced by the chain-level Q/V operator sets. The relations
// q^3 = 0 and qv = vq are enforced on the window interior.
struct InducedModule {
  RModuleStructure module;
  Homology homology;          // of the invariant subcomplex
  Subcomplex invariant;       // the subcomplex the module lives on
};

InducedModule induced_module(const FloerData& d, const Involution& inv,
                             const CobordismOperators& q_ops,
                             const CobordismOperators& v_ops, Flavor flavor,
                             const Window& window);

struct StandardModuleParams {
  Rational alpha, beta, gamma;
};

// Manolescu invariants from the image of i_* inside HS-to, for rational
// homology spheres. Throws InconclusiveWindow when the window cannot
// certify the three minima, std::invalid_argument on non-QHS input.
StandardModuleParams classify_image_i(const FloerData& d, const Involution& inv,
                                      const CobordismOperators& q_ops,
                                      const CobordismOperators& v_ops,
                                      const Window& window);

struct InvariantPropertyCase {
  std::string name;
  StandardModuleParams triple;
  std::optional<StandardModuleParams> dual_triple;
  std::optional<std::int64_t> rokhlin_times8;
};

struct InvariantPropertyReport {
  bool passed = true;
  std::vector<std::string> failures;
  std::vector<std::string> checks;
};

// Ordering, orientation-reversal swap, and the mod-2 Rokhlin congruence.
InvariantPropertyReport check_invariant_properties(
    const std::vector<InvariantPropertyCase>& cases);

// Validation bundle used by corruption sweeps: structural + square-zero
// checks plus the involution intertwining when an involution is supplied.
bool data_rejected(const FloerData& d, const std::optional<Involution>& inv,
                   const Window& window);

}  // namespace floer
