#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "floer/graded.hpp"

namespace floer {

enum class ManifoldKind { Irreducible, BoundaryStable, BoundaryUnstable };

// The eight component operator classes. The first four count moduli spaces
// with irreducible trajectories, the bar classes count reducible ones; us
// and bar_us may connect the same pair of manifolds with different maps.
enum class OperatorClass { oo, os, uo, us, bar_ss, bar_su, bar_us, bar_uu };

const char* to_string(ManifoldKind k);
const char* to_string(OperatorClass c);
std::optional<ManifoldKind> kind_from_string(const std::string& s);
std::optional<OperatorClass> class_from_string(const std::string& s);

// Kinds admissible as source/target of each class.
ManifoldKind class_source_kind(OperatorClass c);
ManifoldKind class_target_kind(OperatorClass c);

// Total grading shift forced on a class when the assembled operator has
// uniform degree `delta` (delta = -1 for differentials): the bar_su shift
// is delta + 1 and bar_us is delta - 1, reflecting the modified grading.
Rational required_class_shift(OperatorClass c, const Rational& delta);

struct TowerInfo {
  std::string tower_id;
  std::int64_t eigen_index = 0;
  int eigen_sign = 0;  // +1 / -1
  bool operator==(const TowerInfo& o) const {
    return tower_id == o.tower_id && eigen_index == o.eigen_index &&
           eigen_sign == o.eigen_sign;
  }
};

struct CriticalManifold {
  std::string id;
  ManifoldKind kind = ManifoldKind::Irreducible;
  Rational base_grading;          // plain grading of local degree-0 cells
  GradedComplex local_complex;    // integer-graded 0..dim, complete
  std::optional<TowerInfo> tower;

  std::int64_t local_dim() const;
};

struct ModuliOperator {
  OperatorClass cls = OperatorClass::oo;
  std::string source, target;
  Rational total_shift;  // declared, audited against the class rule
  // Blocks keyed by source local degree; each matrix has rows indexed by
  // the target local complex at (source degree + local shift), where the
  // local shift is total_shift - (base(target) - base(source)).
  std::map<std::int64_t, gf2::BitMatrix> blocks;
};

struct FloerData {
  std::string name;
  std::int64_t grading_denominator = 1;
  std::size_t b1 = 0;
  std::optional<std::int64_t> rokhlin_times8;  // sigma(W), pre-division
  std::vector<CriticalManifold> manifolds;
  std::vector<ModuliOperator> operators;

  const CriticalManifold* find_manifold(const std::string& id) const;
};

// A classified set of cobordism operators from one data set to another,
// all contributing to assembled maps of uniform degree `degree`.
struct CobordismOperators {
  Rational degree;
  std::vector<ModuliOperator> ops;  // sources in src data, targets in tgt
};

enum class Flavor { Check, Hat, Bar };
const char* to_string(Flavor f);
std::optional<Flavor> flavor_from_string(const std::string& s);

// ---- grading arithmetic ----

// Relative grading between two levels of a reducible tower over one
// critical point: 2i when the eigenvalues share a sign, 2i-1 for
// positive-to-negative, 2i+1 for negative-to-positive.
std::int64_t reducible_tower_grading(std::int64_t i, int sign1, int sign2);

// Modified relative grading gr - o[C-] + o[C+] with o = 0 boundary-stable,
// 1 boundary-unstable. Rejects irreducible kinds.
Rational modified_grading(const Rational& gr, ManifoldKind kind_minus,
                          ManifoldKind kind_plus);

// Absolute rational grading -gr_z + dim + c1_sq/4 - iota - sigma/4.
Rational absolute_grading(std::int64_t gr_z, std::int64_t dim,
                          const Rational& c1_sq, std::int64_t iota,
                          std::int64_t sigma);

// Characteristic number (chi + sigma - b1)/2, exact.
Rational iota_characteristic(std::int64_t chi, std::int64_t sigma,
                             std::int64_t b1_of_boundary);

Rational relative_grading_sum(const Rational& a, const Rational& b);

// ---- assembly ----

// Flavor chain complexes assembled from the block matrices. The check
// complex lives on C^o (+) C^s, hat on C^o (+) C^u, bar on C^s (+) C^u with
// unstable summands placed at the modified grading (plain - 1).
GradedComplex assemble_check(const FloerData& d, const Window& window);
GradedComplex assemble_hat(const FloerData& d, const Window& window);
GradedComplex assemble_bar(const FloerData& d, const Window& window);
GradedComplex assemble_flavor(const FloerData& d, Flavor f, const Window& window);

// Grading-preserving chain involution induced on an assembled complex by a
// cell-level involution (labels "manifold:cell" -> "manifold:cell").
GradedMap assembled_involution(const FloerData& d, const GradedComplex& c,
                               const std::map<std::string, std::string>& cell_map);

struct IjpMaps {
  GradedComplex bar, check, hat;
  GradedMap i;  // bar -> check, degree 0
  GradedMap j;  // check -> hat, degree 0
  GradedMap p;  // hat -> bar, degree -1
};

IjpMaps assemble_ijp(const FloerData& d, const Window& window);

struct CobordismMaps {
  GradedComplex src_check, src_hat, src_bar;
  GradedComplex tgt_check, tgt_hat, tgt_bar;
  GradedMap check_map, hat_map, bar_map;
};

// Block assembly of the cobordism operators; every assembled map must pass
// verify_chain_map, otherwise the failing identity is reported by throwing.
CobordismMaps assemble_cobordism(const FloerData& src, const FloerData& tgt,
                                 const CobordismOperators& ops,
                                 const Window& window);

// Literal class-by-class composition of two operator sets: blocks of the
// composite are the matrix products plus the mixed differential terms, so
// that assembling the result reproduces the composite of the assembled
// maps on builtin fixtures.
CobordismOperators compose_operator_sets(const FloerData& y0, const FloerData& y1,
                                         const FloerData& y2,
                                         const CobordismOperators& first,
                                         const CobordismOperators& second);

// The identity cylinder fixture: identity components on every manifold.
CobordismOperators identity_operators(const FloerData& d);

// ---- validation ----

struct ComponentCheck {
  std::string name;  // e.g. "check: o <- s"
  bool ok;
  bool edge;
};

struct FloerValidation {
  bool passed = true;
  std::vector<std::string> errors;    // structural violations
  std::vector<std::string> warnings;  // e.g. possible missing strata
  std::vector<ComponentCheck> component_identities;
  ValidationReport check_square, hat_square, bar_square;
};

FloerValidation validate(const FloerData& d, const Window& window);

}  // namespace floer
