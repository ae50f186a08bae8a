#pragma once

#include <optional>
#include <string>

#include "floer/pin2.hpp"

namespace floer {

struct ModelOptions {
  bool involution = true;
  bool module_operators = true;
  bool energy_filtration = true;
};

struct ModelSpec {
  std::string name;  // s3, poincare, s1xs2, t3, flat_bundle,
                     // hantzsche_wendt, minus_e8_cobordism
  Window window;
  ModelOptions options;
};

struct CobordismFixtureMetadata {
  std::int64_t chi = 0;
  std::int64_t sigma = 0;
  std::int64_t b2 = 0;
  Rational c1_sq;
};

struct ModelBundle {
  FloerData data;
  std::optional<Involution> involution;
  std::optional<CobordismOperators> q_ops;
  std::optional<CobordismOperators> v_ops;
  std::map<std::string, int> filtration;  // energy rank per manifold id

  // Present for operator fixtures between two data sets (minus_e8).
  std::optional<FloerData> cobordism_target;
  std::optional<Involution> cobordism_target_involution;
  std::optional<CobordismOperators> cobordism_ops;
  std::optional<CobordismFixtureMetadata> cobordism_metadata;
};

// Builtin model generator. Throws std::invalid_argument for unknown names
// or windows too small to contain one full tower level.
ModelBundle generate(const ModelSpec& spec);

std::vector<std::string> model_names();

// Orientation reversal at the data level: kinds swapped, local complexes
// and operators transposed, gradings reflected. Applies to the involution,
// the module operators, the filtration, and the Rokhlin metadata.
ModelBundle dual_of(const ModelBundle& bundle);

// Random complex whose differential squares to zero by construction: a
// random graded basis change applied to a direct sum of one- and two-term
// pieces. Deterministic per seed.
GradedComplex generate_random_complex(std::uint64_t seed, std::size_t size,
                                      int grading_spread);

// The 6-cell equivariant model of the sphere (two cells per dimension,
// d e1± = e0+ + e0-, d e2± = e1+ + e1-) together with the antipodal cell
// involution; the non-equivariant flavor is the minimal 2-cell model.
struct LocalSphere {
  GradedComplex complex;
  std::map<std::string, std::string> cell_involution;  // local labels
};

LocalSphere local_sphere_complex(bool equivariant);

}  // namespace floer
