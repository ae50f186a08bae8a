#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "floer/gf2.hpp"
#include "floer/rational.hpp"

namespace floer {

// Closed degree window [lo, hi].
struct Window {
  Rational lo, hi;
  bool contains(const Rational& d) const { return lo <= d && d <= hi; }
  // Interior up to operators of total shift `margin`: far enough from both
  // ends that nothing relevant was truncated away.
  bool interior(const Rational& d, std::int64_t margin = 1) const {
    return lo <= d - Rational(margin) && d + Rational(margin) <= hi;
  }
};

// Finitely supported graded GF(2) vector space with ordered, globally
// unique basis labels per degree.
class GradedVectorSpace {
 public:
  using DegreeMap = std::map<Rational, std::vector<std::string>>;

  GradedVectorSpace() = default;

  void add_basis_label(const Rational& degree, const std::string& label);

  const DegreeMap& degrees() const { return degrees_; }
  std::size_t dim(const Rational& degree) const;
  std::size_t total_dim() const;
  const std::vector<std::string>& basis(const Rational& degree) const;
  std::vector<Rational> degree_list() const;

  // Degree and position of a label; nullopt if absent.
  std::optional<std::pair<Rational, std::size_t>> find(
      const std::string& label) const;

  bool operator==(const GradedVectorSpace& o) const {
    return degrees_ == o.degrees_;
  }

 private:
  DegreeMap degrees_;
  std::map<std::string, std::pair<Rational, std::size_t>> index_;
  static const std::vector<std::string> empty_;
};

// Degree-homogeneous linear map between graded spaces. The block at source
// degree d is a matrix whose columns index source basis at d and whose rows
// index target basis at d + degree_shift; absent blocks are zero.
class GradedMap {
 public:
  GradedMap() = default;
  GradedMap(GradedVectorSpace source, GradedVectorSpace target,
            Rational degree_shift)
      : source_(std::move(source)),
        target_(std::move(target)),
        shift_(degree_shift) {}

  const GradedVectorSpace& source() const { return source_; }
  const GradedVectorSpace& target() const { return target_; }
  const Rational& degree_shift() const { return shift_; }

  // Block accessors create/return zero blocks of the right shape on demand.
  gf2::BitMatrix block(const Rational& source_degree) const;
  void set_block(const Rational& source_degree, gf2::BitMatrix m);
  void set_entry(const std::string& target_label,
                 const std::string& source_label, bool value = true);
  void add_entry(const std::string& target_label,
                 const std::string& source_label);

  const std::map<Rational, gf2::BitMatrix>& stored_blocks() const {
    return blocks_;
  }

  // Image of a homogeneous chain at `source_degree`.
  gf2::BitVector apply(const Rational& source_degree,
                       const gf2::BitVector& v) const;

  // g.compose(f) = g after f (f.target must equal g.source).
  GradedMap compose_after(const GradedMap& f) const;
  GradedMap add(const GradedMap& o) const;
  bool is_zero() const;

 private:
  GradedVectorSpace source_, target_;
  Rational shift_;
  std::map<Rational, gf2::BitMatrix> blocks_;
};

// Chain complex on a degree window: degree -1 differential.
struct GradedComplex {
  GradedVectorSpace space;
  GradedMap differential;  // shift -1, space -> space
  Window window;
};

// A complex with an integer filtration level per basis label; the
// differential must not raise levels.
struct FilteredComplex {
  GradedComplex complex;
  std::map<std::string, int> level;
};

// ---- validation reports ----

struct DegreeCheck {
  Rational degree;   // source degree of the composition / identity checked
  bool ok;
  bool edge;         // true when truncation makes the check unreliable
};

struct ValidationReport {
  bool passed = true;  // no interior failure
  std::vector<DegreeCheck> checks;
  std::vector<std::string> messages;
  void record(const Rational& degree, bool ok, bool edge);
};

// ---- operations ----

// Per-degree check that the differential squares to zero. Degrees whose
// two-step composition leaves the window are flagged edge-unreliable.
ValidationReport verify_square_zero(const GradedComplex& c);

// Per-degree check of target_diff . f = f . source_diff on interior degrees.
ValidationReport verify_chain_map(const GradedMap& f, const GradedComplex& src,
                                  const GradedComplex& tgt);

// Homology with representative cycles.
struct Homology {
  GradedVectorSpace space;  // one label per class
  // Representative cycles, parallel to space.basis(degree).
  std::map<Rational, std::vector<gf2::BitVector>> representatives;
  // Boundary space basis per degree (image of the next differential),
  // retained so induced maps can reduce modulo boundaries.
  std::map<Rational, std::vector<gf2::BitVector>> boundaries;
  std::vector<Rational> edge_degrees;  // window-edge degrees, excluded
  const GradedComplex* chain = nullptr;

  std::size_t dim(const Rational& d) const { return space.dim(d); }
};

Homology homology(const GradedComplex& c);

// Map induced on homology by a chain map f (verify_chain_map assumed).
// Classes of hc are pushed through f and expressed in the basis of hd.
GradedMap induced_map(const GradedMap& f, const Homology& hc,
                      const Homology& hd);

// Exactness of a candidate sequence of maps between graded spaces
// (typically homology-level). Checks image = kernel at every inner
// junction, interior degrees only.
struct JunctionReport {
  std::size_t junction;  // index of the middle space (1-based over maps)
  Rational degree;       // middle-space degree checked
  bool ok;
  bool edge;
};

struct ExactnessReport {
  bool passed = true;
  std::vector<JunctionReport> junctions;
  std::vector<std::string> messages;
};

ExactnessReport check_exactness(const std::vector<GradedMap>& maps,
                                const Window& window);

// Dual complex: degree d becomes shift_constant - d, differential is the
// transpose, window reversed.
GradedComplex dualize(const GradedComplex& c, const Rational& shift_constant);

// ---- spectral sequence of a filtered complex ----

struct SpectralPageEntry {
  int filtration;
  Rational degree;  // total degree
  std::size_t dim;
};

struct SpectralPage {
  std::size_t index = 0;  // r
  std::vector<SpectralPageEntry> entries;
  bool differential_nonzero = false;  // some d_r has positive rank
  std::size_t dim(int p, const Rational& n) const;
  std::size_t total_dim(const Rational& n) const;
};

struct SpectralSequenceResult {
  std::vector<SpectralPage> pages;   // pages 0 .. max_page
  std::size_t collapse_page = 0;     // first r with d_s = 0 for all s >= r
  std::vector<std::size_t> nonzero_differential_pages;
};

// Pages of the spectral sequence induced by the filtration. Throws
// std::invalid_argument naming the offending generator if the differential
// raises filtration level.
SpectralSequenceResult spectral_sequence(const FilteredComplex& f,
                                         std::size_t max_page);

}  // namespace floer
