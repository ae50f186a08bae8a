#include <random>

#include "doctest.h"
#include "floer/graded.hpp"
#include "oracle.hpp"

using namespace floer;

namespace {

Window wide() { return {Rational(-100), Rational(100)}; }

// Complex with the given dimensions per degree and zero differential.
GradedComplex zero_complex(std::initializer_list<std::pair<int, int>> dims) {
  GradedComplex c;
  c.window = wide();
  for (auto [deg, n] : dims)
    for (int i = 0; i < n; ++i)
      c.space.add_basis_label(Rational(deg),
                              "d" + std::to_string(deg) + "#" + std::to_string(i));
  c.differential = GradedMap(c.space, c.space, Rational(-1));
  return c;
}

// The 6-cell equivariant model of the sphere: two cells per dimension,
// d e1± = e0+ + e0-, d e2± = e1+ + e1-.
GradedComplex equivariant_sphere() {
  GradedComplex c;
  c.window = wide();
  for (int d = 0; d <= 2; ++d) {
    c.space.add_basis_label(Rational(d), "e" + std::to_string(d) + "+");
    c.space.add_basis_label(Rational(d), "e" + std::to_string(d) + "-");
  }
  GradedMap diff(c.space, c.space, Rational(-1));
  for (const char* s : {"+", "-"}) {
    diff.add_entry("e0+", std::string("e1") + s);
    diff.add_entry("e0-", std::string("e1") + s);
    diff.add_entry("e1+", std::string("e2") + s);
    diff.add_entry("e1-", std::string("e2") + s);
  }
  c.differential = diff;
  return c;
}

// Random complex: conjugate a direct sum of one- and two-term pieces by a
// random graded basis change (test-local construction).
GradedComplex random_complex(std::mt19937_64& rng, std::size_t size,
                             int spread) {
  GradedComplex c;
  c.window = wide();
  std::map<int, int> made;
  std::vector<std::pair<int, int>> gens;  // degree, index
  for (std::size_t i = 0; i < size; ++i) {
    int deg = int(rng() % (2 * spread + 1)) - spread;
    gens.push_back({deg, made[deg]++});
    c.space.add_basis_label(
        Rational(deg),
        "g" + std::to_string(deg < 0 ? 1000 - deg : deg) + "#" +
            std::to_string(gens.back().second));
  }
  GradedMap diff(c.space, c.space, Rational(-1));
  // Pair up some generators with a partner one degree below.
  std::set<std::size_t> used;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (used.count(i)) continue;
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (i == j || used.count(j)) continue;
      if (gens[j].first != gens[i].first - 1) continue;
      if (rng() % 3 == 0) {
        const auto& bi = c.space.basis(Rational(gens[i].first));
        const auto& bj = c.space.basis(Rational(gens[j].first));
        diff.add_entry(bj[gens[j].second], bi[gens[i].second]);
        used.insert(i);
        used.insert(j);
        break;
      }
    }
  }
  // Conjugate by random graded invertible maps: replace D by P D P^{-1}
  // implemented as elementary row+column operations on the blocks.
  for (const auto& [deg, labels] : c.space.degrees()) {
    std::size_t n = labels.size();
    if (n < 2) continue;
    for (int rep = 0; rep < 4; ++rep) {
      std::size_t a = rng() % n, b = rng() % n;
      if (a == b) continue;
      // basis change e_a += e_b : adjust incoming and outgoing blocks
      gf2::BitMatrix out_block = diff.block(deg);
      for (std::size_t r = 0; r < out_block.rows(); ++r)
        if (out_block.get(r, a)) out_block.flip(r, b);
      diff.set_block(deg, out_block);
      gf2::BitMatrix in_block = diff.block(deg + Rational(1));
      for (std::size_t cidx = 0; cidx < in_block.cols(); ++cidx)
        if (in_block.get(b, cidx)) in_block.flip(a, cidx);
      diff.set_block(deg + Rational(1), in_block);
    }
  }
  c.differential = diff;
  return c;
}

GradedMap identity_map(const GradedVectorSpace& s) {
  GradedMap m(s, s, Rational(0));
  for (const auto& [deg, labels] : s.degrees())
    for (const auto& l : labels) m.add_entry(l, l);
  return m;
}

// Mapping cone of f: A -> B, labels suffixed to stay unique.
GradedComplex mapping_cone(const GradedMap& f, const GradedComplex& a,
                           const GradedComplex& b) {
  GradedComplex cone;
  cone.window = a.window;
  for (const auto& [deg, labels] : a.space.degrees())
    for (const auto& l : labels)
      cone.space.add_basis_label(deg + Rational(1), "A." + l);
  for (const auto& [deg, labels] : b.space.degrees())
    for (const auto& l : labels) cone.space.add_basis_label(deg, "B." + l);
  GradedMap diff(cone.space, cone.space, Rational(-1));
  for (const auto& [deg, labels] : a.space.degrees()) {
    gf2::BitMatrix da = a.differential.block(deg);
    const auto& t = a.space.basis(deg - Rational(1));
    for (std::size_t c = 0; c < da.cols(); ++c)
      for (std::size_t r = 0; r < da.rows(); ++r)
        if (da.get(r, c)) diff.add_entry("A." + t[r], "A." + labels[c]);
    gf2::BitMatrix fb = f.block(deg);
    const auto& tb = b.space.basis(deg);
    for (std::size_t c = 0; c < fb.cols(); ++c)
      for (std::size_t r = 0; r < fb.rows(); ++r)
        if (fb.get(r, c)) diff.add_entry("B." + tb[r], "A." + labels[c]);
  }
  for (const auto& [deg, labels] : b.space.degrees()) {
    gf2::BitMatrix db = b.differential.block(deg);
    const auto& t = b.space.basis(deg - Rational(1));
    for (std::size_t c = 0; c < db.cols(); ++c)
      for (std::size_t r = 0; r < db.rows(); ++r)
        if (db.get(r, c)) diff.add_entry("B." + t[r], "B." + labels[c]);
  }
  cone.differential = diff;
  return cone;
}

}  // namespace

TEST_CASE("verify_square_zero basics") {
  auto c = zero_complex({{0, 2}, {1, 3}});
  CHECK(verify_square_zero(c).passed);

  // Three-term complex with both maps the identity fails in the middle.
  GradedComplex bad;
  bad.window = wide();
  bad.space.add_basis_label(Rational(0), "x0");
  bad.space.add_basis_label(Rational(1), "x1");
  bad.space.add_basis_label(Rational(2), "x2");
  GradedMap diff(bad.space, bad.space, Rational(-1));
  diff.add_entry("x0", "x1");
  diff.add_entry("x1", "x2");
  bad.differential = diff;
  auto report = verify_square_zero(bad);
  CHECK_FALSE(report.passed);
  bool middle_failed = false;
  for (const auto& chk : report.checks)
    if (chk.degree == Rational(2) && !chk.ok) middle_failed = true;
  CHECK(middle_failed);
}

TEST_CASE("homology of zero differential and the equivariant sphere") {
  auto c = zero_complex({{0, 2}, {1, 3}});
  auto h = homology(c);
  CHECK(h.dim(Rational(0)) == 2);
  CHECK(h.dim(Rational(1)) == 3);

  auto s2 = equivariant_sphere();
  auto hs = homology(s2);
  CHECK(hs.dim(Rational(0)) == 1);
  CHECK(hs.dim(Rational(1)) == 0);
  CHECK(hs.dim(Rational(2)) == 1);
  // Matches the exhaustive kernel/image enumeration.
  auto dims = oracle::homology_dims(s2);
  CHECK(dims[Rational(0)] == 1);
  CHECK(dims[Rational(1)] == 0);
  CHECK(dims[Rational(2)] == 1);
}

TEST_CASE("homology aborts on square-zero failure") {
  GradedComplex bad;
  bad.window = wide();
  bad.space.add_basis_label(Rational(0), "x0");
  bad.space.add_basis_label(Rational(1), "x1");
  bad.space.add_basis_label(Rational(2), "x2");
  GradedMap diff(bad.space, bad.space, Rational(-1));
  diff.add_entry("x0", "x1");
  diff.add_entry("x1", "x2");
  bad.differential = diff;
  CHECK_THROWS_AS((void)homology(bad), std::invalid_argument);
}

TEST_CASE("verify_chain_map identity and differential as maps") {
  auto s2 = equivariant_sphere();
  CHECK(verify_chain_map(identity_map(s2.space), s2, s2).passed);

  // The differential, viewed as a degree -1 map to the same complex.
  CHECK(verify_chain_map(s2.differential, s2, s2).passed);

  // A corrupted entry of the identity fails at the corrupted degree.
  GradedMap broken = identity_map(s2.space);
  broken.add_entry("e1+", "e1+");  // removes the entry over GF(2)
  auto report = verify_chain_map(broken, s2, s2);
  CHECK_FALSE(report.passed);
}

TEST_CASE("check_exactness on short sequences") {
  auto h = zero_complex({{0, 1}});

  GradedVectorSpace zero_space;
  auto mid = zero_complex({{0, 2}});

  GradedMap in(zero_space, mid.space, Rational(0));
  GradedMap out(mid.space, zero_space, Rational(0));
  GradedMap idm = identity_map(mid.space);

  // 0 -> H -> H -> 0 with identity in the middle is exact.
  ExactnessReport ok =
      check_exactness({in, idm, out}, Window{Rational(-10), Rational(10)});
  CHECK(ok.passed);

  // 0 -> F -> 0 is inexact at the middle.
  GradedMap in2(zero_space, h.space, Rational(0));
  GradedMap out2(h.space, zero_space, Rational(0));
  ExactnessReport bad =
      check_exactness({in2, out2}, Window{Rational(-10), Rational(10)});
  CHECK_FALSE(bad.passed);

  GradedMap wrong(h.space, h.space, Rational(0));
  CHECK_THROWS_AS((void)check_exactness({in, wrong}, wide()),
                  std::invalid_argument);
}

TEST_CASE("dualize shapes and involutivity") {
  auto c = zero_complex({{0, 1}, {1, 2}});
  auto d = dualize(c, Rational(0));
  CHECK(d.space.dim(Rational(0)) == 1);
  CHECK(d.space.dim(Rational(-1)) == 2);

  auto dd = dualize(d, Rational(0));
  CHECK(dd.space.dim(Rational(0)) == 1);
  CHECK(dd.space.dim(Rational(1)) == 2);

  // Total homology dimension is preserved degree-reversed.
  auto s2 = equivariant_sphere();
  auto ds2 = dualize(s2, Rational(5));
  auto h = homology(s2);
  auto hd = homology(ds2);
  for (int deg = 0; deg <= 2; ++deg)
    CHECK(h.dim(Rational(deg)) == hd.dim(Rational(5 - deg)));
}

TEST_CASE("homology dimensions match the oracle on random complexes") {
  std::mt19937_64 rng(314159);
  for (int trial = 0; trial < 60; ++trial) {
    auto c = random_complex(rng, 4 + rng() % 9, 3);
    REQUIRE(verify_square_zero(c).passed);
    auto h = homology(c);
    auto dims = oracle::homology_dims(c);
    for (const auto& [deg, labels] : c.space.degrees()) {
      if (labels.empty()) continue;
      CHECK(h.dim(deg) == dims[deg]);
    }
  }
}

TEST_CASE("Euler characteristic equals alternating homology sum") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 40; ++trial) {
    auto c = random_complex(rng, 4 + rng() % 9, 3);
    auto h = homology(c);
    long chain_sum = 0, hom_sum = 0;
    for (const auto& [deg, labels] : c.space.degrees()) {
      long sign = (deg.num() % 2 == 0) ? 1 : -1;
      chain_sum += sign * long(labels.size());
      hom_sum += sign * long(h.dim(deg));
    }
    CHECK(chain_sum == hom_sum);
  }
}

TEST_CASE("mapping cone long exact sequence is exact") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_complex(rng, 3 + rng() % 6, 2);
    auto b = a;
    // f = id + d s + s d for a random degree +1 map s is always a chain map
    GradedMap s(a.space, a.space, Rational(1));
    for (const auto& [deg, labels] : a.space.degrees()) {
      const auto& up = a.space.basis(deg + Rational(1));
      if (up.empty() || labels.empty()) continue;
      gf2::BitMatrix blk(up.size(), labels.size());
      for (std::size_t r = 0; r < up.size(); ++r)
        for (std::size_t c = 0; c < labels.size(); ++c)
          if (rng() % 3 == 0) blk.set(r, c, true);
      s.set_block(deg, blk);
    }
    GradedMap f = identity_map(a.space)
                      .add(a.differential.compose_after(s))
                      .add(s.compose_after(a.differential));
    REQUIRE(verify_chain_map(f, a, b).passed);

    auto cone = mapping_cone(f, a, b);
    REQUIRE(verify_square_zero(cone).passed);
    auto ha = homology(a);
    auto hb = homology(b);
    auto hcone = homology(cone);

    // H(B) -> H(cone) -> H(A)[1] -> H(B)[1] realized via chain maps.
    GradedMap incl(b.space, cone.space, Rational(0));
    for (const auto& [deg, labels] : b.space.degrees())
      for (const auto& l : labels) incl.add_entry("B." + l, l);
    GradedMap proj(cone.space, a.space, Rational(-1));
    for (const auto& [deg, labels] : a.space.degrees())
      for (const auto& l : labels) proj.add_entry(l, "A." + l);

    GradedMap incl_h = induced_map(incl, hb, hcone);
    GradedMap proj_h = induced_map(proj, hcone, ha);
    GradedMap f_h = induced_map(f, ha, hb);

    auto report =
        check_exactness({incl_h, proj_h, f_h, incl_h}, a.window);
    CHECK(report.passed);
  }
}

TEST_CASE("spectral sequence: single level collapses to homology") {
  auto s2 = equivariant_sphere();
  FilteredComplex f;
  f.complex = s2;
  for (const auto& [deg, labels] : s2.space.degrees())
    for (const auto& l : labels) f.level[l] = 0;
  auto ss = spectral_sequence(f, 3);
  CHECK(ss.nonzero_differential_pages.empty());
  CHECK(ss.collapse_page == 1);
  auto h = homology(s2);
  for (int deg = 0; deg <= 2; ++deg)
    CHECK(ss.pages[1].total_dim(Rational(deg)) == h.dim(Rational(deg)));
}

TEST_CASE("spectral sequence: two levels cancel on page one") {
  GradedComplex c;
  c.window = wide();
  c.space.add_basis_label(Rational(0), "low");
  c.space.add_basis_label(Rational(1), "high");
  GradedMap diff(c.space, c.space, Rational(-1));
  diff.add_entry("low", "high");
  c.differential = diff;

  FilteredComplex f;
  f.complex = c;
  f.level["low"] = 0;
  f.level["high"] = 1;
  auto ss = spectral_sequence(f, 3);
  CHECK(ss.pages[0].total_dim(Rational(0)) == 1);
  CHECK(ss.pages[0].total_dim(Rational(1)) == 1);
  CHECK(ss.pages[1].total_dim(Rational(0)) == 1);
  CHECK(ss.pages[1].total_dim(Rational(1)) == 1);
  REQUIRE(ss.nonzero_differential_pages.size() == 1);
  CHECK(ss.nonzero_differential_pages[0] == 1);
  CHECK(ss.pages[2].total_dim(Rational(0)) == 0);
  CHECK(ss.pages[2].total_dim(Rational(1)) == 0);
  CHECK(ss.collapse_page == 2);
}

TEST_CASE("spectral sequence rejects level-raising differentials") {
  GradedComplex c;
  c.window = wide();
  c.space.add_basis_label(Rational(0), "low");
  c.space.add_basis_label(Rational(1), "high");
  GradedMap diff(c.space, c.space, Rational(-1));
  diff.add_entry("low", "high");
  c.differential = diff;
  FilteredComplex f;
  f.complex = c;
  f.level["low"] = 2;
  f.level["high"] = 1;
  CHECK_THROWS_WITH_AS((void)spectral_sequence(f, 2),
                       doctest::Contains("high"), std::invalid_argument);
}

TEST_CASE("spectral sequence abutment equals total homology") {
  std::mt19937_64 rng(11235);
  for (int trial = 0; trial < 25; ++trial) {
    auto c = random_complex(rng, 4 + rng() % 8, 2);
    FilteredComplex f;
    f.complex = c;
    // Assign levels consistent with the differential: level = degree rank
    // (differential lowers degree, hence never raises the level).
    for (const auto& [deg, labels] : c.space.degrees())
      for (const auto& l : labels) f.level[l] = int(deg.num());
    auto ss = spectral_sequence(f, 6);
    auto h = homology(c);
    const auto& last = ss.pages.back();
    for (const auto& [deg, labels] : c.space.degrees())
      CHECK(last.total_dim(deg) == h.dim(deg));
  }
}
