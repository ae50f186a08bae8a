#include "floer/graded.hpp"

#include <algorithm>
#include <stdexcept>

namespace floer {

const std::vector<std::string> GradedVectorSpace::empty_{};

void GradedVectorSpace::add_basis_label(const Rational& degree,
                                        const std::string& label) {
  if (index_.count(label))
    throw std::invalid_argument("duplicate basis label: " + label);
  auto& vec = degrees_[degree];
  index_[label] = {degree, vec.size()};
  vec.push_back(label);
}

std::size_t GradedVectorSpace::dim(const Rational& degree) const {
  auto it = degrees_.find(degree);
  return it == degrees_.end() ? 0 : it->second.size();
}

std::size_t GradedVectorSpace::total_dim() const {
  std::size_t n = 0;
  for (const auto& [d, v] : degrees_) n += v.size();
  return n;
}

const std::vector<std::string>& GradedVectorSpace::basis(
    const Rational& degree) const {
  auto it = degrees_.find(degree);
  return it == degrees_.end() ? empty_ : it->second;
}

std::vector<Rational> GradedVectorSpace::degree_list() const {
  std::vector<Rational> out;
  for (const auto& [d, v] : degrees_)
    if (!v.empty()) out.push_back(d);
  return out;
}

std::optional<std::pair<Rational, std::size_t>> GradedVectorSpace::find(
    const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

gf2::BitMatrix GradedMap::block(const Rational& source_degree) const {
  auto it = blocks_.find(source_degree);
  if (it != blocks_.end()) return it->second;
  return gf2::BitMatrix(target_.dim(source_degree + shift_),
                        source_.dim(source_degree));
}

void GradedMap::set_block(const Rational& source_degree, gf2::BitMatrix m) {
  if (m.rows() != target_.dim(source_degree + shift_) ||
      m.cols() != source_.dim(source_degree))
    throw std::invalid_argument("GradedMap::set_block: shape mismatch");
  blocks_[source_degree] = std::move(m);
}

void GradedMap::set_entry(const std::string& target_label,
                          const std::string& source_label, bool value) {
  auto s = source_.find(source_label);
  auto t = target_.find(target_label);
  if (!s) throw std::invalid_argument("unknown source label " + source_label);
  if (!t) throw std::invalid_argument("unknown target label " + target_label);
  if (t->first != s->first + shift_)
    throw std::invalid_argument("entry (" + target_label + "," + source_label +
                                ") violates degree shift");
  auto it = blocks_.find(s->first);
  if (it == blocks_.end()) {
    it = blocks_.emplace(s->first, block(s->first)).first;
  }
  it->second.set(t->second, s->second, value);
}

void GradedMap::add_entry(const std::string& target_label,
                          const std::string& source_label) {
  auto s = source_.find(source_label);
  auto t = target_.find(target_label);
  if (!s) throw std::invalid_argument("unknown source label " + source_label);
  if (!t) throw std::invalid_argument("unknown target label " + target_label);
  if (t->first != s->first + shift_)
    throw std::invalid_argument("entry (" + target_label + "," + source_label +
                                ") violates degree shift");
  auto it = blocks_.find(s->first);
  if (it == blocks_.end()) it = blocks_.emplace(s->first, block(s->first)).first;
  it->second.flip(t->second, s->second);
}

gf2::BitVector GradedMap::apply(const Rational& source_degree,
                                const gf2::BitVector& v) const {
  return block(source_degree).apply(v);
}

GradedMap GradedMap::compose_after(const GradedMap& f) const {
  if (!(f.target_ == source_))
    throw std::invalid_argument("GradedMap::compose_after: spaces mismatch");
  GradedMap out(f.source_, target_, f.shift_ + shift_);
  for (const auto& [d, fb] : f.blocks_) {
    if (fb.is_zero()) continue;
    gf2::BitMatrix gb = block(d + f.shift_);
    gf2::BitMatrix prod = gb.multiply(fb);
    if (!prod.is_zero()) out.blocks_[d] = std::move(prod);
  }
  return out;
}

GradedMap GradedMap::add(const GradedMap& o) const {
  if (!(source_ == o.source_) || !(target_ == o.target_) || shift_ != o.shift_)
    throw std::invalid_argument("GradedMap::add: signature mismatch");
  GradedMap out = *this;
  for (const auto& [d, b] : o.blocks_) {
    auto it = out.blocks_.find(d);
    if (it == out.blocks_.end())
      out.blocks_[d] = b;
    else
      it->second = it->second.add(b);
  }
  return out;
}

bool GradedMap::is_zero() const {
  for (const auto& [d, b] : blocks_)
    if (!b.is_zero()) return false;
  return true;
}

void ValidationReport::record(const Rational& degree, bool ok, bool edge) {
  checks.push_back({degree, ok, edge});
  if (!ok && !edge) passed = false;
}

ValidationReport verify_square_zero(const GradedComplex& c) {
  ValidationReport report;
  const auto& d = c.differential;
  for (const auto& [deg, labels] : c.space.degrees()) {
    if (labels.empty()) continue;
    gf2::BitMatrix first = d.block(deg);
    gf2::BitMatrix second = d.block(deg - Rational(1));
    bool ok = second.multiply(first).is_zero();
    bool edge = !(c.window.contains(deg) && c.window.contains(deg - Rational(1)) &&
                  c.window.contains(deg - Rational(2)));
    report.record(deg, ok, edge);
    if (!ok && !edge)
      report.messages.push_back("differential square nonzero at degree " +
                                deg.to_string());
  }
  return report;
}

ValidationReport verify_chain_map(const GradedMap& f, const GradedComplex& src,
                                  const GradedComplex& tgt) {
  if (!(f.source() == src.space) || !(f.target() == tgt.space))
    throw std::invalid_argument("verify_chain_map: spaces mismatch");
  ValidationReport report;
  for (const auto& [deg, labels] : src.space.degrees()) {
    if (labels.empty()) continue;
    // tgt.diff . f  vs  f . src.diff, both from degree deg.
    gf2::BitMatrix a =
        tgt.differential.block(deg + f.degree_shift()).multiply(f.block(deg));
    gf2::BitMatrix b =
        f.block(deg - Rational(1)).multiply(src.differential.block(deg));
    bool ok = a.add(b).is_zero();
    bool edge = !(src.window.interior(deg, 1) &&
                  tgt.window.interior(deg + f.degree_shift(), 1));
    report.record(deg, ok, edge);
    if (!ok && !edge)
      report.messages.push_back("chain-map identity fails at degree " +
                                deg.to_string());
  }
  return report;
}

Homology homology(const GradedComplex& c) {
  auto square = verify_square_zero(c);
  if (!square.passed) {
    std::string bad;
    for (const auto& chk : square.checks)
      if (!chk.ok && !chk.edge) {
        bad = chk.degree.to_string();
        break;
      }
    throw std::invalid_argument(
        "homology: differential does not square to zero at degree " + bad);
  }

  Homology h;
  h.chain = &c;
  for (const auto& [deg, labels] : c.space.degrees()) {
    if (labels.empty()) continue;
    if (!c.window.interior(deg, 1)) {
      h.edge_degrees.push_back(deg);
      continue;
    }
    gf2::BitMatrix out_block = c.differential.block(deg);
    gf2::BitMatrix in_block = c.differential.block(deg + Rational(1));

    std::vector<gf2::BitVector> cycles = gf2::kernel_basis(out_block);
    std::vector<gf2::BitVector> bounds;
    for (std::size_t col = 0; col < in_block.cols(); ++col) {
      gf2::BitVector v(labels.size());
      for (std::size_t r = 0; r < in_block.rows(); ++r)
        if (in_block.get(r, col)) v.set(r, true);
      bounds.push_back(v);
    }
    std::vector<gf2::BitVector> bound_basis;
    {
      gf2::BitMatrix bm(bounds.size(), labels.size());
      for (std::size_t i = 0; i < bounds.size(); ++i) bm.row(i) = bounds[i];
      bound_basis = gf2::row_space_basis(bm);
    }

    // Extend the boundary basis to the cycle space; the added vectors
    // represent homology classes.
    std::vector<gf2::BitVector> reps;
    std::vector<gf2::BitVector> accum = bound_basis;
    std::size_t base_rank = gf2::span_rank(accum, labels.size());
    for (const auto& z : cycles) {
      accum.push_back(z);
      std::size_t r = gf2::span_rank(accum, labels.size());
      if (r > base_rank) {
        reps.push_back(z);
        base_rank = r;
      } else {
        accum.pop_back();
      }
    }

    h.boundaries[deg] = bound_basis;
    if (!reps.empty()) {
      for (std::size_t i = 0; i < reps.size(); ++i)
        h.space.add_basis_label(
            deg, "h[" + deg.to_fraction_string() + "]#" + std::to_string(i));
      h.representatives[deg] = reps;
    } else {
      h.representatives[deg] = {};
    }
  }
  return h;
}

GradedMap induced_map(const GradedMap& f, const Homology& hc,
                      const Homology& hd) {
  GradedMap out(hc.space, hd.space, f.degree_shift());
  for (const auto& [deg, labels] : hc.space.degrees()) {
    auto rit = hc.representatives.find(deg);
    if (rit == hc.representatives.end() || rit->second.empty()) continue;
    Rational tdeg = deg + f.degree_shift();
    // Images landing at excluded window-edge degrees carry no reliable
    // homology data; those blocks stay empty.
    if (std::find(hd.edge_degrees.begin(), hd.edge_degrees.end(), tdeg) !=
        hd.edge_degrees.end())
      continue;
    std::size_t tdim = hd.space.dim(tdeg);
    const auto repd_it = hd.representatives.find(tdeg);
    const auto bd_it = hd.boundaries.find(tdeg);
    std::vector<gf2::BitVector> trep =
        repd_it == hd.representatives.end() ? std::vector<gf2::BitVector>{}
                                            : repd_it->second;
    std::vector<gf2::BitVector> tbnd =
        bd_it == hd.boundaries.end() ? std::vector<gf2::BitVector>{}
                                     : bd_it->second;
    std::size_t chain_dim = hd.chain->space.dim(tdeg);
    // Solve [reps | boundaries] x = f(rep) for each class.
    gf2::BitMatrix system(chain_dim, trep.size() + tbnd.size());
    for (std::size_t j = 0; j < trep.size(); ++j)
      for (std::size_t r : trep[j].support()) system.set(r, j, true);
    for (std::size_t j = 0; j < tbnd.size(); ++j)
      for (std::size_t r : tbnd[j].support())
        system.set(r, trep.size() + j, true);

    gf2::BitMatrix blockm(tdim, rit->second.size());
    for (std::size_t col = 0; col < rit->second.size(); ++col) {
      gf2::BitVector image = f.apply(deg, rit->second[col]);
      if (image.length() == 0 || image.is_zero()) continue;
      if (chain_dim == 0) continue;
      auto sol = gf2::solve(system, image);
      if (!sol)
        throw std::invalid_argument(
            "induced_map: image is not a cycle modulo boundaries at degree " +
            tdeg.to_string());
      for (std::size_t j = 0; j < trep.size(); ++j)
        if (sol->get(j)) blockm.set(j, col, true);
    }
    if (!blockm.is_zero()) out.set_block(deg, blockm);
  }
  return out;
}

ExactnessReport check_exactness(const std::vector<GradedMap>& maps,
                                const Window& window) {
  ExactnessReport report;
  for (std::size_t i = 0; i + 1 < maps.size(); ++i)
    if (!(maps[i].target() == maps[i + 1].source()))
      throw std::invalid_argument(
          "check_exactness: maps do not compose at junction " +
          std::to_string(i + 1));

  for (std::size_t i = 0; i + 1 < maps.size(); ++i) {
    const GradedMap& in = maps[i];
    const GradedMap& outm = maps[i + 1];
    std::set<Rational> degs;
    for (const auto& [d, labels] : in.target().degrees())
      if (!labels.empty()) degs.insert(d);
    for (const auto& d : degs) {
      std::size_t dim_mid = in.target().dim(d);
      // image of `in` landing in degree d
      Rational sdeg = d - in.degree_shift();
      gf2::BitMatrix in_block = in.block(sdeg);
      std::vector<gf2::BitVector> image;
      for (std::size_t col = 0; col < in_block.cols(); ++col) {
        gf2::BitVector v(dim_mid);
        for (std::size_t r = 0; r < in_block.rows(); ++r)
          if (in_block.get(r, col)) v.set(r, true);
        image.push_back(v);
      }
      std::vector<gf2::BitVector> kernel = gf2::kernel_basis(outm.block(d));

      bool contained = gf2::span_contained(image, kernel, dim_mid);
      bool ok = contained && gf2::span_rank(image, dim_mid) ==
                                 gf2::span_rank(kernel, dim_mid);
      bool edge = !(window.interior(d, 2) && window.interior(sdeg, 2) &&
                    window.interior(d + outm.degree_shift(), 2));
      report.junctions.push_back({i + 1, d, ok, edge});
      if (!ok && !edge) {
        report.passed = false;
        report.messages.push_back("exactness fails at junction " +
                                  std::to_string(i + 1) + ", degree " +
                                  d.to_string());
      }
    }
  }
  return report;
}

GradedComplex dualize(const GradedComplex& c, const Rational& shift_constant) {
  GradedComplex out;
  // Basis of the dual at degree shift - d mirrors the basis at degree d.
  for (auto it = c.space.degrees().rbegin(); it != c.space.degrees().rend();
       ++it)
    for (const auto& label : it->second)
      out.space.add_basis_label(shift_constant - it->first, label + "'");
  out.window = {shift_constant - c.window.hi, shift_constant - c.window.lo};
  GradedMap diff(out.space, out.space, Rational(-1));
  // Dual differential at dual degree e is the transpose of the original
  // block at source degree (shift - e) + 1.
  for (const auto& [e, labels] : out.space.degrees()) {
    if (labels.empty()) continue;
    Rational orig_source = shift_constant - e + Rational(1);
    gf2::BitMatrix orig = c.differential.block(orig_source);
    if (orig.is_zero()) continue;
    diff.set_block(e, orig.transpose());
  }
  out.differential = std::move(diff);
  return out;
}

std::size_t SpectralPage::dim(int p, const Rational& n) const {
  for (const auto& e : entries)
    if (e.filtration == p && e.degree == n) return e.dim;
  return 0;
}

std::size_t SpectralPage::total_dim(const Rational& n) const {
  std::size_t total = 0;
  for (const auto& e : entries)
    if (e.degree == n) total += e.dim;
  return total;
}

namespace {

// Span of vectors as rank, after appending `extra`.
std::size_t rank_with(const std::vector<gf2::BitVector>& base,
                      const std::vector<gf2::BitVector>& extra,
                      std::size_t cols) {
  std::vector<gf2::BitVector> all = base;
  all.insert(all.end(), extra.begin(), extra.end());
  return gf2::span_rank(all, cols);
}

}  // namespace

SpectralSequenceResult spectral_sequence(const FilteredComplex& f,
                                         std::size_t max_page) {
  const GradedComplex& c = f.complex;

  // Validate levels exist and the differential never raises them.
  int pmin = 0, pmax = 0;
  bool first = true;
  for (const auto& [deg, labels] : c.space.degrees())
    for (const auto& label : labels) {
      auto it = f.level.find(label);
      if (it == f.level.end())
        throw std::invalid_argument("spectral_sequence: no filtration level for " +
                                    label);
      if (first || it->second < pmin) pmin = it->second;
      if (first || it->second > pmax) pmax = it->second;
      first = false;
    }
  for (const auto& [deg, labels] : c.space.degrees()) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      gf2::BitVector e(labels.size());
      e.set(i, true);
      gf2::BitVector img = c.differential.apply(deg, e);
      const auto& tlabels = c.space.basis(deg - Rational(1));
      for (std::size_t r : img.support())
        if (f.level.at(tlabels[r]) > f.level.at(labels[i]))
          throw std::invalid_argument(
              "spectral_sequence: differential raises filtration level of " +
              labels[i]);
    }
  }

  // level_of per (degree, index)
  auto levels_at = [&](const Rational& deg) {
    std::vector<int> out;
    for (const auto& label : c.space.basis(deg)) out.push_back(f.level.at(label));
    return out;
  };
  // Z^r(p, n): kernel of (rows with level > p - r) of D_n restricted to
  // columns with level <= p, as a span inside C_n.
  auto z_span = [&](int r, int p, const Rational& n) {
    const auto& labels = c.space.basis(n);
    std::vector<int> lv = levels_at(n);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (lv[i] <= p) cols.push_back(i);
    gf2::BitMatrix d = c.differential.block(n);
    std::vector<int> tl = levels_at(n - Rational(1));
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < tl.size(); ++i)
      if (tl[i] > p - r) rows.push_back(i);
    gf2::BitMatrix restricted(rows.size(), cols.size());
    for (std::size_t ri = 0; ri < rows.size(); ++ri)
      for (std::size_t ci = 0; ci < cols.size(); ++ci)
        if (d.get(rows[ri], cols[ci])) restricted.set(ri, ci, true);
    std::vector<gf2::BitVector> ker = gf2::kernel_basis(restricted);
    std::vector<gf2::BitVector> out;
    for (const auto& k : ker) {
      gf2::BitVector v(labels.size());
      for (std::size_t ci = 0; ci < cols.size(); ++ci)
        if (k.get(ci)) v.set(cols[ci], true);
      out.push_back(v);
    }
    return out;
  };
  // F_{p} C_n as a coordinate span.
  auto f_span = [&](int p, const Rational& n) {
    const auto& labels = c.space.basis(n);
    std::vector<int> lv = levels_at(n);
    std::vector<gf2::BitVector> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (lv[i] <= p) {
        gf2::BitVector v(labels.size());
        v.set(i, true);
        out.push_back(v);
      }
    return out;
  };
  auto d_image = [&](const std::vector<gf2::BitVector>& vecs,
                     const Rational& n) {
    std::vector<gf2::BitVector> out;
    for (const auto& v : vecs) {
      gf2::BitVector img = c.differential.apply(n, v);
      if (!img.is_zero()) out.push_back(img);
    }
    return out;
  };

  SpectralSequenceResult result;
  std::vector<Rational> all_degrees = c.space.degree_list();

  for (std::size_t r = 0; r <= max_page; ++r) {
    SpectralPage page;
    page.index = r;
    for (const auto& n : all_degrees) {
      std::size_t cn = c.space.dim(n);
      for (int p = pmin; p <= pmax; ++p) {
        // numerator: Z^r(p,n) + F_{p-1}
        auto z = z_span(int(r), p, n);
        auto fp1 = f_span(p - 1, n);
        std::size_t num = rank_with(fp1, z, cn);
        // denominator: d(Z^{r-1}(p+r-1, n+1)) + F_{p-1}
        std::vector<gf2::BitVector> dz;
        if (r >= 1) {
          auto zprev = z_span(int(r) - 1, p + int(r) - 1, n + Rational(1));
          dz = d_image(zprev, n + Rational(1));
        }
        std::size_t den = rank_with(fp1, dz, cn);
        std::size_t dim = num - den;
        if (dim > 0) page.entries.push_back({p, n, dim});

        if (r >= 1 && dim > 0) {
          // induced differential d_r out of (p, n): rank of
          // (d Z^r(p,n) + denominator at (p-r, n-1)) over the denominator.
          auto dzr = d_image(z, n);
          Rational n1 = n - Rational(1);
          std::size_t cn1 = c.space.dim(n1);
          if (cn1 > 0 && !dzr.empty()) {
            auto fp_target = f_span(p - int(r) - 1, n1);
            std::vector<gf2::BitVector> den_target = fp_target;
            auto zprev_t = z_span(int(r) - 1, p - 1, n);
            auto dz_t = d_image(zprev_t, n);
            den_target.insert(den_target.end(), dz_t.begin(), dz_t.end());
            std::size_t dt = gf2::span_rank(den_target, cn1);
            std::size_t with = rank_with(den_target, dzr, cn1);
            if (with > dt) page.differential_nonzero = true;
          }
        }
      }
    }
    if (page.differential_nonzero && r >= 1)
      result.nonzero_differential_pages.push_back(r);
    result.pages.push_back(std::move(page));
  }

  std::size_t collapse = 1;
  for (auto r : result.nonzero_differential_pages)
    collapse = std::max(collapse, r + 1);
  result.collapse_page = collapse;
  return result;
}

}  // namespace floer
