#include "floer/pin2.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <tuple>

namespace floer {

namespace {

// Positions of a set of spanning vectors as a reduced basis, returned as
// explicit vectors in the ambient coordinates.
std::vector<gf2::BitVector> reduced_basis(std::vector<gf2::BitVector> vecs,
                                          std::size_t dim) {
  gf2::BitMatrix m(vecs.size(), dim);
  for (std::size_t i = 0; i < vecs.size(); ++i) m.row(i) = vecs[i];
  return gf2::row_space_basis(m);
}

}  // namespace

namespace {

// Structural half of the involution checks: involutivity, kind/grading
// compatibility, and the operator intertwining. Needs no assembly, so it
// is cheap enough for corruption sweeps.
void involution_structural_checks(const FloerData& d, const Involution& inv,
                                  InvolutionReport& report);

}  // namespace

InvolutionReport validate_involution(const FloerData& d, const Involution& inv,
                                     const Window& window) {
  InvolutionReport report;
  involution_structural_checks(d, inv, report);
  if (!report.passed) return report;
  auto fail = [&](const std::string& msg) {
    report.passed = false;
    report.errors.push_back(msg);
  };

  // Chain-map property on all three flavors.
  for (Flavor f : {Flavor::Check, Flavor::Hat, Flavor::Bar}) {
    GradedComplex c = assemble_flavor(d, f, window);
    GradedMap j = assembled_involution(d, c, inv.cell_map);
    ValidationReport rep = verify_chain_map(j, c, c);
    if (!rep.passed)
      fail(std::string("involution is not a chain map on the ") +
           to_string(f) + " complex");
    GradedMap jj = j.compose_after(j);
    for (const auto& [deg, labels] : c.space.degrees()) {
      if (labels.empty()) continue;
      gf2::BitMatrix blk = jj.block(deg);
      if (!(blk == gf2::BitMatrix::identity(labels.size()))) {
        fail("involution applied twice is not the identity at degree " +
             deg.to_string());
        break;
      }
    }
  }
  return report;
}

namespace {

void involution_structural_checks(const FloerData& d, const Involution& inv,
                                  InvolutionReport& report) {
  auto fail = [&](const std::string& msg) {
    report.passed = false;
    report.errors.push_back(msg);
  };

  // Manifold map: involutive bijection preserving kind, grading, and tower
  // eigen data.
  for (const auto& m : d.manifolds) {
    auto it = inv.manifold_map.find(m.id);
    if (it == inv.manifold_map.end()) {
      fail("involution does not cover manifold " + m.id);
      continue;
    }
    const auto* im = d.find_manifold(it->second);
    if (!im) {
      fail("involution maps " + m.id + " to unknown manifold " + it->second);
      continue;
    }
    auto back = inv.manifold_map.find(im->id);
    if (back == inv.manifold_map.end() || back->second != m.id)
      fail("manifold map is not involutive at " + m.id);
    if (im->kind != m.kind) fail("involution changes kind of " + m.id);
    if (!(im->base_grading == m.base_grading))
      fail("involution changes grading of " + m.id);
  }
  if (!report.passed) return;

  // Cell map: involutive, degree-compatible, compatible with manifold map.
  for (const auto& m : d.manifolds) {
    for (const auto& [deg, labels] : m.local_complex.space.degrees())
      for (const auto& cell : labels) {
        std::string label = m.id + ":" + cell;
        auto it = inv.cell_map.find(label);
        if (it == inv.cell_map.end()) {
          fail("involution does not cover cell " + label);
          continue;
        }
        auto back = inv.cell_map.find(it->second);
        if (back == inv.cell_map.end() || back->second != label)
          fail("cell map is not involutive at " + label);
        auto colon = it->second.find(':');
        std::string target_manifold = it->second.substr(0, colon);
        if (target_manifold != inv.manifold_map.at(m.id))
          fail("cell map of " + label + " ignores the manifold map");
        const auto* tm = d.find_manifold(target_manifold);
        if (tm) {
          auto pos = tm->local_complex.space.find(it->second.substr(colon + 1));
          if (!pos || !(pos->first ==
                        m.local_complex.space.find(cell)->first))
            fail("cell map of " + label + " changes the local degree");
        }
      }
  }
  if (!report.passed) return;

  // Operator intertwining: the total block of each (class, source, target)
  // triple, conjugated by j, must equal the total block between the
  // conjugated manifolds.
  std::map<std::tuple<int, std::string, std::string>,
           std::map<std::int64_t, gf2::BitMatrix>>
      totals;
  for (const auto& op : d.operators) {
    auto key = std::make_tuple(int(op.cls), op.source, op.target);
    for (const auto& [ld, blk] : op.blocks) {
      auto& slot = totals[key][ld];
      slot = slot.rows() == 0 ? blk : slot.add(blk);
    }
  }
  // Permutation of j from the local basis of m at `deg` to the local basis
  // of its conjugate manifold.
  auto cell_perm = [&](const CriticalManifold& m, const Rational& deg) {
    const auto& labels = m.local_complex.space.basis(deg);
    const auto* tm = d.find_manifold(inv.manifold_map.at(m.id));
    const auto& tlabels = tm->local_complex.space.basis(deg);
    gf2::BitMatrix perm(tlabels.size(), labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      std::string image = inv.cell_map.at(m.id + ":" + labels[i]);
      std::string cell = image.substr(image.find(':') + 1);
      for (std::size_t r = 0; r < tlabels.size(); ++r)
        if (tlabels[r] == cell) perm.set(r, i, true);
    }
    return perm;
  };
  for (const auto& [key, blocks] : totals) {
    auto [clsi, sid, tid] = key;
    const auto* s = d.find_manifold(sid);
    const auto* t = d.find_manifold(tid);
    if (!s || !t) continue;
    OperatorClass cls = OperatorClass(clsi);
    Rational lshift = required_class_shift(cls, Rational(-1)) -
                      (t->base_grading - s->base_grading);
    if (!lshift.is_integer()) continue;  // reported by validate()
    auto jkey = std::make_tuple(clsi, inv.manifold_map.at(sid),
                                inv.manifold_map.at(tid));
    auto jt = totals.find(jkey);
    for (const auto& [ld, blk] : blocks) {
      std::int64_t td = ld + lshift.num();
      gf2::BitMatrix ps = cell_perm(*s, Rational(ld));
      gf2::BitMatrix pt = cell_perm(*t, Rational(td));
      gf2::BitMatrix conj = pt.multiply(blk).multiply(ps.transpose());
      const auto* jtm = d.find_manifold(inv.manifold_map.at(tid));
      const auto* jsm = d.find_manifold(inv.manifold_map.at(sid));
      gf2::BitMatrix actual(jtm->local_complex.space.dim(Rational(td)),
                            jsm->local_complex.space.dim(Rational(ld)));
      if (jt != totals.end()) {
        auto bit = jt->second.find(ld);
        if (bit != jt->second.end()) actual = bit->second;
      }
      if (!(conj == actual)) {
        report.passed = false;
        report.errors.push_back("operator " + sid + "->" + tid + " (" +
                                std::string(to_string(cls)) +
                                ") does not intertwine with the involution");
        break;
      }
    }
  }
}

}  // namespace

Subcomplex invariant_subcomplex(const GradedComplex& c, const GradedMap& j) {
  // Kernel of (id + j) per degree.
  Subcomplex out;
  out.complex.window = c.window;
  std::map<Rational, std::vector<gf2::BitVector>> basis;
  for (const auto& [deg, labels] : c.space.degrees()) {
    if (labels.empty()) continue;
    gf2::BitMatrix one_plus_j =
        j.block(deg).add(gf2::BitMatrix::identity(labels.size()));
    auto ker = gf2::kernel_basis(one_plus_j);
    if (ker.empty()) continue;
    for (std::size_t i = 0; i < ker.size(); ++i)
      out.complex.space.add_basis_label(
          deg, "inv[" + deg.to_fraction_string() + "]#" + std::to_string(i));
    basis[deg] = std::move(ker);
  }

  out.inclusion = GradedMap(out.complex.space, c.space, Rational(0));
  for (const auto& [deg, vecs] : basis) {
    gf2::BitMatrix blk(c.space.dim(deg), vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i)
      for (std::size_t r : vecs[i].support()) blk.set(r, i, true);
    out.inclusion.set_block(deg, blk);
  }

  // Restricted differential: express d(basis vector) in the basis below.
  GradedMap diff(out.complex.space, out.complex.space, Rational(-1));
  for (const auto& [deg, vecs] : basis) {
    Rational below = deg - Rational(1);
    auto bit = basis.find(below);
    gf2::BitMatrix blk(out.complex.space.dim(below), vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      gf2::BitVector img = c.differential.apply(deg, vecs[i]);
      if (img.is_zero()) continue;
      if (bit == basis.end())
        throw std::invalid_argument(
            "invariant_subcomplex: differential leaves the subcomplex at "
            "degree " + deg.to_string());
      gf2::BitMatrix sys(img.length(), bit->second.size());
      for (std::size_t k = 0; k < bit->second.size(); ++k)
        for (std::size_t r : bit->second[k].support()) sys.set(r, k, true);
      auto sol = gf2::solve(sys, img);
      if (!sol)
        throw std::invalid_argument(
            "invariant_subcomplex: differential leaves the subcomplex at "
            "degree " + deg.to_string());
      for (std::size_t k = 0; k < bit->second.size(); ++k)
        if (sol->get(k)) blk.set(k, i, true);
    }
    diff.set_block(deg, blk);
  }
  out.complex.differential = std::move(diff);
  return out;
}

Subcomplex image_subcomplex(const GradedComplex& c, const GradedMap& j) {
  Subcomplex inv = invariant_subcomplex(c, j);

  Subcomplex out;
  out.complex.window = c.window;
  std::map<Rational, std::vector<gf2::BitVector>> basis;
  for (const auto& [deg, labels] : c.space.degrees()) {
    if (labels.empty()) continue;
    gf2::BitMatrix one_plus_j =
        j.block(deg).add(gf2::BitMatrix::identity(labels.size()));
    // columns span the image
    std::vector<gf2::BitVector> cols;
    for (std::size_t cidx = 0; cidx < labels.size(); ++cidx) {
      gf2::BitVector v(labels.size());
      for (std::size_t r = 0; r < labels.size(); ++r)
        if (one_plus_j.get(r, cidx)) v.set(r, true);
      if (!v.is_zero()) cols.push_back(v);
    }
    auto b = reduced_basis(cols, labels.size());
    if (b.empty()) continue;
    for (std::size_t i = 0; i < b.size(); ++i)
      out.complex.space.add_basis_label(
          deg, "img[" + deg.to_fraction_string() + "]#" + std::to_string(i));
    basis[deg] = std::move(b);
  }

  // Inclusion into the invariant subcomplex (the image consists of
  // invariant chains).
  out.inclusion = GradedMap(out.complex.space, inv.complex.space, Rational(0));
  for (const auto& [deg, vecs] : basis) {
    gf2::BitMatrix inc = inv.inclusion.block(deg);
    gf2::BitMatrix sys(c.space.dim(deg), inc.cols());
    for (std::size_t k = 0; k < inc.cols(); ++k)
      for (std::size_t r = 0; r < inc.rows(); ++r)
        if (inc.get(r, k)) sys.set(r, k, true);
    gf2::BitMatrix blk(inv.complex.space.dim(deg), vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      auto sol = gf2::solve(sys, vecs[i]);
      if (!sol)
        throw std::invalid_argument(
            "image_subcomplex: image chain is not invariant at degree " +
            deg.to_string());
      for (std::size_t k = 0; k < inc.cols(); ++k)
        if (sol->get(k)) blk.set(k, i, true);
    }
    out.inclusion.set_block(deg, blk);
  }

  // Restricted differential.
  GradedMap diff(out.complex.space, out.complex.space, Rational(-1));
  for (const auto& [deg, vecs] : basis) {
    Rational below = deg - Rational(1);
    auto bit = basis.find(below);
    gf2::BitMatrix blk(out.complex.space.dim(below), vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      gf2::BitVector img = c.differential.apply(deg, vecs[i]);
      if (img.is_zero()) continue;
      if (bit == basis.end())
        throw std::invalid_argument(
            "image_subcomplex: differential leaves the subcomplex at degree " +
            deg.to_string());
      gf2::BitMatrix sys(img.length(), bit->second.size());
      for (std::size_t k = 0; k < bit->second.size(); ++k)
        for (std::size_t r : bit->second[k].support()) sys.set(r, k, true);
      auto sol = gf2::solve(sys, img);
      if (!sol)
        throw std::invalid_argument(
            "image_subcomplex: differential leaves the subcomplex at degree " +
            deg.to_string());
      for (std::size_t k = 0; k < bit->second.size(); ++k)
        if (sol->get(k)) blk.set(k, i, true);
    }
    diff.set_block(deg, blk);
  }
  out.complex.differential = std::move(diff);
  return out;
}

GysinReport gysin_sequence(const FloerData& d, const Involution& inv,
                           Flavor flavor, const Window& window) {
  GysinReport report;
  GradedComplex c = assemble_flavor(d, flavor, window);
  GradedMap j = assembled_involution(d, c, inv.cell_map);
  Subcomplex invariant = invariant_subcomplex(c, j);
  Subcomplex image = image_subcomplex(c, j);

  report.hs = homology(invariant.complex);
  report.hm = homology(c);
  Homology himg = homology(image.complex);

  // iota: HS -> HM from the inclusion.
  report.iota = induced_map(invariant.inclusion, report.hs, report.hm);

  // (1 + j): C -> (1+j)C expressed in the image basis.
  GradedMap onepj(c.space, image.complex.space, Rational(0));
  for (const auto& [deg, labels] : c.space.degrees()) {
    if (labels.empty() || image.complex.space.dim(deg) == 0) continue;
    gf2::BitMatrix opj = j.block(deg).add(gf2::BitMatrix::identity(labels.size()));
    // image basis in ambient coordinates
    gf2::BitMatrix amb = invariant.inclusion.block(deg)
                             .multiply(image.inclusion.block(deg));
    gf2::BitMatrix blk(image.complex.space.dim(deg), labels.size());
    for (std::size_t cidx = 0; cidx < labels.size(); ++cidx) {
      gf2::BitVector v(labels.size());
      for (std::size_t r = 0; r < labels.size(); ++r)
        if (opj.get(r, cidx)) v.set(r, true);
      if (v.is_zero()) continue;
      auto sol = gf2::solve(amb, v);
      if (!sol)
        throw std::invalid_argument("gysin_sequence: inconsistent image basis");
      for (std::size_t k = 0; k < sol->length(); ++k)
        if (sol->get(k)) blk.set(k, cidx, true);
    }
    onepj.set_block(deg, blk);
  }
  GradedMap pi_to_image = induced_map(onepj, report.hm, himg);

  // phi: H((1+j)C) -> HS induced by inclusion; must be an isomorphism. The
  // projection is presented through phi, the connecting map through its
  // inverse.
  GradedMap incl_img = induced_map(image.inclusion, himg, report.hs);
  // Invert phi degreewise.
  GradedMap phi_inv(report.hs.space, himg.space, Rational(0));
  for (const auto& [deg, labels] : report.hs.space.degrees()) {
    std::size_t n = labels.size();
    std::size_t m = himg.space.dim(deg);
    if (n == 0 && m == 0) continue;
    gf2::BitMatrix phi = incl_img.block(deg);
    if (n != m || gf2::rank(phi) != n) {
      report.quasi_isomorphism_ok = false;
      continue;
    }
    gf2::BitMatrix invm(n, n);
    for (std::size_t col = 0; col < n; ++col) {
      gf2::BitVector e(n);
      e.set(col, true);
      auto sol = gf2::solve(phi, e);
      if (!sol) {
        report.quasi_isomorphism_ok = false;
        break;
      }
      for (std::size_t r = 0; r < n; ++r)
        if (sol->get(r)) invm.set(r, col, true);
    }
    phi_inv.set_block(deg, invm);
  }
  report.pi = incl_img.compose_after(pi_to_image);

  // Connecting map on H((1+j)C): lift, differentiate, express in HS.
  GradedMap connecting(himg.space, report.hs.space, Rational(-1));
  for (const auto& [deg, labels] : himg.space.degrees()) {
    auto rit = himg.representatives.find(deg);
    if (rit == himg.representatives.end() || rit->second.empty()) continue;
    Rational below = deg - Rational(1);
    if (std::find(report.hs.edge_degrees.begin(), report.hs.edge_degrees.end(),
                  below) != report.hs.edge_degrees.end())
      continue;
    gf2::BitMatrix blk(report.hs.space.dim(below), rit->second.size());
    // systems
    gf2::BitMatrix amb = invariant.inclusion.block(deg)
                             .multiply(image.inclusion.block(deg));
    gf2::BitMatrix opj =
        j.block(deg).add(gf2::BitMatrix::identity(c.space.dim(deg)));
    for (std::size_t i = 0; i < rit->second.size(); ++i) {
      // ambient form of the class representative
      gf2::BitVector v(c.space.dim(deg));
      for (std::size_t k : rit->second[i].support()) {
        for (std::size_t r = 0; r < amb.rows(); ++r)
          if (amb.get(r, k)) v.flip(r);
      }
      if (v.is_zero()) continue;
      auto lift = gf2::solve(opj, v);
      if (!lift)
        throw std::invalid_argument("gysin_sequence: class is not in the image "
                                    "of (id + j) at degree " + deg.to_string());
      gf2::BitVector bnd = c.differential.apply(deg, *lift);
      // bnd is invariant; express in the invariant subcomplex, then in HS.
      gf2::BitMatrix inc = invariant.inclusion.block(below);
      auto sol = gf2::solve(inc, bnd);
      if (!sol)
        throw std::invalid_argument(
            "gysin_sequence: connecting chain is not invariant");
      // express as homology class
      const auto repit = report.hs.representatives.find(below);
      const auto bndit = report.hs.boundaries.find(below);
      std::vector<gf2::BitVector> reps =
          repit == report.hs.representatives.end() ? std::vector<gf2::BitVector>{}
                                                   : repit->second;
      std::vector<gf2::BitVector> bnds =
          bndit == report.hs.boundaries.end() ? std::vector<gf2::BitVector>{}
                                              : bndit->second;
      std::size_t dim_inv = invariant.complex.space.dim(below);
      gf2::BitMatrix sys(dim_inv, reps.size() + bnds.size());
      for (std::size_t k = 0; k < reps.size(); ++k)
        for (std::size_t r : reps[k].support()) sys.set(r, k, true);
      for (std::size_t k = 0; k < bnds.size(); ++k)
        for (std::size_t r : bnds[k].support()) sys.set(r, reps.size() + k, true);
      auto cls = gf2::solve(sys, *sol);
      if (!cls)
        throw std::invalid_argument(
            "gysin_sequence: connecting class not expressible");
      for (std::size_t k = 0; k < reps.size(); ++k)
        if (cls->get(k)) blk.set(k, i, true);
    }
    connecting.set_block(deg, blk);
  }
  // e = connecting . phi^{-1} : HS_{k+1} -> HS_k
  report.e = connecting.compose_after(phi_inv);

  report.exactness = check_exactness(
      {report.e, report.iota, report.pi, report.e, report.iota}, window);
  return report;
}

namespace {

// Restrict a chain self-map to a subcomplex via its inclusion.
GradedMap restrict_to_subcomplex(const GradedMap& m, const Subcomplex& sub) {
  GradedMap out(sub.complex.space, sub.complex.space, m.degree_shift());
  for (const auto& [deg, labels] : sub.complex.space.degrees()) {
    if (labels.empty()) continue;
    Rational tdeg = deg + m.degree_shift();
    gf2::BitMatrix inc_src = sub.inclusion.block(deg);
    gf2::BitMatrix inc_tgt = sub.inclusion.block(tdeg);
    gf2::BitMatrix image = m.block(deg).multiply(inc_src);
    gf2::BitMatrix blk(sub.complex.space.dim(tdeg), labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      gf2::BitVector v(image.rows());
      for (std::size_t r = 0; r < image.rows(); ++r)
        if (image.get(r, i)) v.set(r, true);
      if (v.is_zero()) continue;
      auto sol = gf2::solve(inc_tgt, v);
      if (!sol)
        throw std::invalid_argument(
            "operator does not preserve the invariant subcomplex at degree " +
            deg.to_string());
      for (std::size_t k = 0; k < sol->length(); ++k)
        if (sol->get(k)) blk.set(k, i, true);
    }
    out.set_block(deg, blk);
  }
  return out;
}

}  // namespace

InducedModule induced_module(const FloerData& d, const Involution& inv,
                             const CobordismOperators& q_ops,
                             const CobordismOperators& v_ops, Flavor flavor,
                             const Window& window) {
  GradedComplex c = assemble_flavor(d, flavor, window);
  GradedMap j = assembled_involution(d, c, inv.cell_map);
  Subcomplex invariant = invariant_subcomplex(c, j);

  CobordismMaps qm = assemble_cobordism(d, d, q_ops, window);
  CobordismMaps vm = assemble_cobordism(d, d, v_ops, window);
  const GradedMap& q_chain = flavor == Flavor::Check ? qm.check_map
                             : flavor == Flavor::Hat ? qm.hat_map
                                                     : qm.bar_map;
  const GradedMap& v_chain = flavor == Flavor::Check ? vm.check_map
                             : flavor == Flavor::Hat ? vm.hat_map
                                                     : vm.bar_map;

  GradedMap q_sub = restrict_to_subcomplex(q_chain, invariant);
  GradedMap v_sub = restrict_to_subcomplex(v_chain, invariant);

  ValidationReport qrep = verify_chain_map(q_sub, invariant.complex,
                                           invariant.complex);
  ValidationReport vrep = verify_chain_map(v_sub, invariant.complex,
                                           invariant.complex);
  if (!qrep.passed)
    throw std::invalid_argument("q operator is not a chain map on the "
                                "invariant subcomplex");
  if (!vrep.passed)
    throw std::invalid_argument("v operator is not a chain map on the "
                                "invariant subcomplex");

  InducedModule out;
  out.invariant = invariant;
  out.homology = homology(invariant.complex);
  out.module.space = out.homology.space;
  out.module.q_action = induced_map(q_sub, out.homology, out.homology);
  out.module.v_action = induced_map(v_sub, out.homology, out.homology);

  // Relations q^3 = 0 and qv = vq on the interior.
  GradedMap q2 = out.module.q_action.compose_after(out.module.q_action);
  GradedMap q3 = out.module.q_action.compose_after(q2);
  for (const auto& [deg, blk] : q3.stored_blocks())
    if (!blk.is_zero() && window.interior(deg, 4))
      throw std::invalid_argument("module relation q^3 = 0 fails at degree " +
                                  deg.to_string());
  GradedMap qv = out.module.q_action.compose_after(out.module.v_action);
  GradedMap vq = out.module.v_action.compose_after(out.module.q_action);
  GradedMap diff = qv.add(vq);
  for (const auto& [deg, blk] : diff.stored_blocks())
    if (!blk.is_zero() && window.interior(deg, 6))
      throw std::invalid_argument("module relation qv = vq fails at degree " +
                                  deg.to_string());
  return out;
}

StandardModuleParams classify_image_i(const FloerData& d, const Involution& inv,
                                      const CobordismOperators& q_ops,
                                      const CobordismOperators& v_ops,
                                      const Window& window) {
  if (d.b1 != 0)
    throw std::invalid_argument(
        "classify_image_i: model is not a rational homology sphere (b1 != 0)");

  IjpMaps ijp = assemble_ijp(d, window);
  GradedMap j_bar = assembled_involution(d, ijp.bar, inv.cell_map);
  GradedMap j_check = assembled_involution(d, ijp.check, inv.cell_map);
  Subcomplex bar_inv = invariant_subcomplex(ijp.bar, j_bar);
  Subcomplex check_inv = invariant_subcomplex(ijp.check, j_check);

  // i restricted to the invariant subcomplexes.
  GradedMap i_inv(bar_inv.complex.space, check_inv.complex.space, Rational(0));
  for (const auto& [deg, labels] : bar_inv.complex.space.degrees()) {
    if (labels.empty()) continue;
    gf2::BitMatrix image = ijp.i.block(deg).multiply(bar_inv.inclusion.block(deg));
    gf2::BitMatrix inc_tgt = check_inv.inclusion.block(deg);
    gf2::BitMatrix blk(check_inv.complex.space.dim(deg), labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      gf2::BitVector v(image.rows());
      for (std::size_t r = 0; r < image.rows(); ++r)
        if (image.get(r, i)) v.set(r, true);
      if (v.is_zero()) continue;
      auto sol = gf2::solve(inc_tgt, v);
      if (!sol)
        throw std::invalid_argument("classify_image_i: i does not preserve "
                                    "invariant chains");
      for (std::size_t k = 0; k < sol->length(); ++k)
        if (sol->get(k)) blk.set(k, i, true);
    }
    i_inv.set_block(deg, blk);
  }

  Homology hs_bar = homology(bar_inv.complex);
  Homology hs_to = homology(check_inv.complex);

  // Bar homology must match the standard tower pattern: dimension one in
  // three of four consecutive degrees, periodically.
  if (d.grading_denominator != 1)
    throw std::invalid_argument(
        "classify_image_i: only integral gradings are supported by the "
        "builtin models");
  std::int64_t lo = window.lo.num() / window.lo.den();
  std::int64_t hi = window.hi.num() / window.hi.den();
  const std::int64_t margin = 6;
  for (std::int64_t k = lo + margin; k + margin <= hi; ++k) {
    std::size_t dim = hs_bar.dim(Rational(k));
    if (dim > 1)
      throw std::invalid_argument(
          "classify_image_i: bar homology is not of standard-module shape");
  }
  // locate the shift: degrees where bar homology vanishes should be a
  // single residue class mod 4.
  std::optional<std::int64_t> gap_residue;
  for (std::int64_t k = lo + margin; k + margin <= hi; ++k) {
    if (hs_bar.dim(Rational(k)) == 0) {
      std::int64_t r = ((k % 4) + 4) % 4;
      if (gap_residue && *gap_residue != r)
        throw std::invalid_argument(
            "classify_image_i: bar homology does not have the standard "
            "four-periodic pattern");
      gap_residue = r;
    }
  }
  if (!gap_residue)
    throw InconclusiveWindow("window shows no bar-pattern gap");

  GradedMap i_star = induced_map(i_inv, hs_bar, hs_to);
  InducedModule mod = induced_module(d, inv, q_ops, v_ops, Flavor::Check, window);

  // Subspace spans per degree.
  auto image_span = [&](const Rational& deg) {
    gf2::BitMatrix blk = i_star.block(deg);
    std::vector<gf2::BitVector> vecs;
    for (std::size_t c = 0; c < blk.cols(); ++c) {
      gf2::BitVector v(blk.rows());
      for (std::size_t r = 0; r < blk.rows(); ++r)
        if (blk.get(r, c)) v.set(r, true);
      if (!v.is_zero()) vecs.push_back(v);
    }
    return vecs;
  };
  auto apply_q = [&](const std::vector<gf2::BitVector>& vecs,
                     const Rational& deg) {
    std::vector<gf2::BitVector> out;
    for (const auto& v : vecs) {
      gf2::BitVector img = mod.module.q_action.apply(deg, v);
      if (!img.is_zero()) out.push_back(img);
    }
    return out;
  };

  // Part indicator per degree: dims of B, QB, Q2B landing at that degree.
  std::map<std::int64_t, std::array<std::size_t, 3>> part_dims;
  for (std::int64_t k = lo + margin; k + margin <= hi; ++k) {
    Rational deg(k);
    auto b = image_span(deg);
    auto qb_from_above = apply_q(image_span(Rational(k + 1)), Rational(k + 1));
    auto q2b = apply_q(apply_q(image_span(Rational(k + 2)), Rational(k + 2)),
                       Rational(k + 1));
    std::size_t nb = gf2::span_rank(b, hs_to.space.dim(deg));
    std::size_t nq = gf2::span_rank(qb_from_above, hs_to.space.dim(deg));
    std::size_t nq2 = gf2::span_rank(q2b, hs_to.space.dim(deg));
    part_dims[k] = {nb, nq, nq2};
  }

  // Minimal degrees of the three parts: Q^2 part, Q part, V part.
  std::optional<std::int64_t> m_q2, m_q, m_v;
  for (const auto& [k, dims] : part_dims) {
    auto [nb, nq, nq2] = dims;
    if (nq2 > 0 && !m_q2) m_q2 = k;
    if (nq > nq2 && !m_q) m_q = k;
    if (nb > nq && !m_v) m_v = k;
  }
  if (!m_q2 || !m_q || !m_v)
    throw InconclusiveWindow(
        "window does not exhibit all three tower minima of im(i_*)");

  // The minima are trustworthy only when a full V-period below each is
  // visibly empty inside the window.
  const std::vector<std::pair<std::int64_t, int>> minima = {
      {*m_q2, 2}, {*m_q, 1}, {*m_v, 0}};
  for (auto [min_deg, part] : minima) {
    if (min_deg - 4 < lo + margin)
      throw InconclusiveWindow("tower minimum at degree " +
                               std::to_string(min_deg) +
                               " is too close to the window edge");
    for (std::int64_t k = lo + margin; k < min_deg; ++k) {
      auto [nb, nq, nq2] = part_dims[k];
      std::size_t val = part == 2 ? nq2 : part == 1 ? (nq - nq2) : (nb - nq);
      if (val != 0)
        throw std::invalid_argument(
            "classify_image_i: image of i_* is not of standard-module shape");
    }
    // pattern above the minimum: present every 4 degrees
    for (std::int64_t k = min_deg; k + margin <= hi; k += 4) {
      auto [nb, nq, nq2] = part_dims[k];
      std::size_t val = part == 2 ? nq2 : part == 1 ? (nq - nq2) : (nb - nq);
      if (val == 0)
        throw std::invalid_argument(
            "classify_image_i: tower pattern interrupted above the minimum");
    }
  }

  StandardModuleParams out;
  out.alpha = Rational(*m_q2, 2);
  out.beta = Rational(*m_q - 1, 2);
  out.gamma = Rational(*m_v - 2, 2);
  if (!(out.alpha >= out.beta && out.beta >= out.gamma))
    throw std::invalid_argument(
        "classify_image_i: extracted invariants violate alpha >= beta >= "
        "gamma");
  return out;
}

InvariantPropertyReport check_invariant_properties(
    const std::vector<InvariantPropertyCase>& cases) {
  InvariantPropertyReport report;
  auto fail = [&](const std::string& msg) {
    report.passed = false;
    report.failures.push_back(msg);
  };
  for (const auto& c : cases) {
    const auto& t = c.triple;
    if (!(t.alpha >= t.beta && t.beta >= t.gamma))
      fail(c.name + ": ordering alpha >= beta >= gamma fails");
    else
      report.checks.push_back(c.name + ": ordering holds");

    if (c.dual_triple) {
      const auto& dual = *c.dual_triple;
      if (!(dual.alpha == -t.gamma && dual.beta == -t.beta &&
            dual.gamma == -t.alpha))
        fail(c.name + ": orientation-reversal relation fails");
      else
        report.checks.push_back(c.name + ": orientation reversal holds");
    }
    if (c.rokhlin_times8) {
      // mu = sigma/8 mod 2; invariants must be = -mu mod 2.
      std::int64_t mu = ((*c.rokhlin_times8 / 8) % 2 + 2) % 2;
      for (const Rational& value : {t.alpha, t.beta, t.gamma}) {
        if (!value.is_integer()) {
          fail(c.name + ": invariant is not an integer but Rokhlin data is "
                        "present");
          break;
        }
        std::int64_t reduced = ((value.num() % 2) + 2) % 2;
        std::int64_t expect = (2 - mu) % 2;  // -mu mod 2
        if (reduced != expect) {
          fail(c.name + ": mod-2 Rokhlin congruence fails");
          break;
        }
      }
      if (report.failures.empty() ||
          report.failures.back().find(c.name) == std::string::npos)
        report.checks.push_back(c.name + ": Rokhlin congruence holds");
    }
  }
  return report;
}

bool data_rejected(const FloerData& d, const std::optional<Involution>& inv,
                   const Window& window) {
  if (inv) {
    InvolutionReport quick;
    involution_structural_checks(d, *inv, quick);
    if (!quick.passed) return true;
  }
  FloerValidation v = validate(d, window);
  if (!v.passed) return true;
  if (inv) {
    InvolutionReport ir = validate_involution(d, *inv, window);
    if (!ir.passed) return true;
  }
  return false;
}

}  // namespace floer
