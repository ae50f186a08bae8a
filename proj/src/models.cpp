#include "floer/models.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace floer {

namespace {

Window local_window(std::int64_t top) {
  return {Rational(-3), Rational(top + 3)};
}

GradedComplex sphere_local_complex() {
  GradedComplex c;
  c.window = local_window(2);
  for (int dd = 0; dd <= 2; ++dd) {
    c.space.add_basis_label(Rational(dd), "e" + std::to_string(dd) + "+");
    c.space.add_basis_label(Rational(dd), "e" + std::to_string(dd) + "-");
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

GradedComplex point_local_complex() {
  GradedComplex c;
  c.window = local_window(0);
  c.space.add_basis_label(Rational(0), "pt");
  c.differential = GradedMap(c.space, c.space, Rational(-1));
  return c;
}

// 2x2 blocks over the +/- cell basis.
gf2::BitMatrix mat2(int a, int b, int c, int d) {
  gf2::BitMatrix m(2, 2);
  if (a) m.set(0, 0, true);
  if (b) m.set(0, 1, true);
  if (c) m.set(1, 0, true);
  if (d) m.set(1, 1, true);
  return m;
}

struct ModelBuilder {
  ModelBundle bundle;
  Window window;
  std::int64_t slack = 10;

  FloerData& data() { return bundle.data; }

  bool in_range(const Rational& base) {
    return window.lo - Rational(slack) <= base + Rational(2) &&
           base <= window.hi + Rational(slack);
  }

  void add_sphere(const std::string& id, ManifoldKind kind,
                  const Rational& base, const std::string& tower,
                  std::int64_t eigen_index, int sign) {
    CriticalManifold m;
    m.id = id;
    m.kind = kind;
    m.base_grading = base;
    m.local_complex = sphere_local_complex();
    m.tower = TowerInfo{tower, eigen_index, sign};
    data().manifolds.push_back(std::move(m));
    if (bundle.involution) {
      auto& inv = *bundle.involution;
      inv.manifold_map[id] = id;
      for (int dd = 0; dd <= 2; ++dd) {
        std::string plus = id + ":e" + std::to_string(dd) + "+";
        std::string minus = id + ":e" + std::to_string(dd) + "-";
        inv.cell_map[plus] = minus;
        inv.cell_map[minus] = plus;
      }
    }
  }

  void add_point(const std::string& id, ManifoldKind kind, const Rational& base,
                 const std::string& tower, std::int64_t eigen_index, int sign) {
    CriticalManifold m;
    m.id = id;
    m.kind = kind;
    m.base_grading = base;
    m.local_complex = point_local_complex();
    m.tower = TowerInfo{tower, eigen_index, sign};
    data().manifolds.push_back(std::move(m));
  }

  // One sphere tower: stable levels at epsilon + 4k (k >= 0), unstable at
  // epsilon - 3 - 4k, as far as the window (plus slack) reaches.
  void add_sphere_tower(const std::string& tower, const Rational& epsilon) {
    bool any = false;
    for (std::int64_t k = 1;; ++k) {
      Rational base = epsilon + Rational(4 * (k - 1));
      if (!(base <= window.hi + Rational(slack))) break;
      if (in_range(base)) {
        add_sphere(tower + ".s" + std::to_string(k), ManifoldKind::BoundaryStable,
                   base, tower, k, +1);
        any = true;
      }
    }
    for (std::int64_t k = 1;; ++k) {
      Rational base = epsilon - Rational(3 + 4 * (k - 1));
      if (!(window.lo - Rational(slack) <= base + Rational(2))) break;
      if (in_range(base)) {
        add_sphere(tower + ".u" + std::to_string(k),
                   ManifoldKind::BoundaryUnstable, base, tower, -k, -1);
        any = true;
      }
    }
    if (!any)
      throw std::invalid_argument(
          "window too small to contain one full tower level");
  }

  // Operator between two manifolds with explicit per-degree blocks.
  void add_operator(std::vector<ModuliOperator>& sink, OperatorClass cls,
                    const std::string& src, const std::string& tgt,
                    const Rational& total_shift,
                    std::map<std::int64_t, gf2::BitMatrix> blocks) {
    ModuliOperator op;
    op.cls = cls;
    op.source = src;
    op.target = tgt;
    op.total_shift = total_shift;
    op.blocks = std::move(blocks);
    sink.push_back(std::move(op));
  }

  OperatorClass reducible_class(const CriticalManifold& s,
                                const CriticalManifold& t) {
    if (s.kind == ManifoldKind::BoundaryStable)
      return t.kind == ManifoldKind::BoundaryStable ? OperatorClass::bar_ss
                                                    : OperatorClass::bar_su;
    return t.kind == ManifoldKind::BoundaryStable ? OperatorClass::bar_us
                                                  : OperatorClass::bar_uu;
  }

  // Conjugate pair of inter-tower maps: g sends both cells of each local
  // degree to the + cell, its j-conjugate sends them to the - cell; the
  // pair sums to the rank-one map that kills invariant chains.
  void add_conjugate_pair(std::vector<ModuliOperator>& sink,
                          const std::string& src, const std::string& tgt,
                          const Rational& shift) {
    const auto* s = data().find_manifold(src);
    const auto* t = data().find_manifold(tgt);
    OperatorClass cls = reducible_class(*s, *t);
    std::map<std::int64_t, gf2::BitMatrix> gplus, gminus;
    for (std::int64_t dd = 0; dd <= 2; ++dd) {
      gplus[dd] = mat2(1, 1, 0, 0);
      gminus[dd] = mat2(0, 0, 1, 1);
    }
    add_operator(sink, cls, src, tgt, shift, std::move(gplus));
    add_operator(sink, cls, src, tgt, shift, std::move(gminus));
  }

  // Cap map on a sphere manifold: e^d -> e^{d-1} componentwise.
  void add_cap(std::vector<ModuliOperator>& sink, const std::string& id) {
    const auto* m = data().find_manifold(id);
    OperatorClass cls = reducible_class(*m, *m);
    std::map<std::int64_t, gf2::BitMatrix> blocks;
    blocks[1] = mat2(1, 0, 0, 1);
    blocks[2] = mat2(1, 0, 0, 1);
    add_operator(sink, cls, id, id, Rational(-1), std::move(blocks));
  }

  // Generic V: connect every manifold to its tower-mate four degrees down
  // (same kind), or three degrees down across the stable/unstable crossing.
  CobordismOperators build_v() {
    CobordismOperators v;
    v.degree = Rational(-4);
    for (const auto& m : data().manifolds) {
      if (!m.tower) continue;
      for (const auto& n : data().manifolds) {
        if (!n.tower || n.tower->tower_id != m.tower->tower_id) continue;
        bool same_kind = n.kind == m.kind;
        if (same_kind && n.base_grading == m.base_grading - Rational(4)) {
          std::map<std::int64_t, gf2::BitMatrix> blocks;
          for (const auto& [deg, labels] : m.local_complex.space.degrees())
            if (!labels.empty())
              blocks[deg.num()] = gf2::BitMatrix::identity(labels.size());
          add_operator(v.ops, reducible_class(m, n), m.id, n.id, Rational(-4),
                       std::move(blocks));
        }
        if (m.kind == ManifoldKind::BoundaryStable &&
            n.kind == ManifoldKind::BoundaryUnstable &&
            n.base_grading == m.base_grading - Rational(3)) {
          std::map<std::int64_t, gf2::BitMatrix> blocks;
          for (const auto& [deg, labels] : m.local_complex.space.degrees())
            if (!labels.empty())
              blocks[deg.num()] = gf2::BitMatrix::identity(labels.size());
          add_operator(v.ops, OperatorClass::bar_su, m.id, n.id, Rational(-3),
                       std::move(blocks));
        }
      }
    }
    return v;
  }

  // Q with caps on all sphere manifolds; callers may add correction terms.
  CobordismOperators build_q_caps() {
    CobordismOperators q;
    q.degree = Rational(-1);
    for (const auto& m : data().manifolds)
      if (m.local_dim() == 2) add_cap(q.ops, m.id);
    return q;
  }
};

ModelBundle make_tower_model(const std::string& name, const Rational& epsilon,
                             std::optional<std::int64_t> rokhlin,
                             const ModelSpec& spec) {
  ModelBuilder b;
  b.window = spec.window;
  b.bundle.data.name = name;
  b.bundle.data.b1 = 0;
  b.bundle.data.rokhlin_times8 = rokhlin;
  if (spec.options.involution) b.bundle.involution = Involution{};
  b.add_sphere_tower("r", epsilon);
  if (spec.options.module_operators) {
    b.bundle.q_ops = b.build_q_caps();
    b.bundle.v_ops = b.build_v();
  }
  if (spec.options.energy_filtration)
    for (const auto& m : b.data().manifolds)
      b.bundle.filtration[m.id] = int(m.tower->eigen_index);
  return std::move(b.bundle);
}

ModelBundle make_s1xs2(const ModelSpec& spec) {
  ModelBuilder b;
  b.window = spec.window;
  b.bundle.data.name = "s1xs2";
  b.bundle.data.b1 = 1;
  if (spec.options.involution) b.bundle.involution = Involution{};
  // Two spin-connection towers, the lower one shifted by -1.
  b.add_sphere_tower("t1", Rational(0));
  b.add_sphere_tower("t0", Rational(-1));
  // Inter-tower operators in conjugate pairs, level by level.
  for (const auto& m : b.data().manifolds) {
    if (m.tower->tower_id != "t1") continue;
    std::string peer = "t0." + m.id.substr(3);
    if (b.data().find_manifold(peer))
      b.add_conjugate_pair(b.data().operators, m.id, peer, Rational(-1));
  }
  if (spec.options.module_operators) {
    b.bundle.q_ops = b.build_q_caps();
    b.bundle.v_ops = b.build_v();
  }
  if (spec.options.energy_filtration)
    for (const auto& m : b.data().manifolds)
      b.bundle.filtration[m.id] =
          int(2 * m.tower->eigen_index + (m.tower->tower_id == "t1" ? 1 : 0));
  return std::move(b.bundle);
}

ModelBundle make_t3(const ModelSpec& spec) {
  ModelBuilder b;
  b.window = spec.window;
  b.bundle.data.name = "t3";
  b.bundle.data.b1 = 3;
  if (spec.options.involution) b.bundle.involution = Involution{};

  // Eight towers of eigenspace spheres over the spin connections; the
  // x tower is shifted up by two by the spectral flow.
  const std::vector<std::pair<std::string, Rational>> towers = {
      {"y1", Rational(-2)}, {"y2", Rational(-2)}, {"y3", Rational(-2)},
      {"z1", Rational(-1)}, {"z2", Rational(-1)}, {"z3", Rational(-1)},
      {"w", Rational(0)},   {"x", Rational(-1)}};
  for (const auto& [tid, eps] : towers) b.add_sphere_tower(tid, eps);

  auto level_ids = [&](const std::string& tid) {
    std::vector<std::pair<std::int64_t, std::string>> out;
    for (const auto& m : b.data().manifolds)
      if (m.tower->tower_id == tid) out.push_back({m.tower->eigen_index, m.id});
    return out;
  };

  // Within-level operators realizing the proof's moduli classes:
  // (1) w -> z_a and z_a -> y_b (b != a): conjugate CP^1 pairs;
  // (2) y_b -> x: conjugate point pairs, e2± -> e0±;
  // (4) z_a -> x: conjugate one-cell pairs, e2± -> e1;
  // (5) w -> x: the top cycle, the identity map.
  for (const auto& [k, wid] : level_ids("w")) {
    for (int a = 1; a <= 3; ++a) {
      std::string zid = "z" + std::to_string(a) + wid.substr(1);
      if (b.data().find_manifold(zid))
        b.add_conjugate_pair(b.data().operators, wid, zid, Rational(-1));
    }
    std::string xid = "x" + wid.substr(1);
    if (b.data().find_manifold(xid)) {
      std::map<std::int64_t, gf2::BitMatrix> blocks;
      for (std::int64_t dd = 0; dd <= 2; ++dd) blocks[dd] = mat2(1, 0, 0, 1);
      const auto* wm = b.data().find_manifold(wid);
      const auto* xm = b.data().find_manifold(xid);
      b.add_operator(b.data().operators, b.reducible_class(*wm, *xm), wid, xid,
                     Rational(-1), std::move(blocks));
    }
  }
  for (int a = 1; a <= 3; ++a)
    for (const auto& [k, zid] : level_ids("z" + std::to_string(a))) {
      for (int bb = 1; bb <= 3; ++bb) {
        if (bb == a) continue;
        std::string yid = "y" + std::to_string(bb) + zid.substr(2);
        if (b.data().find_manifold(yid))
          b.add_conjugate_pair(b.data().operators, zid, yid, Rational(-1));
      }
      std::string xid = "x" + zid.substr(2);
      if (b.data().find_manifold(xid)) {
        const auto* zm = b.data().find_manifold(zid);
        const auto* xm = b.data().find_manifold(xid);
        // conjugate pair of one-cells: e2+ -> e1+, e2- -> e1+ and its mirror
        std::map<std::int64_t, gf2::BitMatrix> gp, gm;
        gp[2] = mat2(1, 1, 0, 0);
        gm[2] = mat2(0, 0, 1, 1);
        b.add_operator(b.data().operators, b.reducible_class(*zm, *xm), zid,
                       xid, Rational(-1), std::move(gp));
        b.add_operator(b.data().operators, b.reducible_class(*zm, *xm), zid,
                       xid, Rational(-1), std::move(gm));
      }
    }
  for (int bb = 1; bb <= 3; ++bb)
    for (const auto& [k, yid] : level_ids("y" + std::to_string(bb))) {
      std::string xid = "x" + yid.substr(2);
      if (!b.data().find_manifold(xid)) continue;
      const auto* ym = b.data().find_manifold(yid);
      const auto* xm = b.data().find_manifold(xid);
      std::map<std::int64_t, gf2::BitMatrix> blocks;
      blocks[2] = mat2(1, 0, 0, 1);  // e2± -> e0±
      b.add_operator(b.data().operators, b.reducible_class(*ym, *xm), yid, xid,
                     Rational(-1), std::move(blocks));
    }

  if (spec.options.module_operators) {
    CobordismOperators q = b.build_q_caps();
    // Correction terms forced by the z -> x and w -> x moduli.
    for (int a = 1; a <= 3; ++a)
      for (const auto& [k, zid] : level_ids("z" + std::to_string(a))) {
        std::string xid = "x" + zid.substr(2);
        if (!b.data().find_manifold(xid)) continue;
        const auto* zm = b.data().find_manifold(zid);
        const auto* xm = b.data().find_manifold(xid);
        std::map<std::int64_t, gf2::BitMatrix> blocks;
        blocks[2] = mat2(1, 0, 0, 1);  // e2± -> e1±
        b.add_operator(q.ops, b.reducible_class(*zm, *xm), zid, xid,
                       Rational(-1), std::move(blocks));
      }
    for (const auto& [k, wid] : level_ids("w")) {
      std::string xid = "x" + wid.substr(1);
      if (!b.data().find_manifold(xid)) continue;
      const auto* wm = b.data().find_manifold(wid);
      const auto* xm = b.data().find_manifold(xid);
      std::map<std::int64_t, gf2::BitMatrix> blocks;
      blocks[2] = mat2(1, 0, 0, 1);  // e2± -> e2±
      b.add_operator(q.ops, b.reducible_class(*wm, *xm), wid, xid, Rational(-1),
                     std::move(blocks));
    }
    b.bundle.q_ops = std::move(q);
    b.bundle.v_ops = b.build_v();
  }

  if (spec.options.energy_filtration) {
    for (const auto& m : b.data().manifolds) {
      const std::string& tid = m.tower->tower_id;
      int offset = tid == "x" ? 0 : tid[0] == 'y' ? 1 : tid[0] == 'z' ? 2 : 3;
      b.bundle.filtration[m.id] = int(8 * m.tower->eigen_index) + offset;
    }
  }
  return std::move(b.bundle);
}

ModelBundle make_flat_bundle(const ModelSpec& spec) {
  ModelBuilder b;
  b.window = spec.window;
  b.bundle.data.name = "flat_bundle";
  b.bundle.data.b1 = 1;
  if (spec.options.involution) b.bundle.involution = Involution{};

  // Two spin-connection sphere towers and the conjugate pair of point
  // towers over the flat connections with spectral flow -1.
  b.add_sphere_tower("c0", Rational(2));
  b.add_sphere_tower("c1", Rational(0));

  auto add_pair = [&](const Rational& base, ManifoldKind kind,
                      std::int64_t index, int sign) {
    std::string suffix = (base.num() < 0 ? "m" : "p") +
                         std::to_string(std::llabs(base.num()));
    std::string id0 = "b0." + suffix;
    std::string id1 = "b1." + suffix;
    b.add_point(id0, kind, base, "b0", index, sign);
    b.add_point(id1, kind, base, "b1", index, sign);
    if (b.bundle.involution) {
      auto& inv = *b.bundle.involution;
      inv.manifold_map[id0] = id1;
      inv.manifold_map[id1] = id0;
      inv.cell_map[id0 + ":pt"] = id1 + ":pt";
      inv.cell_map[id1 + ":pt"] = id0 + ":pt";
    }
    return std::make_pair(id0, id1);
  };

  // stable point pairs at 1 + 2j, unstable at -2j
  for (std::int64_t j = 0;; ++j) {
    Rational base(1 + 2 * j);
    if (!(base <= b.window.hi + Rational(b.slack))) break;
    add_pair(base, ManifoldKind::BoundaryStable, j + 1, +1);
  }
  for (std::int64_t j = 0;; ++j) {
    Rational base(-2 * j);
    if (!(b.window.lo - Rational(b.slack) <= base)) break;
    add_pair(base, ManifoldKind::BoundaryUnstable, -(j + 1), -1);
  }

  // Sphere top cells hit the adjacent point pair one degree down:
  // e2+ -> b0, e2- -> b1 (a conjugate pair of single points).
  for (const auto& m : b.data().manifolds) {
    if (m.local_dim() != 2) continue;
    Rational pair_base = m.base_grading + Rational(1);
    std::string suffix = (pair_base.num() < 0 ? "m" : "p") +
                         std::to_string(std::llabs(pair_base.num()));
    const auto* p0 = b.data().find_manifold("b0." + suffix);
    const auto* p1 = b.data().find_manifold("b1." + suffix);
    if (!p0 || !p1) continue;
    gf2::BitMatrix plus(1, 2), minus(1, 2);
    plus.set(0, 0, true);   // e2+
    minus.set(0, 1, true);  // e2-
    std::map<std::int64_t, gf2::BitMatrix> bp, bm;
    bp[2] = plus;
    bm[2] = minus;
    b.add_operator(b.data().operators, b.reducible_class(m, *p0), m.id, p0->id,
                   Rational(-1), std::move(bp));
    b.add_operator(b.data().operators, b.reducible_class(m, *p1), m.id, p1->id,
                   Rational(-1), std::move(bm));
  }

  if (spec.options.module_operators) {
    b.bundle.q_ops = b.build_q_caps();
    b.bundle.v_ops = b.build_v();
  }
  if (spec.options.energy_filtration) {
    for (const auto& m : b.data().manifolds) {
      std::int64_t base = m.base_grading.num();
      b.bundle.filtration[m.id] = int(m.local_dim() == 2 ? base + 2 : base);
    }
  }
  return std::move(b.bundle);
}

ModelBundle make_minus_e8(const ModelSpec& spec) {
  ModelSpec src_spec = spec;
  src_spec.name = "s3";
  ModelBundle bundle = make_tower_model("s3", Rational(0), 0, src_spec);

  ModelSpec tgt_spec = spec;
  tgt_spec.name = "poincare";
  ModelBundle target = make_tower_model("poincare", Rational(-2), -8, tgt_spec);

  CobordismOperators ops;
  ops.degree = Rational(2);
  auto identity_blocks = [&]() {
    std::map<std::int64_t, gf2::BitMatrix> blocks;
    for (std::int64_t dd = 0; dd <= 2; ++dd)
      blocks[dd] = gf2::BitMatrix::identity(2);
    return blocks;
  };
  for (const auto& m : bundle.data.manifolds) {
    // Same-kind target two degrees up (local identity, degree 2), or the
    // crossing component from the unstable bottom to the stable bottom
    // (bar_us, whose total shift is degree - 1 with a local identity).
    for (const auto& n : target.data.manifolds) {
      if (n.kind == m.kind && n.base_grading == m.base_grading + Rational(2)) {
        OperatorClass cls = m.kind == ManifoldKind::BoundaryStable
                                ? OperatorClass::bar_ss
                                : OperatorClass::bar_uu;
        ops.ops.push_back(ModuliOperator{cls, m.id, n.id,
                                         required_class_shift(cls, ops.degree),
                                         identity_blocks()});
      }
      if (m.kind == ManifoldKind::BoundaryUnstable &&
          n.kind == ManifoldKind::BoundaryStable &&
          n.base_grading == m.base_grading + Rational(1)) {
        ops.ops.push_back(ModuliOperator{
            OperatorClass::bar_us, m.id, n.id,
            required_class_shift(OperatorClass::bar_us, ops.degree),
            identity_blocks()});
      }
    }
  }

  bundle.data.name = "minus_e8_cobordism";
  bundle.cobordism_target = std::move(target.data);
  bundle.cobordism_target_involution = target.involution;
  bundle.cobordism_ops = std::move(ops);
  bundle.cobordism_metadata =
      CobordismFixtureMetadata{8, -8, 8, Rational(0)};
  return bundle;
}

}  // namespace

LocalSphere local_sphere_complex(bool equivariant) {
  LocalSphere out;
  if (equivariant) {
    out.complex = sphere_local_complex();
    for (int dd = 0; dd <= 2; ++dd) {
      std::string plus = "e" + std::to_string(dd) + "+";
      std::string minus = "e" + std::to_string(dd) + "-";
      out.cell_involution[plus] = minus;
      out.cell_involution[minus] = plus;
    }
  } else {
    GradedComplex c;
    c.window = local_window(2);
    c.space.add_basis_label(Rational(0), "e0");
    c.space.add_basis_label(Rational(2), "e2");
    c.differential = GradedMap(c.space, c.space, Rational(-1));
    out.complex = std::move(c);
    out.cell_involution["e0"] = "e0";
    out.cell_involution["e2"] = "e2";
  }
  return out;
}

std::vector<std::string> model_names() {
  return {"s3",          "poincare",        "s1xs2",
          "t3",          "flat_bundle",     "hantzsche_wendt",
          "minus_e8_cobordism"};
}

ModelBundle generate(const ModelSpec& spec) {
  if (!(spec.window.lo < spec.window.hi))
    throw std::invalid_argument("model window is empty");
  if (spec.name == "s3") return make_tower_model("s3", Rational(0), 0, spec);
  if (spec.name == "poincare")
    return make_tower_model("poincare", Rational(-2), -8, spec);
  if (spec.name == "hantzsche_wendt")
    return make_tower_model("hantzsche_wendt", Rational(2), -8, spec);
  if (spec.name == "s1xs2") return make_s1xs2(spec);
  if (spec.name == "t3") return make_t3(spec);
  if (spec.name == "flat_bundle") return make_flat_bundle(spec);
  if (spec.name == "minus_e8_cobordism") return make_minus_e8(spec);
  throw std::invalid_argument("unknown model name: " + spec.name);
}

namespace {

OperatorClass dual_class(OperatorClass c) {
  switch (c) {
    case OperatorClass::oo: return OperatorClass::oo;
    case OperatorClass::os: return OperatorClass::uo;
    case OperatorClass::uo: return OperatorClass::os;
    case OperatorClass::us: return OperatorClass::us;
    case OperatorClass::bar_ss: return OperatorClass::bar_uu;
    case OperatorClass::bar_uu: return OperatorClass::bar_ss;
    case OperatorClass::bar_su: return OperatorClass::bar_su;
    case OperatorClass::bar_us: return OperatorClass::bar_us;
  }
  return c;
}

ManifoldKind dual_kind(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::BoundaryStable: return ManifoldKind::BoundaryUnstable;
    case ManifoldKind::BoundaryUnstable: return ManifoldKind::BoundaryStable;
    default: return k;
  }
}

GradedComplex dual_local_complex(const GradedComplex& local, std::int64_t n) {
  // Transpose with degrees reflected through n, labels preserved.
  GradedComplex out;
  out.window = local_window(n);
  for (auto it = local.space.degrees().rbegin(); it != local.space.degrees().rend();
       ++it)
    for (const auto& label : it->second)
      out.space.add_basis_label(Rational(n) - it->first, label);
  GradedMap diff(out.space, out.space, Rational(-1));
  for (const auto& [e, labels] : out.space.degrees()) {
    if (labels.empty()) continue;
    Rational orig_source = Rational(n) - e + Rational(1);
    gf2::BitMatrix orig = local.differential.block(orig_source);
    if (orig.is_zero()) continue;
    diff.set_block(e, orig.transpose());
  }
  out.differential = std::move(diff);
  return out;
}

std::vector<ModuliOperator> dual_operators(
    const std::vector<ModuliOperator>& ops, const FloerData& original) {
  std::vector<ModuliOperator> out;
  for (const auto& op : ops) {
    const auto* s = original.find_manifold(op.source);
    const auto* t = original.find_manifold(op.target);
    std::int64_t ns = s->local_dim();
    std::int64_t nt = t->local_dim();
    Rational lshift =
        op.total_shift - (t->base_grading - s->base_grading);
    ModuliOperator dual;
    dual.cls = dual_class(op.cls);
    dual.source = op.target;
    dual.target = op.source;
    dual.total_shift = op.total_shift;
    for (const auto& [d, mat] : op.blocks) {
      std::int64_t td = d + lshift.num();
      dual.blocks[nt - td] = mat.transpose();
      (void)ns;
    }
    out.push_back(std::move(dual));
  }
  return out;
}

}  // namespace

ModelBundle dual_of(const ModelBundle& bundle) {
  ModelBundle out;
  const FloerData& d = bundle.data;
  out.data.name = d.name + "~dual";
  out.data.grading_denominator = d.grading_denominator;
  out.data.b1 = d.b1;
  if (d.rokhlin_times8) out.data.rokhlin_times8 = -*d.rokhlin_times8;

  for (const auto& m : d.manifolds) {
    CriticalManifold dm;
    dm.id = m.id;
    dm.kind = dual_kind(m.kind);
    std::int64_t n = m.local_dim();
    dm.base_grading = -m.base_grading - Rational(n) - Rational(1);
    dm.local_complex = dual_local_complex(m.local_complex, n);
    if (m.tower)
      dm.tower = TowerInfo{m.tower->tower_id, -m.tower->eigen_index,
                           -m.tower->eigen_sign};
    out.data.manifolds.push_back(std::move(dm));
  }
  out.data.operators = dual_operators(d.operators, d);
  out.involution = bundle.involution;
  if (bundle.q_ops) {
    CobordismOperators q;
    q.degree = bundle.q_ops->degree;
    q.ops = dual_operators(bundle.q_ops->ops, d);
    out.q_ops = std::move(q);
  }
  if (bundle.v_ops) {
    CobordismOperators v;
    v.degree = bundle.v_ops->degree;
    v.ops = dual_operators(bundle.v_ops->ops, d);
    out.v_ops = std::move(v);
  }
  for (const auto& [id, level] : bundle.filtration)
    out.filtration[id] = -level;
  return out;
}

GradedComplex generate_random_complex(std::uint64_t seed, std::size_t size,
                                      int grading_spread) {
  std::mt19937_64 rng(seed);
  GradedComplex c;
  c.window = {Rational(-grading_spread - 8), Rational(grading_spread + 8)};
  std::map<std::int64_t, int> made;
  std::vector<std::pair<std::int64_t, std::size_t>> gens;
  for (std::size_t i = 0; i < size; ++i) {
    std::int64_t deg =
        std::int64_t(rng() % (2 * grading_spread + 1)) - grading_spread;
    gens.push_back({deg, std::size_t(made[deg]++)});
    c.space.add_basis_label(Rational(deg),
                            "r" + std::to_string(i) + "@" + std::to_string(deg));
  }
  GradedMap diff(c.space, c.space, Rational(-1));
  std::set<std::size_t> used;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (used.count(i)) continue;
    for (std::size_t jdx = 0; jdx < gens.size(); ++jdx) {
      if (i == jdx || used.count(jdx)) continue;
      if (gens[jdx].first != gens[i].first - 1) continue;
      if (rng() % 3 != 0) continue;
      const auto& bi = c.space.basis(Rational(gens[i].first));
      const auto& bj = c.space.basis(Rational(gens[jdx].first));
      diff.add_entry(bj[gens[jdx].second], bi[gens[i].second]);
      used.insert(i);
      used.insert(jdx);
      break;
    }
  }
  // Random graded basis change: conjugation keeps the square zero.
  for (const auto& [deg, labels] : c.space.degrees()) {
    std::size_t n = labels.size();
    if (n < 2) continue;
    for (int rep = 0; rep < int(2 * n); ++rep) {
      std::size_t a = rng() % n, bpos = rng() % n;
      if (a == bpos) continue;
      gf2::BitMatrix outgoing = diff.block(deg);
      for (std::size_t r = 0; r < outgoing.rows(); ++r)
        if (outgoing.get(r, a)) outgoing.flip(r, bpos);
      diff.set_block(deg, outgoing);
      gf2::BitMatrix incoming = diff.block(deg + Rational(1));
      for (std::size_t col = 0; col < incoming.cols(); ++col)
        if (incoming.get(bpos, col)) incoming.flip(a, col);
      diff.set_block(deg + Rational(1), incoming);
    }
  }
  c.differential = std::move(diff);
  return c;
}

}  // namespace floer
