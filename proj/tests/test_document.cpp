#include "doctest.h"
#include "floer/document.hpp"

using namespace floer;

namespace {

ModelBundle model(const std::string& name) {
  ModelSpec spec;
  spec.name = name;
  spec.window = {Rational(-16), Rational(16)};
  return generate(spec);
}

}  // namespace

TEST_CASE("emit/parse round trip on builtin models") {
  for (const char* name :
       {"s3", "poincare", "s1xs2", "t3", "flat_bundle", "hantzsche_wendt"}) {
    ModelBundle b = model(name);
    FloerDocument doc =
        document_from_bundle(b, {Rational(-16), Rational(16)});
    std::string text = emit_document(doc);
    FloerDocument parsed = parse_document(text);
    CHECK(emit_document(parsed) == text);  // canonical-form identity
    CHECK(parsed.data.manifolds.size() == b.data.manifolds.size());
    CHECK(parsed.data.operators.size() == b.data.operators.size());
    CHECK(parsed.data.name == b.data.name);
  }
}

TEST_CASE("operator set round trip") {
  ModelSpec spec;
  spec.name = "minus_e8_cobordism";
  spec.window = {Rational(-16), Rational(16)};
  ModelBundle fixture = generate(spec);
  OperatorSetDocument doc{*fixture.cobordism_ops};
  std::string text = emit_operator_set(doc);
  OperatorSetDocument parsed = parse_operator_set(text);
  CHECK(emit_operator_set(parsed) == text);
  CHECK(parsed.ops.degree == Rational(2));
}

TEST_CASE("strict schema: unknown fields are rejected with a path") {
  ModelBundle b = model("s3");
  FloerDocument doc = document_from_bundle(b, {Rational(-16), Rational(16)});
  std::string text = emit_document(doc);
  text.replace(text.find("\"b1\""), 4, "\"bb\"");
  try {
    (void)parse_document(text);
    FAIL("expected rejection");
  } catch (const ParseError& e) {
    CHECK(e.path == "/bb");
  }
}

TEST_CASE("wrong schema version is rejected, never coerced") {
  std::string text = R"({"schema_version": "floer.document/999"})";
  CHECK_THROWS_AS((void)parse_document(text), ParseError);
}

TEST_CASE("syntax errors carry line and column") {
  std::string text = "{\n  \"schema_version\": \"floer.document/1\",\n  !\n}";
  try {
    (void)parse_document(text);
    FAIL("expected syntax error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(e.column >= 1);
  }
}

TEST_CASE("dangling operator endpoint is a semantic error with a path") {
  std::string text = R"({
  "schema_version": "floer.document/1",
  "name": "broken",
  "grading_denominator": 1,
  "b1": 0,
  "window": {"lo": "-4/1", "hi": "4/1"},
  "manifolds": [
    {"id": "a", "kind": "boundary_stable", "base_grading": "0/1",
     "tower": {"id": "t", "eigen_index": 1, "sign": 1},
     "local_cells": [["pt"]], "local_differential": []}
  ],
  "operators": [
    {"class": "bar_ss", "source": "a", "target": "missing",
     "shift": "-1/1", "blocks": []}
  ]
})";
  try {
    (void)parse_document(text);
    FAIL("expected semantic error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
    CHECK(e.path.find("/operators") == 0);
  }
}

TEST_CASE("gradings must be exact fraction strings") {
  std::string text = R"({
  "schema_version": "floer.document/1",
  "name": "x",
  "grading_denominator": 1,
  "b1": 0,
  "window": {"lo": -4, "hi": "4/1"},
  "manifolds": [],
  "operators": []
})";
  CHECK_THROWS_AS((void)parse_document(text), ParseError);
}

TEST_CASE("hand-written document equals programmatic construction") {
  std::string text = R"({
  "schema_version": "floer.document/1",
  "name": "two-generator",
  "grading_denominator": 1,
  "b1": 0,
  "window": {"lo": "-4/1", "hi": "4/1"},
  "manifolds": [
    {"id": "s", "kind": "boundary_stable", "base_grading": "0/1",
     "tower": {"id": "t", "eigen_index": 1, "sign": 1},
     "local_cells": [["pt"]], "local_differential": []},
    {"id": "u", "kind": "boundary_unstable", "base_grading": "0/1",
     "tower": {"id": "t", "eigen_index": -1, "sign": -1},
     "local_cells": [["pt"]], "local_differential": []}
  ],
  "operators": [
    {"class": "bar_su", "source": "s", "target": "u",
     "shift": "0/1", "blocks": [{"degree": 0, "matrix": ["1"]}]}
  ]
})";
  FloerDocument parsed = parse_document(text);

  FloerData d;
  d.name = "two-generator";
  CriticalManifold s;
  s.id = "s";
  s.kind = ManifoldKind::BoundaryStable;
  s.base_grading = Rational(0);
  s.local_complex.window = {Rational(-3), Rational(3)};
  s.local_complex.space.add_basis_label(Rational(0), "pt");
  s.local_complex.differential =
      GradedMap(s.local_complex.space, s.local_complex.space, Rational(-1));
  s.tower = TowerInfo{"t", 1, 1};
  CriticalManifold u = s;
  u.id = "u";
  u.kind = ManifoldKind::BoundaryUnstable;
  u.tower = TowerInfo{"t", -1, -1};
  d.manifolds = {s, u};
  ModuliOperator op;
  op.cls = OperatorClass::bar_su;
  op.source = "s";
  op.target = "u";
  op.total_shift = Rational(0);
  op.blocks[0] = gf2::BitMatrix::identity(1);
  d.operators.push_back(op);

  FloerDocument built;
  built.data = d;
  built.window = {Rational(-4), Rational(4)};
  CHECK(emit_document(parsed) == emit_document(built));
}

TEST_CASE("dual model documents round trip") {
  ModelBundle b = dual_of(model("poincare"));
  FloerDocument doc = document_from_bundle(b, {Rational(-16), Rational(16)});
  std::string text = emit_document(doc);
  CHECK(emit_document(parse_document(text)) == text);
}
