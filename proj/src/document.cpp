#include "floer/document.hpp"

#include <set>

#include "json.hpp"

namespace floer {

using nlohmann::json;

namespace {

ParseError syntax_error(const json::parse_error& e, const std::string& text) {
  // recover line/column from the byte offset
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return ParseError(e.what(), line, col);
}

void expect_keys(const json& j, const std::string& path,
                 const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ParseError("expected an object", path);
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw ParseError("unknown field '" + key + "'", path + "/" + key);
}

Rational parse_rational(const json& j, const std::string& path) {
  if (!j.is_string())
    throw ParseError("gradings must be exact \"num/den\" strings", path);
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw ParseError(e.what(), path);
  }
}

json emit_rational(const Rational& r) { return r.to_fraction_string(); }

gf2::BitMatrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError("matrix must be an array of bit rows", path);
  std::vector<std::string> rows = j.get<std::vector<std::string>>();
  std::size_t cols = rows.empty() ? 0 : rows[0].size();
  gf2::BitMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols)
      throw ParseError("ragged matrix rows", path + "/" + std::to_string(r));
    for (std::size_t c = 0; c < cols; ++c) {
      if (rows[r][c] == '1')
        m.set(r, c, true);
      else if (rows[r][c] != '0')
        throw ParseError("matrix entries must be '0' or '1'",
                         path + "/" + std::to_string(r));
    }
  }
  return m;
}

json emit_matrix(const gf2::BitMatrix& m) {
  std::vector<std::string> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::string row(m.cols(), '0');
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.get(r, c)) row[c] = '1';
    rows.push_back(std::move(row));
  }
  return json(rows);
}

ModuliOperator parse_operator(const json& j, const std::string& path) {
  expect_keys(j, path, {"class", "source", "target", "shift", "blocks"});
  ModuliOperator op;
  auto cls = class_from_string(j.at("class").get<std::string>());
  if (!cls)
    throw ParseError("unknown operator class '" +
                         j.at("class").get<std::string>() + "'",
                     path + "/class");
  op.cls = *cls;
  op.source = j.at("source").get<std::string>();
  op.target = j.at("target").get<std::string>();
  op.total_shift = parse_rational(j.at("shift"), path + "/shift");
  std::size_t idx = 0;
  for (const auto& blk : j.at("blocks")) {
    std::string bpath = path + "/blocks/" + std::to_string(idx++);
    expect_keys(blk, bpath, {"degree", "matrix"});
    std::int64_t degree = blk.at("degree").get<std::int64_t>();
    op.blocks[degree] = parse_matrix(blk.at("matrix"), bpath + "/matrix");
  }
  return op;
}

json emit_operator(const ModuliOperator& op) {
  json j;
  j["class"] = to_string(op.cls);
  j["source"] = op.source;
  j["target"] = op.target;
  j["shift"] = emit_rational(op.total_shift);
  json blocks = json::array();
  for (const auto& [deg, mat] : op.blocks) {
    json blk;
    blk["degree"] = deg;
    blk["matrix"] = emit_matrix(mat);
    blocks.push_back(std::move(blk));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

CobordismOperators parse_ops(const json& j, const std::string& path) {
  expect_keys(j, path, {"degree", "operators"});
  CobordismOperators ops;
  ops.degree = parse_rational(j.at("degree"), path + "/degree");
  std::size_t idx = 0;
  for (const auto& item : j.at("operators"))
    ops.ops.push_back(
        parse_operator(item, path + "/operators/" + std::to_string(idx++)));
  return ops;
}

json emit_ops(const CobordismOperators& ops) {
  json j;
  j["degree"] = emit_rational(ops.degree);
  json arr = json::array();
  for (const auto& op : ops.ops) arr.push_back(emit_operator(op));
  j["operators"] = std::move(arr);
  return j;
}

CriticalManifold parse_manifold(const json& j, const std::string& path) {
  expect_keys(j, path,
              {"id", "kind", "base_grading", "tower", "local_cells",
               "local_differential"});
  CriticalManifold m;
  m.id = j.at("id").get<std::string>();
  auto kind = kind_from_string(j.at("kind").get<std::string>());
  if (!kind)
    throw ParseError("unknown manifold kind", path + "/kind");
  m.kind = *kind;
  m.base_grading = parse_rational(j.at("base_grading"), path + "/base_grading");
  if (j.contains("tower") && !j.at("tower").is_null()) {
    const json& t = j.at("tower");
    expect_keys(t, path + "/tower", {"id", "eigen_index", "sign"});
    m.tower = TowerInfo{t.at("id").get<std::string>(),
                        t.at("eigen_index").get<std::int64_t>(),
                        t.at("sign").get<int>()};
  }
  const json& cells = j.at("local_cells");
  if (!cells.is_array())
    throw ParseError("local_cells must be an array of per-degree label lists",
                     path + "/local_cells");
  std::int64_t top = std::int64_t(cells.size()) - 1;
  GradedComplex local;
  local.window = {Rational(-3), Rational(top + 3)};
  for (std::size_t d = 0; d < cells.size(); ++d)
    for (const auto& label : cells[d])
      local.space.add_basis_label(Rational(std::int64_t(d)),
                                  label.get<std::string>());
  GradedMap diff(local.space, local.space, Rational(-1));
  std::size_t idx = 0;
  for (const auto& blk : j.at("local_differential")) {
    std::string bpath = path + "/local_differential/" + std::to_string(idx++);
    expect_keys(blk, bpath, {"degree", "matrix"});
    std::int64_t degree = blk.at("degree").get<std::int64_t>();
    gf2::BitMatrix mat = parse_matrix(blk.at("matrix"), bpath + "/matrix");
    if (mat.rows() != local.space.dim(Rational(degree - 1)) ||
        mat.cols() != local.space.dim(Rational(degree)))
      throw ParseError("local differential block shape mismatch", bpath);
    diff.set_block(Rational(degree), std::move(mat));
  }
  local.differential = std::move(diff);
  m.local_complex = std::move(local);
  return m;
}

json emit_manifold(const CriticalManifold& m) {
  json j;
  j["id"] = m.id;
  j["kind"] = to_string(m.kind);
  j["base_grading"] = emit_rational(m.base_grading);
  if (m.tower) {
    json t;
    t["id"] = m.tower->tower_id;
    t["eigen_index"] = m.tower->eigen_index;
    t["sign"] = m.tower->eigen_sign;
    j["tower"] = std::move(t);
  }
  std::int64_t top = m.local_dim();
  json cells = json::array();
  for (std::int64_t d = 0; d <= top; ++d)
    cells.push_back(m.local_complex.space.basis(Rational(d)));
  j["local_cells"] = std::move(cells);
  json diffs = json::array();
  for (std::int64_t d = 0; d <= top; ++d) {
    gf2::BitMatrix blk = m.local_complex.differential.block(Rational(d));
    if (blk.is_zero()) continue;
    json b;
    b["degree"] = d;
    b["matrix"] = emit_matrix(blk);
    diffs.push_back(std::move(b));
  }
  j["local_differential"] = std::move(diffs);
  return j;
}

void check_semantics(const FloerDocument& doc) {
  for (const auto& op : doc.data.operators) {
    if (!doc.data.find_manifold(op.source))
      throw ParseError("operator references missing manifold '" + op.source + "'",
                       "/operators/source");
    if (!doc.data.find_manifold(op.target))
      throw ParseError("operator references missing manifold '" + op.target + "'",
                       "/operators/target");
  }
  if (doc.involution) {
    for (const auto& [a, b] : doc.involution->manifold_map)
      if (!doc.data.find_manifold(a) || !doc.data.find_manifold(b))
        throw ParseError("involution references missing manifold",
                         "/involution/manifolds/" + a);
  }
  for (const auto& [id, level] : doc.filtration)
    if (!doc.data.find_manifold(id))
      throw ParseError("filtration references missing manifold '" + id + "'",
                       "/filtration/" + id);
}

}  // namespace

FloerDocument parse_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw syntax_error(e, text);
  }
  expect_keys(j, "",
              {"schema_version", "name", "grading_denominator", "b1",
               "rokhlin_times8", "window", "manifolds", "operators",
               "involution", "module_operators", "filtration"});
  if (!j.contains("schema_version") ||
      j.at("schema_version").get<std::string>() !=
          FloerDocument::kSchemaVersion)
    throw ParseError("unsupported schema_version (expected '" +
                         std::string(FloerDocument::kSchemaVersion) + "')",
                     "/schema_version");

  FloerDocument doc;
  doc.data.name = j.value("name", std::string{});
  doc.data.grading_denominator = j.value("grading_denominator", std::int64_t(1));
  doc.data.b1 = j.value("b1", std::size_t(0));
  if (j.contains("rokhlin_times8") && !j.at("rokhlin_times8").is_null())
    doc.data.rokhlin_times8 = j.at("rokhlin_times8").get<std::int64_t>();
  if (j.contains("window")) {
    expect_keys(j.at("window"), "/window", {"lo", "hi"});
    doc.window.lo = parse_rational(j.at("window").at("lo"), "/window/lo");
    doc.window.hi = parse_rational(j.at("window").at("hi"), "/window/hi");
  }
  std::size_t idx = 0;
  for (const auto& m : j.value("manifolds", json::array()))
    doc.data.manifolds.push_back(
        parse_manifold(m, "/manifolds/" + std::to_string(idx++)));
  idx = 0;
  for (const auto& op : j.value("operators", json::array()))
    doc.data.operators.push_back(
        parse_operator(op, "/operators/" + std::to_string(idx++)));
  if (j.contains("involution") && !j.at("involution").is_null()) {
    expect_keys(j.at("involution"), "/involution", {"manifolds", "cells"});
    Involution inv;
    for (const auto& [k, v] : j.at("involution").at("manifolds").items())
      inv.manifold_map[k] = v.get<std::string>();
    for (const auto& [k, v] : j.at("involution").at("cells").items())
      inv.cell_map[k] = v.get<std::string>();
    doc.involution = std::move(inv);
  }
  if (j.contains("module_operators") && !j.at("module_operators").is_null()) {
    expect_keys(j.at("module_operators"), "/module_operators", {"q", "v"});
    const json& mo = j.at("module_operators");
    if (mo.contains("q"))
      doc.q_ops = parse_ops(mo.at("q"), "/module_operators/q");
    if (mo.contains("v"))
      doc.v_ops = parse_ops(mo.at("v"), "/module_operators/v");
  }
  if (j.contains("filtration") && !j.at("filtration").is_null())
    for (const auto& [k, v] : j.at("filtration").items())
      doc.filtration[k] = v.get<int>();

  check_semantics(doc);
  return doc;
}

std::string emit_document(const FloerDocument& doc) {
  json j;
  j["schema_version"] = FloerDocument::kSchemaVersion;
  j["name"] = doc.data.name;
  j["grading_denominator"] = doc.data.grading_denominator;
  j["b1"] = doc.data.b1;
  if (doc.data.rokhlin_times8) j["rokhlin_times8"] = *doc.data.rokhlin_times8;
  j["window"]["lo"] = emit_rational(doc.window.lo);
  j["window"]["hi"] = emit_rational(doc.window.hi);
  json manifolds = json::array();
  for (const auto& m : doc.data.manifolds) manifolds.push_back(emit_manifold(m));
  j["manifolds"] = std::move(manifolds);
  json operators = json::array();
  for (const auto& op : doc.data.operators)
    operators.push_back(emit_operator(op));
  j["operators"] = std::move(operators);
  if (doc.involution) {
    json inv;
    inv["manifolds"] = json::object();
    for (const auto& [k, v] : doc.involution->manifold_map)
      inv["manifolds"][k] = v;
    inv["cells"] = json::object();
    for (const auto& [k, v] : doc.involution->cell_map) inv["cells"][k] = v;
    j["involution"] = std::move(inv);
  }
  if (doc.q_ops || doc.v_ops) {
    json mo;
    if (doc.q_ops) mo["q"] = emit_ops(*doc.q_ops);
    if (doc.v_ops) mo["v"] = emit_ops(*doc.v_ops);
    j["module_operators"] = std::move(mo);
  }
  if (!doc.filtration.empty()) {
    json f = json::object();
    for (const auto& [k, v] : doc.filtration) f[k] = v;
    j["filtration"] = std::move(f);
  }
  return j.dump(2) + "\n";
}

FloerDocument document_from_bundle(const ModelBundle& bundle,
                                   const Window& window) {
  FloerDocument doc;
  doc.data = bundle.data;
  doc.involution = bundle.involution;
  doc.q_ops = bundle.q_ops;
  doc.v_ops = bundle.v_ops;
  doc.filtration = bundle.filtration;
  doc.window = window;
  return doc;
}

OperatorSetDocument parse_operator_set(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw syntax_error(e, text);
  }
  expect_keys(j, "", {"schema_version", "degree", "operators"});
  if (!j.contains("schema_version") ||
      j.at("schema_version").get<std::string>() !=
          OperatorSetDocument::kSchemaVersion)
    throw ParseError("unsupported schema_version (expected '" +
                         std::string(OperatorSetDocument::kSchemaVersion) +
                         "')",
                     "/schema_version");
  OperatorSetDocument doc;
  doc.ops.degree = parse_rational(j.at("degree"), "/degree");
  std::size_t idx = 0;
  for (const auto& op : j.value("operators", json::array()))
    doc.ops.ops.push_back(
        parse_operator(op, "/operators/" + std::to_string(idx++)));
  return doc;
}

std::string emit_operator_set(const OperatorSetDocument& doc) {
  json j;
  j["schema_version"] = OperatorSetDocument::kSchemaVersion;
  j["degree"] = doc.ops.degree.to_fraction_string();
  json arr = json::array();
  for (const auto& op : doc.ops.ops) arr.push_back(emit_operator(op));
  j["operators"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace floer
