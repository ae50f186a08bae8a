#pragma once

#include <string>

#include "floer/models.hpp"

namespace floer {

// Serialized form of a data set: FloerData, involution, module operators,
// filtration, and the generation window. Round-trips exactly; unknown
// fields are rejected.
struct FloerDocument {
  static constexpr const char* kSchemaVersion = "floer.document/1";

  FloerData data;
  std::optional<Involution> involution;
  std::optional<CobordismOperators> q_ops;
  std::optional<CobordismOperators> v_ops;
  std::map<std::string, int> filtration;
  Window window{Rational(-24), Rational(24)};
};

struct ParseError : std::runtime_error {
  // line/column are 1-based for syntax errors, 0 when not applicable
  int line = 0, column = 0;
  std::string path;  // JSON-pointer-like location for semantic errors
  ParseError(const std::string& what, int l, int c)
      : std::runtime_error(what), line(l), column(c) {}
  ParseError(const std::string& what, std::string p)
      : std::runtime_error(what), path(std::move(p)) {}
};

FloerDocument parse_document(const std::string& text);
std::string emit_document(const FloerDocument& doc);

FloerDocument document_from_bundle(const ModelBundle& bundle,
                                   const Window& window);

// Stand-alone operator-set document for cobordism fixtures.
struct OperatorSetDocument {
  static constexpr const char* kSchemaVersion = "floer.opset/1";
  CobordismOperators ops;
};

OperatorSetDocument parse_operator_set(const std::string& text);
std::string emit_operator_set(const OperatorSetDocument& doc);

}  // namespace floer
