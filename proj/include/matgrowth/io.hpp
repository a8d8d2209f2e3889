#pragma once

#include <string>

#include "matgrowth/family.hpp"
#include "matgrowth/matrix.hpp"

namespace matgrowth {

enum class InputKind { MatrixInput, FamilyInput };

struct ParsedInput {
  InputKind kind = InputKind::MatrixInput;
  Matrix matrix;          // kind == MatrixInput
  RowChoiceFamily family; // kind == FamilyInput
  std::string digest;     // fnv1a-64 of the raw file bytes, hex
};

/// Text formats (UTF-8, values parsed exactly as written):
///   matrix N          family N
///   <N rows of N>     row 1: m
///                     <m rows of N>
///                     row 2: m ...
/// A .json extension selects the JSON mirror:
///   {"kind":"matrix","n":N,"rows":[[...],...]}
///   {"kind":"family","n":N,"rows":[[[...],...],...]}
/// Negative, non-finite or missing entries are parse errors (ParseError
/// carries the 1-based line and column).
ParsedInput load_input(const std::string& path);

ParsedInput parse_text(const std::string& content);
ParsedInput parse_json(const std::string& content);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace matgrowth
