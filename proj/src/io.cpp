#include "matgrowth/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "matgrowth/errors.hpp"

namespace matgrowth {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= text.size(); }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_space() {
    while (!eof() && std::isspace(static_cast<unsigned char>(text[pos])))
      advance();
  }

  std::string token() {
    skip_space();
    const std::size_t start = pos;
    while (!eof() && !std::isspace(static_cast<unsigned char>(text[pos])))
      advance();
    return text.substr(start, pos - start);
  }

  double number(const char* what) {
    skip_space();
    const int l = line, c = col;
    const std::string tok = token();
    if (tok.empty()) throw ParseError(std::string("expected ") + what, l, c);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(std::string("invalid number '") + tok + "' for " +
                           what,
                       l, c);
    }
    if (used != tok.size())
      throw ParseError(std::string("invalid number '") + tok + "' for " +
                           what,
                       l, c);
    if (!std::isfinite(v))
      throw ParseError(std::string("non-finite value for ") + what, l, c);
    return v;
  }

  long integer(const char* what) {
    skip_space();
    const int l = line, c = col;
    const double v = number(what);
    const long iv = static_cast<long>(v);
    if (static_cast<double>(iv) != v)
      throw ParseError(std::string("expected integer for ") + what, l, c);
    return iv;
  }

  double entry(const char* what) {
    skip_space();
    const int l = line, c = col;
    const double v = number(what);
    if (v < 0.0)
      throw ParseError(std::string("negative entry for ") + what, l, c);
    return v;
  }
};

Vec parse_row(Cursor& cur, long n) {
  Vec row(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] =
      cur.entry("matrix entry");
  return row;
}

}  // namespace

ParsedInput parse_text(const std::string& content) {
  Cursor cur{content};
  cur.skip_space();
  const int hl = cur.line, hc = cur.col;
  const std::string kind = cur.token();

  ParsedInput out;
  if (kind == "matrix") {
    const long n = cur.integer("dimension");
    if (n < 1) throw ParseError("dimension must be >= 1", hl, hc);
    Matrix M(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      const Vec row = parse_row(cur, n);
      std::copy(row.begin(), row.end(),
                M.row(static_cast<std::size_t>(i)).begin());
    }
    cur.skip_space();
    if (!cur.eof())
      throw ParseError("trailing content after matrix", cur.line, cur.col);
    out.kind = InputKind::MatrixInput;
    out.matrix = std::move(M);
    return out;
  }
  if (kind == "family") {
    const long n = cur.integer("dimension");
    if (n < 1) throw ParseError("dimension must be >= 1", hl, hc);
    RowChoiceFamily F;
    F.n = static_cast<int>(n);
    F.rows.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      cur.skip_space();
      const int l = cur.line, c = cur.col;
      const std::string kw = cur.token();
      if (kw != "row") throw ParseError("expected 'row i: m' header", l, c);
      const long idx = cur.integer("row index");
      if (idx != i + 1)
        throw ParseError("row headers must be 'row 1' .. 'row N' in order",
                         l, c);
      cur.skip_space();
      if (cur.eof() || cur.text[cur.pos] != ':')
        throw ParseError("expected ':' in row header", cur.line, cur.col);
      cur.advance();
      const long m = cur.integer("choice count");
      if (m < 1) throw ParseError("each row needs at least one choice", l, c);
      for (long k = 0; k < m; ++k) {
        Vec row = parse_row(cur, n);
        auto& rs = F.rows[static_cast<std::size_t>(i)];
        if (std::find(rs.begin(), rs.end(), row) == rs.end())
          rs.push_back(std::move(row));
      }
    }
    cur.skip_space();
    if (!cur.eof())
      throw ParseError("trailing content after family", cur.line, cur.col);
    out.kind = InputKind::FamilyInput;
    out.family = std::move(F);
    return out;
  }
  throw ParseError("expected 'matrix N' or 'family N' header", hl, hc);
}

ParsedInput parse_json(const std::string& content) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("JSON: ") + e.what(), 1, 1);
  }
  const auto fail = [](const std::string& msg) -> ParseError {
    return ParseError("JSON: " + msg, 1, 1);
  };
  if (!j.is_object() || !j.contains("kind") || !j.contains("n") ||
      !j.contains("rows"))
    throw fail("expected object with kind, n, rows");
  const std::string kind = j["kind"].get<std::string>();
  const long n = j["n"].get<long>();
  if (n < 1) throw fail("n must be >= 1");

  const auto to_row = [&](const nlohmann::json& r) {
    if (!r.is_array() || static_cast<long>(r.size()) != n)
      throw fail("each row must hold exactly n numbers");
    Vec row;
    for (const auto& x : r) {
      if (!x.is_number()) throw fail("entries must be numbers");
      const double v = x.get<double>();
      if (!std::isfinite(v) || v < 0.0)
        throw fail("entries must be finite and nonnegative");
      row.push_back(v);
    }
    return row;
  };

  ParsedInput out;
  if (kind == "matrix") {
    if (static_cast<long>(j["rows"].size()) != n)
      throw fail("matrix needs n rows");
    Matrix M(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      const Vec row = to_row(j["rows"][static_cast<std::size_t>(i)]);
      std::copy(row.begin(), row.end(),
                M.row(static_cast<std::size_t>(i)).begin());
    }
    out.kind = InputKind::MatrixInput;
    out.matrix = std::move(M);
    return out;
  }
  if (kind == "family") {
    if (static_cast<long>(j["rows"].size()) != n)
      throw fail("family needs n row-choice lists");
    RowChoiceFamily F;
    F.n = static_cast<int>(n);
    F.rows.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      const auto& choices = j["rows"][static_cast<std::size_t>(i)];
      if (!choices.is_array() || choices.empty())
        throw fail("each row needs a nonempty choice list");
    for (const auto& ch : choices) {
        Vec row = to_row(ch);
        auto& rs = F.rows[static_cast<std::size_t>(i)];
        if (std::find(rs.begin(), rs.end(), row) == rs.end())
          rs.push_back(std::move(row));
      }
    }
    out.kind = InputKind::FamilyInput;
    out.family = std::move(F);
    return out;
  }
  throw fail("kind must be 'matrix' or 'family'");
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  for (int i = 15; i >= 0; --i) os << ((h >> (4 * i)) & 0xf);
  return os.str();
}

ParsedInput load_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file '" + path + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string content = ss.str();

  const bool json = path.size() >= 5 &&
                    path.compare(path.size() - 5, 5, ".json") == 0;
  ParsedInput out = json ? parse_json(content) : parse_text(content);
  out.digest = fnv1a_hex(content);
  return out;
}

}  // namespace matgrowth
