#include "superint/sysfile.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "superint/builtins.hpp"
#include "superint/error.hpp"

namespace superint {

namespace {

struct Value {
  enum class Kind { String, Number, Bool, Array } kind = Kind::String;
  std::string str;
  double num = 0.0;
  bool flag = false;
  std::vector<Value> items;
  std::size_t line = 0;
  std::size_t col = 0;
};

struct Entry {
  std::string key;
  Value value;
  std::size_t line = 0;
  std::size_t col = 0;
};

struct Table {
  std::string name;
  bool array_item = false;
  std::size_t line = 0;
  std::vector<Entry> entries;

  const Entry* find(const std::string& k) const {
    for (const auto& e : entries)
      if (e.key == k) return &e;
    return nullptr;
  }
};

class Reader {
 public:
  Reader(const std::string& text, std::string origin) : s_(text), origin_(std::move(origin)) {}

  std::vector<Table> read() {
    std::vector<Table> tables;
    tables.push_back(Table{"", false, 1, {}});
    std::set<std::string> seen_tables;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        const std::size_t line = line_;
        const std::size_t col = col_;
        bool array = false;
        advance();
        if (peek() == '[') {
          array = true;
          advance();
        }
        skip_inline_ws();
        std::string name = bare_key();
        skip_inline_ws();
        expect(']');
        if (array) expect(']');
        end_of_line();
        if (!array && !seen_tables.insert(name).second) {
          fail("duplicate table [" + name + "]", line, col);
        }
        tables.push_back(Table{name, array, line, {}});
        continue;
      }
      Entry e;
      e.line = line_;
      e.col = col_;
      e.key = key();
      skip_inline_ws();
      expect('=');
      skip_inline_ws();
      e.value = value();
      end_of_line();
      if (tables.back().find(e.key)) fail("duplicate key '" + e.key + "'", e.line, e.col);
      tables.back().entries.push_back(std::move(e));
    }
    return tables;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t line, std::size_t col) const {
    throw ParseError(origin_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg,
                     line, col, pos_);
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void expect(char c) {
    if (peek() != c) {
      fail(std::string("expected '") + c + "'" + (eof() ? " before end of input" : ""), line_, col_);
    }
    advance();
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') advance();
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_inline_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  // Whitespace, newlines and comments inside arrays.
  void skip_array_ws() {
    while (!eof()) {
      skip_inline_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (peek() == '\r') advance();
    if (!eof() && peek() != '\n') fail("unexpected text after value", line_, col_);
  }

  static bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string bare_key() {
    std::string k;
    while (!eof() && bare_char(peek())) {
      k += peek();
      advance();
    }
    if (k.empty()) fail("expected a key", line_, col_);
    return k;
  }

  std::string key() {
    if (peek() == '"' || peek() == '\'') return string_literal();
    return bare_key();
  }

  std::string string_literal() {
    const char quote = peek();
    const std::size_t line = line_;
    const std::size_t col = col_;
    advance();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string", line, col);
      char c = peek();
      advance();
      if (c == quote) break;
      if (c == '\\' && quote == '"') {
        if (eof()) fail("unterminated string", line, col);
        const char e = peek();
        advance();
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unsupported escape '\\") + e + "'", line_, col_ - 1);
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  Value value() {
    Value v;
    v.line = line_;
    v.col = col_;
    const char c = peek();
    if (c == '"' || c == '\'') {
      v.kind = Value::Kind::String;
      v.str = string_literal();
      return v;
    }
    if (c == '[') {
      v.kind = Value::Kind::Array;
      advance();
      skip_array_ws();
      while (peek() != ']') {
        v.items.push_back(value());
        skip_array_ws();
        if (peek() == ',') {
          advance();
          skip_array_ws();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array", line_, col_);
        }
      }
      advance();
      return v;
    }
    std::string tok;
    while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+')) {
      tok += peek();
      advance();
    }
    if (tok == "true" || tok == "false") {
      v.kind = Value::Kind::Bool;
      v.flag = tok == "true";
      return v;
    }
    v.kind = Value::Kind::Number;
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    if (!tok.empty() && *b == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, v.num);
    if (tok.empty() || ec != std::errc() || ptr != e) fail("expected a value", v.line, v.col);
    return v;
  }

  const std::string& s_;
  std::string origin_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Builder {
 public:
  explicit Builder(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& msg, std::size_t line, std::size_t col) const {
    throw ValidationError(origin_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }

  [[noreturn]] void fail(const std::string& msg, const Value& v) const { fail(msg, v.line, v.col); }

  const std::string& string(const Entry& e) const {
    if (e.value.kind != Value::Kind::String) fail("'" + e.key + "' must be a string", e.value);
    return e.value.str;
  }

  double number(const Entry& e) const {
    if (e.value.kind != Value::Kind::Number) fail("'" + e.key + "' must be a number", e.value);
    return e.value.num;
  }

  std::vector<const Value*> array(const Entry& e, Value::Kind kind) const {
    if (e.value.kind != Value::Kind::Array) fail("'" + e.key + "' must be an array", e.value);
    std::vector<const Value*> out;
    for (const auto& it : e.value.items) {
      if (it.kind != kind) {
        fail("'" + e.key + "' must contain only " +
                 (kind == Value::Kind::String ? std::string("strings") : std::string("numbers")),
             it);
      }
      out.push_back(&it);
    }
    return out;
  }

  // Expressions are located at the opening quote of their string value.
  Expr expression(const Value& v, const std::string& what, const std::vector<std::string>& coords,
                  const std::vector<std::string>& params = {}) const {
    try {
      return validate(parse(v.str), coords, params);
    } catch (const ParseError& pe) {
      const std::size_t col = v.col + 1 + pe.offset();
      throw ParseError(origin_ + ":" + std::to_string(v.line) + ":" + std::to_string(col) + ": " + what +
                           ": " + pe.what(),
                       v.line, col, pe.offset());
    } catch (const ValidationError& ve) {
      fail(what + ": " + ve.what(), v);
    }
  }

  // "1".."n" or a coordinate name.
  std::optional<std::size_t> index_of(const std::string& tok, const std::vector<std::string>& coords) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i] == tok) return i;
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), k);
    if (ec == std::errc() && ptr == tok.data() + tok.size() && k >= 1 && k <= coords.size()) return k - 1;
    return std::nullopt;
  }

  // "g_i_j", or "gij" with single-digit indices.
  std::optional<std::pair<std::size_t, std::size_t>> component(const std::string& key, char prefix,
                                                               const std::vector<std::string>& coords) const {
    if (key.size() < 3 || key[0] != prefix) return std::nullopt;
    if (key[1] == '_') {
      const std::string rest = key.substr(2);
      const auto us = rest.find('_');
      if (us == std::string::npos) return std::nullopt;
      auto i = index_of(rest.substr(0, us), coords);
      auto j = index_of(rest.substr(us + 1), coords);
      if (!i || !j) return std::nullopt;
      return std::pair{*i, *j};
    }
    if (key.size() == 3) {
      auto i = index_of(key.substr(1, 1), coords);
      auto j = index_of(key.substr(2, 1), coords);
      if (!i || !j) return std::nullopt;
      return std::pair{*i, *j};
    }
    return std::nullopt;
  }

  // Upper-triangle matrix of expressions with the given diagonal default.
  std::vector<Expr> matrix(const Table& t, char prefix, const std::string& diag_default,
                           const std::vector<std::string>& coords, const std::set<std::string>& skip) const {
    const std::size_t n = coords.size();
    std::vector<std::optional<Expr>> cells(n * n);
    for (const auto& e : t.entries) {
      if (skip.count(e.key)) continue;
      auto ij = component(e.key, prefix, coords);
      if (!ij) fail("unknown key '" + e.key + "' in [" + t.name + "]", e.line, e.col);
      auto [i, j] = *ij;
      if (i > j) std::swap(i, j);
      if (cells[i * n + j]) fail("component " + e.key + " given twice", e.line, e.col);
      if (e.value.kind != Value::Kind::String) fail("'" + e.key + "' must be a string expression", e.value);
      cells[i * n + j] = expression(e.value, "[" + t.name + "] " + e.key, coords);
    }
    std::vector<Expr> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        Expr e = cells[i * n + j] ? *cells[i * n + j]
                                  : validate(parse(i == j ? diag_default : "0"), coords, {});
        out[i * n + j] = e;
        out[j * n + i] = e;
      }
    return out;
  }

  SystemDef build(const std::vector<Table>& tables) const {
    const Table* system = nullptr;
    const Table* metric = nullptr;
    const Table* potential = nullptr;
    const Table* domain = nullptr;
    const Table* tolerances = nullptr;
    std::vector<const Table*> killing;
    for (const auto& t : tables) {
      if (t.name.empty()) {
        if (!t.entries.empty()) fail("key outside of any section", t.entries[0].line, t.entries[0].col);
        continue;
      }
      if (t.array_item) {
        if (t.name != "killing") fail("unknown array section [[" + t.name + "]]", t.line, 1);
        killing.push_back(&t);
        continue;
      }
      if (t.name == "system") system = &t;
      else if (t.name == "metric") metric = &t;
      else if (t.name == "potential") potential = &t;
      else if (t.name == "domain") domain = &t;
      else if (t.name == "tolerances") tolerances = &t;
      else fail("unknown section [" + t.name + "]", t.line, 1);
    }
    if (!system) fail("missing [system] section", 1, 1);
    if (!domain) fail("missing [domain] section", 1, 1);

    SystemDef sys;
    for (const auto& e : system->entries) {
      if (e.key != "name" && e.key != "dimension" && e.key != "coordinates") {
        fail("unknown key '" + e.key + "' in [system]", e.line, e.col);
      }
    }
    const Entry* name = system->find("name");
    const Entry* dim = system->find("dimension");
    const Entry* coords = system->find("coordinates");
    if (!dim) fail("[system] needs 'dimension'", system->line, 1);
    if (!coords) fail("[system] needs 'coordinates'", system->line, 1);
    sys.name = name ? string(*name) : origin_;
    const double d = number(*dim);
    if (d != static_cast<double>(static_cast<long>(d)) || d < 1) fail("dimension must be a positive integer", dim->value);
    sys.n = static_cast<std::size_t>(d);
    if (sys.n < 3) {
      fail("dimension " + std::to_string(sys.n) + " not supported, n >= 3 is required", dim->value);
    }
    std::set<std::string> distinct;
    for (const Value* v : array(*coords, Value::Kind::String)) {
      if (!distinct.insert(v->str).second) fail("coordinate '" + v->str + "' listed twice", *v);
      sys.coords.push_back(v->str);
    }
    if (sys.coords.size() != sys.n) {
      fail("dimension is " + std::to_string(sys.n) + " but " + std::to_string(sys.coords.size()) +
               " coordinates are listed",
           coords->value);
    }

    if (metric) {
      sys.metric = matrix(*metric, 'g', "1", sys.coords, {});
    } else {
      const Table empty{"metric", false, 0, {}};
      sys.metric = matrix(empty, 'g', "1", sys.coords, {});
    }

    if (potential) {
      const Entry* basis = potential->find("basis");
      const Entry* pot = potential->find("potential");
      const Entry* params = potential->find("params");
      for (const auto& e : potential->entries)
        if (e.key != "basis" && e.key != "potential" && e.key != "params")
          fail("unknown key '" + e.key + "' in [potential]", e.line, e.col);
      if (basis && (pot || params)) fail("give either 'basis' or 'potential' with 'params'", potential->line, 1);
      if (basis) {
        for (const Value* v : array(*basis, Value::Kind::String)) {
          sys.basis.push_back(expression(*v, "basis element", sys.coords));
          sys.basis_labels.push_back(v->str);
        }
      } else if (pot) {
        if (!params) fail("'potential' needs 'params'", pot->line, pot->col);
        std::vector<std::string> ps;
        for (const Value* v : array(*params, Value::Kind::String)) ps.push_back(v->str);
        const Expr full = expression(pot->value, "potential", sys.coords, ps);
        try {
          sys.basis = extract_basis(full, ps);
        } catch (const ValidationError& ve) {
          fail(std::string("potential: ") + ve.what(), pot->value);
        }
        for (const auto& b : sys.basis) sys.basis_labels.push_back(print(b));
      }
    }

    sys.domain.assign(sys.n, Interval{});
    std::vector<bool> have(sys.n, false);
    for (const auto& e : domain->entries) {
      if (e.key == "excluded") {
        for (const Value* v : array(e, Value::Kind::String))
          sys.excluded.push_back(expression(*v, "excluded expression", sys.coords));
        continue;
      }
      auto idx = index_of(e.key, sys.coords);
      if (!idx) fail("unknown key '" + e.key + "' in [domain]", e.line, e.col);
      const auto vals = array(e, Value::Kind::Number);
      if (vals.size() != 2) fail("domain of '" + e.key + "' must be [min, max]", e.value);
      if (!(vals[0]->num < vals[1]->num)) fail("domain interval of '" + e.key + "' is empty", e.value);
      sys.domain[*idx] = Interval{vals[0]->num, vals[1]->num};
      have[*idx] = true;
    }
    for (std::size_t i = 0; i < sys.n; ++i)
      if (!have[i]) fail("[domain] has no interval for coordinate '" + sys.coords[i] + "'", domain->line, 1);

    for (const Table* t : killing) {
      KillingDecl K;
      const Entry* kind = t->find("kind");
      const Entry* label = t->find("label");
      if (!kind) fail("[[killing]] needs 'kind'", t->line, 1);
      const std::string& ks = string(*kind);
      if (ks == "proper") K.kind = KillingKind::Proper;
      else if (ks == "conformal") K.kind = KillingKind::Conformal;
      else fail("kind must be \"proper\" or \"conformal\"", kind->value);
      K.label = label ? string(*label) : "K" + std::to_string(sys.killing.size() + 1);
      K.entries = matrix(*t, 'K', "0", sys.coords, {"kind", "label"});
      sys.killing.push_back(std::move(K));
    }

    if (tolerances) {
      for (const auto& e : tolerances->entries) {
        try {
          sys.tolerances.set(e.key, number(e));
        } catch (const ValidationError& ve) {
          fail(ve.what(), e.value);
        }
      }
    }

    try {
      validate_system(sys);
    } catch (const ValidationError& ve) {
      fail(ve.what(), system->line, 1);
    }
    return sys;
  }

 private:
  std::string origin_;
};

bool is_builtin_name(const std::string& ref) {
  return ref.rfind("sw:", 0) == 0 || ref == "em1" || ref == "em2" || ref == "em3" ||
         ref == "osc-trivial" || ref == "sphere3";
}

}  // namespace

SystemDef parse_system_text(const std::string& text, const std::string& origin) {
  Reader reader(text, origin);
  return Builder(origin).build(reader.read());
}

SystemDef load_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open system file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_text(buf.str(), path);
}

SystemDef load_system(const std::string& ref) {
  if (is_builtin_name(ref)) return builtin_system(ref);
  return load_system_file(ref);
}

}  // namespace superint
