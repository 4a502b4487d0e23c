#include "superint/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "superint/error.hpp"

namespace superint {

namespace {

const std::string& empty_source() {
  static const std::string empty;
  return empty;
}

NodePtr make_number(double v, Span span = {}) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Number;
  n->number = v;
  n->span = span;
  return n;
}

NodePtr make_unary(NodeKind kind, NodePtr child, Span span = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->span = span;
  n->children = {std::move(child)};
  return n;
}

NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs, Span span = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->span = span;
  n->children = {std::move(lhs), std::move(rhs)};
  return n;
}

std::optional<Primitive> function_by_name(const std::string& name) {
  if (name == "sqrt") return Primitive::Sqrt;
  if (name == "exp") return Primitive::Exp;
  if (name == "log") return Primitive::Log;
  if (name == "sin") return Primitive::Sin;
  if (name == "cos") return Primitive::Cos;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'",
                                   "operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what, const std::string& expected) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "syntax error at " << line << ":" << col << " (offset " << pos_ << "): " << what
       << "; expected " << expected;
    throw ParseError(os.str(), line, col, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  NodePtr parse_expr() {
    skip_ws();
    const std::size_t start = pos_;
    NodePtr lhs = parse_term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        NodePtr rhs = parse_term();
        lhs = make_binary(NodeKind::Add, lhs, rhs, {start, pos_});
      } else if (peek('-')) {
        ++pos_;
        NodePtr rhs = parse_term();
        lhs = make_binary(NodeKind::Sub, lhs, rhs, {start, pos_});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    skip_ws();
    const std::size_t start = pos_;
    NodePtr lhs = parse_unary();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        NodePtr rhs = parse_unary();
        lhs = make_binary(NodeKind::Mul, lhs, rhs, {start, pos_});
      } else if (peek('/')) {
        ++pos_;
        NodePtr rhs = parse_unary();
        lhs = make_binary(NodeKind::Div, lhs, rhs, {start, pos_});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    const std::size_t start = pos_;
    if (peek('-')) {
      ++pos_;
      NodePtr child = parse_unary();
      return make_unary(NodeKind::Neg, child, {start, pos_});
    }
    if (peek('+')) {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  NodePtr parse_power() {
    skip_ws();
    const std::size_t start = pos_;
    NodePtr base = parse_atom();
    if (!peek('^')) return base;
    ++pos_;
    skip_ws();
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
      skip_ws();
    }
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("exponent must be an integer literal", "integer literal");
    }
    const std::size_t digits_start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail("exponent must be an integer literal", "integer literal");
    }
    const std::string digits = text_.substr(digits_start, pos_ - digits_start);
    if (digits.size() > 6) fail("exponent too large", "integer literal below 10^6");
    int e = std::stoi(digits);
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Pow;
    n->exponent = negative ? -e : e;
    n->span = {start, pos_};
    n->children = {base};
    if (peek('^')) fail("chained exponent", "parenthesized base");
    return n;
  }

  NodePtr parse_atom() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) fail("unexpected end of input", "number, identifier or '('");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!peek(')')) fail(pos_ >= text_.size() ? "unexpected end of input" : "unbalanced '('",
                           "')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string name = text_.substr(start, pos_ - start);
      if (peek('(')) {
        auto fn = function_by_name(name);
        if (!fn) {
          pos_ = start;
          fail("unknown function '" + name + "'", "one of sqrt, exp, log, sin, cos");
        }
        ++pos_;
        NodePtr arg = parse_expr();
        if (!peek(')')) fail("unterminated call to " + name, "')'");
        ++pos_;
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Call;
        n->function = *fn;
        n->span = {start, pos_};
        n->children = {arg};
        return n;
      }
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Symbol;
      n->name = std::move(name);
      n->span = {start, pos_};
      return n;
    }
    fail("unexpected character '" + std::string(1, c) + "'", "number, identifier or '('");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t k = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++k;
      }
      return k;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail("malformed number", "digits");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent in number", "digits");
    }
    const std::string lit = text_.substr(start, pos_ - start);
    return make_number(std::strtod(lit.c_str(), nullptr), {start, pos_});
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

NodePtr resolve(const NodePtr& node, std::span<const std::string> coords,
                std::span<const std::string> params, std::set<std::string>& unknown) {
  auto copy = std::make_shared<Node>(*node);
  if (node->kind == NodeKind::Symbol) {
    auto c = std::find(coords.begin(), coords.end(), node->name);
    auto p = std::find(params.begin(), params.end(), node->name);
    if (c != coords.end()) {
      copy->symbol_class = SymbolClass::Coordinate;
      copy->index = static_cast<std::size_t>(c - coords.begin());
    } else if (p != params.end()) {
      copy->symbol_class = SymbolClass::Parameter;
      copy->index = static_cast<std::size_t>(p - params.begin());
    } else {
      unknown.insert(node->name);
    }
    return copy;
  }
  for (auto& child : copy->children) child = resolve(child, coords, params, unknown);
  return copy;
}

// ---------------------------------------------------------------------------
// Linear decomposition in the parameters
// ---------------------------------------------------------------------------

struct LinearForm {
  NodePtr constant;               // parameter-free part, null when absent
  std::vector<NodePtr> coeffs;    // per parameter, null when zero
  bool has_params() const {
    return std::any_of(coeffs.begin(), coeffs.end(), [](const NodePtr& p) { return p != nullptr; });
  }
};

bool is_number(const NodePtr& p, double v) { return p && p->kind == NodeKind::Number && p->number == v; }

NodePtr mul_nodes(const NodePtr& a, const NodePtr& b) {
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  return make_binary(NodeKind::Mul, a, b);
}

NodePtr combine(NodeKind kind, const NodePtr& a, const NodePtr& b) {
  if (!a && !b) return nullptr;
  if (!b) return a;
  if (!a) return kind == NodeKind::Add ? b : make_unary(NodeKind::Neg, b);
  return make_binary(kind, a, b);
}

class LinearDecomposer {
 public:
  LinearDecomposer(const Expr& e, std::size_t nparams) : expr_(e), nparams_(nparams) {}

  LinearForm run(const NodePtr& node) {
    LinearForm f;
    f.coeffs.assign(nparams_, nullptr);
    switch (node->kind) {
      case NodeKind::Number:
        f.constant = node;
        return f;
      case NodeKind::Symbol:
        if (node->symbol_class == SymbolClass::Parameter) {
          f.coeffs[node->index] = make_number(1.0);
        } else {
          f.constant = node;
        }
        return f;
      case NodeKind::Neg: {
        LinearForm c = run(node->children[0]);
        if (c.constant) c.constant = make_unary(NodeKind::Neg, c.constant);
        for (auto& k : c.coeffs)
          if (k) k = make_unary(NodeKind::Neg, k);
        return c;
      }
      case NodeKind::Add:
      case NodeKind::Sub: {
        LinearForm a = run(node->children[0]);
        LinearForm b = run(node->children[1]);
        f.constant = combine(node->kind, a.constant, b.constant);
        for (std::size_t k = 0; k < nparams_; ++k) f.coeffs[k] = combine(node->kind, a.coeffs[k], b.coeffs[k]);
        return f;
      }
      case NodeKind::Mul: {
        LinearForm a = run(node->children[0]);
        LinearForm b = run(node->children[1]);
        if (a.has_params() && b.has_params()) nonlinear(*node, "product of parameter-dependent factors");
        const bool left_free = !a.has_params();
        const NodePtr& factor = left_free ? node->children[0] : node->children[1];
        LinearForm& other = left_free ? b : a;
        if (other.constant) f.constant = left_free ? mul_nodes(factor, other.constant) : mul_nodes(other.constant, factor);
        for (std::size_t k = 0; k < nparams_; ++k) {
          if (other.coeffs[k]) f.coeffs[k] = left_free ? mul_nodes(factor, other.coeffs[k]) : mul_nodes(other.coeffs[k], factor);
        }
        return f;
      }
      case NodeKind::Div: {
        LinearForm a = run(node->children[0]);
        LinearForm b = run(node->children[1]);
        if (b.has_params()) nonlinear(*node, "parameter in a denominator");
        const NodePtr& den = node->children[1];
        if (a.constant) f.constant = make_binary(NodeKind::Div, a.constant, den);
        for (std::size_t k = 0; k < nparams_; ++k)
          if (a.coeffs[k]) f.coeffs[k] = make_binary(NodeKind::Div, a.coeffs[k], den);
        return f;
      }
      case NodeKind::Pow:
      case NodeKind::Call: {
        LinearForm a = run(node->children[0]);
        if (a.has_params()) {
          nonlinear(*node, node->kind == NodeKind::Pow ? "parameter inside a power"
                                                       : "parameter inside a function call");
        }
        f.constant = node;
        return f;
      }
    }
    return f;
  }

 private:
  [[noreturn]] void nonlinear(const Node& node, const std::string& why) const {
    throw ValidationError("potential is not linear in its parameters (" + why + "): '" +
                          expr_.excerpt(node) + "'");
  }

  const Expr& expr_;
  std::size_t nparams_;
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

std::string format_point(std::span<const double> point) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t i = 0; i < point.size(); ++i) os << (i ? ", " : "") << point[i];
  os << ")";
  return os.str();
}

template <typename Scalar, typename Leaf>
Scalar evaluate(const Expr& e, const Node& node, std::span<const double> point,
                std::span<const double> params, const Leaf& leaf) {
  auto sub = [&](std::size_t i) {
    return evaluate<Scalar>(e, *node.children[i], point, params, leaf);
  };
  try {
    switch (node.kind) {
      case NodeKind::Number:
      case NodeKind::Symbol:
        return leaf(node);
      case NodeKind::Neg:
        return -sub(0);
      case NodeKind::Add:
        return sub(0) + sub(1);
      case NodeKind::Sub:
        return sub(0) - sub(1);
      case NodeKind::Mul:
        return sub(0) * sub(1);
      case NodeKind::Div: {
        Scalar den = sub(1);
        Scalar num = sub(0);
        if constexpr (std::is_same_v<Scalar, double>) {
          if (den == 0.0) throw DomainError("domain error: division by zero");
        }
        return num / den;
      }
      case NodeKind::Pow: {
        Scalar base = sub(0);
        if constexpr (std::is_same_v<Scalar, double>) {
          if (node.exponent < 0 && base == 0.0) throw DomainError("domain error: pow at value 0");
          return std::pow(base, node.exponent);
        } else {
          return pow(base, node.exponent);
        }
      }
      case NodeKind::Call: {
        Scalar arg = sub(0);
        if constexpr (std::is_same_v<Scalar, double>) {
          switch (node.function) {
            case Primitive::Sqrt:
              if (!(arg > 0.0)) throw DomainError("domain error: sqrt at value " + std::to_string(arg));
              return std::sqrt(arg);
            case Primitive::Log:
              if (!(arg > 0.0)) throw DomainError("domain error: log at value " + std::to_string(arg));
              return std::log(arg);
            case Primitive::Exp: return std::exp(arg);
            case Primitive::Sin: return std::sin(arg);
            case Primitive::Cos: return std::cos(arg);
            default: break;
          }
          throw DomainError("unsupported call");
        } else {
          return apply(node.function, arg);
        }
      }
    }
  } catch (const DomainError& err) {
    const std::string msg = err.what();
    if (msg.find(" in '") != std::string::npos) throw;
    throw DomainError(msg + " in '" + e.excerpt(node) + "' at point " + format_point(point));
  }
  throw Error("evaluate: corrupt expression node");
}

void require_validated(const Expr& e, std::span<const double> params) {
  if (!e.validated()) throw ValidationError("expression must be validated before evaluation");
  (void)params;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const Node& n, std::ostringstream& os) {
  auto child = [&](const Node& c, int min_prec) {
    if (precedence(c) < min_prec) {
      os << "(";
      print_node(c, os);
      os << ")";
    } else {
      print_node(c, os);
    }
  };
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      os << buf;
      return;
    }
    case NodeKind::Symbol:
      os << n.name;
      return;
    case NodeKind::Neg:
      os << "-";
      child(*n.children[0], 4);
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
      child(*n.children[0], 1);
      os << (n.kind == NodeKind::Add ? " + " : " - ");
      child(*n.children[1], 2);
      return;
    case NodeKind::Mul:
    case NodeKind::Div:
      child(*n.children[0], 2);
      os << (n.kind == NodeKind::Mul ? "*" : "/");
      child(*n.children[1], 3);
      return;
    case NodeKind::Pow:
      child(*n.children[0], 5);
      os << "^" << n.exponent;
      return;
    case NodeKind::Call:
      os << primitive_name(n.function) << "(";
      print_node(*n.children[0], os);
      os << ")";
      return;
  }
}

}  // namespace

const std::string& Expr::source() const { return source_ ? *source_ : empty_source(); }

std::string Expr::excerpt(const Node& node) const {
  const std::string& src = source();
  if (node.span.end > node.span.begin && node.span.end <= src.size()) {
    return src.substr(node.span.begin, node.span.end - node.span.begin);
  }
  return print(node);
}

Expr parse(const std::string& text) {
  auto source = std::make_shared<const std::string>(text);
  Parser p(*source);
  return Expr(p.parse_all(), source);
}

Expr validate(const Expr& e, std::span<const std::string> coords,
              std::span<const std::string> params) {
  for (const auto& c : coords) {
    if (std::find(params.begin(), params.end(), c) != params.end()) {
      throw ValidationError("identifier '" + c + "' declared both as coordinate and parameter");
    }
  }
  std::set<std::string> unknown;
  NodePtr root = resolve(e.root_ptr(), coords, params, unknown);
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    throw ValidationError("unknown identifier(s) in '" + e.source() + "': " + list);
  }
  return Expr(root, std::make_shared<const std::string>(e.source()), true);
}

std::vector<Expr> extract_basis(const Expr& e, std::span<const std::string> params) {
  if (!e.validated()) throw ValidationError("extract_basis requires a validated expression");
  LinearDecomposer dec(e, params.size());
  LinearForm form = dec.run(e.root_ptr());
  if (form.constant && !is_number(form.constant, 0.0)) {
    throw ValidationError("potential has a parameter-free term '" + print(*form.constant) +
                          "'; every term must carry exactly one parameter");
  }
  std::vector<Expr> out;
  out.reserve(params.size());
  for (auto& c : form.coeffs) {
    NodePtr node = c ? c : make_number(0.0);
    // Printing and reparsing gives each coefficient its own source text.
    Expr standalone = parse(print(*node));
    std::vector<std::string> coords;
    std::set<std::string> seen;
    std::function<void(const Node&)> collect = [&](const Node& n) {
      if (n.kind == NodeKind::Symbol && n.symbol_class == SymbolClass::Coordinate && seen.insert(n.name).second) {
        coords.resize(std::max(coords.size(), n.index + 1));
        coords[n.index] = n.name;
      }
      for (auto& ch : n.children) collect(*ch);
    };
    collect(*e.root_ptr());
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i].empty()) coords[i] = "__unused" + std::to_string(i);
    out.push_back(validate(standalone, coords, {}));
  }
  return out;
}

Jet3 eval_jet(const Expr& e, std::span<const double> point, std::span<const double> params) {
  require_validated(e, params);
  const std::size_t n = point.size();
  auto leaf = [&](const Node& node) -> Jet3 {
    if (node.kind == NodeKind::Number) return Jet3::constant(node.number, n);
    if (node.symbol_class == SymbolClass::Coordinate) {
      if (node.index >= n) throw ValidationError("coordinate '" + node.name + "' outside point dimension");
      return Jet3::seed(node.index, point[node.index], n);
    }
    if (node.index >= params.size()) {
      throw ValidationError("no value supplied for parameter '" + node.name + "'");
    }
    return Jet3::constant(params[node.index], n);
  };
  return evaluate<Jet3>(e, e.root(), point, params, leaf);
}

double eval_value(const Expr& e, std::span<const double> point, std::span<const double> params) {
  require_validated(e, params);
  auto leaf = [&](const Node& node) -> double {
    if (node.kind == NodeKind::Number) return node.number;
    if (node.symbol_class == SymbolClass::Coordinate) {
      if (node.index >= point.size()) throw ValidationError("coordinate '" + node.name + "' outside point dimension");
      return point[node.index];
    }
    if (node.index >= params.size()) {
      throw ValidationError("no value supplied for parameter '" + node.name + "'");
    }
    return params[node.index];
  };
  return evaluate<double>(e, e.root(), point, params, leaf);
}

std::string print(const Node& node) {
  std::ostringstream os;
  print_node(node, os);
  return os.str();
}

std::string print(const Expr& e) { return print(e.root()); }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case NodeKind::Number:
      if (a.number != b.number) return false;
      break;
    case NodeKind::Symbol:
      if (a.name != b.name) return false;
      break;
    case NodeKind::Pow:
      if (a.exponent != b.exponent) return false;
      break;
    case NodeKind::Call:
      if (a.function != b.function) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

Expr number_expr(double v) {
  return Expr(make_number(v), std::make_shared<const std::string>(), true);
}

}  // namespace superint
