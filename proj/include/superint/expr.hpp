#pragma once

// Scalar expression language used to declare metrics, potentials and Killing
// tensors.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('-' | '+') unary | power
//   power  := atom ('^' ['-'] INTEGER)?
//   atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//
// Exponents are integer literals only; fractional powers go through sqrt.
// Callable primitives: sqrt, exp, log, sin, cos.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "superint/jet.hpp"

namespace superint {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class NodeKind { Number, Symbol, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class SymbolClass { Unresolved, Coordinate, Parameter };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Number;
  Span span;
  double number = 0.0;             // Number
  std::string name;                // Symbol
  SymbolClass symbol_class = SymbolClass::Unresolved;
  std::size_t index = 0;           // coordinate or parameter slot after validation
  int exponent = 0;                // Pow
  Primitive function = Primitive::Sqrt;  // Call
  std::vector<NodePtr> children;
};

/// Immutable expression tree plus the source text its spans refer to.
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, std::shared_ptr<const std::string> source, bool validated = false)
      : root_(std::move(root)), source_(std::move(source)), validated_(validated) {}

  const Node& root() const { return *root_; }
  NodePtr root_ptr() const { return root_; }
  const std::string& source() const;
  bool validated() const noexcept { return validated_; }
  /// Source text covered by a span, or a printed form for synthesized nodes.
  std::string excerpt(const Node& node) const;

 private:
  NodePtr root_;
  std::shared_ptr<const std::string> source_;
  bool validated_ = false;
};

Expr parse(const std::string& text);

/// Resolve every identifier as a coordinate or a parameter.
Expr validate(const Expr& e, std::span<const std::string> coords,
              std::span<const std::string> params);

/// Coefficient functions of a parameter-linear expression, one per parameter,
/// in the order of `params`. The result trees are parameter free.
std::vector<Expr> extract_basis(const Expr& e, std::span<const std::string> params);

/// Jet of a validated expression at `point`, coordinates seeded as
/// independent directions. `param_values` is required only when the
/// expression references parameters.
Jet3 eval_jet(const Expr& e, std::span<const double> point,
              std::span<const double> param_values = {});

/// Plain value of a validated expression.
double eval_value(const Expr& e, std::span<const double> point,
                  std::span<const double> param_values = {});

/// Re-parseable text form; parse(print(e)) is structurally equal to e.
std::string print(const Expr& e);
std::string print(const Node& node);

/// Structural equality, ignoring spans and symbol classification.
bool structurally_equal(const Node& a, const Node& b);

/// Expression helpers for building trees programmatically.
Expr number_expr(double v);

}  // namespace superint
