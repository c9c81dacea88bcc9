#pragma once

#include "expr/expr.hpp"

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace emalg::dsl {

enum class NodeKind {
  Sum,
  Product,
  ScalarMul,
  Comm,
  Integral,
  SumOver,
  Scalar,
  Epsilon,
  Kronecker,
  Coord,
  Delta,
  Field,
  Named,
};

struct DerivRef {
  std::string point;
  Index idx;
  friend bool operator==(const DerivRef&, const DerivRef&) = default;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Surface syntax tree.  Immutable once built; subtrees are shared freely.
struct Node {
  NodeKind kind = NodeKind::Sum;
  std::vector<NodePtr> children;
  Coefficient scalar;               // Scalar, ScalarMul
  std::string binder;               // Integral point, SumOver index
  std::vector<Index> indices;       // Epsilon, Kronecker, Coord, Field, Named
  std::vector<std::string> points;  // Coord, Delta (p, q), Field
  std::vector<DerivRef> derivs;     // Delta, Field
  FieldKind field = FieldKind::E;
  char named = 'P';                 // 'P' momentum, 'J' angular momentum
  std::size_t offset = 0;           // byte offset in the source text
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Lexical, UnboundName, Arity };
  ParseError(Kind kind, std::size_t offset, const std::string& what)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

// --- construction ------------------------------------------------------------

NodePtr sum(std::vector<NodePtr> children);
NodePtr product(std::vector<NodePtr> children);
NodePtr scalar_mul(const Coefficient& c, NodePtr child);
NodePtr comm(NodePtr a, NodePtr b);
NodePtr integral(const std::string& point, NodePtr child);
NodePtr sum_over(const std::string& index, NodePtr child);
NodePtr scalar(const Coefficient& c);
NodePtr epsilon(Index a, Index b, Index c);
NodePtr kronecker(Index a, Index b);
NodePtr coord(const std::string& point, Index idx);
NodePtr delta(const std::string& p, const std::string& q, std::vector<DerivRef> derivs = {});
NodePtr field(FieldKind kind, Index idx, const std::string& point, std::vector<DerivRef> derivs = {});
NodePtr named(char which, Index idx);

[[nodiscard]] bool is_field(const Node& n);
[[nodiscard]] bool is_leaf(const Node& n);
[[nodiscard]] bool contains_kind(const Node& n, NodeKind kind);

/// Structural equality (ignores source offsets).
bool same_tree(const Node& a, const Node& b);

// --- text --------------------------------------------------------------------

NodePtr parse(const std::string& text);
std::string print(const Node& n);

/// Lower a commutator-free, named-operator-free tree to the expression IR.
Expr lower(const Node& n);
inline Expr parse_expr(const std::string& text) { return lower(*parse(text)); }

/// Deterministic text of the canonical form; "0" for the empty expression.
std::string print_canonical(const Expr& e);
inline std::string print_canonical(const Node& n) { return print(n); }

std::string emit_latex(const Expr& e);
std::string emit_latex(const Node& n);

}  // namespace emalg::dsl
