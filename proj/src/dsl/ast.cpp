#include "dsl/ast.hpp"

namespace emalg::dsl {

namespace {

std::shared_ptr<Node> make(NodeKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

}  // namespace

NodePtr sum(std::vector<NodePtr> children) {
  auto n = make(NodeKind::Sum);
  n->children = std::move(children);
  return n;
}

NodePtr product(std::vector<NodePtr> children) {
  auto n = make(NodeKind::Product);
  for (auto& c : children) {
    if (c->kind == NodeKind::Product) {
      n->children.insert(n->children.end(), c->children.begin(), c->children.end());
    } else {
      n->children.push_back(std::move(c));
    }
  }
  return n;
}

NodePtr scalar_mul(const Coefficient& c, NodePtr child) {
  auto n = make(NodeKind::ScalarMul);
  n->scalar = c;
  n->children = {std::move(child)};
  return n;
}

NodePtr comm(NodePtr a, NodePtr b) {
  auto n = make(NodeKind::Comm);
  n->children = {std::move(a), std::move(b)};
  return n;
}

NodePtr integral(const std::string& point, NodePtr child) {
  auto n = make(NodeKind::Integral);
  n->binder = point;
  n->children = {std::move(child)};
  return n;
}

NodePtr sum_over(const std::string& index, NodePtr child) {
  auto n = make(NodeKind::SumOver);
  n->binder = index;
  n->children = {std::move(child)};
  return n;
}

NodePtr scalar(const Coefficient& c) {
  auto n = make(NodeKind::Scalar);
  n->scalar = c;
  return n;
}

NodePtr epsilon(Index a, Index b, Index c) {
  auto n = make(NodeKind::Epsilon);
  n->indices = {std::move(a), std::move(b), std::move(c)};
  return n;
}

NodePtr kronecker(Index a, Index b) {
  auto n = make(NodeKind::Kronecker);
  n->indices = {std::move(a), std::move(b)};
  return n;
}

NodePtr coord(const std::string& point, Index idx) {
  auto n = make(NodeKind::Coord);
  n->points = {point};
  n->indices = {std::move(idx)};
  return n;
}

NodePtr delta(const std::string& p, const std::string& q, std::vector<DerivRef> derivs) {
  auto n = make(NodeKind::Delta);
  n->points = {p, q};
  n->derivs = std::move(derivs);
  return n;
}

NodePtr field(FieldKind kind, Index idx, const std::string& point, std::vector<DerivRef> derivs) {
  auto n = make(NodeKind::Field);
  n->field = kind;
  n->indices = {std::move(idx)};
  n->points = {point};
  n->derivs = std::move(derivs);
  return n;
}

NodePtr named(char which, Index idx) {
  auto n = make(NodeKind::Named);
  n->named = which;
  n->indices = {std::move(idx)};
  return n;
}

bool is_field(const Node& n) { return n.kind == NodeKind::Field; }

bool is_leaf(const Node& n) {
  switch (n.kind) {
    case NodeKind::Scalar:
    case NodeKind::Epsilon:
    case NodeKind::Kronecker:
    case NodeKind::Coord:
    case NodeKind::Delta:
    case NodeKind::Field:
    case NodeKind::Named:
      return true;
    default:
      return false;
  }
}

bool contains_kind(const Node& n, NodeKind kind) {
  if (n.kind == kind) return true;
  for (const auto& c : n.children) {
    if (contains_kind(*c, kind)) return true;
  }
  return false;
}

bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.scalar != b.scalar || a.binder != b.binder || a.indices != b.indices ||
      a.points != b.points || a.derivs != b.derivs || a.field != b.field || a.named != b.named ||
      a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t n = 0; n < a.children.size(); ++n) {
    if (!same_tree(*a.children[n], *b.children[n])) return false;
  }
  return true;
}

}  // namespace emalg::dsl
