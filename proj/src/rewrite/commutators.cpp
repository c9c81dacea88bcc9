#include "rewrite/rewrite.hpp"

#include <set>

namespace emalg::rewrite {

using dsl::Node;
using dsl::NodeKind;
using dsl::NodePtr;

namespace {

void collect_names(const Node& n, std::set<std::string>& out) {
  for (const auto& i : n.indices) {
    if (!i.concrete()) out.insert(i.name);
  }
  for (const auto& p : n.points) out.insert(p);
  for (const auto& d : n.derivs) {
    out.insert(d.point);
    if (!d.idx.concrete()) out.insert(d.idx.name);
  }
  if (!n.binder.empty()) out.insert(n.binder);
  for (const auto& c : n.children) collect_names(*c, out);
}

class FreshNames {
 public:
  explicit FreshNames(const Node& root) { collect_names(root, used_); }
  std::string make(const std::string& prefix) {
    for (;;) {
      std::string cand = prefix + std::to_string(++counter_);
      if (used_.insert(cand).second) return cand;
    }
  }
  void reserve(const Node& n) { collect_names(n, used_); }

 private:
  std::set<std::string> used_;
  int counter_ = 0;
};

NodePtr rename_in_tree(const NodePtr& n, const std::string& from, const std::string& to) {
  auto copy = std::make_shared<Node>(*n);
  for (auto& i : copy->indices) {
    if (!i.concrete() && i.name == from) i.name = to;
  }
  for (auto& p : copy->points) {
    if (p == from) p = to;
  }
  for (auto& d : copy->derivs) {
    if (d.point == from) d.point = to;
    if (!d.idx.concrete() && d.idx.name == from) d.idx.name = to;
  }
  if (copy->binder == from) copy->binder = to;
  for (auto& c : copy->children) c = rename_in_tree(c, from, to);
  return copy;
}

NodePtr rebuild(const Node& n, std::vector<NodePtr> children) {
  auto copy = std::make_shared<Node>(n);
  copy->children = std::move(children);
  return copy;
}

// Null stands for zero throughout the expansion.
NodePtr make_sum(std::vector<NodePtr> parts) {
  std::vector<NodePtr> kept;
  for (auto& p : parts) {
    if (!p) continue;
    if (p->kind == NodeKind::Sum) {
      kept.insert(kept.end(), p->children.begin(), p->children.end());
    } else {
      kept.push_back(std::move(p));
    }
  }
  if (kept.empty()) return nullptr;
  if (kept.size() == 1) return kept.front();
  return dsl::sum(std::move(kept));
}

NodePtr make_scaled(const Coefficient& c, NodePtr n) {
  if (!n) return nullptr;
  if (n->kind == NodeKind::ScalarMul) {
    Coefficient total = c * n->scalar;
    return dsl::scalar_mul(total, n->children[0]);
  }
  return dsl::scalar_mul(c, std::move(n));
}

NodePtr make_product(std::vector<NodePtr> parts) {
  Coefficient factor;
  bool scaled = false;
  std::vector<NodePtr> flat;
  for (auto& p : parts) {
    if (!p) return nullptr;
    if (p->kind == NodeKind::ScalarMul) {
      factor *= p->scalar;
      scaled = true;
      p = p->children[0];
    }
    if (p->kind == NodeKind::Product) {
      flat.insert(flat.end(), p->children.begin(), p->children.end());
    } else {
      flat.push_back(p);
    }
  }
  NodePtr body = flat.size() == 1 ? flat.front() : dsl::product(std::move(flat));
  return scaled ? make_scaled(factor, body) : body;
}

class Expander {
 public:
  Expander(const Node& root, const AxiomTable& table) : fresh_(root), table_(table) {}

  NodePtr expand(const NodePtr& n) {
    if (n->kind == NodeKind::Comm) return bracket(expand(n->children[0]), expand(n->children[1]));
    if (n->children.empty()) return n;
    std::vector<NodePtr> kids;
    for (const auto& c : n->children) kids.push_back(expand(c));
    for (const auto& k : kids) {
      if (!k) {
        if (n->kind == NodeKind::Sum) return make_sum(kids);
        if (n->kind == NodeKind::Product) return nullptr;
        return nullptr;
      }
    }
    if (n->kind == NodeKind::Product) return make_product(kids);
    if (n->kind == NodeKind::Sum) return make_sum(kids);
    return rebuild(*n, std::move(kids));
  }

 private:
  FreshNames fresh_;
  AxiomTable table_;

  static bool mentions(const Node& n, const std::string& name) {
    std::set<std::string> names;
    collect_names(n, names);
    return names.contains(name);
  }

  // Pull a binder out of a bracket, renaming it when the other side uses it.
  std::pair<std::string, NodePtr> unbind(const Node& binder_node, const Node& other) {
    std::string b = binder_node.binder;
    NodePtr body = binder_node.children[0];
    if (mentions(other, b)) {
      std::string to = fresh_.make(binder_node.kind == NodeKind::Integral ? "_q" : "_s");
      body = rename_in_tree(body, b, to);
      b = to;
    }
    return {b, body};
  }

  NodePtr bracket(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) return nullptr;
    // left argument first, then right
    for (int side = 0; side < 2; ++side) {
      const NodePtr& x = side == 0 ? a : b;
      auto wrap = [&](const NodePtr& inner) { return side == 0 ? bracket(inner, b) : bracket(a, inner); };
      switch (x->kind) {
        case NodeKind::Sum: {
          std::vector<NodePtr> parts;
          for (const auto& c : x->children) parts.push_back(wrap(c));
          return make_sum(std::move(parts));
        }
        case NodeKind::ScalarMul:
          return make_scaled(x->scalar, wrap(x->children[0]));
        case NodeKind::Integral: {
          auto [p, body] = unbind(*x, side == 0 ? *b : *a);
          NodePtr inner = wrap(body);
          return inner ? dsl::integral(p, inner) : nullptr;
        }
        case NodeKind::SumOver: {
          auto [k, body] = unbind(*x, side == 0 ? *b : *a);
          NodePtr inner = wrap(body);
          return inner ? dsl::sum_over(k, inner) : nullptr;
        }
        default:
          break;
      }
    }
    if (a->kind == NodeKind::Product) {
      // [A R, C] = A [R, C] + [A, C] R
      NodePtr first = a->children.front();
      std::vector<NodePtr> rest_v(a->children.begin() + 1, a->children.end());
      NodePtr rest = rest_v.size() == 1 ? rest_v.front() : dsl::product(rest_v);
      return make_sum({make_product({first, bracket(rest, b)}), make_product({bracket(first, b), rest})});
    }
    if (b->kind == NodeKind::Product) {
      // [A, C D] = C [A, D] + [A, C] D
      NodePtr first = b->children.front();
      std::vector<NodePtr> rest_v(b->children.begin() + 1, b->children.end());
      NodePtr rest = rest_v.size() == 1 ? rest_v.front() : dsl::product(rest_v);
      return make_sum({make_product({first, bracket(a, rest)}), make_product({bracket(a, first), rest})});
    }
    if (a->kind == NodeKind::Named || b->kind == NodeKind::Named) {
      throw RuleError("named operators must be expanded before commutator expansion");
    }
    if (!dsl::is_field(*a) || !dsl::is_field(*b)) return nullptr;  // c-numbers commute
    if (a->field == b->field) {
      if ((a->field == FieldKind::E && table_.ee_zero) || (a->field == FieldKind::B && table_.bb_zero)) {
        return nullptr;
      }
      return dsl::comm(a, b);
    }
    if (a->field == FieldKind::B) return make_scaled(Coefficient(Rational(-1)), dsl::comm(b, a));
    return dsl::comm(a, b);
  }
};

// P[i] = eps0 int(p)(eps[i,a,b] E[a](p) B[b](p))
// J[i] = eps0 int(p)(x[m](p) E[i](p) B[m](p) - x[m](p) E[m](p) B[i](p))
NodePtr definition(const Node& n, FreshNames& fresh) {
  const Index& i = n.indices[0];
  const std::string p = fresh.make("_p");
  NodePtr body;
  if (n.named == 'P') {
    const std::string a = fresh.make("_a");
    const std::string b = fresh.make("_b");
    body = dsl::product({dsl::epsilon(i, a, b), dsl::field(FieldKind::E, a, p), dsl::field(FieldKind::B, b, p)});
  } else {
    const std::string m = fresh.make("_m");
    body = dsl::sum({dsl::product({dsl::coord(p, m), dsl::field(FieldKind::E, i, p), dsl::field(FieldKind::B, m, p)}),
                     dsl::scalar_mul(Coefficient(Rational(-1)),
                                     dsl::product({dsl::coord(p, m), dsl::field(FieldKind::E, m, p),
                                                   dsl::field(FieldKind::B, i, p)}))});
  }
  return dsl::scalar_mul(Coefficient(Rational(1), 0, 1, 0), dsl::integral(p, body));
}

NodePtr expand_named_rec(const NodePtr& n, FreshNames& fresh) {
  if (n->kind == NodeKind::Named) return definition(*n, fresh);
  if (n->children.empty()) return n;
  std::vector<NodePtr> kids;
  for (const auto& c : n->children) kids.push_back(expand_named_rec(c, fresh));
  return rebuild(*n, std::move(kids));
}

std::vector<NodePtr> factors_of(const NodePtr& n) {
  if (n->kind == NodeKind::Product) return n->children;
  return {n};
}

// Walk two trees in parallel; they must agree except for one product whose
// factor lists differ by swapping two adjacent field factors.
NodePtr merge_swapped(const NodePtr& u, const NodePtr& w, bool& found) {
  if (u->kind != w->kind || u->binder != w->binder || u->scalar != w->scalar ||
      u->children.size() != w->children.size()) {
    return nullptr;
  }
  if (u->kind == NodeKind::Product) {
    const auto& a = u->children;
    const auto& b = w->children;
    std::vector<std::size_t> diff;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!dsl::same_tree(*a[k], *b[k])) diff.push_back(k);
    }
    if (diff.size() == 2 && diff[1] == diff[0] + 1 && !found) {
      std::size_t k = diff[0];
      if (dsl::is_field(*a[k]) && dsl::is_field(*a[k + 1]) && dsl::same_tree(*a[k], *b[k + 1]) &&
          dsl::same_tree(*a[k + 1], *b[k])) {
        found = true;
        std::vector<NodePtr> out(a.begin(), a.begin() + long(k));
        out.push_back(dsl::comm(a[k], a[k + 1]));
        out.insert(out.end(), a.begin() + long(k) + 2, a.end());
        return out.size() == 1 ? out.front() : dsl::product(out);
      }
    }
  }
  if (u->children.empty()) return dsl::same_tree(*u, *w) ? u : nullptr;
  std::vector<NodePtr> kids;
  for (std::size_t k = 0; k < u->children.size(); ++k) {
    NodePtr m = merge_swapped(u->children[k], w->children[k], found);
    if (!m) return nullptr;
    kids.push_back(m);
  }
  auto copy = std::make_shared<Node>(*u);
  copy->children = std::move(kids);
  if (!found && !dsl::same_tree(*u, *w)) return nullptr;
  return copy;
}

}  // namespace

NodePtr expand_named(const NodePtr& n) {
  FreshNames fresh(*n);
  return expand_named_rec(n, fresh);
}

NodePtr expand_commutators(const NodePtr& n, const AxiomTable& table) {
  Expander ex(*n, table);
  NodePtr out = ex.expand(n);
  return out ? out : dsl::scalar(Coefficient(Rational(0)));
}

NodePtr collect_commutators(const NodePtr& n) {
  if (n->kind != NodeKind::Sum || n->children.size() != 2) return n;
  const NodePtr& u = n->children[0];
  const NodePtr& v = n->children[1];
  if (v->kind != NodeKind::ScalarMul || v->scalar != Coefficient(Rational(-1))) return n;
  bool found = false;
  NodePtr merged = merge_swapped(u, v->children[0], found);
  if (!merged || !found) return n;
  (void)factors_of;
  return merged;
}

Expr apply_axioms(const NodePtr& root, const AxiomTable& table) {
  FreshNames fresh(*root);
  std::function<NodePtr(const NodePtr&)> subst = [&](const NodePtr& n) -> NodePtr {
    if (n->kind == NodeKind::Comm) {
      const Node& a = *n->children[0];
      const Node& b = *n->children[1];
      if (!dsl::is_field(a) || !dsl::is_field(b)) {
        throw RuleError("contract violation: unexpanded non-primitive commutator");
      }
      if (a.field == b.field) {
        const bool zero = a.field == FieldKind::E ? table.ee_zero : table.bb_zero;
        if (!zero) throw RuleError("no rule for a same-kind field commutator");
        return dsl::scalar(Coefficient(Rational(0)));
      }
      const Node& e = a.field == FieldKind::E ? a : b;
      const Node& bf = a.field == FieldKind::E ? b : a;
      const Rational sign = a.field == FieldKind::E ? Rational(-1) : Rational(1);
      const std::string k = fresh.make("_k");
      const std::string& p = e.points[0];
      const std::string& q = bf.points[0];
      if (p == q) throw RuleError("field commutator at coincident points");
      std::vector<dsl::DerivRef> ds{{p, Index(k)}};
      ds.insert(ds.end(), e.derivs.begin(), e.derivs.end());
      ds.insert(ds.end(), bf.derivs.begin(), bf.derivs.end());
      return dsl::product({dsl::scalar(Coefficient(sign, 1, -1, 1)),
                           dsl::epsilon(e.indices[0], bf.indices[0], Index(k)), dsl::delta(p, q, ds)});
    }
    if (n->children.empty()) return n;
    std::vector<NodePtr> kids;
    for (const auto& c : n->children) kids.push_back(subst(c));
    return rebuild(*n, std::move(kids));
  };
  if (dsl::contains_kind(*root, NodeKind::Named)) {
    throw RuleError("named operators must be expanded before applying axioms");
  }
  Expr e = dsl::lower(*subst(root));
  return e;
}

}  // namespace emalg::rewrite
