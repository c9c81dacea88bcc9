#include "dsl/ast.hpp"

#include <algorithm>

namespace emalg::dsl {

namespace {

using Terms = std::vector<Term>;

Term single(Coefficient c) {
  Term t;
  t.coeff = c;
  return t;
}

Term with_cnumber(CNumber c) {
  Term t;
  t.cnumbers.push_back(std::move(c));
  return t;
}

Terms lower_terms(const Node& n) {
  switch (n.kind) {
    case NodeKind::Sum: {
      Terms out;
      for (const auto& c : n.children) {
        Terms part = lower_terms(*c);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case NodeKind::Product: {
      Terms acc{single(Coefficient())};
      for (const auto& c : n.children) {
        Terms rhs = lower_terms(*c);
        Terms next;
        next.reserve(acc.size() * rhs.size());
        for (const auto& a : acc) {
          for (const auto& b : rhs) next.push_back(multiply(a, b));
        }
        acc = std::move(next);
      }
      return acc;
    }
    case NodeKind::ScalarMul: {
      Terms out = lower_terms(*n.children[0]);
      for (auto& t : out) t.coeff *= n.scalar;
      return out;
    }
    case NodeKind::Integral: {
      Terms out = lower_terms(*n.children[0]);
      for (auto& t : out) {
        if (is_integrated(t, n.binder)) {
          throw ParseError(ParseError::Kind::UnboundName, n.offset,
                           "point '" + n.binder + "' is already integrated");
        }
        if (!referenced_points(t).contains(n.binder)) {
          throw ParseError(ParseError::Kind::UnboundName, n.offset,
                           "integrated point '" + n.binder + "' is not referenced");
        }
        t.integrated.push_back(n.binder);
        std::sort(t.integrated.begin(), t.integrated.end());
      }
      return out;
    }
    case NodeKind::SumOver: {
      Terms out = lower_terms(*n.children[0]);
      for (const auto& t : out) {
        auto counts = index_counts(t);
        if (counts[n.binder] != 2) {
          throw ParseError(ParseError::Kind::UnboundName, n.offset,
                           "summed index '" + n.binder + "' must appear exactly twice in every term");
        }
      }
      return out;
    }
    case NodeKind::Scalar:
      return {single(n.scalar)};
    case NodeKind::Epsilon:
      return {with_cnumber(Epsilon{{n.indices[0], n.indices[1], n.indices[2]}})};
    case NodeKind::Kronecker:
      return {with_cnumber(Kronecker{n.indices[0], n.indices[1]})};
    case NodeKind::Coord:
      return {with_cnumber(Coord{n.points[0], n.indices[0]})};
    case NodeKind::Delta: {
      const std::string& p = n.points[0];
      const std::string& q = n.points[1];
      if (p == q) throw ParseError(ParseError::Kind::UnboundName, n.offset, "ddelta needs two distinct points");
      DiracDelta d{p, q, {}};
      Term t;
      for (const auto& dr : n.derivs) {
        d.derivs.push_back(dr.idx);
        // d/dq delta(p - q) = -d/dp delta(p - q)
        if (dr.point == q) t.coeff = -t.coeff;
      }
      t.cnumbers.push_back(std::move(d));
      return {t};
    }
    case NodeKind::Field: {
      FieldOp op{n.field, n.indices[0], n.points[0], {}};
      for (const auto& dr : n.derivs) op.derivs.push_back(dr.idx);
      Term t;
      t.ops.push_back(std::move(op));
      return {t};
    }
    case NodeKind::Comm:
      throw ParseError(ParseError::Kind::UnboundName, n.offset,
                       "commutator must be expanded and evaluated before lowering");
    case NodeKind::Named:
      throw ParseError(ParseError::Kind::UnboundName, n.offset,
                       std::string("named operator ") + n.named + " must be expanded before lowering");
  }
  return {};
}

}  // namespace

Expr lower(const Node& n) {
  Expr e = make_expr(lower_terms(n));
  for (const auto& t : e.terms) {
    for (const auto& [name, count] : index_counts(t)) {
      if (count > 2) {
        throw ParseError(ParseError::Kind::UnboundName, n.offset,
                         "index '" + name + "' is ambiguous: appears " + std::to_string(count) + " times in a term");
      }
    }
  }
  return e;
}

}  // namespace emalg::dsl
