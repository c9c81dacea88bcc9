#include "dsl/ast.hpp"

#include <algorithm>

namespace emalg::dsl {

namespace {

// Display names for canonical dummies (~NN) and integrated points (~pN).
class Naming {
 public:
  Naming(const Term& t, const std::set<std::string>& free_indices, const std::set<std::string>& free_points) {
    std::set<std::string> used_idx = free_indices;
    std::vector<std::string> dummies;
    for (const auto& [name, n] : index_counts(t)) {
      if (is_dummy_name(name)) {
        dummies.push_back(name);
      } else {
        used_idx.insert(name);
      }
    }
    static const char* kPool[] = {"k", "l", "m", "n", "s", "t", "u", "v", "w", "a", "b", "c",
                                  "e", "f", "g", "h", "o", "p", "q", "r", "i", "j"};
    std::size_t next = 0;
    for (const auto& d : dummies) {
      std::string name;
      while (name.empty()) {
        std::string cand = next < std::size(kPool) ? kPool[next] : "k" + std::to_string(next);
        ++next;
        if (!used_idx.contains(cand)) name = cand;
      }
      idx_[d] = name;
    }

    std::set<std::string> used_pts = free_points;
    for (const auto& p : referenced_points(t)) {
      if (!is_canonical_point(p)) used_pts.insert(p);
    }
    std::size_t k = 0;
    for (const auto& p : t.integrated) {
      std::string name;
      while (name.empty()) {
        std::string cand = k < 3 ? std::string(1, "xyz"[k]) : "z" + std::to_string(k - 2);
        ++k;
        if (!used_pts.contains(cand)) name = cand;
      }
      pts_[p] = name;
    }
  }

  [[nodiscard]] std::string index(const Index& i) const {
    if (i.concrete()) return i.str();
    auto it = idx_.find(i.name);
    return it == idx_.end() ? i.name : it->second;
  }
  [[nodiscard]] std::string point(const std::string& p) const {
    auto it = pts_.find(p);
    return it == pts_.end() ? p : it->second;
  }

 private:
  std::map<std::string, std::string> idx_;
  std::map<std::string, std::string> pts_;
};

std::string rational_text(const Rational& r) {
  std::string s = std::to_string(r.numerator());
  if (r.denominator() != 1) s += "/" + std::to_string(r.denominator());
  return s;
}

// Magnitude part of a coefficient, e.g. "2/3*I*hbar"; empty for plain 1.
std::string magnitude_text(const Coefficient& c) {
  Rational mag = c.value.numerator() < 0 ? -c.value : c.value;
  std::string units = c.units_key();
  std::string out;
  if (mag != Rational(1) || units.empty()) out = rational_text(mag);
  if (!units.empty()) {
    if (!out.empty()) out += "*";
    out += units;
  }
  return out == "1" ? "" : out;
}

std::string derivs_text(const std::vector<Index>& ds, const std::string& point, const Naming& nm) {
  std::string s;
  for (const auto& d : ds) s += "d[" + point + "," + nm.index(d) + "]";
  return s;
}

std::string factor_text(const CNumber& c, const Naming& nm) {
  return std::visit(
      [&](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Epsilon>) {
          return "eps[" + nm.index(a.idx[0]) + "," + nm.index(a.idx[1]) + "," + nm.index(a.idx[2]) + "]";
        } else if constexpr (std::is_same_v<T, Kronecker>) {
          return "delta[" + nm.index(a.a) + "," + nm.index(a.b) + "]";
        } else if constexpr (std::is_same_v<T, Coord>) {
          return "x[" + nm.index(a.idx) + "](" + nm.point(a.point) + ")";
        } else {
          const std::string p = nm.point(a.p);
          return "ddelta(" + p + "," + nm.point(a.q) + ")" + derivs_text(a.derivs, p, nm);
        }
      },
      c);
}

std::string factor_text(const FieldOp& op, const Naming& nm) {
  const std::string p = nm.point(op.point);
  return std::string(op.kind == FieldKind::E ? "E[" : "B[") + nm.index(op.idx) + "](" + p + ")" +
         derivs_text(op.derivs, p, nm);
}

std::string term_text(const Term& t, const Expr& e) {
  Naming nm(t, e.free_indices, e.free_points);
  std::vector<std::string> factors;
  for (const auto& c : t.cnumbers) factors.push_back(factor_text(c, nm));
  for (const auto& op : t.ops) factors.push_back(factor_text(op, nm));
  std::string body;
  for (std::size_t n = 0; n < factors.size(); ++n) body += (n ? "*" : "") + factors[n];
  for (auto it = t.integrated.rbegin(); it != t.integrated.rend(); ++it) {
    body = "int(" + nm.point(*it) + ")(" + body + ")";
  }
  std::string mag = magnitude_text(t.coeff);
  if (body.empty()) return mag.empty() ? "1" : mag;
  return mag.empty() ? body : mag + "*" + body;
}

// --- LaTeX ---------------------------------------------------------------------

std::string latex_point(const std::string& p) { return "\\mathbf{" + p + "}"; }

std::string latex_partial(const std::string& point, const std::string& idx) {
  return "\\frac{\\partial}{\\partial " + point + "^{" + idx + "}}";
}

std::string latex_coefficient(const Coefficient& c, bool leading) {
  Rational mag = c.value.numerator() < 0 ? -c.value : c.value;
  std::string num, den;
  if (mag.numerator() != 1) num += std::to_string(mag.numerator());
  if (mag.denominator() != 1) den += std::to_string(mag.denominator());
  if (c.ipow == 1) num += "i";
  auto power = [](const std::string& base, int p) {
    return p == 1 ? base : base + "^{" + std::to_string(p) + "}";
  };
  if (c.hbar > 0) num += power("\\hbar", c.hbar);
  if (c.hbar < 0) den += power("\\hbar", -c.hbar);
  if (c.eps0 > 0) num += power("\\epsilon_0", c.eps0);
  if (c.eps0 < 0) den += power("\\epsilon_0", -c.eps0);
  std::string sign = c.value.numerator() < 0 ? "-" : (leading ? "" : "+");
  std::string body;
  if (!den.empty()) {
    body = "\\frac{" + (num.empty() ? std::string("1") : num) + "}{" + den + "}";
  } else {
    body = num;
  }
  return sign + (leading || c.value.numerator() < 0 ? "" : " ") + body;
}

std::string latex_index_list(const std::vector<std::string>& v) {
  bool single = std::all_of(v.begin(), v.end(), [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t n = 0; n < v.size(); ++n) out += (n && !single ? " " : "") + v[n];
  return out;
}

std::string latex_term(const Term& t, const Expr& e, bool leading) {
  Naming nm(t, e.free_indices, e.free_points);
  std::string s = latex_coefficient(t.coeff, leading);
  for (const auto& p : t.integrated) s += "\\int d^3" + nm.point(p) + "\\,";
  for (const auto& c : t.cnumbers) {
    s += std::visit(
        [&](const auto& a) -> std::string {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, Epsilon>) {
            return "\\epsilon^{" +
                   latex_index_list({nm.index(a.idx[0]), nm.index(a.idx[1]), nm.index(a.idx[2])}) + "}";
          } else if constexpr (std::is_same_v<T, Kronecker>) {
            return "\\delta_{" + latex_index_list({nm.index(a.a), nm.index(a.b)}) + "}";
          } else if constexpr (std::is_same_v<T, Coord>) {
            return nm.point(a.point) + "^{" + nm.index(a.idx) + "}";
          } else {
            std::string d;
            for (const auto& i : a.derivs) d += latex_partial(nm.point(a.p), nm.index(i));
            return d + "\\delta(" + latex_point(nm.point(a.p)) + "-" + latex_point(nm.point(a.q)) + ")";
          }
        },
        c);
    s += " ";
  }
  for (const auto& op : t.ops) {
    const std::string p = nm.point(op.point);
    for (const auto& i : op.derivs) s += latex_partial(p, nm.index(i));
    s += std::string(op.kind == FieldKind::E ? "E" : "B") + "^{" + nm.index(op.idx) + "}(" + latex_point(p) + ") ";
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

// --- surface tree text ----------------------------------------------------------

std::string coefficient_text(const Coefficient& c) {
  std::string mag = magnitude_text(c);
  if (mag.empty()) mag = "1";
  return (c.value.numerator() < 0 ? "-" : "") + mag;
}

std::string plain_index(const Index& i) { return i.str(); }

std::string plain_derivs(const std::vector<DerivRef>& ds) {
  std::string s;
  for (const auto& d : ds) s += "d[" + d.point + "," + plain_index(d.idx) + "]";
  return s;
}

bool needs_parens(const Node& n) { return n.kind == NodeKind::Sum || n.kind == NodeKind::ScalarMul; }

}  // namespace

std::string print_canonical(const Expr& e) {
  Expr c = canonicalize(e);
  if (c.empty()) return "0";
  std::string out;
  for (std::size_t n = 0; n < c.terms.size(); ++n) {
    const Term& t = c.terms[n];
    const bool neg = t.coeff.value.numerator() < 0;
    if (n == 0) {
      out += neg ? "-" : "";
    } else {
      out += neg ? " - " : " + ";
    }
    out += term_text(t, c);
  }
  return out;
}

std::string print(const Node& n) {
  switch (n.kind) {
    case NodeKind::Sum: {
      std::string s;
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        const Node& c = *n.children[k];
        const bool neg = c.kind == NodeKind::ScalarMul && c.scalar == Coefficient(Rational(-1));
        std::string body = neg ? print(*c.children[0]) : print(c);
        if (neg && c.children[0]->kind == NodeKind::Sum) body = "(" + body + ")";
        if (k == 0) {
          s += (neg ? "-" : "") + body;
        } else {
          s += (neg ? " - " : " + ") + body;
        }
      }
      return s;
    }
    case NodeKind::Product: {
      std::string s;
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        const Node& c = *n.children[k];
        std::string body = print(c);
        if (needs_parens(c)) body = "(" + body + ")";
        s += (k ? "*" : "") + body;
      }
      return s;
    }
    case NodeKind::ScalarMul: {
      std::string body = print(*n.children[0]);
      if (needs_parens(*n.children[0])) body = "(" + body + ")";
      // a leading minus is how the parser builds these
      if (n.scalar == Coefficient(Rational(-1))) return "-" + body;
      return "(" + coefficient_text(n.scalar) + ")*" + body;
    }
    case NodeKind::Comm:
      return "comm(" + print(*n.children[0]) + ", " + print(*n.children[1]) + ")";
    case NodeKind::Integral:
      return "int(" + n.binder + ")(" + print(*n.children[0]) + ")";
    case NodeKind::SumOver:
      return "sum[" + n.binder + "](" + print(*n.children[0]) + ")";
    case NodeKind::Scalar: {
      std::string s = coefficient_text(n.scalar);
      return n.scalar.value.numerator() < 0 ? "(" + s + ")" : s;
    }
    case NodeKind::Epsilon:
      return "eps[" + plain_index(n.indices[0]) + "," + plain_index(n.indices[1]) + "," +
             plain_index(n.indices[2]) + "]";
    case NodeKind::Kronecker:
      return "delta[" + plain_index(n.indices[0]) + "," + plain_index(n.indices[1]) + "]";
    case NodeKind::Coord:
      return "x[" + plain_index(n.indices[0]) + "](" + n.points[0] + ")";
    case NodeKind::Delta:
      return "ddelta(" + n.points[0] + "," + n.points[1] + ")" + plain_derivs(n.derivs);
    case NodeKind::Field:
      return std::string(n.field == FieldKind::E ? "E[" : "B[") + plain_index(n.indices[0]) + "](" + n.points[0] +
             ")" + plain_derivs(n.derivs);
    case NodeKind::Named:
      return std::string(1, n.named) + "[" + plain_index(n.indices[0]) + "]";
  }
  return {};
}

std::string emit_latex(const Expr& e) {
  Expr c = canonicalize(e);
  if (c.empty()) return "0";
  std::string out;
  for (std::size_t n = 0; n < c.terms.size(); ++n) {
    if (n) out += " ";
    out += latex_term(c.terms[n], c, n == 0);
  }
  return out;
}

std::string emit_latex(const Node& n) {
  switch (n.kind) {
    case NodeKind::Sum: {
      std::string s;
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        std::string body = emit_latex(*n.children[k]);
        if (k && (body.empty() || body[0] != '-')) s += " + ";
        if (k && !body.empty() && body[0] == '-') s += " ";
        s += body;
      }
      return s;
    }
    case NodeKind::Product: {
      std::string s;
      for (const auto& c : n.children) {
        std::string body = emit_latex(*c);
        if (needs_parens(*c)) body = "\\left(" + body + "\\right)";
        s += body + " ";
      }
      if (!s.empty()) s.pop_back();
      return s;
    }
    case NodeKind::ScalarMul: {
      std::string body = emit_latex(*n.children[0]);
      if (needs_parens(*n.children[0])) body = "\\left(" + body + "\\right)";
      return latex_coefficient(n.scalar, true) + " " + body;
    }
    case NodeKind::Comm:
      return "\\left[" + emit_latex(*n.children[0]) + ", " + emit_latex(*n.children[1]) + "\\right]";
    case NodeKind::Integral:
      return "\\int d^3" + n.binder + "\\, " + emit_latex(*n.children[0]);
    case NodeKind::SumOver:
      return "\\sum_{" + n.binder + "} " + emit_latex(*n.children[0]);
    case NodeKind::Scalar:
      return latex_coefficient(n.scalar, true);
    case NodeKind::Epsilon:
      return "\\epsilon^{" +
             latex_index_list({n.indices[0].str(), n.indices[1].str(), n.indices[2].str()}) + "}";
    case NodeKind::Kronecker:
      return "\\delta_{" + latex_index_list({n.indices[0].str(), n.indices[1].str()}) + "}";
    case NodeKind::Coord:
      return n.points[0] + "^{" + n.indices[0].str() + "}";
    case NodeKind::Delta: {
      std::string d;
      for (const auto& r : n.derivs) d += latex_partial(r.point, r.idx.str());
      return d + "\\delta(" + latex_point(n.points[0]) + "-" + latex_point(n.points[1]) + ")";
    }
    case NodeKind::Field: {
      std::string d;
      for (const auto& r : n.derivs) d += latex_partial(r.point, r.idx.str());
      return d + (n.field == FieldKind::E ? "E" : "B") + "^{" + n.indices[0].str() + "}(" +
             latex_point(n.points[0]) + ")";
    }
    case NodeKind::Named:
      return std::string(1, n.named) + "^{" + n.indices[0].str() + "}";
  }
  return {};
}

}  // namespace emalg::dsl
