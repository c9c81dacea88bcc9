#include "expr/expr.hpp"

#include <algorithm>

namespace emalg {

void for_each_index(Term& t, const std::function<void(Index&)>& f) {
  for (auto& c : t.cnumbers) {
    std::visit(
        [&](auto& atom) {
          using T = std::decay_t<decltype(atom)>;
          if constexpr (std::is_same_v<T, Epsilon>) {
            for (auto& i : atom.idx) f(i);
          } else if constexpr (std::is_same_v<T, Kronecker>) {
            f(atom.a);
            f(atom.b);
          } else if constexpr (std::is_same_v<T, Coord>) {
            f(atom.idx);
          } else {
            for (auto& i : atom.derivs) f(i);
          }
        },
        c);
  }
  for (auto& op : t.ops) {
    f(op.idx);
    for (auto& i : op.derivs) f(i);
  }
}

void for_each_index(const Term& t, const std::function<void(const Index&)>& f) {
  for_each_index(const_cast<Term&>(t), [&f](Index& i) { f(i); });
}

void for_each_point(Term& t, const std::function<void(std::string&)>& f) {
  for (auto& c : t.cnumbers) {
    if (auto* x = std::get_if<Coord>(&c)) {
      f(x->point);
    } else if (auto* d = std::get_if<DiracDelta>(&c)) {
      f(d->p);
      f(d->q);
    }
  }
  for (auto& op : t.ops) f(op.point);
  for (auto& p : t.integrated) f(p);
}

std::map<std::string, int> index_counts(const Term& t) {
  std::map<std::string, int> counts;
  for_each_index(t, [&counts](const Index& i) {
    if (!i.concrete()) ++counts[i.name];
  });
  return counts;
}

std::vector<std::string> summed_indices(const Term& t) {
  std::vector<std::string> out;
  for (const auto& [name, n] : index_counts(t)) {
    if (n == 2) out.push_back(name);
  }
  return out;
}

std::set<std::string> referenced_points(const Term& t) {
  std::set<std::string> pts;
  Term copy = t;
  copy.integrated.clear();
  for_each_point(copy, [&pts](std::string& p) { pts.insert(p); });
  return pts;
}

bool is_integrated(const Term& t, const std::string& point) {
  return std::find(t.integrated.begin(), t.integrated.end(), point) != t.integrated.end();
}

void rename_indices(Term& t, const std::map<std::string, Index>& mapping) {
  if (mapping.empty()) return;
  for_each_index(t, [&mapping](Index& i) {
    if (i.concrete()) return;
    if (auto it = mapping.find(i.name); it != mapping.end()) i = it->second;
  });
}

void rename_points(Term& t, const std::map<std::string, std::string>& mapping) {
  if (mapping.empty()) return;
  for_each_point(t, [&mapping](std::string& p) {
    if (auto it = mapping.find(p); it != mapping.end()) p = it->second;
  });
}

namespace {

std::set<std::string> all_names(const Term& t) {
  std::set<std::string> names;
  for_each_index(t, [&names](const Index& i) {
    if (!i.concrete()) names.insert(i.name);
  });
  Term copy = t;
  for_each_point(copy, [&names](std::string& p) { names.insert(p); });
  return names;
}

std::string fresh_against(const std::set<std::string>& used, const std::string& prefix) {
  for (int n = 1;; ++n) {
    std::string candidate = prefix + std::to_string(n);
    if (!used.contains(candidate)) return candidate;
  }
}

// Rename bound names of `t` that collide with anything in `other`.
void separate_bound(Term& t, const Term& other) {
  std::set<std::string> used = all_names(other);
  for (const auto& n : all_names(t)) used.insert(n);

  std::map<std::string, Index> idx_map;
  for (const auto& name : summed_indices(t)) {
    if (!all_names(other).contains(name)) continue;
    std::string fresh = fresh_against(used, "_s");
    used.insert(fresh);
    idx_map.emplace(name, Index(fresh));
  }
  rename_indices(t, idx_map);

  std::map<std::string, std::string> pt_map;
  const auto other_names = all_names(other);
  for (const auto& p : t.integrated) {
    if (!other_names.contains(p)) continue;
    std::string fresh = fresh_against(used, "_q");
    used.insert(fresh);
    pt_map.emplace(p, fresh);
  }
  rename_points(t, pt_map);
}

}  // namespace

std::string fresh_name(const Term& t, const std::string& prefix) {
  return fresh_against(all_names(t), prefix);
}

Term multiply(const Term& lhs, const Term& rhs) {
  Term r = rhs;
  separate_bound(r, lhs);
  Term l = lhs;
  separate_bound(l, r);

  Term out;
  out.coeff = l.coeff * r.coeff;
  out.cnumbers = l.cnumbers;
  out.cnumbers.insert(out.cnumbers.end(), r.cnumbers.begin(), r.cnumbers.end());
  out.ops = l.ops;
  out.ops.insert(out.ops.end(), r.ops.begin(), r.ops.end());
  out.integrated = l.integrated;
  out.integrated.insert(out.integrated.end(), r.integrated.begin(), r.integrated.end());
  std::sort(out.integrated.begin(), out.integrated.end());
  return out;
}

void infer_free(Expr& e) {
  e.free_indices.clear();
  e.free_points.clear();
  for (const auto& t : e.terms) {
    for (const auto& [name, n] : index_counts(t)) {
      if (n == 1) e.free_indices.insert(name);
    }
    for (const auto& p : referenced_points(t)) {
      if (!is_integrated(t, p)) e.free_points.insert(p);
    }
  }
}

Expr make_expr(std::vector<Term> terms) {
  Expr e;
  for (auto& t : terms) {
    if (!t.coeff.is_zero()) e.terms.push_back(std::move(t));
  }
  infer_free(e);
  return e;
}

Expr operator+(const Expr& a, const Expr& b) {
  Expr out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  out.free_indices.insert(b.free_indices.begin(), b.free_indices.end());
  out.free_points.insert(b.free_points.begin(), b.free_points.end());
  return out;
}

Expr operator*(const Expr& a, const Expr& b) {
  std::vector<Term> terms;
  terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& x : a.terms) {
    for (const auto& y : b.terms) terms.push_back(multiply(x, y));
  }
  return make_expr(std::move(terms));
}

Expr scale(const Expr& e, const Coefficient& c) {
  Expr out = e;
  if (c.is_zero()) {
    out.terms.clear();
    return out;
  }
  for (auto& t : out.terms) t.coeff *= c;
  return out;
}

Expr negate(const Expr& e) { return scale(e, Coefficient(Rational(-1))); }

namespace {

struct Violation {
  std::string message;
  std::string name;  // offending index name, empty for non-index issues
};

std::vector<Violation> violations(const Expr& e) {
  std::vector<Violation> out;
  for (std::size_t n = 0; n < e.terms.size(); ++n) {
    const Term& t = e.terms[n];
    const std::string where = "term " + std::to_string(n + 1) + ": ";
    const auto counts = index_counts(t);
    for (const auto& [name, c] : counts) {
      if (c > 2) {
        out.push_back({where + "index '" + name + "' appears " + std::to_string(c) + " times", name});
      } else if (c == 1 && !e.free_indices.contains(name)) {
        out.push_back({where + "summed index '" + name + "' appears once", name});
      } else if (c == 2 && e.free_indices.contains(name)) {
        out.push_back({where + "free index '" + name + "' appears twice", name});
      }
    }
    for (const auto& f : e.free_indices) {
      if (!counts.contains(f)) out.push_back({where + "free index '" + f + "' is missing", f});
    }
    const auto refs = referenced_points(t);
    std::set<std::string> seen;
    for (const auto& p : t.integrated) {
      if (!seen.insert(p).second) out.push_back({where + "point '" + p + "' integrated twice", ""});
      if (!refs.contains(p)) out.push_back({where + "integrated point '" + p + "' is not referenced", ""});
    }
    if (t.coeff.is_zero()) out.push_back({where + "zero coefficient stored", ""});
    if (t.coeff.ipow != 0 && t.coeff.ipow != 1) {
      out.push_back({where + "unnormalized coefficient", ""});
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> validate(const Expr& e) {
  std::vector<std::string> out;
  for (auto& v : violations(e)) out.push_back(std::move(v.message));
  return out;
}

// Used by canonicalize: only index-balance problems are fatal there.
void require_index_balance(const Expr& e) {
  std::vector<std::string> names;
  std::string message;
  for (const auto& v : violations(e)) {
    if (v.name.empty()) continue;
    if (std::find(names.begin(), names.end(), v.name) == names.end()) names.push_back(v.name);
    if (!message.empty()) message += "; ";
    message += v.message;
  }
  if (!names.empty()) throw ValidationError("index balance violated: " + message, names);
}

bool is_dummy_name(const std::string& name) { return !name.empty() && name[0] == '~'; }
bool is_canonical_point(const std::string& name) { return name.size() > 1 && name[0] == '~'; }

}  // namespace emalg
