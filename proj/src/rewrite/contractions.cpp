#include "rewrite/rewrite.hpp"

#include <algorithm>
#include <map>

namespace emalg::rewrite {

namespace {

Expr rebuild(const Expr& like, std::vector<Term> terms) {
  Expr out;
  for (auto& t : terms) {
    if (!t.coeff.is_zero()) out.terms.push_back(std::move(t));
  }
  out.free_indices = like.free_indices;
  out.free_points = like.free_points;
  return out;
}

bool is_summed(const std::map<std::string, int>& counts, const Index& i) {
  if (i.concrete()) return false;
  auto it = counts.find(i.name);
  return it != counts.end() && it->second == 2;
}

// rotate so that position k comes first (cyclic, sign preserving)
std::array<Index, 3> rotate_to_front(const std::array<Index, 3>& a, std::size_t k) {
  return {a[k], a[(k + 1) % 3], a[(k + 2) % 3]};
}

std::size_t position(const std::array<Index, 3>& a, const Index& i) {
  return std::size_t(std::find(a.begin(), a.end(), i) - a.begin());
}

// One epsilon-pair contraction, or nullopt when the term has no contractible pair.
std::optional<std::vector<Term>> contract_one_pair(const Term& t) {
  const auto counts = index_counts(t);
  for (std::size_t x = 0; x < t.cnumbers.size(); ++x) {
    const auto* ex = std::get_if<Epsilon>(&t.cnumbers[x]);
    if (!ex) continue;
    for (std::size_t y = x + 1; y < t.cnumbers.size(); ++y) {
      const auto* ey = std::get_if<Epsilon>(&t.cnumbers[y]);
      if (!ey) continue;
      std::vector<Index> shared;
      for (const auto& i : ex->idx) {
        if (is_summed(counts, i) && std::find(ey->idx.begin(), ey->idx.end(), i) != ey->idx.end()) {
          shared.push_back(i);
        }
      }
      if (shared.empty()) continue;

      Term base = t;
      base.cnumbers.erase(base.cnumbers.begin() + long(y));
      base.cnumbers.erase(base.cnumbers.begin() + long(x));
      std::vector<Term> out;

      if (shared.size() == 1) {
        // eps(k,a,b) eps(k,c,d) = d(a,c) d(b,d) - d(a,d) d(b,c)
        auto a = rotate_to_front(ex->idx, position(ex->idx, shared[0]));
        auto b = rotate_to_front(ey->idx, position(ey->idx, shared[0]));
        Term t1 = base;
        t1.cnumbers.push_back(Kronecker{a[1], b[1]});
        t1.cnumbers.push_back(Kronecker{a[2], b[2]});
        Term t2 = base;
        t2.coeff = -t2.coeff;
        t2.cnumbers.push_back(Kronecker{a[1], b[2]});
        t2.cnumbers.push_back(Kronecker{a[2], b[1]});
        out.push_back(std::move(t1));
        out.push_back(std::move(t2));
      } else if (shared.size() == 2) {
        // eps(k,l,a) eps(k,l,b) = 2 d(a,b); orient both with the odd index last
        auto odd = [&](const std::array<Index, 3>& e) {
          for (std::size_t k = 0; k < 3; ++k) {
            if (std::find(shared.begin(), shared.end(), e[k]) == shared.end()) return k;
          }
          return std::size_t(0);
        };
        auto a = rotate_to_front(ex->idx, (odd(ex->idx) + 1) % 3);
        auto b = rotate_to_front(ey->idx, (odd(ey->idx) + 1) % 3);
        Term t1 = base;
        t1.coeff *= Coefficient(Rational(a[0] == b[0] ? 2 : -2));
        t1.cnumbers.push_back(Kronecker{a[2], b[2]});
        out.push_back(std::move(t1));
      } else {
        // eps(a,b,c) eps(sigma(a,b,c)) = 6 sgn(sigma)
        std::array<std::size_t, 3> perm{position(ex->idx, ey->idx[0]), position(ex->idx, ey->idx[1]),
                                        position(ex->idx, ey->idx[2])};
        Term t1 = base;
        t1.coeff *= Coefficient(Rational(6 * levi_civita_sign(perm[0], perm[1], perm[2])));
        out.push_back(std::move(t1));
      }
      return out;
    }
  }
  return std::nullopt;
}

// Apply Kronecker substitutions to a term until none applies; false if the term vanishes.
bool contract_term_deltas(Term& t) {
  for (;;) {
    const auto counts = index_counts(t);
    bool changed = false;
    for (std::size_t k = 0; k < t.cnumbers.size(); ++k) {
      const auto* kr = std::get_if<Kronecker>(&t.cnumbers[k]);
      if (!kr) continue;
      const Index a = kr->a;
      const Index b = kr->b;
      if (a.concrete() && b.concrete()) {
        if (a != b) return false;
        t.cnumbers.erase(t.cnumbers.begin() + long(k));
        changed = true;
        break;
      }
      if (!a.concrete() && a == b) {
        // delta_kk summed over k
        t.cnumbers.erase(t.cnumbers.begin() + long(k));
        t.coeff *= Coefficient(Rational(3));
        changed = true;
        break;
      }
      const Index* from = is_summed(counts, a) ? &a : is_summed(counts, b) ? &b : nullptr;
      if (!from) continue;
      const Index to = from == &a ? b : a;
      const std::string name = from->name;
      t.cnumbers.erase(t.cnumbers.begin() + long(k));
      rename_indices(t, {{name, to}});
      changed = true;
      break;
    }
    if (!changed) return true;
  }
}

// Product rule: d/d(point)^d of the product of everything attached to point.
std::vector<Term> differentiate(const Term& t, const std::string& point, const Index& d) {
  std::vector<Term> out;
  for (std::size_t k = 0; k < t.cnumbers.size(); ++k) {
    const auto* c = std::get_if<Coord>(&t.cnumbers[k]);
    if (!c || c->point != point) continue;
    Term u = t;
    u.cnumbers[k] = Kronecker{d, c->idx};
    out.push_back(std::move(u));
  }
  for (std::size_t k = 0; k < t.ops.size(); ++k) {
    if (t.ops[k].point != point) continue;
    Term u = t;
    u.ops[k].derivs.push_back(d);
    out.push_back(std::move(u));
  }
  return out;
}

// Which endpoint absorbs the derivatives when both are integrated: prefer the
// side where a derivative index matches a field component (a divergence
// results), then the only side carrying a field with an external component.
// An empty result means neither side is preferred.
std::string choose_side(const Term& rest, const DiracDelta& d) {
  for (const auto& di : d.derivs) {
    if (di.concrete()) continue;
    for (const auto& op : rest.ops) {
      if ((op.point == d.p || op.point == d.q) && op.idx == di) return op.point;
    }
  }
  const auto counts = index_counts(rest);
  bool ext_p = false;
  bool ext_q = false;
  for (const auto& op : rest.ops) {
    const bool external = op.idx.concrete() || counts.at(op.idx.name) == 1;
    if (!external) continue;
    if (op.point == d.p) ext_p = true;
    if (op.point == d.q) ext_q = true;
  }
  if (ext_p != ext_q) return ext_p ? d.p : d.q;
  return {};  // no preference: split evenly between both sides
}

// Integrate by parts so every derivative of d lands on the factors at side,
// then sift out one of the two points.
std::vector<Term> absorb(const Term& rest, const DiracDelta& d, const std::string& side, const Term& original) {
  const std::string other = side == d.p ? d.q : d.p;
  std::vector<Term> parts{rest};
  // moving the derivative from p to q flips the sign once per derivative and
  // integration by parts flips it again
  if (d.derivs.size() % 2 == 1 && side == d.p) parts[0].coeff = -parts[0].coeff;
  for (const auto& di : d.derivs) {
    std::vector<Term> next;
    for (const auto& p : parts) {
      auto ds = differentiate(p, side, di);
      next.insert(next.end(), ds.begin(), ds.end());
    }
    parts = std::move(next);
  }
  const bool drop_other = is_integrated(original, other);
  const std::string gone = drop_other ? other : side;
  const std::string kept = drop_other ? side : other;
  for (auto& p : parts) {
    rename_points(p, {{gone, kept}});
    p.integrated.erase(std::find(p.integrated.begin(), p.integrated.end(), kept));
  }
  return parts;
}

std::vector<Term> integrate_term(const Term& t, bool& discarded, const IbpOptions& opts) {
  std::vector<std::size_t> where;
  for (std::size_t k = 0; k < t.cnumbers.size(); ++k) {
    if (std::holds_alternative<DiracDelta>(t.cnumbers[k])) where.push_back(k);
  }
  if (where.empty()) return {t};
  if (where.size() > 1) {
    if (opts.skip_unsupported) return {t};
    throw RuleError("unsupported shape: term carries " + std::to_string(where.size()) + " delta functions");
  }
  const DiracDelta d = std::get<DiracDelta>(t.cnumbers[where[0]]);
  const bool pi = is_integrated(t, d.p);
  const bool qi = is_integrated(t, d.q);
  if (!pi && !qi) {
    if (opts.skip_unsupported) return {t};
    throw RuleError("unsupported shape: delta between two free points " + d.p + ", " + d.q);
  }
  Term rest = t;
  rest.cnumbers.erase(rest.cnumbers.begin() + long(where[0]));

  if (!d.derivs.empty()) discarded = true;
  if (d.derivs.empty()) return absorb(rest, d, qi ? d.q : d.p, t);
  if (pi && qi) {
    const std::string side = choose_side(rest, d);
    if (!side.empty()) return absorb(rest, d, side, t);
    Term half = rest;
    half.coeff *= Coefficient(Rational(1, 2));
    auto out = absorb(half, d, d.p, t);
    auto other = absorb(half, d, d.q, t);
    out.insert(out.end(), other.begin(), other.end());
    return out;
  }
  return absorb(rest, d, pi ? d.p : d.q, t);
}

}  // namespace

Expr contract_epsilon_pairs(const Expr& e) {
  std::vector<Term> work(e.terms.begin(), e.terms.end());
  std::vector<Term> done;
  while (!work.empty()) {
    Term t = std::move(work.back());
    work.pop_back();
    if (auto r = contract_one_pair(t)) {
      for (auto& u : *r) work.push_back(std::move(u));
    } else {
      done.push_back(std::move(t));
    }
  }
  std::reverse(done.begin(), done.end());
  return rebuild(e, std::move(done));
}

Expr contract_deltas(const Expr& e) {
  std::vector<Term> out;
  for (Term t : e.terms) {
    if (contract_term_deltas(t)) out.push_back(std::move(t));
  }
  return rebuild(e, std::move(out));
}

Expr integrate_out_delta(const Expr& e, bool* surface_terms_discarded, IbpOptions opts) {
  bool discarded = false;
  std::vector<Term> out;
  for (const auto& t : e.terms) {
    auto parts = integrate_term(t, discarded, opts);
    out.insert(out.end(), parts.begin(), parts.end());
  }
  if (surface_terms_discarded && discarded) *surface_terms_discarded = true;
  return rebuild(e, std::move(out));
}

bool has_divergence(const Term& t, FieldKind kind) {
  for (const auto& op : t.ops) {
    if (op.kind != kind || op.idx.concrete()) continue;
    if (std::find(op.derivs.begin(), op.derivs.end(), op.idx) != op.derivs.end()) return true;
  }
  return false;
}

Expr apply_field_constraints(const Expr& e, const ConstraintSet& c) {
  std::vector<Term> out;
  for (const auto& t : e.terms) {
    if (c.div_e_zero && has_divergence(t, FieldKind::E)) continue;
    if (c.div_b_zero && has_divergence(t, FieldKind::B)) continue;
    out.push_back(t);
  }
  return rebuild(e, std::move(out));
}

DivergenceSplit divergence_extract(const Expr& e) {
  struct Group {
    Term templ;
    std::size_t op = 0;
    Rational m[3][3] = {};
    Coefficient units;
  };
  std::map<std::string, Group> groups;
  std::vector<std::string> order;
  std::vector<Term> untouched;

  for (const auto& t : e.terms) {
    std::size_t k = 0;
    for (; k < t.ops.size(); ++k) {
      const auto& op = t.ops[k];
      if (op.idx.concrete() && op.derivs.size() == 1 && op.derivs[0].concrete()) break;
    }
    if (k == t.ops.size()) {
      untouched.push_back(t);
      continue;
    }
    Term templ = t;
    templ.ops[k].idx = Index("?c");
    templ.ops[k].derivs = {Index("?d")};
    const std::string key = term_key(templ) + "#" + std::to_string(k);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) {
      order.push_back(key);
      it->second.templ = templ;
      it->second.op = k;
      it->second.units = Coefficient(Rational(1), t.coeff.hbar, t.coeff.eps0, t.coeff.ipow);
    }
    it->second.m[t.ops[k].idx.value - 1][t.ops[k].derivs[0].value - 1] += t.coeff.value;
  }

  std::vector<Term> remaining = untouched;
  std::vector<Term> divergence;
  for (const auto& key : order) {
    const Group& g = groups[key];
    const Rational third = (g.m[0][0] + g.m[1][1] + g.m[2][2]) / 3;
    for (int c = 0; c < 3; ++c) {
      for (int d = 0; d < 3; ++d) {
        Rational v = g.m[c][d] - (c == d ? third : Rational(0));
        if (v.numerator() == 0) continue;
        Term u = g.templ;
        u.ops[g.op].idx = Index(c + 1);
        u.ops[g.op].derivs = {Index(d + 1)};
        u.coeff = Coefficient(v) * g.units;
        remaining.push_back(std::move(u));
      }
    }
    if (third.numerator() != 0) {
      Term u = g.templ;
      const Index s(fresh_name(g.templ, "_v"));
      u.ops[g.op].idx = s;
      u.ops[g.op].derivs = {s};
      u.coeff = Coefficient(third) * g.units;
      divergence.push_back(std::move(u));
    }
  }
  return {canonicalize(rebuild(e, std::move(remaining))), canonicalize(rebuild(e, std::move(divergence)))};
}

}  // namespace emalg::rewrite
