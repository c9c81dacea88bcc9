#include "expr/expr.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

namespace emalg {

void require_index_balance(const Expr& e);  // expr.cpp

namespace {

// Beyond this many dummies the exhaustive renaming search is replaced by
// first-use numbering.
constexpr std::size_t kMaxDummySearch = 7;

std::string render_index(const Index& i) { return i.str(); }

std::string render_list(const std::vector<Index>& v) {
  std::string s;
  for (std::size_t n = 0; n < v.size(); ++n) {
    if (n) s += ',';
    s += render_index(v[n]);
  }
  return s;
}

std::string render(const CNumber& c) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Epsilon>) {
          return "e(" + render_index(a.idx[0]) + "," + render_index(a.idx[1]) + "," +
                 render_index(a.idx[2]) + ")";
        } else if constexpr (std::is_same_v<T, Kronecker>) {
          return "k(" + render_index(a.a) + "," + render_index(a.b) + ")";
        } else if constexpr (std::is_same_v<T, Coord>) {
          return "x(" + a.point + "," + render_index(a.idx) + ")";
        } else {
          return "D(" + a.p + "," + a.q + ";" + render_list(a.derivs) + ")";
        }
      },
      c);
}

std::string render(const FieldOp& op) {
  return std::string(op.kind == FieldKind::E ? "E(" : "B(") + render_index(op.idx) + "," + op.point +
         ";" + render_list(op.derivs) + ")";
}

// Sorts symmetric parts of every atom in place; returns the accumulated sign,
// or 0 when an atom vanishes identically.
int normalize_atoms(Term& t) {
  int sign = 1;
  for (auto& c : t.cnumbers) {
    if (auto* e = std::get_if<Epsilon>(&c)) {
      int s = levi_civita_sign(e->idx[0], e->idx[1], e->idx[2]);
      if (s == 0) return 0;
      std::sort(e->idx.begin(), e->idx.end());
      sign *= s;
    } else if (auto* k = std::get_if<Kronecker>(&c)) {
      if (k->b < k->a) std::swap(k->a, k->b);
    } else if (auto* d = std::get_if<DiracDelta>(&c)) {
      if (d->q < d->p) {
        std::swap(d->p, d->q);
        if (d->derivs.size() % 2 == 1) sign = -sign;
      }
      std::sort(d->derivs.begin(), d->derivs.end());
    }
  }
  for (auto& op : t.ops) std::sort(op.derivs.begin(), op.derivs.end());
  std::sort(t.cnumbers.begin(), t.cnumbers.end(),
            [](const CNumber& a, const CNumber& b) { return render(a) < render(b); });
  return sign;
}

std::string dummy_label(std::size_t n) {
  std::string digits = std::to_string(n + 1);
  if (digits.size() < 2) digits = "0" + digits;
  return "~" + digits;
}

std::string point_label(std::size_t n) { return "~p" + std::to_string(n + 1); }

// First-use order of the summed indices under the stored atom order.
std::vector<std::string> first_use_order(const Term& t, const std::vector<std::string>& dummies) {
  std::vector<std::string> order;
  for_each_index(t, [&](const Index& i) {
    if (i.concrete()) return;
    if (std::find(dummies.begin(), dummies.end(), i.name) == dummies.end()) return;
    if (std::find(order.begin(), order.end(), i.name) == order.end()) order.push_back(i.name);
  });
  return order;
}

struct CanonTerm {
  Term term;
  std::string key;
  std::string raw;  // key before any renaming
};

std::optional<CanonTerm> canonical_term(const Term& input, int* self_cancelled) {
  Term t = input;
  std::sort(t.integrated.begin(), t.integrated.end());
  std::vector<std::string> dummies = summed_indices(t);
  const bool exhaustive = dummies.size() <= kMaxDummySearch;
  if (!exhaustive) dummies = first_use_order(t, dummies);
  const std::vector<std::string> points = t.integrated;

  std::vector<std::size_t> pperm(points.size());
  std::iota(pperm.begin(), pperm.end(), 0);

  std::optional<CanonTerm> best;
  bool self_cancelling = false;
  do {
    std::map<std::string, std::string> pmap;
    for (std::size_t n = 0; n < points.size(); ++n) pmap[points[n]] = point_label(pperm[n]);
    Term relabeled_pts = t;
    rename_points(relabeled_pts, pmap);
    std::sort(relabeled_pts.integrated.begin(), relabeled_pts.integrated.end());

    std::vector<std::size_t> dperm(dummies.size());
    std::iota(dperm.begin(), dperm.end(), 0);
    do {
      std::map<std::string, Index> dmap;
      for (std::size_t n = 0; n < dummies.size(); ++n) dmap[dummies[n]] = Index(dummy_label(dperm[n]));
      Term r = relabeled_pts;
      rename_indices(r, dmap);
      int sign = normalize_atoms(r);
      if (sign == 0) return std::nullopt;
      if (sign < 0) r.coeff = -r.coeff;
      std::string key = term_key(r);
      if (!best || key < best->key) {
        best = CanonTerm{std::move(r), std::move(key), {}};
        self_cancelling = false;
      } else if (key == best->key && r.coeff != best->term.coeff) {
        self_cancelling = true;
      }
    } while (exhaustive && std::next_permutation(dperm.begin(), dperm.end()));
  } while (std::next_permutation(pperm.begin(), pperm.end()));

  if (self_cancelling) {
    if (self_cancelled) ++*self_cancelled;
    return std::nullopt;
  }
  Term plain = t;
  normalize_atoms(plain);
  best->raw = term_key(plain);
  return best;
}

}  // namespace

std::string term_key(const Term& t) {
  std::string key;
  for (const auto& c : t.cnumbers) key += render(c) + " ";
  key += "|";
  for (const auto& op : t.ops) key += render(op) + " ";
  key += "|";
  for (const auto& p : t.integrated) key += p + " ";
  key += "|" + t.coeff.units_key();
  return key;
}

Expr canonicalize(const Expr& e, CanonStats* stats) {
  require_index_balance(e);

  struct Bucket {
    Term term;
    std::set<std::string> raw;
    int count = 0;
  };
  std::map<std::string, Bucket> buckets;
  for (const auto& t : e.terms) {
    auto c = canonical_term(t, stats ? &stats->self_cancelled : nullptr);
    if (!c) continue;
    auto [it, inserted] = buckets.try_emplace(c->key);
    Bucket& b = it->second;
    if (inserted) {
      b.term = std::move(c->term);
    } else {
      b.term.coeff.value += c->term.coeff.value;
    }
    ++b.count;
    b.raw.insert(c->raw);
  }

  Expr out;
  out.free_indices = e.free_indices;
  out.free_points = e.free_points;
  for (auto& [key, b] : buckets) {
    if (stats && b.count > 1) stats->merged += b.count - 1;
    if (b.term.coeff.is_zero()) {
      if (stats && b.raw.size() > 1) stats->relabel_cancellations += b.count;
      if (stats) stats->cancelled += b.count;
      continue;
    }
    out.terms.push_back(std::move(b.term));
  }
  return out;
}

bool identical(const Expr& a, const Expr& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t n = 0; n < a.terms.size(); ++n) {
    if (a.terms[n].coeff != b.terms[n].coeff) return false;
    if (term_key(a.terms[n]) != term_key(b.terms[n])) return false;
  }
  return true;
}

bool equal_canonical(const Expr& a, const Expr& b) { return identical(canonicalize(a), canonicalize(b)); }

Expr expand_concrete(const Expr& e) {
  std::vector<Term> out;
  for (const auto& t : e.terms) {
    const auto dummies = summed_indices(t);
    std::size_t total = 1;
    for (std::size_t n = 0; n < dummies.size(); ++n) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      std::map<std::string, Index> assign;
      std::size_t rest = code;
      for (const auto& d : dummies) {
        assign[d] = Index(int(rest % 3) + 1);
        rest /= 3;
      }
      Term r = t;
      rename_indices(r, assign);
      bool vanished = false;
      std::vector<CNumber> kept;
      for (auto& c : r.cnumbers) {
        if (auto* eps = std::get_if<Epsilon>(&c)) {
          if (eps->idx[0].concrete() && eps->idx[1].concrete() && eps->idx[2].concrete()) {
            int s = levi_civita_sign(eps->idx[0].value, eps->idx[1].value, eps->idx[2].value);
            if (s == 0) {
              vanished = true;
              break;
            }
            if (s < 0) r.coeff = -r.coeff;
            continue;
          }
        } else if (auto* k = std::get_if<Kronecker>(&c)) {
          if (k->a.concrete() && k->b.concrete()) {
            if (k->a.value != k->b.value) {
              vanished = true;
              break;
            }
            continue;
          }
        }
        kept.push_back(std::move(c));
      }
      if (vanished) continue;
      r.cnumbers = std::move(kept);
      out.push_back(std::move(r));
    }
  }
  Expr result;
  result.terms = std::move(out);
  result.free_indices = e.free_indices;
  result.free_points = e.free_points;
  return canonicalize(result);
}

}  // namespace emalg
