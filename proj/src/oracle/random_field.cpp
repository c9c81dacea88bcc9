#include "oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

namespace emalg::oracle {

namespace {

using cd = std::complex<double>;

// Constants standing in for the units; any nonzero values do.
const double kHbar = 1.3;
const double kEps0 = 0.7;

int eps(int i, int j, int k) { return (j - i) * (k - i) * (k - j) / 2; }

// One separable complex mode: amp * prod_d exp(-t^2/2 + i k_d t).
struct Mode {
  cd amp;
  std::array<double, 3> k;
};

// d^n/dt^n exp(-t^2/2 + i k t) = P_n(t) exp(...), P_{n+1} = P_n' + (i k - t) P_n
std::vector<cd> hermite_like(int n, double k) {
  std::vector<cd> p{1.0};
  for (int s = 0; s < n; ++s) {
    std::vector<cd> q(p.size() + 1, 0.0);
    for (std::size_t a = 1; a < p.size(); ++a) q[a - 1] += double(a) * p[a];
    for (std::size_t a = 0; a < p.size(); ++a) {
      q[a] += cd(0, k) * p[a];
      q[a + 1] -= p[a];
    }
    p = std::move(q);
  }
  return p;
}

cd mode_1d(int n, double k, double t) {
  auto p = hermite_like(n, k);
  cd poly = 0;
  for (std::size_t a = p.size(); a-- > 0;) poly = poly * t + p[a];
  return poly * std::exp(cd(-t * t / 2, k * t));
}

struct Factor {
  bool coord = false;
  FieldKind kind = FieldKind::E;
  int comp = 1;  // field component, or coordinate axis
  std::array<int, 3> dcount{0, 0, 0};
  std::string point;
};

struct Delta {
  std::string p, q;
  std::vector<int> derivs;
};

struct Concrete {
  cd coef = 1;
  std::vector<Factor> factors;
  std::vector<Delta> deltas;
  std::set<std::string> integrated;
};

class Model {
 public:
  Model(std::uint64_t seed, const FieldCheckOptions& o) : opts_(o), seed_(seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> amp(0.0, 1.0);
    const double kmax = 2 * M_PI / (o.grid.extent / 8) / std::sqrt(3.0);
    std::uniform_real_distribution<double> wave(-kmax, kmax);
    for (int f = 0; f < 2; ++f) {
      for (int c = 0; c < 3; ++c) {
        auto& list = modes_[f][c];
        for (int m = 0; m < o.modes; ++m) {
          Mode md{cd(amp(rng), amp(rng)) * 0.5, {wave(rng), wave(rng), wave(rng)}};
          list.push_back(md);
          list.push_back(Mode{std::conj(md.amp), {-md.k[0], -md.k[1], -md.k[2]}});  // real field
        }
      }
    }
    const int n = o.grid.points;
    const double h = o.grid.h();
    t_.resize(n + 1);
    w_.assign(n + 1, h);
    for (int i = 0; i <= n; ++i) t_[i] = -o.grid.extent / 2 + i * h;
    w_[0] = w_[n] = h / 2;
  }

  cd value(const Concrete& c) {
    std::map<std::string, std::vector<const Factor*>> at;
    for (const auto& f : c.factors) at[f.point].push_back(&f);
    for (const auto& p : c.integrated) {
      if (!at.count(p)) throw OracleError("integral over " + p + " of a constant diverges");
    }
    cd v = c.coef;
    for (const auto& [p, fs] : at) {
      v *= c.integrated.count(p) ? integral(fs) : pointwise(fs, position(p));
      if (v == 0.0) break;
    }
    return v;
  }

 private:
  const std::vector<Mode>& modes(const Factor& f) const { return modes_[f.kind == FieldKind::E ? 0 : 1][f.comp - 1]; }

  std::array<double, 3> position(const std::string& point) {
    auto it = positions_.find(point);
    if (it != positions_.end()) return it->second;
    std::seed_seq seq(point.begin(), point.end());
    std::vector<std::uint32_t> s(2);
    seq.generate(s.begin(), s.end());
    std::mt19937_64 rng(seed_ ^ (std::uint64_t(s[0]) << 32 | s[1]));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, 3> r{u(rng), u(rng), u(rng)};
    positions_[point] = r;
    return r;
  }

  cd pointwise(const std::vector<const Factor*>& fs, const std::array<double, 3>& r) const {
    cd v = 1;
    for (const Factor* f : fs) {
      if (f->coord) {
        v *= r[f->comp - 1];
        continue;
      }
      cd s = 0;
      for (const auto& m : modes(*f)) {
        cd term = m.amp;
        for (int d = 0; d < 3; ++d) term *= mode_1d(f->dcount[d], m.k[d], r[d]);
        s += term;
      }
      v *= s;
    }
    return v;
  }

  const std::vector<cd>& samples(int n, double k) {
    auto key = std::make_pair(n, k);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto p = hermite_like(n, k);
    std::vector<cd> out(t_.size());
    for (std::size_t i = 0; i < t_.size(); ++i) {
      cd poly = 0;
      for (std::size_t a = p.size(); a-- > 0;) poly = poly * t_[i] + p[a];
      out[i] = poly * std::exp(cd(-t_[i] * t_[i] / 2, k * t_[i]));
    }
    return cache_.emplace(key, std::move(out)).first->second;
  }

  // Separable 3-D trapezoid of the product of the factors, summed over mode tuples.
  cd integral(const std::vector<const Factor*>& fs) {
    std::ostringstream key;
    for (const Factor* f : fs) {
      key << (f->coord ? 'x' : f->kind == FieldKind::E ? 'E' : 'B') << f->comp << f->dcount[0] << f->dcount[1]
          << f->dcount[2] << ';';
    }
    auto it = integrals_.find(key.str());
    if (it != integrals_.end()) return it->second;

    const std::size_t n = t_.size();
    std::array<std::vector<cd>, 3> base;
    for (auto& b : base) b.assign(n, 1.0);
    std::vector<const Factor*> fields;
    for (const Factor* f : fs) {
      if (f->coord) {
        auto& b = base[f->comp - 1];
        for (std::size_t i = 0; i < n; ++i) b[i] *= t_[i];
      } else {
        fields.push_back(f);
      }
    }
    cd total = 0;
    auto recurse = [&](auto&& self, std::size_t at, cd amp, const std::array<std::vector<cd>, 3>& arr) -> void {
      if (at == fields.size()) {
        cd prod = amp;
        for (int d = 0; d < 3; ++d) {
          cd s = 0;
          for (std::size_t i = 0; i < n; ++i) s += w_[i] * arr[d][i];
          prod *= s;
        }
        total += prod;
        return;
      }
      const Factor* f = fields[at];
      for (const auto& m : modes(*f)) {
        std::array<std::vector<cd>, 3> next = arr;
        for (int d = 0; d < 3; ++d) {
          const auto& s = samples(f->dcount[d], m.k[d]);
          for (std::size_t i = 0; i < n; ++i) next[d][i] *= s[i];
        }
        self(self, at + 1, amp * m.amp, next);
      }
    };
    recurse(recurse, 0, 1.0, base);
    integrals_[key.str()] = total;
    return total;
  }

  FieldCheckOptions opts_;
  std::uint64_t seed_;
  std::array<std::array<std::vector<Mode>, 3>, 2> modes_;
  std::vector<double> t_, w_;
  std::map<std::pair<int, double>, std::vector<cd>> cache_;
  std::map<std::string, cd> integrals_;
  std::map<std::string, std::array<double, 3>> positions_;
};

// --- concretisation --------------------------------------------------------------

std::map<std::string, int> name_counts(const Term& t) {
  std::map<std::string, int> n;
  for_each_index(t, [&](const Index& ix) {
    if (!ix.concrete()) ++n[ix.name];
  });
  return n;
}

int val(const Index& ix, const std::map<std::string, int>& env) {
  return ix.concrete() ? ix.value : env.at(ix.name);
}

std::vector<Concrete> concretise(const Term& t, const std::map<std::string, int>& env) {
  Concrete c;
  c.coef = boost::rational_cast<double>(t.coeff.value) * std::pow(kHbar, t.coeff.hbar) * std::pow(kEps0, t.coeff.eps0) *
           std::pow(cd(0, 1), t.coeff.ipow);
  c.integrated.insert(t.integrated.begin(), t.integrated.end());
  for (const auto& x : t.cnumbers) {
    if (const auto* e = std::get_if<Epsilon>(&x)) {
      c.coef *= eps(val(e->idx[0], env), val(e->idx[1], env), val(e->idx[2], env));
    } else if (const auto* k = std::get_if<Kronecker>(&x)) {
      c.coef *= val(k->a, env) == val(k->b, env) ? 1.0 : 0.0;
    } else if (const auto* r = std::get_if<Coord>(&x)) {
      Factor f;
      f.coord = true;
      f.comp = val(r->idx, env);
      f.point = r->point;
      c.factors.push_back(f);
    } else {
      const auto& d = std::get<DiracDelta>(x);
      Delta dl{d.p, d.q, {}};
      for (const auto& ix : d.derivs) dl.derivs.push_back(val(ix, env));
      c.deltas.push_back(dl);
    }
    if (c.coef == 0.0) return {};
  }
  for (const auto& op : t.ops) {
    Factor f;
    f.kind = op.kind;
    f.comp = val(op.idx, env);
    f.point = op.point;
    for (const auto& ix : op.derivs) ++f.dcount[val(ix, env) - 1];
    c.factors.push_back(f);
  }
  return {c};
}

// Integrate every delta against its integrated endpoint.
std::vector<Concrete> sift(Concrete c) {
  if (c.deltas.empty()) return {c};
  Delta d = c.deltas.back();
  c.deltas.pop_back();
  if (d.p == d.q) throw OracleError("delta at coincident points: product of deltas");
  std::string from, to;
  double sign = 1;
  if (c.integrated.count(d.q)) {
    from = d.q;
    to = d.p;
  } else if (c.integrated.count(d.p)) {
    from = d.p;
    to = d.q;
    if (d.derivs.size() % 2 == 1) sign = -1;
  } else {
    throw OracleError("delta between two free points");
  }
  c.integrated.erase(from);
  c.coef *= sign;
  // derivatives act on the factors that lived at the eliminated point
  std::vector<bool> flagged(c.factors.size(), false);
  for (std::size_t n = 0; n < c.factors.size(); ++n) {
    if (c.factors[n].point == from) {
      flagged[n] = true;
      c.factors[n].point = to;
    }
  }
  for (auto& other : c.deltas) {
    if (other.p == from) other.p = to;
    if (other.q == from) other.q = to;
  }
  // Leibniz: each derivative lands on one of the flagged factors in turn
  std::vector<std::pair<Concrete, std::vector<bool>>> work{{c, flagged}};
  for (int axis : d.derivs) {
    std::vector<std::pair<Concrete, std::vector<bool>>> next;
    for (const auto& [w, fl] : work) {
      for (std::size_t n = 0; n < w.factors.size(); ++n) {
        if (!fl[n]) continue;
        auto one = w;
        Factor& f = one.factors[n];
        auto fl2 = fl;
        if (f.coord) {
          if (f.comp != axis) continue;
          one.factors.erase(one.factors.begin() + long(n));
          fl2.erase(fl2.begin() + long(n));
        } else {
          ++f.dcount[axis - 1];
        }
        next.emplace_back(std::move(one), std::move(fl2));
      }
    }
    work = std::move(next);
  }
  std::vector<Concrete> out;
  for (auto& [w, fl] : work) {
    for (auto& r : sift(std::move(w))) out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> op_signature(const Term& t) {
  std::vector<std::string> s;
  for (const auto& op : t.ops) {
    std::string d;
    for (const auto& ix : op.derivs) d += ix.str() + ",";
    s.push_back(std::string(op.kind == FieldKind::E ? "E" : "B") + op.idx.str() + "@" + op.point + "/" + d);
  }
  return s;
}

void refuse_order_sensitive(const Expr& lhs, const Expr& rhs) {
  std::map<std::vector<std::string>, std::vector<std::string>> seen;  // sorted -> ordered
  for (const Expr* e : {&lhs, &rhs}) {
    for (const auto& t : e->terms) {
      auto ordered = op_signature(t);
      auto sorted = ordered;
      std::sort(sorted.begin(), sorted.end());
      auto [it, fresh] = seen.emplace(sorted, ordered);
      if (!fresh && it->second != ordered) {
        throw OracleError(
            "operator-order sensitive input: the same field operators occur in different orders, which "
            "commuting stand-ins cannot distinguish");
      }
    }
  }
}

template <class F>
void each_assignment(const std::vector<std::string>& names, std::map<std::string, int>& env, std::size_t at, F&& f) {
  if (at == names.size()) {
    f();
    return;
  }
  for (int v = 1; v <= 3; ++v) {
    env[names[at]] = v;
    each_assignment(names, env, at + 1, f);
  }
  env.erase(names[at]);
}

std::pair<cd, double> evaluate(const Expr& e, Model& model, std::map<std::string, int> env) {
  cd total = 0;
  double scale = 0;
  for (const auto& t : e.terms) {
    std::vector<std::string> summed;
    for (const auto& [n, k] : name_counts(t)) {
      if (k >= 2) summed.push_back(n);
    }
    cd term = 0;
    each_assignment(summed, env, 0, [&] {
      for (auto& c : concretise(t, env)) {
        for (auto& s : sift(std::move(c))) term += model.value(s);
      }
    });
    total += term;
    scale += std::abs(term);
  }
  return {total, scale};
}

}  // namespace

double random_field_check(const Expr& lhs, const Expr& rhs, std::uint64_t seed, const FieldCheckOptions& opts) {
  refuse_order_sensitive(lhs, rhs);
  std::set<std::string> free;
  for (const Expr* e : {&lhs, &rhs}) {
    for (const auto& t : e->terms) {
      for (const auto& [n, k] : name_counts(t)) {
        if (k == 1) free.insert(n);
      }
    }
  }
  Model model(seed, opts);
  const std::vector<std::string> names(free.begin(), free.end());
  std::map<std::string, int> env;
  double worst = 0;
  each_assignment(names, env, 0, [&] {
    auto [a, sa] = evaluate(lhs, model, env);
    auto [b, sb] = evaluate(rhs, model, env);
    const double s = std::max(sa, sb);
    if (s > 0) worst = std::max(worst, std::abs(a - b) / s);
  });
  return worst;
}

}  // namespace emalg::oracle
