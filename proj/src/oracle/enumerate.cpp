#include "oracle/oracle.hpp"

#include <sstream>

namespace emalg::oracle {

namespace {

// Levi-Civita on {1,2,3} from the product formula, independent of the engine.
int eps(int i, int j, int k) { return (j - i) * (k - i) * (k - j) / 2; }

using Values = std::map<std::string, Rational>;  // units key -> rational

int lookup(const Index& ix, const std::map<std::string, int>& env) {
  if (ix.concrete()) return ix.value;
  auto it = env.find(ix.name);
  if (it == env.end()) throw OracleError("unbound index " + ix.name);
  return it->second;
}

std::vector<std::string> names_of(const Term& t) {
  std::vector<std::string> out;
  for (const auto& c : t.cnumbers) {
    if (const auto* e = std::get_if<Epsilon>(&c)) {
      for (const auto& ix : e->idx) {
        if (!ix.concrete()) out.push_back(ix.name);
      }
    } else if (const auto* k = std::get_if<Kronecker>(&c)) {
      if (!k->a.concrete()) out.push_back(k->a.name);
      if (!k->b.concrete()) out.push_back(k->b.name);
    } else {
      throw OracleError("enumeration accepts only epsilon and Kronecker symbols");
    }
  }
  if (!t.ops.empty() || !t.integrated.empty()) {
    throw OracleError("enumeration accepts only epsilon and Kronecker symbols");
  }
  return out;
}

// Visit every assignment of names over {1,2,3}.
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

void evaluate(const Expr& e, std::map<std::string, int> env, Values& out) {
  for (const auto& t : e.terms) {
    std::map<std::string, int> count;
    for (const auto& n : names_of(t)) ++count[n];
    std::vector<std::string> summed;
    for (const auto& [n, c] : count) {
      if (c >= 2) summed.push_back(n);
    }
    Rational total(0);
    each_assignment(summed, env, 0, [&] {
      long p = 1;
      for (const auto& c : t.cnumbers) {
        if (const auto* x = std::get_if<Epsilon>(&c)) {
          p *= eps(lookup(x->idx[0], env), lookup(x->idx[1], env), lookup(x->idx[2], env));
        } else {
          const auto& k = std::get<Kronecker>(c);
          p *= lookup(k.a, env) == lookup(k.b, env) ? 1 : 0;
        }
        if (p == 0) return;
      }
      total += Rational(p);
    });
    out[t.coeff.units_key()] += total * t.coeff.value;
  }
}

bool same(const Values& a, const Values& b) {
  auto nonzero = [](const Values& v) {
    Values o;
    for (const auto& [k, r] : v) {
      if (r.numerator() != 0) o[k] = r;
    }
    return o;
  };
  return nonzero(a) == nonzero(b);
}

}  // namespace

EnumerationResult enumerate_identity(const Expr& lhs, const Expr& rhs) {
  std::set<std::string> free;
  for (const Expr* e : {&lhs, &rhs}) {
    for (const auto& t : e->terms) {
      std::map<std::string, int> count;
      for (const auto& n : names_of(t)) ++count[n];
      for (const auto& [n, c] : count) {
        if (c == 1) free.insert(n);
      }
    }
  }
  const std::vector<std::string> names(free.begin(), free.end());
  EnumerationResult r;
  r.equal = true;
  std::map<std::string, int> env;
  each_assignment(names, env, 0, [&] {
    ++r.assignments;
    if (!r.equal) return;
    Values a, b;
    evaluate(lhs, env, a);
    evaluate(rhs, env, b);
    if (!same(a, b)) {
      r.equal = false;
      r.counterexample = env;
      r.lhs_value = a[""];
      r.rhs_value = b[""];
    }
  });
  std::ostringstream os;
  if (r.equal) {
    os << "equal over " << r.assignments << " assignments";
  } else {
    os << "counterexample:";
    for (const auto& [n, v] : r.counterexample) os << " " << n << "=" << v;
    os << " gives lhs " << r.lhs_value << ", rhs " << r.rhs_value;
  }
  r.message = os.str();
  return r;
}

}  // namespace emalg::oracle
