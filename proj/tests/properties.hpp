#pragma once

// Property checks shared by the unit suite and the acceptance binary.

#include "dsl/ast.hpp"
#include "expr/expr.hpp"
#include "random_expr.hpp"

#include <set>
#include <string>
#include <vector>

namespace emalg::testing {

struct PropertyTally {
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
};

// E/B pattern of a term plus derivative counts; invariant under relabeling.
inline std::string op_signature(const Term& t) {
  std::string s;
  for (const auto& op : t.ops) {
    s += op.kind == FieldKind::E ? 'E' : 'B';
    s += std::to_string(op.derivs.size());
  }
  return s;
}

inline PropertyTally canonical_properties(int n, std::uint64_t seed) {
  PropertyTally tally;
  RandomExpr gen(seed);
  for (int c = 0; c < n; ++c) {
    std::string text = gen.expression();
    ++tally.cases;
    try {
      Expr e = dsl::parse_expr(text);
      Expr once = canonicalize(e);
      Expr twice = canonicalize(once);
      if (!identical(once, twice)) {
        tally.fail("not idempotent: " + text);
        continue;
      }
      std::set<std::string> before;
      for (const auto& t : e.terms) before.insert(op_signature(t));
      for (const auto& t : once.terms) {
        if (!before.contains(op_signature(t))) {
          tally.fail("operator order changed: " + text + " -> " + dsl::print_canonical(once));
          break;
        }
      }
    } catch (const std::exception& ex) {
      tally.fail(text + ": " + ex.what());
    }
  }
  return tally;
}

inline PropertyTally round_trip_properties(int n, std::uint64_t seed) {
  PropertyTally tally;
  RandomExpr gen(seed);
  for (int c = 0; c < n; ++c) {
    std::string text = gen.expression();
    ++tally.cases;
    try {
      auto tree = dsl::parse(text);
      std::string printed = dsl::print(*tree);
      auto again = dsl::parse(printed);
      if (!dsl::same_tree(*tree, *again) || dsl::print(*again) != printed) {
        tally.fail("surface round trip: " + text + " -> " + printed);
        continue;
      }
      Expr canon = canonicalize(dsl::lower(*tree));
      std::string ctext = dsl::print_canonical(canon);
      Expr back = canonicalize(dsl::parse_expr(ctext));
      if (!identical(canon, back) || dsl::print_canonical(back) != ctext) {
        tally.fail("canonical round trip: " + ctext);
      }
    } catch (const std::exception& ex) {
      tally.fail(text + ": " + ex.what());
    }
  }
  return tally;
}

}  // namespace emalg::testing
