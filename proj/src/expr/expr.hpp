#pragma once

#include "expr/coefficient.hpp"

#include <array>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace emalg {

/// Spatial index: concrete component 1..3, or a symbolic name.
///
/// Whether a symbolic index is free or summed is decided by how often it
/// occurs in a term: once means free, twice means summed over {1,2,3}.
struct Index {
  int value = 0;  // 1..3 when concrete
  std::string name;

  Index() = default;
  Index(int v) : value(v) {}  // NOLINT(google-explicit-constructor)
  Index(std::string n) : name(std::move(n)) {}  // NOLINT
  Index(const char* n) : name(n) {}  // NOLINT

  [[nodiscard]] bool concrete() const { return value != 0; }
  [[nodiscard]] std::string str() const { return concrete() ? std::to_string(value) : name; }

  friend bool operator==(const Index&, const Index&) = default;
  friend std::strong_ordering operator<=>(const Index& a, const Index& b) {
    if (a.concrete() != b.concrete()) return a.concrete() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = a.value <=> b.value; c != 0) return c;
    return a.name <=> b.name;
  }
};

enum class FieldKind { E, B };

struct Epsilon {
  std::array<Index, 3> idx;
  friend bool operator==(const Epsilon&, const Epsilon&) = default;
};

struct Kronecker {
  Index a, b;
  friend bool operator==(const Kronecker&, const Kronecker&) = default;
};

/// Cartesian coordinate x^idx of a point.
struct Coord {
  std::string point;
  Index idx;
  friend bool operator==(const Coord&, const Coord&) = default;
};

/// delta(p - q), differentiated w.r.t. p once per entry of derivs.
struct DiracDelta {
  std::string p, q;
  std::vector<Index> derivs;
  friend bool operator==(const DiracDelta&, const DiracDelta&) = default;
};

/// Field operator component with spatial derivatives (a multiset).
struct FieldOp {
  FieldKind kind = FieldKind::E;
  Index idx;
  std::string point;
  std::vector<Index> derivs;
  friend bool operator==(const FieldOp&, const FieldOp&) = default;
};

using CNumber = std::variant<Epsilon, Kronecker, Coord, DiracDelta>;

/// coeff * (commuting c-numbers) * (ordered field operators), integrated over
/// the listed points.
struct Term {
  Coefficient coeff;
  std::vector<CNumber> cnumbers;
  std::vector<FieldOp> ops;
  std::vector<std::string> integrated;
};

struct Expr {
  std::vector<Term> terms;
  std::set<std::string> free_indices;
  std::set<std::string> free_points;

  [[nodiscard]] bool empty() const { return terms.empty(); }
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> names)
      : std::runtime_error(what), names_(std::move(names)) {}
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

// --- term helpers -----------------------------------------------------------

void for_each_index(Term& t, const std::function<void(Index&)>& f);
void for_each_index(const Term& t, const std::function<void(const Index&)>& f);
void for_each_point(Term& t, const std::function<void(std::string&)>& f);

/// Occurrence count of every symbolic index name in the term.
std::map<std::string, int> index_counts(const Term& t);
std::vector<std::string> summed_indices(const Term& t);
std::set<std::string> referenced_points(const Term& t);
bool is_integrated(const Term& t, const std::string& point);

void rename_indices(Term& t, const std::map<std::string, Index>& mapping);
void rename_points(Term& t, const std::map<std::string, std::string>& mapping);

/// A name of the form prefix<N> unused by any index or point of the term.
std::string fresh_name(const Term& t, const std::string& prefix);

/// Product of two terms with bound names (summed indices, integrated points)
/// alpha-renamed apart.  Operator order: lhs ops then rhs ops.
Term multiply(const Term& lhs, const Term& rhs);

Expr make_expr(std::vector<Term> terms);
Expr operator+(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr scale(const Expr& e, const Coefficient& c);
Expr negate(const Expr& e);

/// Recompute free_indices/free_points from the terms.
void infer_free(Expr& e);

// --- core operations ---------------------------------------------------------

/// Empty iff every invariant of the IR holds.
std::vector<std::string> validate(const Expr& e);

struct CanonStats {
  /// Terms that cancelled only after an integrated-point relabeling.
  int relabel_cancellations = 0;
  int merged = 0;
  /// Terms that summed to zero with like terms.
  int cancelled = 0;
  /// Terms equal to their own negative under a dummy/point relabeling.
  int self_cancelled = 0;
};

Expr canonicalize(const Expr& e, CanonStats* stats = nullptr);
bool equal_canonical(const Expr& a, const Expr& b);
/// Structural equality of already-canonical expressions.
bool identical(const Expr& a, const Expr& b);

/// Expand summed indices over {1,2,3}; evaluate fully concrete epsilon and
/// Kronecker symbols into the coefficient.
Expr expand_concrete(const Expr& e);

/// Deterministic structural key of a canonical term, excluding the rational.
std::string term_key(const Term& t);

bool is_dummy_name(const std::string& name);
bool is_canonical_point(const std::string& name);

}  // namespace emalg
