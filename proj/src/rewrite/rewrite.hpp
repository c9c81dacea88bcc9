#pragma once

#include "dsl/ast.hpp"
#include "expr/expr.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emalg::rewrite {

class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Primitive field commutators.  Only [E^i(p), B^j(q)] is nonzero:
///   -(I*hbar/eps0) * eps[i,j,k] * d/dp^k delta(p - q), k fresh and summed.
/// [B, E] follows from antisymmetry and is never stored.
struct AxiomTable {
  bool ee_zero = true;
  bool bb_zero = true;
};

struct ConstraintSet {
  bool div_e_zero = true;
  bool div_b_zero = true;
  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

// --- surface-level rules -----------------------------------------------------

/// Replace P[i] and J[i] by their field integrals (fresh dummies and points).
dsl::NodePtr expand_named(const dsl::NodePtr& n);

/// Rewrite a two-term difference X*Y - Y*X of adjacent field factors as comm(X, Y).
/// Returns the input unchanged when the pattern is absent.
dsl::NodePtr collect_commutators(const dsl::NodePtr& n);

/// Bilinearity plus [AB,C] = A[B,C] + [A,C]B and [A,CD] = C[A,D] + [A,C]D,
/// recursively; vanishing primitive brackets dropped, [B,E] turned into -[E,B].
dsl::NodePtr expand_commutators(const dsl::NodePtr& n, const AxiomTable& table = {});

/// Substitute every primitive commutator and lower to the expression IR.
Expr apply_axioms(const dsl::NodePtr& n, const AxiomTable& table = {});

// --- expression-level rules --------------------------------------------------

Expr contract_epsilon_pairs(const Expr& e);
Expr contract_deltas(const Expr& e);

struct IbpOptions {
  /// Leave terms carrying several delta functions untouched instead of throwing.
  bool skip_unsupported = false;
};

/// Move derivatives off the (single) delta function of each term by
/// integration by parts, then integrate the delta out.  Sets
/// *surface_terms_discarded when at least one integration by parts happened.
Expr integrate_out_delta(const Expr& e, bool* surface_terms_discarded = nullptr, IbpOptions opts = {});

Expr apply_field_constraints(const Expr& e, const ConstraintSet& c);

struct DivergenceSplit {
  Expr remaining;
  Expr divergence_part;
};

/// Split the derivative-coefficient matrix of each group of concrete terms
/// into its trace (a pure divergence) and the traceless remainder.
DivergenceSplit divergence_extract(const Expr& e);

/// True when the term contains sum_k d_k F^k for some field operator.
bool has_divergence(const Term& t, FieldKind kind);

// --- driver --------------------------------------------------------------------

struct TraceStep {
  std::string rule;
  std::string anchor;
  std::string before_summary;
  std::string after_text;
  std::string note;
  dsl::NodePtr after_ast;  // set while still at surface level
  std::optional<Expr> after_expr;
  int lowered_terms = -1;  // apply_axioms: terms before canonical merging
  int removed_terms = 0;   // apply_field_constraints
  CanonStats stats;
  std::optional<Expr> divergence_part;  // divergence_extract
};

struct RewriteTrace {
  std::string initial;
  std::vector<TraceStep> steps;
  std::vector<std::string> assumptions;
  bool terminated = true;
};

struct SimplifyOptions {
  bool concrete = false;
  int max_iterations = 64;
};

/// Anchor text recorded for a rule name.
std::string anchor_for(const std::string& rule);

/// State threaded through a replayable rule sequence.
struct PipelineState {
  dsl::NodePtr ast;
  std::optional<Expr> expr;
};

/// Apply one named rule to the state.  At expression level the result is
/// canonicalized and the step's bookkeeping filled in.
TraceStep apply_rule(const std::string& rule, const PipelineState& in, const AxiomTable& table,
                     const ConstraintSet& constraints, bool* surface_terms_discarded = nullptr);

PipelineState state_of(const TraceStep& s);

std::pair<Expr, RewriteTrace> simplify_fixpoint(const dsl::NodePtr& input, const AxiomTable& table,
                                                const ConstraintSet& constraints, SimplifyOptions opts = {});

struct ReplayResult {
  bool ok = true;
  std::size_t failed_step = 0;
  std::string expected;
  std::string actual;
};

/// Re-apply every recorded rule from the initial text and compare each
/// printed intermediate with the recorded one.
ReplayResult replay(const std::string& initial, const std::vector<std::pair<std::string, std::string>>& steps,
                    const AxiomTable& table, const ConstraintSet& constraints);
ReplayResult replay(const RewriteTrace& trace, const AxiomTable& table, const ConstraintSet& constraints);

inline const char* kSurfaceTermsAssumption = "surface terms at infinity discarded in integration by parts";

}  // namespace emalg::rewrite
