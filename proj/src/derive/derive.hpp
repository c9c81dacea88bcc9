#pragma once

#include "rewrite/rewrite.hpp"

#include <optional>
#include <string>
#include <vector>

namespace emalg::derive {

enum class Name { PP, JP, JJ, Ordering };
enum class Verdict { Proven, Residual, Deferred };
enum class Mode { Symbolic, Concrete };

std::string to_string(Name n);
std::string to_string(Verdict v);
std::string to_string(Mode m);
std::optional<Name> name_from(const std::string& s);

struct Milestone {
  std::string label;
  bool matched = false;
  bool mandatory = true;
  std::string detail;
};

/// One pipeline run, e.g. a single (i,j) pair.
struct Run {
  std::string label;
  std::string initial;  // surface text fed to the engine
  std::string target;   // expected final form, DSL text
  Expr final_expr;
  rewrite::RewriteTrace trace;
  std::vector<Milestone> milestones;
  Verdict verdict = Verdict::Residual;
  bool concrete = false;
};

struct DerivationReport {
  Name name = Name::PP;
  rewrite::ConstraintSet constraints;
  Mode mode = Mode::Symbolic;
  Verdict verdict = Verdict::Residual;
  std::vector<Run> runs;
  std::vector<std::string> assumptions;

  /// Runs that did not reach their target.
  [[nodiscard]] std::vector<const Run*> failing() const;
};

DerivationReport derive_momentum_momentum(const rewrite::ConstraintSet& c, Mode mode = Mode::Symbolic);
DerivationReport derive_angular_momentum(const rewrite::ConstraintSet& c, Mode mode = Mode::Concrete);
DerivationReport derive_angular_angular(const rewrite::ConstraintSet& c, Mode mode = Mode::Concrete);
DerivationReport derive_ordering(const rewrite::ConstraintSet& c, Mode mode = Mode::Symbolic);
DerivationReport derive(Name n, const rewrite::ConstraintSet& c, std::optional<Mode> mode = std::nullopt);

Mode default_mode(Name n);

/// Final expression equals the target: directly, or after component
/// expansion of both sides when the run is in concrete mode.
bool reaches_target(const Expr& final_expr, const std::string& target, bool concrete);

/// Expected divergence part of [J^i, J^j] at a concrete pair:
/// I*hbar*eps0*eps[i,j,n]*x^n*x^m*((div E) B^m - E^m (div B)).
std::string jj_divergence_pattern(int i, int j);

/// Hand-written divergence residual of [P^i, P^j] with sources present.
std::string pp_charge_residual(const std::string& i, const std::string& j);

/// Closed forms used as targets.
std::string jp_target(const std::string& i, const std::string& j);
std::string jp_contracted_form(const std::string& i, const std::string& j);
std::string jj_target(const std::string& i, const std::string& j);
std::string ordering_target(const std::string& i);

struct JacobiResult {
  bool zero = false;
  bool inner_agree = false;  // engine results of the inner brackets match the closed forms
  Expr sum;
  std::vector<std::string> inner;  // closed forms substituted for the inner brackets
  std::vector<std::string> outer;  // engine results of the outer brackets
};

/// [J^1,[J^2,P^3]] + [J^2,[P^3,J^1]] + [P^3,[J^1,J^2]] with the inner brackets
/// replaced by I*hbar*P[1], I*hbar*P[2], I*hbar*J[3], after checking those against the
/// engine's own results for the inner brackets.
JacobiResult jacobi_check(const rewrite::ConstraintSet& c = {});

// --- trace documents -----------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

std::string to_json(const DerivationReport& r, int indent = 2);
std::string to_latex(const DerivationReport& r);

struct DocumentCheck {
  bool ok = false;
  std::string derivation;
  Verdict verdict = Verdict::Residual;
  std::string message;
};

/// Re-parse a JSON trace document, replay every run from its initial text and
/// recompute the verdict.
DocumentCheck replay_document(const std::string& json_text);

/// LaTeX rendering of a JSON trace document.
std::string latex_from_document(const std::string& json_text);

}  // namespace emalg::derive
