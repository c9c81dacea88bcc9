#include "rewrite/rewrite.hpp"

#include <algorithm>
#include <map>

namespace emalg::rewrite {

namespace {

const std::map<std::string, std::string>& anchors() {
  static const std::map<std::string, std::string> table{
      {"expand_definitions", "momentum and angular momentum as field integrals"},
      {"collect_commutators", "operator-order difference written as a commutator"},
      {"expand_commutators", "bilinearity and Leibniz rule for commutators"},
      {"apply_axioms", "equal-time field commutators, all others vanish"},
      {"contract_epsilon_pairs", "epsilon-epsilon contraction"},
      {"contract_deltas", "Kronecker delta substitution"},
      {"integrate_out_delta", "integration by parts against the delta function, then sifting"},
      {"apply_field_constraints", "source-free fields: div E = div B = 0"},
      {"expand_concrete", "component expansion of summed indices"},
      {"divergence_extract", "trace part of the derivative coefficient matrix is a divergence"},
  };
  return table;
}

// Component expansion that keeps explicit divergences symbolic so the
// constraint rule can still recognise them.
Expr expand_concrete_keep_divergences(const Expr& e) {
  Expr keep;
  Expr expand;
  keep.free_indices = expand.free_indices = e.free_indices;
  keep.free_points = expand.free_points = e.free_points;
  for (const auto& t : e.terms) {
    if (has_divergence(t, FieldKind::E) || has_divergence(t, FieldKind::B)) {
      keep.terms.push_back(t);
    } else {
      expand.terms.push_back(t);
    }
  }
  Expr out = expand_concrete(expand);
  out.terms.insert(out.terms.end(), keep.terms.begin(), keep.terms.end());
  out.free_indices = e.free_indices;
  out.free_points = e.free_points;
  return out;
}

}  // namespace

std::string anchor_for(const std::string& rule) {
  auto it = anchors().find(rule);
  return it == anchors().end() ? std::string() : it->second;
}

namespace {

std::string cancellation_note(const CanonStats& stats) {
  if (stats.relabel_cancellations > 0) {
    return "relabel cancellation: " + std::to_string(stats.relabel_cancellations) + " terms";
  }
  return {};
}

void join(std::string& note, const std::string& more) {
  if (more.empty()) return;
  if (!note.empty()) note += "; ";
  note += more;
}

}  // namespace

PipelineState state_of(const TraceStep& s) {
  PipelineState st;
  st.ast = s.after_ast;
  st.expr = s.after_expr;
  return st;
}

TraceStep apply_rule(const std::string& rule, const PipelineState& in, const AxiomTable& table,
                     const ConstraintSet& constraints, bool* surface_terms_discarded) {
  TraceStep step;
  step.rule = rule;
  step.anchor = anchor_for(rule);
  step.before_summary = in.expr ? std::to_string(in.expr->terms.size()) + " terms" : "surface form";

  if (!in.expr) {
    if (!in.ast) throw RuleError("empty pipeline state");
    if (rule == "expand_definitions") {
      step.after_ast = expand_named(in.ast);
    } else if (rule == "collect_commutators") {
      step.after_ast = collect_commutators(in.ast);
    } else if (rule == "expand_commutators") {
      step.after_ast = expand_commutators(in.ast, table);
    } else if (rule == "apply_axioms") {
      Expr lowered = apply_axioms(in.ast, table);
      step.lowered_terms = int(lowered.terms.size());
      step.after_expr = canonicalize(lowered, &step.stats);
      step.note = "lowered to " + std::to_string(step.lowered_terms) + " terms";
      join(step.note, cancellation_note(step.stats));
    } else {
      throw RuleError("rule '" + rule + "' does not apply to a surface form");
    }
    step.after_text = step.after_expr ? dsl::print_canonical(*step.after_expr) : dsl::print(*step.after_ast);
    return step;
  }

  const Expr& e = *in.expr;
  Expr next;
  if (rule == "contract_epsilon_pairs") {
    next = contract_epsilon_pairs(e);
  } else if (rule == "contract_deltas") {
    next = contract_deltas(e);
  } else if (rule == "integrate_out_delta") {
    next = integrate_out_delta(e, surface_terms_discarded, IbpOptions{true});
  } else if (rule == "apply_field_constraints") {
    next = apply_field_constraints(e, constraints);
    step.removed_terms = int(e.terms.size() - next.terms.size());
    if (step.removed_terms > 0) step.note = "removed " + std::to_string(step.removed_terms) + " divergence terms";
  } else if (rule == "expand_concrete") {
    next = expand_concrete_keep_divergences(e);
  } else if (rule == "divergence_extract") {
    auto split = divergence_extract(e);
    next = split.remaining + split.divergence_part;
    next.free_indices = e.free_indices;
    next.free_points = e.free_points;
    if (!split.divergence_part.empty()) {
      step.note = "divergence part: " + dsl::print_canonical(split.divergence_part);
      step.divergence_part = split.divergence_part;
    }
  } else {
    throw RuleError("unknown rule '" + rule + "'");
  }
  step.after_expr = canonicalize(next, &step.stats);
  join(step.note, cancellation_note(step.stats));
  step.after_text = dsl::print_canonical(*step.after_expr);
  return step;
}

std::pair<Expr, RewriteTrace> simplify_fixpoint(const dsl::NodePtr& input, const AxiomTable& table,
                                                const ConstraintSet& constraints, SimplifyOptions opts) {
  RewriteTrace trace;
  trace.initial = dsl::print(*input);
  bool discarded = false;
  PipelineState state{input, std::nullopt};

  auto record = [&](TraceStep s) {
    state = state_of(s);
    trace.steps.push_back(std::move(s));
  };

  if (dsl::contains_kind(*input, dsl::NodeKind::Named)) {
    record(apply_rule("expand_definitions", state, table, constraints));
  }
  {
    TraceStep s = apply_rule("collect_commutators", state, table, constraints);
    if (!dsl::same_tree(*s.after_ast, *state.ast)) record(std::move(s));
  }
  const bool has_comm = dsl::contains_kind(*state.ast, dsl::NodeKind::Comm);
  if (has_comm) record(apply_rule("expand_commutators", state, table, constraints));
  {
    TraceStep s = apply_rule("apply_axioms", state, table, constraints);
    if (has_comm) {
      record(std::move(s));
    } else {
      state = state_of(s);
    }
  }

  std::vector<std::string> loop{"contract_epsilon_pairs", "contract_deltas", "integrate_out_delta",
                                "apply_field_constraints"};
  if (opts.concrete) {
    loop.emplace_back("expand_concrete");
    loop.emplace_back("divergence_extract");
  }

  trace.terminated = false;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    bool fired = false;
    for (const auto& rule : loop) {
      bool d = false;
      TraceStep s = apply_rule(rule, state, table, constraints, &d);
      if (identical(*s.after_expr, *state.expr)) continue;
      discarded = discarded || d;
      record(std::move(s));
      fired = true;
      break;
    }
    if (!fired) {
      trace.terminated = true;
      break;
    }
  }
  if (discarded) trace.assumptions.emplace_back(kSurfaceTermsAssumption);
  return {*state.expr, std::move(trace)};
}

ReplayResult replay(const std::string& initial, const std::vector<std::pair<std::string, std::string>>& steps,
                    const AxiomTable& table, const ConstraintSet& constraints) {
  PipelineState state{dsl::parse(initial), std::nullopt};
  for (std::size_t n = 0; n < steps.size(); ++n) {
    const auto& [rule, text] = steps[n];
    // a bracket-free input is lowered silently before the loop rules
    if (!state.expr && anchors().count(rule) && rule != "expand_definitions" && rule != "collect_commutators" &&
        rule != "expand_commutators" && rule != "apply_axioms") {
      state = state_of(apply_rule("apply_axioms", state, table, constraints));
    }
    TraceStep s = apply_rule(rule, state, table, constraints);
    if (s.after_text != text) return {false, n, text, s.after_text};
    state = state_of(s);
  }
  return {};
}

ReplayResult replay(const RewriteTrace& trace, const AxiomTable& table, const ConstraintSet& constraints) {
  std::vector<std::pair<std::string, std::string>> steps;
  for (const auto& s : trace.steps) steps.emplace_back(s.rule, s.after_text);
  return replay(trace.initial, steps, table, constraints);
}

}  // namespace emalg::rewrite
