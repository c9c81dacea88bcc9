#define EMALG_BUILDING
#include "emalg/emalg.h"

#include "derive/derive.hpp"
#include "oracle/oracle.hpp"

#include "json.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>

struct emalg_expr {
  emalg::dsl::NodePtr ast;
};

struct emalg_report {
  emalg::derive::DerivationReport report;
  std::vector<std::string> finals;
};

namespace {

using namespace emalg;

thread_local std::string last_error;
thread_local long last_offset = -1;

emalg_status fail(emalg_status s, const std::string& msg, long offset = -1) {
  last_error = msg;
  last_offset = offset;
  return s;
}

template <class F>
emalg_status guard(F&& f) {
  last_error.clear();
  last_offset = -1;
  try {
    return f();
  } catch (const dsl::ParseError& e) {
    return fail(EMALG_ERR_PARSE, e.what(), long(e.offset()));
  } catch (const ValidationError& e) {
    return fail(EMALG_ERR_VALIDATION, e.what());
  } catch (const rewrite::RuleError& e) {
    return fail(EMALG_ERR_RULE, e.what());
  } catch (const oracle::OracleError& e) {
    return fail(EMALG_ERR_ORACLE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(EMALG_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(EMALG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EMALG_ERR_INTERNAL, "unknown exception");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string("null ") + what);
}

rewrite::ConstraintSet constraints_of(const emalg_constraints* c) {
  rewrite::ConstraintSet cs;
  if (c) {
    cs.div_e_zero = c->div_e_zero != 0;
    cs.div_b_zero = c->div_b_zero != 0;
  }
  return cs;
}

bool needs_pipeline(const dsl::Node& n) {
  return dsl::contains_kind(n, dsl::NodeKind::Comm) || dsl::contains_kind(n, dsl::NodeKind::Named);
}

Expr normal_form(const emalg_expr* e, const emalg_constraints* c, bool concrete) {
  Expr out;
  if (needs_pipeline(*e->ast)) {
    out = rewrite::simplify_fixpoint(e->ast, {}, constraints_of(c), {concrete, 64}).first;
  } else {
    out = canonicalize(dsl::lower(*e->ast));
  }
  if (concrete) out = canonicalize(expand_concrete(out));
  return out;
}

Expr plain(const emalg_expr* e) {
  if (needs_pipeline(*e->ast)) throw std::invalid_argument("oracle inputs must be free of commutators and named operators");
  return dsl::lower(*e->ast);
}

oracle::Family family_of(emalg_family f) {
  if (f == EMALG_RECTANGLE) return oracle::Family::Rectangle;
  if (f == EMALG_GAUSSIAN) return oracle::Family::Gaussian;
  throw std::invalid_argument("unknown delta family");
}

emalg_verdict verdict_of(derive::Verdict v) {
  switch (v) {
    case derive::Verdict::Proven: return EMALG_PROVEN;
    case derive::Verdict::Deferred: return EMALG_DEFERRED;
    default: return EMALG_RESIDUAL;
  }
}

const derive::Run* run_at(const emalg_report* r, size_t run) {
  if (!r || run >= r->report.runs.size()) return nullptr;
  return &r->report.runs[run];
}

}  // namespace

extern "C" {

const char* emalg_last_error(void) { return last_error.c_str(); }
long emalg_last_error_offset(void) { return last_offset; }
const char* emalg_version(void) { return "1.0.0"; }
emalg_constraints emalg_default_constraints(void) { return {1, 1}; }
void emalg_string_free(char* s) { std::free(s); }

emalg_status emalg_expr_parse(const char* text, emalg_expr** out) {
  return guard([&] {
    need(text, "text");
    need(out, "output");
    *out = nullptr;
    auto ast = dsl::parse(text);
    *out = new emalg_expr{std::move(ast)};
    return EMALG_OK;
  });
}

void emalg_expr_free(emalg_expr* e) { delete e; }

emalg_status emalg_expr_print(const emalg_expr* e, char** out) {
  return guard([&] {
    need(e, "expression");
    need(out, "output");
    *out = dup(dsl::print(*e->ast));
    return EMALG_OK;
  });
}

emalg_status emalg_expr_canonical(const emalg_expr* e, const emalg_constraints* c, int concrete, char** out) {
  return guard([&] {
    need(e, "expression");
    need(out, "output");
    *out = dup(dsl::print_canonical(normal_form(e, c, concrete != 0)));
    return EMALG_OK;
  });
}

emalg_status emalg_expr_equal(const emalg_expr* a, const emalg_expr* b, const emalg_constraints* c, int* equal) {
  return guard([&] {
    need(a, "expression");
    need(b, "expression");
    need(equal, "output");
    Expr x = normal_form(a, c, false);
    Expr y = normal_form(b, c, false);
    *equal = equal_canonical(x, y) || equal_canonical(expand_concrete(x), expand_concrete(y));
    return EMALG_OK;
  });
}

emalg_status emalg_expr_latex(const emalg_expr* e, char** out) {
  return guard([&] {
    need(e, "expression");
    need(out, "output");
    *out = dup(dsl::emit_latex(*e->ast));
    return EMALG_OK;
  });
}

emalg_status emalg_derive(emalg_derivation d, const emalg_constraints* c, emalg_mode mode, emalg_report** out) {
  return guard([&] {
    need(out, "output");
    *out = nullptr;
    derive::Name name;
    switch (d) {
      case EMALG_PP: name = derive::Name::PP; break;
      case EMALG_JP: name = derive::Name::JP; break;
      case EMALG_JJ: name = derive::Name::JJ; break;
      case EMALG_ORDERING: name = derive::Name::Ordering; break;
      default: throw std::invalid_argument("unknown derivation");
    }
    std::optional<derive::Mode> m;
    if (mode == EMALG_MODE_SYMBOLIC) {
      m = derive::Mode::Symbolic;
    } else if (mode == EMALG_MODE_CONCRETE) {
      m = derive::Mode::Concrete;
    } else if (mode != EMALG_MODE_DEFAULT) {
      throw std::invalid_argument("unknown mode");
    }
    auto rep = std::make_unique<emalg_report>();
    rep->report = derive::derive(name, constraints_of(c), m);
    for (const auto& r : rep->report.runs) rep->finals.push_back(dsl::print_canonical(r.final_expr));
    *out = rep.release();
    return EMALG_OK;
  });
}

void emalg_report_free(emalg_report* r) { delete r; }

emalg_verdict emalg_report_verdict(const emalg_report* r) {
  return r ? verdict_of(r->report.verdict) : EMALG_RESIDUAL;
}

size_t emalg_report_run_count(const emalg_report* r) { return r ? r->report.runs.size() : 0; }

emalg_status emalg_report_run(const emalg_report* r, size_t run, const char** label, const char** final_text,
                              emalg_verdict* verdict) {
  return guard([&] {
    const derive::Run* x = run_at(r, run);
    if (!x) throw std::invalid_argument("run index out of range");
    if (label) *label = x->label.c_str();
    if (final_text) *final_text = r->finals[run].c_str();
    if (verdict) *verdict = verdict_of(x->verdict);
    return EMALG_OK;
  });
}

size_t emalg_report_step_count(const emalg_report* r, size_t run) {
  const derive::Run* x = run_at(r, run);
  return x ? x->trace.steps.size() : 0;
}

emalg_status emalg_report_step(const emalg_report* r, size_t run, size_t step, const char** rule,
                               const char** anchor, const char** text, const char** note) {
  return guard([&] {
    const derive::Run* x = run_at(r, run);
    if (!x || step >= x->trace.steps.size()) throw std::invalid_argument("step index out of range");
    const auto& s = x->trace.steps[step];
    if (rule) *rule = s.rule.c_str();
    if (anchor) *anchor = s.anchor.c_str();
    if (text) *text = s.after_text.c_str();
    if (note) *note = s.note.c_str();
    return EMALG_OK;
  });
}

size_t emalg_report_milestone_count(const emalg_report* r, size_t run) {
  const derive::Run* x = run_at(r, run);
  return x ? x->milestones.size() : 0;
}

emalg_status emalg_report_milestone(const emalg_report* r, size_t run, size_t k, const char** label, int* matched,
                                    int* mandatory) {
  return guard([&] {
    const derive::Run* x = run_at(r, run);
    if (!x || k >= x->milestones.size()) throw std::invalid_argument("milestone index out of range");
    const auto& m = x->milestones[k];
    if (label) *label = m.label.c_str();
    if (matched) *matched = m.matched;
    if (mandatory) *mandatory = m.mandatory;
    return EMALG_OK;
  });
}

size_t emalg_report_assumption_count(const emalg_report* r) { return r ? r->report.assumptions.size() : 0; }

const char* emalg_report_assumption(const emalg_report* r, size_t k) {
  if (!r || k >= r->report.assumptions.size()) return nullptr;
  return r->report.assumptions[k].c_str();
}

emalg_status emalg_report_json(const emalg_report* r, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "output");
    *out = dup(derive::to_json(r->report));
    return EMALG_OK;
  });
}

emalg_status emalg_report_latex(const emalg_report* r, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "output");
    *out = dup(derive::to_latex(r->report));
    return EMALG_OK;
  });
}

emalg_status emalg_trace_replay(const char* json, emalg_verdict* verdict, char** message) {
  return guard([&] {
    need(json, "document");
    auto chk = derive::replay_document(json);
    if (verdict) *verdict = verdict_of(chk.verdict);
    if (message) *message = dup(chk.message);
    if (!chk.ok) return fail(EMALG_ERR_ARGUMENT, chk.message);
    return EMALG_OK;
  });
}

emalg_status emalg_trace_latex(const char* json, char** out) {
  return guard([&] {
    need(json, "document");
    need(out, "output");
    try {
      *out = dup(derive::latex_from_document(json));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("bad trace document: ") + e.what());
    }
    return EMALG_OK;
  });
}

emalg_status emalg_jacobi_check(const emalg_constraints* c, int* zero, char** sum_text) {
  return guard([&] {
    need(zero, "output");
    auto j = derive::jacobi_check(constraints_of(c));
    *zero = j.zero;
    if (sum_text) *sum_text = dup(dsl::print_canonical(j.sum));
    return EMALG_OK;
  });
}

emalg_status emalg_enumerate_identity(const emalg_expr* lhs, const emalg_expr* rhs, int* equal, char** message) {
  return guard([&] {
    need(lhs, "expression");
    need(rhs, "expression");
    need(equal, "output");
    auto r = oracle::enumerate_identity(plain(lhs), plain(rhs));
    *equal = r.equal;
    if (message) *message = dup(r.message);
    return EMALG_OK;
  });
}

emalg_status emalg_oracle_flip(emalg_family f, double a, double extent, int points, double* max_error,
                               double* off_edge_error, double* truncation) {
  return guard([&] {
    if (points <= 0 || !(extent > 0)) throw std::invalid_argument("grid needs positive extent and points");
    auto r = oracle::check_delta_flip({family_of(f), a}, {extent, points});
    if (max_error) *max_error = r.max_error;
    if (off_edge_error) *off_edge_error = r.off_edge_error;
    if (truncation) *truncation = r.truncation;
    return EMALG_OK;
  });
}

emalg_status emalg_oracle_ibp(emalg_family f, double a, double extent, int points, double* err1, double* err2,
                              double* limit_error) {
  return guard([&] {
    if (points <= 0 || !(extent > 0)) throw std::invalid_argument("grid needs positive extent and points");
    auto r = oracle::check_integration_by_parts(oracle::gaussian_bump(0.2, 0.4), oracle::gaussian_bump(-0.1, 0.5),
                                                {family_of(f), a}, {extent, points});
    if (err1) *err1 = r.err1;
    if (err2) *err2 = r.err2;
    if (limit_error) *limit_error = r.limit_error;
    return EMALG_OK;
  });
}

emalg_status emalg_oracle_ordering(emalg_family f, double a, double* axis_integral, double* transverse,
                                   double* transverse_expected) {
  return guard([&] {
    auto r = oracle::check_ordering_residual({family_of(f), a});
    if (axis_integral) *axis_integral = r.axis_integral;
    if (transverse) *transverse = r.transverse;
    if (transverse_expected) *transverse_expected = r.transverse_expected;
    return EMALG_OK;
  });
}

emalg_status emalg_random_field_check(const emalg_expr* lhs, const emalg_expr* rhs, uint64_t seed,
                                      double* max_error) {
  return guard([&] {
    need(lhs, "expression");
    need(rhs, "expression");
    need(max_error, "output");
    *max_error = oracle::random_field_check(plain(lhs), plain(rhs), seed);
    return EMALG_OK;
  });
}

}  // extern "C"
