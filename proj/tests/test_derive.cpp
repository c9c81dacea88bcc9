#include "doctest.h"

#include "derive/derive.hpp"

#include "json.hpp"

using namespace emalg;
using namespace emalg::derive;

namespace {

Expr px(const std::string& s) { return dsl::parse_expr(s); }

const Run& run_labeled(const DerivationReport& r, const std::string& label) {
  for (const auto& run : r.runs) {
    if (run.label == label) return run;
  }
  FAIL("no run " << label);
  return r.runs.front();
}

bool all_mandatory_matched(const Run& run) {
  for (const auto& m : run.milestones) {
    if (m.mandatory && !m.matched) return false;
  }
  return !run.milestones.empty();
}

}  // namespace

TEST_CASE("names, verdicts and default modes") {
  CHECK(name_from("pp") == Name::PP);
  CHECK(name_from("ordering") == Name::Ordering);
  CHECK_FALSE(name_from("pq").has_value());
  CHECK(to_string(Verdict::Deferred) == "deferred-to-oracle");
  CHECK(to_string(Verdict::Proven) == "proven");
  CHECK(default_mode(Name::PP) == Mode::Symbolic);
  CHECK(default_mode(Name::JP) == Mode::Concrete);
  CHECK(default_mode(Name::JJ) == Mode::Concrete);
}

TEST_CASE("momentum bracket: nine pairs and the symbolic pair") {
  auto r = derive::derive(Name::PP, {});
  CHECK(r.verdict == Verdict::Proven);
  CHECK(r.runs.size() == 10);
  CHECK(r.failing().empty());
  for (const auto& run : r.runs) {
    CHECK(run.final_expr.empty());
    CHECK(all_mandatory_matched(run));
  }
  CHECK(run_labeled(r, "(i,j)").initial == "comm(P[i], P[j])");
  CHECK(r.assumptions == std::vector<std::string>{rewrite::kSurfaceTermsAssumption});
}

TEST_CASE("momentum bracket with sources leaves a residual") {
  auto r = derive::derive(Name::PP, {false, false});
  CHECK(r.verdict == Verdict::Residual);
  // diagonal pairs still vanish because eps[i,i,m] = 0
  CHECK(run_labeled(r, "(2,2)").verdict == Verdict::Proven);
  CHECK(run_labeled(r, "(1,2)").verdict == Verdict::Residual);
  CHECK(r.failing().size() == 7);
  CHECK(equal_canonical(run_labeled(r, "(i,j)").final_expr,
                        px("I*hbar*eps0*eps[i,j,m]*int(x)(E[k](x)d[x,k]*B[m](x) - E[m](x)*B[k](x)d[x,k])")));
}

TEST_CASE("one constraint is not enough") {
  auto r = derive::derive(Name::PP, {true, false});
  CHECK(r.verdict == Verdict::Residual);
  CHECK(equal_canonical(run_labeled(r, "(i,j)").final_expr,
                        px("-I*hbar*eps0*eps[i,j,m]*int(x)(E[m](x)*B[k](x)d[x,k])")));
}

TEST_CASE("angular momentum with momentum") {
  auto r = derive::derive(Name::JP, {});
  CHECK(r.verdict == Verdict::Proven);
  CHECK(r.mode == Mode::Concrete);
  CHECK(r.runs.size() == 9);
  const Run& run = run_labeled(r, "(3,1)");
  CHECK(dsl::print_canonical(run.final_expr) ==
        "-I*hbar*eps0*int(x)(E[1](x)*B[3](x)) + I*hbar*eps0*int(x)(E[3](x)*B[1](x))");
  CHECK(all_mandatory_matched(run));
  CHECK(run_labeled(r, "(2,2)").final_expr.empty());
}

TEST_CASE("angular momentum components") {
  auto r = derive::derive(Name::JJ, {});
  CHECK(r.verdict == Verdict::Proven);
  const Run& run = run_labeled(r, "(2,3)");
  // eps[2,3,1]: x^m (E^1 B^m - E^m B^1), the m = 1 pieces cancel
  CHECK(dsl::print_canonical(run.final_expr) ==
        "I*hbar*eps0*int(x)(x[2](x)*E[1](x)*B[2](x)) - I*hbar*eps0*int(x)(x[2](x)*E[2](x)*B[1](x)) + "
        "I*hbar*eps0*int(x)(x[3](x)*E[1](x)*B[3](x)) - I*hbar*eps0*int(x)(x[3](x)*E[3](x)*B[1](x))");
  for (const auto& rn : r.runs) CHECK(all_mandatory_matched(rn));
}

TEST_CASE("angular momentum components need concrete mode") {
  // divergence extraction works on concrete index groups only
  auto r = derive::derive(Name::JJ, {}, Mode::Symbolic);
  CHECK(r.verdict == Verdict::Residual);
}

TEST_CASE("ordering of the momentum density is deferred") {
  auto r = derive::derive(Name::Ordering, {});
  CHECK(r.verdict == Verdict::Deferred);
  const Run& run = run_labeled(r, "(i)");
  CHECK(equal_canonical(run.final_expr, px("-2*I*hbar*eps0^-1*int(y)(ddelta(x,y)*ddelta(x,y)d[x,i])")));
  CHECK(run.trace.steps.front().rule == "collect_commutators");
  CHECK(all_mandatory_matched(run));
}

TEST_CASE("target helpers agree with hand-written forms") {
  CHECK(equal_canonical(px(pp_charge_residual("i", "j")),
                        px("I*hbar*eps0*eps[i,j,m]*int(z)(E[k](z)d[z,k]*B[m](z) - E[m](z)*B[k](z)d[z,k])")));
  CHECK(equal_canonical(px(jp_target("1", "2")), px("I*hbar*eps0*int(x)(E[1](x)*B[2](x) - E[2](x)*B[1](x))")));
  CHECK(reaches_target(px("I*hbar*eps0*int(x)(E[1](x)*B[2](x) - E[2](x)*B[1](x))"),
                       "I*hbar*eps0*eps[1,2,k]*eps[k,m,n]*int(x)(E[m](x)*B[n](x))", true));
  CHECK_FALSE(reaches_target(px("I*hbar*eps0*int(x)(E[1](x)*B[2](x))"),
                             "I*hbar*eps0*eps[1,2,k]*eps[k,m,n]*int(x)(E[m](x)*B[n](x))", true));
}

TEST_CASE("Jacobi spot check") {
  auto j = jacobi_check({});
  CHECK(j.zero);
  CHECK(j.inner_agree);
  CHECK(j.sum.empty());
  CHECK(j.inner == std::vector<std::string>{"I*hbar*P[1]", "I*hbar*P[2]", "I*hbar*J[3]"});
}

TEST_CASE("JSON documents replay") {
  auto r = derive::derive(Name::PP, {});
  std::string doc = to_json(r);
  auto j = nlohmann::json::parse(doc);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["derivation"] == "pp");
  CHECK(j["verdict"] == "proven");
  CHECK(j["constraint_flags"]["div_e_zero"] == true);
  CHECK(j["runs"].size() == 10);
  CHECK(j["runs"][0]["steps"][0].contains("rule"));
  CHECK(j["runs"][0]["steps"][0].contains("anchor"));
  CHECK(j["runs"][0]["steps"][0].contains("expr_text"));

  auto check = replay_document(doc);
  CHECK(check.ok);
  CHECK(check.verdict == Verdict::Proven);
  CHECK(check.derivation == "pp");
}

TEST_CASE("JSON replay of a residual keeps the verdict") {
  auto check = replay_document(to_json(derive::derive(Name::PP, {false, false})));
  CHECK(check.ok);
  CHECK(check.verdict == Verdict::Residual);
}

TEST_CASE("unknown fields are ignored, tampering is not") {
  auto j = nlohmann::json::parse(to_json(derive::derive(Name::JP, {})));
  j["future_field"] = {1, 2, 3};
  j["runs"][0]["extra"] = "x";
  CHECK(replay_document(j.dump()).ok);

  auto bad = j;
  bad["runs"][1]["steps"][3]["expr_text"] = "0";
  CHECK_FALSE(replay_document(bad.dump()).ok);

  auto lie = j;
  lie["verdict"] = "residual";
  CHECK_FALSE(replay_document(lie.dump()).ok);

  auto flags = j;
  flags["constraint_flags"]["div_b_zero"] = false;
  CHECK_FALSE(replay_document(flags.dump()).ok);

  auto version = j;
  version["schema_version"] = 99;
  CHECK_FALSE(replay_document(version.dump()).ok);

  CHECK_FALSE(replay_document("{not json").ok);
}

TEST_CASE("LaTeX rendering") {
  auto r = derive::derive(Name::PP, {});
  std::string tex = to_latex(r);
  CHECK(tex.rfind("\\documentclass", 0) == 0);
  CHECK(tex.find("\\end{document}") != std::string::npos);
  CHECK(tex.find("\\epsilon_0") != std::string::npos);
  CHECK(latex_from_document(to_json(r)) == tex);
}
