#include "emalg/emalg.h"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kInternal = 1, kResidual = 2, kUsage = 64, kParse = 65 };

// Owned C string.
struct Str {
  char* p = nullptr;
  ~Str() { emalg_string_free(p); }
  [[nodiscard]] std::string s() const { return p ? p : ""; }
};

struct ExprHandle {
  emalg_expr* p = nullptr;
  ~ExprHandle() { emalg_expr_free(p); }
};

struct ReportHandle {
  emalg_report* p = nullptr;
  ~ReportHandle() { emalg_report_free(p); }
};

int report_error(emalg_status s, const std::string& input = {}) {
  std::cerr << "error: " << emalg_last_error() << "\n";
  if (s == EMALG_ERR_PARSE) {
    long off = emalg_last_error_offset();
    if (off >= 0 && !input.empty() && input.find('\n') == std::string::npos) {
      std::cerr << "  " << input << "\n  " << std::string(std::size_t(off), ' ') << "^\n";
    }
    return kParse;
  }
  if (s == EMALG_ERR_VALIDATION) return kParse;
  if (s == EMALG_ERR_ARGUMENT || s == EMALG_ERR_ORACLE) return kUsage;
  return kInternal;
}

std::string read_text(const std::string& arg) {
  std::ifstream in(arg);
  if (!in) return arg;
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return bool(out);
}

const char* verdict_name(emalg_verdict v) {
  switch (v) {
    case EMALG_PROVEN: return "proven";
    case EMALG_DEFERRED: return "deferred-to-oracle";
    default: return "residual";
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// --- oracle checks ---------------------------------------------------------------

struct OracleArgs {
  std::string family = "gaussian";
  double a = 0.05;
  int grid = 4096;
  double extent = 8.0;
  std::uint64_t seed = 42;
};

emalg_family family_of(const std::string& s) { return s == "rectangle" ? EMALG_RECTANGLE : EMALG_GAUSSIAN; }

// Axis integral and transverse self-overlap for one family and width; prints one line.
bool ordering_ok(emalg_family fam, double a, std::ostream& os) {
  double axis = 0, tr = 0, expected = 0;
  if (emalg_oracle_ordering(fam, a, &axis, &tr, &expected) != EMALG_OK) {
    os << "oracle error: " << emalg_last_error() << "\n";
    return false;
  }
  const double axis_tol = fam == EMALG_RECTANGLE ? 1e-12 : 1e-10;
  const double tr_tol = fam == EMALG_RECTANGLE ? 1e-12 : 1e-6;
  const bool ok = std::abs(axis) <= axis_tol && std::abs(tr - expected) <= tr_tol;
  os << (fam == EMALG_RECTANGLE ? "rectangle" : "gaussian") << " a=" << fmt(a) << ": transverse " << fmt(tr)
     << " (expected " << fmt(expected) << "), axis integral " << fmt(axis) << (ok ? "  ok" : "  FAIL") << "\n";
  return ok;
}

int run_oracle(const std::string& which, const OracleArgs& o) {
  const emalg_family fam = family_of(o.family);
  emalg_status s = EMALG_OK;
  bool ok = false;
  if (which == "flip") {
    double max_error = 0, off_edge = 0, trunc = 0;
    s = emalg_oracle_flip(fam, o.a, o.extent, o.grid, &max_error, &off_edge, &trunc);
    if (s == EMALG_OK) {
      ok = off_edge < 1e-6;
      std::cout << "flip identity max error " << fmt(max_error) << "\n";
      if (fam == EMALG_RECTANGLE) std::cout << "away from the jumps " << fmt(off_edge) << "\n";
      std::cout << "finite-difference truncation " << fmt(trunc)
                << (fam == EMALG_RECTANGLE ? " (at the rectangle's jumps)" : "") << "\n";
    }
  } else if (which == "ibp") {
    double e1 = 0, e2 = 0, lim = 0;
    s = emalg_oracle_ibp(fam, o.a, o.extent, o.grid, &e1, &e2, &lim);
    if (s == EMALG_OK) {
      ok = e1 < 1e-4 && e2 < 1e-4;
      std::cout << "err1 " << fmt(e1) << "\nerr2 " << fmt(e2) << "\ndistance to sharp delta " << fmt(lim) << "\n";
    }
  } else {
    ok = ordering_ok(fam, o.a, std::cout);
    if (!ok && *emalg_last_error()) s = EMALG_ERR_ORACLE;
  }
  if (s != EMALG_OK) return report_error(s);
  std::cout << (ok ? "within tolerance" : "outside tolerance") << "\n";
  return ok ? kOk : kResidual;
}

// --- derive --------------------------------------------------------------------

emalg_derivation derivation_of(const std::string& s) {
  if (s == "pp") return EMALG_PP;
  if (s == "jp") return EMALG_JP;
  if (s == "jj") return EMALG_JJ;
  return EMALG_ORDERING;
}

struct DeriveArgs {
  bool charges = false;
  std::string mode;
  std::string json, latex;
};

std::string suffixed(const std::string& path, const std::string& name, bool many) {
  if (!many) return path;
  auto dot = path.rfind('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) return path + "." + name;
  return path.substr(0, dot) + "." + name + path.substr(dot);
}

int derive_one(const std::string& name, const DeriveArgs& a, bool many, std::string& last_final) {
  emalg_constraints c = emalg_default_constraints();
  if (a.charges) c.div_e_zero = c.div_b_zero = 0;
  emalg_mode mode = a.mode == "symbolic" ? EMALG_MODE_SYMBOLIC
                    : a.mode == "concrete" ? EMALG_MODE_CONCRETE
                                           : EMALG_MODE_DEFAULT;
  ReportHandle r;
  if (auto s = emalg_derive(derivation_of(name), &c, mode, &r.p); s != EMALG_OK) return report_error(s);

  std::cout << "derivation " << name << ", div E = 0 " << (c.div_e_zero ? "on" : "off") << ", div B = 0 "
            << (c.div_b_zero ? "on" : "off") << "\n";
  for (std::size_t i = 0; i < emalg_report_run_count(r.p); ++i) {
    const char *label, *final_text;
    emalg_verdict v;
    emalg_report_run(r.p, i, &label, &final_text, &v);
    std::cout << "\n== " << name << " " << label << "\n";
    for (std::size_t k = 0; k < emalg_report_step_count(r.p, i); ++k) {
      const char *rule, *anchor, *text, *note;
      emalg_report_step(r.p, i, k, &rule, &anchor, &text, &note);
      std::cout << "[" << rule << "] " << anchor << "\n    " << text << "\n";
      if (*note) std::cout << "    (" << note << ")\n";
    }
    for (std::size_t k = 0; k < emalg_report_milestone_count(r.p, i); ++k) {
      const char* label_m;
      int matched, mandatory;
      emalg_report_milestone(r.p, i, k, &label_m, &matched, &mandatory);
      std::cout << "  " << (matched ? "[x] " : "[ ] ") << label_m << (mandatory ? "" : " (informational)") << "\n";
    }
    std::cout << "  " << label << ": " << verdict_name(v) << "\n";
    last_final = final_text;
  }
  for (std::size_t k = 0; k < emalg_report_assumption_count(r.p); ++k) {
    std::cout << "assumption: " << emalg_report_assumption(r.p, k) << "\n";
  }

  if (!a.json.empty()) {
    Str doc;
    if (auto s = emalg_report_json(r.p, &doc.p); s != EMALG_OK) return report_error(s);
    if (!write_file(suffixed(a.json, name, many), doc.s() + "\n")) {
      std::cerr << "error: cannot write " << a.json << "\n";
      return kInternal;
    }
  }
  if (!a.latex.empty()) {
    Str tex;
    if (auto s = emalg_report_latex(r.p, &tex.p); s != EMALG_OK) return report_error(s);
    if (!write_file(suffixed(a.latex, name, many), tex.s())) {
      std::cerr << "error: cannot write " << a.latex << "\n";
      return kInternal;
    }
  }

  const emalg_verdict v = emalg_report_verdict(r.p);
  std::cout << "verdict: " << verdict_name(v) << "\n";
  if (v == EMALG_PROVEN) return kOk;
  if (v == EMALG_DEFERRED) {
    bool ok = true;
    std::cout << "oracle on the residual:\n";
    for (emalg_family fam : {EMALG_RECTANGLE, EMALG_GAUSSIAN}) {
      for (double w : {0.1, 0.05, 0.02, 0.01}) {
        std::cout << "  ";
        ok = ordering_ok(fam, w, std::cout) && ok;
      }
    }
    std::cout << (ok ? "oracle: residual integrates to 0" : "oracle: FAILED") << "\n";
    return ok ? kOk : kResidual;
  }
  return kResidual;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Commutator algebra for the free electromagnetic field"};
  app.require_subcommand(1);

  DeriveArgs da;
  std::string which;
  auto* derive = app.add_subcommand("derive", "run a derivation and print its trace");
  derive->add_option("name", which, "pp, jp, jj, ordering or all")
      ->required()
      ->check(CLI::IsMember({"pp", "jp", "jj", "ordering", "all"}));
  derive->add_flag("--charges", da.charges, "drop div E = 0 and div B = 0");
  derive->add_option("--mode", da.mode, "symbolic or concrete")->check(CLI::IsMember({"symbolic", "concrete"}));
  derive->add_option("--json", da.json, "write the trace document here");
  derive->add_option("--latex", da.latex, "write a LaTeX rendering here");

  std::string canon_input;
  bool canon_concrete = false, canon_charges = false;
  auto* canon = app.add_subcommand("canon", "print the canonical form of an expression");
  canon->add_option("expr", canon_input, "expression text or a file holding it")->required();
  canon->add_flag("--concrete", canon_concrete, "expand summed indices");
  canon->add_flag("--charges", canon_charges, "drop div E = 0 and div B = 0");

  std::string lhs, rhs;
  bool enumerate = false, check_charges = false;
  auto* check = app.add_subcommand("check", "exit 0 iff two expressions are equal");
  check->add_option("lhs", lhs)->required();
  check->add_option("rhs", rhs)->required();
  check->add_flag("--enumerate", enumerate, "brute-force pure epsilon/Kronecker identities");
  check->add_flag("--charges", check_charges, "drop div E = 0 and div B = 0");

  OracleArgs oa;
  std::string oracle_kind;
  auto* oracle = app.add_subcommand("oracle", "numeric checks with regularized deltas");
  oracle->add_option("check", oracle_kind, "flip, ibp or ordering")
      ->required()
      ->check(CLI::IsMember({"flip", "ibp", "ordering"}));
  oracle->add_option("--family", oa.family, "rectangle or gaussian")->capture_default_str()
      ->check(CLI::IsMember({"rectangle", "gaussian"}));
  oracle->add_option("--a", oa.a, "delta width")->capture_default_str()->check(CLI::PositiveNumber);
  oracle->add_option("--grid", oa.grid, "grid points")->capture_default_str()->check(CLI::PositiveNumber);
  oracle->add_option("--extent", oa.extent, "grid length")->capture_default_str()->check(CLI::PositiveNumber);
  oracle->add_option("--seed", oa.seed, "random seed")->capture_default_str();

  std::string doc_path;
  auto* latex = app.add_subcommand("latex", "render a JSON trace document as LaTeX");
  latex->add_option("trace", doc_path, "trace.json")->required()->check(CLI::ExistingFile);

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "re-run a JSON trace document and confirm its verdict");
  replay->add_option("trace", replay_path, "trace.json")->required()->check(CLI::ExistingFile);

  auto* jacobi = app.add_subcommand("jacobi", "[J1,[J2,P3]] + cyclic from the closed forms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  if (*derive) {
    std::vector<std::string> names =
        which == "all" ? std::vector<std::string>{"pp", "jp", "jj", "ordering"} : std::vector<std::string>{which};
    int worst = kOk;
    std::string last_final;
    for (const auto& n : names) {
      int rc = derive_one(n, da, names.size() > 1, last_final);
      if (rc == kInternal || worst == kInternal) {
        worst = kInternal;
      } else {
        worst = std::max(worst, rc);
      }
    }
    std::cout << last_final << "\n";
    return worst;
  }

  if (*canon) {
    const std::string text = read_text(canon_input);
    ExprHandle e;
    if (auto s = emalg_expr_parse(text.c_str(), &e.p); s != EMALG_OK) return report_error(s, text);
    emalg_constraints c = emalg_default_constraints();
    if (canon_charges) c.div_e_zero = c.div_b_zero = 0;
    Str out;
    if (auto s = emalg_expr_canonical(e.p, &c, canon_concrete, &out.p); s != EMALG_OK) return report_error(s, text);
    std::cout << out.s() << "\n";
    return kOk;
  }

  if (*check) {
    ExprHandle a, b;
    if (auto s = emalg_expr_parse(lhs.c_str(), &a.p); s != EMALG_OK) return report_error(s, lhs);
    if (auto s = emalg_expr_parse(rhs.c_str(), &b.p); s != EMALG_OK) return report_error(s, rhs);
    int equal = 0;
    if (enumerate) {
      Str msg;
      if (auto s = emalg_enumerate_identity(a.p, b.p, &equal, &msg.p); s != EMALG_OK) return report_error(s);
      std::cout << msg.s() << "\n";
    } else {
      emalg_constraints c = emalg_default_constraints();
      if (check_charges) c.div_e_zero = c.div_b_zero = 0;
      if (auto s = emalg_expr_equal(a.p, b.p, &c, &equal); s != EMALG_OK) return report_error(s);
      std::cout << (equal ? "equal" : "not equal") << "\n";
    }
    return equal ? kOk : kResidual;
  }

  if (*oracle) return run_oracle(oracle_kind, oa);

  if (*latex) {
    Str tex;
    if (auto s = emalg_trace_latex(read_text(doc_path).c_str(), &tex.p); s != EMALG_OK) return report_error(s);
    std::cout << tex.s();
    return kOk;
  }

  if (*replay) {
    emalg_verdict v;
    Str msg;
    auto s = emalg_trace_replay(read_text(replay_path).c_str(), &v, &msg.p);
    std::cout << msg.s() << "\n";
    if (s != EMALG_OK) return kResidual;
    return v == EMALG_RESIDUAL ? kResidual : kOk;
  }

  if (*jacobi) {
    int zero = 0;
    Str sum;
    if (auto s = emalg_jacobi_check(nullptr, &zero, &sum.p); s != EMALG_OK) return report_error(s);
    std::cout << "[J1,[J2,P3]] + [J2,[P3,J1]] + [P3,[J1,J2]] = " << sum.s() << "\n";
    return zero ? kOk : kResidual;
  }
  return kUsage;
}
