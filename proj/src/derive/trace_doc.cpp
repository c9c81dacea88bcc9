#include "derive/derive.hpp"

#include "json.hpp"

#include <sstream>

namespace emalg::derive {

using nlohmann::json;

namespace {

bool surface_rule(const std::string& rule) {
  return rule == "expand_definitions" || rule == "collect_commutators" || rule == "expand_commutators";
}

std::string latex_of(const std::string& rule, const std::string& text) {
  if (surface_rule(rule)) return dsl::emit_latex(*dsl::parse(text));
  return dsl::emit_latex(canonicalize(dsl::parse_expr(text)));
}

std::string escape_tex(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '_': case '&': case '%': case '#': case '$': case '{': case '}':
        out += '\\';
        out += c;
        break;
      case '^': out += "\\^{}"; break;
      case '~': out += "\\~{}"; break;
      case '\\': out += "\\textbackslash{}"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string to_json(const DerivationReport& r, int indent) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["derivation"] = to_string(r.name);
  doc["constraint_flags"] = {{"div_e_zero", r.constraints.div_e_zero}, {"div_b_zero", r.constraints.div_b_zero}};
  doc["mode"] = to_string(r.mode);
  doc["verdict"] = to_string(r.verdict);
  doc["assumptions"] = r.assumptions;
  doc["runs"] = json::array();
  for (const auto& run : r.runs) {
    json jr;
    jr["label"] = run.label;
    jr["concrete"] = run.concrete;
    jr["initial"] = run.initial;
    jr["target"] = run.target;
    jr["verdict"] = to_string(run.verdict);
    jr["final"] = dsl::print_canonical(run.final_expr);
    jr["terminated"] = run.trace.terminated;
    jr["steps"] = json::array();
    for (const auto& s : run.trace.steps) {
      json js{{"rule", s.rule}, {"anchor", s.anchor}, {"expr_text", s.after_text}};
      if (!s.note.empty()) js["note"] = s.note;
      jr["steps"].push_back(std::move(js));
    }
    jr["milestones"] = json::array();
    for (const auto& m : run.milestones) {
      jr["milestones"].push_back(
          {{"label", m.label}, {"matched", m.matched}, {"mandatory", m.mandatory}, {"detail", m.detail}});
    }
    doc["runs"].push_back(std::move(jr));
  }
  return doc.dump(indent);
}

std::string to_latex(const DerivationReport& r) { return latex_from_document(to_json(r)); }

DocumentCheck replay_document(const std::string& json_text) {
  DocumentCheck out;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    out.message = std::string("malformed JSON: ") + e.what();
    return out;
  }
  try {
    if (doc.at("schema_version").get<int>() != kSchemaVersion) {
      out.message = "unsupported schema_version";
      return out;
    }
    out.derivation = doc.at("derivation").get<std::string>();
    auto name = name_from(out.derivation);
    if (!name) {
      out.message = "unknown derivation '" + out.derivation + "'";
      return out;
    }
    rewrite::ConstraintSet c;
    c.div_e_zero = doc.at("constraint_flags").at("div_e_zero").get<bool>();
    c.div_b_zero = doc.at("constraint_flags").at("div_b_zero").get<bool>();
    const Verdict success = *name == Name::Ordering ? Verdict::Deferred : Verdict::Proven;

    Verdict overall = success;
    for (const auto& jr : doc.at("runs")) {
      const std::string label = jr.at("label").get<std::string>();
      const std::string initial = jr.at("initial").get<std::string>();
      std::vector<std::pair<std::string, std::string>> steps;
      for (const auto& js : jr.at("steps")) {
        steps.emplace_back(js.at("rule").get<std::string>(), js.at("expr_text").get<std::string>());
      }
      auto rep = rewrite::replay(initial, steps, {}, c);
      if (!rep.ok) {
        out.message = "run " + label + ": step " + std::to_string(rep.failed_step + 1) + " (" +
                      steps[rep.failed_step].first + ") does not reproduce; expected " + rep.expected +
                      ", got " + rep.actual;
        return out;
      }
      std::string final_text = steps.empty() ? dsl::print_canonical(canonicalize(dsl::parse_expr(initial)))
                                             : steps.back().second;
      if (jr.contains("final") && jr.at("final").get<std::string>() != final_text) {
        out.message = "run " + label + ": recorded final differs from the last step";
        return out;
      }
      bool ok = jr.value("terminated", true) &&
                reaches_target(canonicalize(dsl::parse_expr(final_text)), jr.at("target").get<std::string>(),
                               jr.value("concrete", false));
      for (const auto& m : jr.value("milestones", json::array())) {
        if (m.value("mandatory", true) && !m.value("matched", false)) ok = false;
      }
      const Verdict v = ok ? success : Verdict::Residual;
      if (jr.contains("verdict") && jr.at("verdict").get<std::string>() != to_string(v)) {
        out.message = "run " + label + ": recorded verdict " + jr.at("verdict").get<std::string>() +
                      ", recomputed " + to_string(v);
        return out;
      }
      if (v != success) overall = Verdict::Residual;
    }
    out.verdict = overall;
    if (doc.contains("verdict") && doc.at("verdict").get<std::string>() != to_string(overall)) {
      out.message = "recorded verdict " + doc.at("verdict").get<std::string>() + ", recomputed " +
                    to_string(overall);
      return out;
    }
  } catch (const json::exception& e) {
    out.message = std::string("bad document: ") + e.what();
    return out;
  } catch (const std::exception& e) {
    out.message = e.what();
    return out;
  }
  out.ok = true;
  out.message = "replayed to verdict " + to_string(out.verdict);
  return out;
}

std::string latex_from_document(const std::string& json_text) {
  const json doc = json::parse(json_text);
  std::ostringstream os;
  os << "\\documentclass{article}\n\\usepackage{amsmath,amssymb}\n\\allowdisplaybreaks\n\\begin{document}\n";
  os << "\\section*{" << escape_tex(doc.at("derivation").get<std::string>()) << ": "
     << escape_tex(doc.at("verdict").get<std::string>()) << "}\n";
  const auto& flags = doc.at("constraint_flags");
  os << "Constraints: $\\nabla\\cdot E = 0$ " << (flags.at("div_e_zero").get<bool>() ? "on" : "off")
     << ", $\\nabla\\cdot B = 0$ " << (flags.at("div_b_zero").get<bool>() ? "on" : "off") << ".\n";
  for (const auto& a : doc.value("assumptions", json::array())) {
    os << "\\par Assumption: " << escape_tex(a.get<std::string>()) << ".\n";
  }
  for (const auto& jr : doc.at("runs")) {
    os << "\\subsection*{" << escape_tex(jr.at("label").get<std::string>()) << " -- "
       << escape_tex(jr.at("verdict").get<std::string>()) << "}\n";
    os << "\\[ " << dsl::emit_latex(*dsl::parse(jr.at("initial").get<std::string>())) << " \\]\n";
    for (const auto& js : jr.at("steps")) {
      const std::string rule = js.at("rule").get<std::string>();
      os << "\\paragraph{" << escape_tex(rule) << "} " << escape_tex(js.value("anchor", "")) << "\n";
      os << "\\[ " << latex_of(rule, js.at("expr_text").get<std::string>()) << " \\]\n";
    }
    for (const auto& m : jr.value("milestones", json::array())) {
      os << "\\par " << (m.value("matched", false) ? "$\\checkmark$ " : "$\\times$ ")
         << escape_tex(m.value("label", "")) << "\n";
    }
  }
  os << "\\end{document}\n";
  return os.str();
}

}  // namespace emalg::derive
