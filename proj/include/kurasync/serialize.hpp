#pragma once

// JSON and CSV forms of the library's reports.
//
// JSON doubles are written in shortest round-trip form (at most 17
// significant digits, re-read exactly). CSV cells use %.17g. Infinite and
// NaN values become null in JSON and inf/nan in CSV.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kurasync/certify.hpp"
#include "kurasync/dynamics.hpp"
#include "kurasync/errors.hpp"
#include "kurasync/random_graph.hpp"
#include "kurasync/spectral.hpp"

namespace kurasync {

using Json = nlohmann::ordered_json;

inline Json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json to_json(const ExpanderProfile& p) {
  return Json{{"n", p.n},           {"d_ref", num(p.d_ref)},     {"alpha", num(p.alpha)},
              {"c_minus", num(p.c_minus)}, {"c_plus", num(p.c_plus)}, {"tol", num(p.tol)},
              {"source", to_string(p.source)}, {"d_ref_choice", p.d_ref_choice}};
}

inline Json to_json(const MixingEntry& e) {
  return Json{{"lemma", to_string(e.lemma)}, {"X_size", e.x_size},   {"Y_size", e.y_size},
              {"lower", num(e.lower)},       {"value", num(e.value)}, {"upper", num(e.upper)},
              {"slack", num(e.slack)},       {"structured", e.structured}};
}

inline Json to_json(const MixingReport& r, bool with_entries = true) {
  Json per = Json::object();
  for (auto l : kAllMixingLemmas) {
    per[to_string(l)] = Json{{"checked", std::count_if(r.entries.begin(), r.entries.end(),
                                                       [&](const MixingEntry& e) { return e.lemma == l; })},
                             {"violations", r.violations(l)},
                             {"min_slack", num(r.min_slack(l))}};
  }
  Json skipped = Json::array();
  for (auto l : r.skipped) skipped.push_back(to_string(l));
  Json j{{"pass", r.pass},
         {"tolerance", num(r.tolerance)},
         {"violations", r.violations()},
         {"per_lemma", per},
         {"skipped", skipped}};
  if (with_entries) {
    Json entries = Json::array();
    for (const auto& e : r.entries) entries.push_back(to_json(e));
    j["entries"] = std::move(entries);
  }
  return j;
}

inline Json phases_to_json(const PhaseState& s) {
  Json a = Json::array();
  for (double t : s) a.push_back(t);
  return a;
}

inline Json to_json(const EquilibriumReport& r) {
  return Json{{"classification", to_string(r.classification)},
              {"gradient_norm", num(r.gradient_norm)},
              {"hessian_min_eig_orth", num(r.hessian_min_eig_orth)},
              {"eig_tol", num(r.eig_tol)},
              {"rho1", num(r.rho1)},
              {"rho2", Json{{"re", num(r.rho2.real())}, {"im", num(r.rho2.imag())}}}};
}

inline Json to_json(const OrderParamBounds& b) {
  return Json{{"alpha", num(b.alpha)},       {"a", num(b.a)},
              {"b", num(b.b)},               {"s_budget", num(b.s_budget)},
              {"regular_mode", b.regular_mode}, {"iterations", b.iterations}};
}

inline Json to_json(const CertResult& r) {
  return Json{{"verdict", to_string(r.verdict)},
              {"condition1", num(r.condition1)},
              {"condition2", num(r.condition2)},
              {"reasons", r.reasons}};
}

inline Json to_json(const Step& s) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StepL43>) return Json{{"kind", "L43"}, {"eps", v.eps}, {"rho", v.rho}};
        else if constexpr (std::is_same_v<T, StepL44>) return Json{{"kind", "L44"}, {"eps", v.eps}};
        else return Json{{"kind", "tail"}, {"eps", v.eps}};
      },
      s);
}

inline Json to_json(const Schedule& s) {
  Json a = Json::array();
  for (const auto& step : s) a.push_back(to_json(step));
  return a;
}

/// Accepts a JSON list of {"kind": "L43"|"L44"|"tail", "eps": x[, "rho": y]}.
inline Schedule schedule_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("schedule must be a JSON array of steps");
  Schedule s;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("kind") || !item.contains("eps")) {
      throw InputError("schedule step needs \"kind\" and \"eps\"");
    }
    const auto kind = item.at("kind").get<std::string>();
    const double eps = item.at("eps").get<double>();
    if (kind == "L43") {
      if (!item.contains("rho")) throw InputError("L43 step needs \"rho\"");
      s.push_back(StepL43{eps, item.at("rho").get<double>()});
    } else if (kind == "L44") {
      s.push_back(StepL44{eps});
    } else if (kind == "tail") {
      s.push_back(StepTail{eps});
    } else {
      throw InputError("unknown schedule step kind: " + kind);
    }
  }
  return s;
}

inline Schedule read_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open schedule file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("schedule file is not valid JSON: " + std::string(e.what()));
  }
  return schedule_from_json(j);
}

inline Json to_json(const AmplificationTrace& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back(Json{{"k", r.k},
                        {"beta_k", num(r.beta)},
                        {"mass", num(r.mass)},
                        {"mass_unit", r.mass_unit},
                        {"step_kind", r.step_kind},
                        {"cap_hit", to_string(r.cap)},
                        {"cap_frac", num(r.cap_frac)},
                        {"branch_lhs", num(r.branch_lhs)}});
  }
  Json j{{"mode", to_string(t.mode)},
         {"verdict", to_string(t.verdict)},
         {"final_check_lhs", num(t.final_check_lhs)},
         {"final_check_rhs", num(t.final_check_rhs)},
         {"min_beta", num(t.min_beta())},
         {"order_param_bounds", to_json(t.bounds)},
         {"rows", rows}};
  j["failed_step"] = t.failed_step ? Json(*t.failed_step) : Json(nullptr);
  j["reason"] = t.reason;
  return j;
}

inline Json to_json(const RootPair& r) {
  return Json{{"c_minus", num(r.c_minus)}, {"c_plus", num(r.c_plus)}};
}

inline Json to_json(const ErPrediction& e) {
  return Json{{"n", num(e.n)},
              {"log_n", num(e.log_n)},
              {"gamma", num(e.gamma)},
              {"eps", num(e.eps)},
              {"p", num(e.p)},
              {"d_ref", num(e.d_ref)},
              {"alpha_pred", num(e.alpha_pred)},
              {"headline_roots", to_json(e.headline)},
              {"certified_roots", to_json(e.certified)},
              {"failure_prob_bound", num(e.failure_prob_bound)},
              {"failure_prob_label", "proof-explicit bound"},
              {"theorem_condition", to_json(e.condition)},
              {"verdict", e.verdict}};
}

// ---------------------------------------------------------------------------
// CSV

/// Columns: k, beta_k, mass_frac, step_kind, mass_unit.
inline void write_trace_csv(std::ostream& out, const AmplificationTrace& t) {
  out << "k,beta_k,mass_frac,step_kind,mass_unit\n";
  for (const auto& r : t.rows) {
    out << r.k << ',' << csv_num(r.beta) << ',' << csv_num(r.mass) << ',' << r.step_kind << ','
        << r.mass_unit << '\n';
  }
}

/// Columns: time, energy, grad_norm, rho1.
inline void write_flow_csv(std::ostream& out, const FlowResult& f) {
  out << "time,energy,grad_norm,rho1\n";
  for (const auto& s : f.energy_trace) {
    out << csv_num(s.time) << ',' << csv_num(s.energy) << ',' << csv_num(s.grad_norm) << ','
        << csv_num(s.rho1) << '\n';
  }
}

/// Header row then one record per row; cells are written verbatim.
inline void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace kurasync
