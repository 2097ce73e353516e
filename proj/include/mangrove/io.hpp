// SPDX-License-Identifier: Apache-2.0
//
// Canonical JSON serialization: term files for conditions, report and run
// documents, fragment export. Deserialization re-invokes the constructors,
// so loaded terms are re-validated and normalized; round trips are
// byte-exact on canonical input.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <mangrove/homog.hpp>

namespace mangrove {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Ordinals and shifts
// ---------------------------------------------------------------------------

inline json shift_to_json(const PiecewiseShift& s) {
  json pieces = json::array();
  for (const auto& [lo, dst] : s.pieces)
    pieces.push_back(json::array({format(lo), format(dst)}));
  return json{{"domain", format(s.domain)}, {"pieces", pieces}};
}

inline PiecewiseShift shift_from_json(const json& j) {
  PiecewiseShift s;
  s.domain = parse(j.at("domain").get<std::string>());
  for (const auto& p : j.at("pieces"))
    s.pieces.push_back({parse(p.at(0).get<std::string>()),
                        parse(p.at(1).get<std::string>())});
  return s;
}

// ---------------------------------------------------------------------------
// Term files
// ---------------------------------------------------------------------------

inline json term_to_json(const Condition& p) {
  switch (p.kind) {
    case TermKind::Bamboo:
      return json{{"kind", "bamboo"}};
    case TermKind::ReplaceS: {
      json bases = json::array();
      for (const auto& b : p.term_blocks.bases) bases.push_back(format(b));
      return json{{"kind", "replace_s"}, {"arg", term_to_json(*p.arg1)},
                  {"blocks", bases}};
    }
    case TermKind::AddBlock:
      return json{{"kind", "add_block"}, {"arg", term_to_json(*p.arg1)},
                  {"sigma", format(p.term_sigma)}};
    case TermKind::TowerExt:
      return json{{"kind", "tower_ext"}, {"arg", term_to_json(*p.arg1)},
                  {"alpha", format(KOrd(p.term_alpha))}};
    case TermKind::Amalgam:
      return json{{"kind", "amalgam"}, {"left", term_to_json(*p.arg1)},
                  {"right", term_to_json(*p.arg2)}};
    case TermKind::Splice:
      return json{{"kind", "splice"}, {"upper", term_to_json(*p.arg1)},
                  {"old_lower", term_to_json(*p.arg2)},
                  {"new_lower", term_to_json(*p.arg3)}};
  }
  fail("Internal", "bad term kind");
}

inline Condition term_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bamboo") return bamboo();
  if (kind == "replace_s") {
    BlockSet bs;
    for (const auto& b : j.at("blocks"))
      bs.bases.push_back(parse(b.get<std::string>()));
    return replace_s(term_from_json(j.at("arg")), bs);
  }
  if (kind == "add_block")
    return add_block(term_from_json(j.at("arg")),
                     parse(j.at("sigma").get<std::string>()));
  if (kind == "tower_ext")
    return tower_ext(term_from_json(j.at("arg")),
                     parse_small(j.at("alpha").get<std::string>()));
  if (kind == "amalgam")
    return amalgam(term_from_json(j.at("left")), term_from_json(j.at("right")));
  if (kind == "splice")
    return splice(term_from_json(j.at("upper")),
                  term_from_json(j.at("old_lower")),
                  term_from_json(j.at("new_lower")));
  fail("BadTermFile", "unknown node kind '" + kind + "'");
}

inline std::string write_term(const Condition& p) {
  return term_to_json(p).dump(2) + "\n";
}

inline Condition read_term(const std::string& text) {
  json j = json::parse(text, nullptr, true, true);
  return term_from_json(j);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Proven: return "proven";
    case Verdict::Refuted: return "refuted";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

inline json report_to_json(const Report& r) {
  json records = json::array();
  for (const auto& rec : r.records)
    records.push_back(json{{"axiom", rec.axiom},
                           {"checked", rec.checked},
                           {"skipped", rec.skipped},
                           {"verdict", verdict_name(rec.verdict)},
                           {"witness", rec.witness}});
  return json{{"budget", r.budget}, {"records", records},
              {"pass", r.all_pass()}, {"seed", r.seed}};
}

// ---------------------------------------------------------------------------
// Goals and runs
// ---------------------------------------------------------------------------

inline json goal_to_json(const Goal& g) {
  switch (g.kind) {
    case GoalKind::Start:
      return json{{"kind", "start"}};
    case GoalKind::EnsureS: {
      json bases = json::array();
      for (const auto& b : g.bases) bases.push_back(format(b));
      return json{{"kind", "ensure_s"}, {"bases", bases}};
    }
    case GoalKind::EnsureLambda:
      return json{{"kind", "ensure_lambda"}, {"beta", format(KOrd(g.beta))}};
    case GoalKind::EnsureEmu:
      return json{{"kind", "ensure_emu"}, {"mu", format(KOrd(g.beta))}};
    case GoalKind::Custom:
      return json{{"kind", "custom"}, {"name", goal_name(g)}};
  }
  fail("Internal", "bad goal kind");
}

// Custom goals deserialize as labels only (their constructions are not
// replayable from a file).
inline Goal goal_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "start") return Goal{};
  if (kind == "ensure_s") {
    std::vector<KOrd> bases;
    for (const auto& b : j.at("bases"))
      bases.push_back(parse(b.get<std::string>()));
    return ensure_s(std::move(bases));
  }
  if (kind == "ensure_lambda")
    return ensure_lambda(parse_small(j.at("beta").get<std::string>()));
  if (kind == "ensure_emu")
    return ensure_emu(parse_small(j.at("mu").get<std::string>()));
  if (kind == "custom")
    return custom_goal(nullptr, j.at("name").get<std::string>());
  fail("BadRunFile", "unknown goal kind '" + kind + "'");
}

inline std::vector<Goal> script_from_json(const json& j) {
  std::vector<Goal> out;
  for (const auto& g : j) out.push_back(goal_from_json(g));
  return out;
}

inline json run_to_json(const Run& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    json step{{"condition", term_to_json(s.condition)},
              {"goal", goal_to_json(s.goal)},
              {"note", s.note}};
    if (r.universal) step["certificate"] = report_to_json(s.certificate);
    steps.push_back(std::move(step));
  }
  json out{{"mode", r.universal ? "universal" : "plain"}, {"steps", steps}};
  if (r.universal) out["aprime"] = format_aprime(r.aprime);
  return out;
}

inline Run run_from_json(const json& j) {
  Run r;
  r.universal = j.at("mode").get<std::string>() == "universal";
  if (r.universal) r.aprime = parse_aprime(j.at("aprime").get<std::string>());
  for (const auto& s : j.at("steps")) {
    RunStep step;
    step.goal = goal_from_json(s.at("goal"));
    step.condition = term_from_json(s.at("condition"));
    step.note = s.value("note", "");
    if (r.universal)
      step.certificate = check_universal(step.condition, r.aprime);
    r.steps.push_back(std::move(step));
  }
  if (r.steps.empty()) fail("BadRunFile", "run has no steps");
  return r;
}

inline std::string write_run(const Run& r) { return run_to_json(r).dump(2) + "\n"; }

inline Run read_run(const std::string& text) {
  return run_from_json(json::parse(text, nullptr, true, true));
}

// ---------------------------------------------------------------------------
// Fragments
// ---------------------------------------------------------------------------

inline json node_to_json(const Node& x) {
  return json{{"level", x.level.is_kappa ? "kappa" : format(KOrd(x.level.value))},
              {"order", format(x.order)}};
}

inline json fragment_to_json(const Fragment& f) {
  json nodes = json::array(), edges = json::array(), thetas = json::array(),
       asets = json::array();
  for (const auto& x : f.nodes) nodes.push_back(node_to_json(x));
  for (size_t i = 0; i < f.edges.size(); ++i)
    edges.push_back(json{{"from", node_to_json(f.edges[i].first)},
                         {"pi", shift_to_json(f.pi_tables[i])},
                         {"to", node_to_json(f.edges[i].second)}});
  for (const auto& [lvl, th] : f.theta_table)
    thetas.push_back(json::array({format(KOrd(lvl)), format(KOrd(th))}));
  for (const auto& [x, set] : f.a_sets) {
    json vals = json::array();
    for (const auto& v : set) vals.push_back(format(v));
    asets.push_back(json{{"node", node_to_json(x)}, {"set", vals}});
  }
  return json{{"a_sets", asets}, {"edges", edges}, {"nodes", nodes},
              {"origin", f.origin}, {"theta", thetas}};
}

inline std::string write_fragment(const Fragment& f) {
  return fragment_to_json(f).dump(2) + "\n";
}

}  // namespace mangrove
