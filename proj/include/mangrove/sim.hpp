// SPDX-License-Identifier: Apache-2.0
//
// Dense-set goal scheduler: builds finite, strictly descending runs of
// conditions (in plain or universal mode) and extracts fragments of the
// final condition including every run boundary.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <mangrove/order.hpp>
#include <mangrove/universal.hpp>

namespace mangrove {

// ---------------------------------------------------------------------------
// Goals
// ---------------------------------------------------------------------------

enum class GoalKind { Start, EnsureS, EnsureLambda, EnsureEmu, Custom };

struct Goal {
  GoalKind kind = GoalKind::Start;
  std::vector<KOrd> bases;  // EnsureS
  SmallOrd beta;            // EnsureLambda target / EnsureEmu mu
  std::function<Condition(const Condition&)> custom;
  std::string name;  // label for Custom goals
};

inline Goal ensure_s(std::vector<KOrd> bases) {
  Goal g;
  g.kind = GoalKind::EnsureS;
  g.bases = std::move(bases);
  return g;
}

inline Goal ensure_lambda(SmallOrd beta) {
  Goal g;
  g.kind = GoalKind::EnsureLambda;
  g.beta = std::move(beta);
  return g;
}

inline Goal ensure_emu(SmallOrd mu) {
  Goal g;
  g.kind = GoalKind::EnsureEmu;
  g.beta = std::move(mu);
  return g;
}

inline Goal custom_goal(std::function<Condition(const Condition&)> fn,
                        std::string name = "custom") {
  Goal g;
  g.kind = GoalKind::Custom;
  g.custom = std::move(fn);
  g.name = std::move(name);
  return g;
}

inline std::string goal_name(const Goal& g) {
  switch (g.kind) {
    case GoalKind::Start: return "start";
    case GoalKind::EnsureS: return "ensure_s";
    case GoalKind::EnsureLambda: return "ensure_lambda";
    case GoalKind::EnsureEmu: return "ensure_emu";
    case GoalKind::Custom: return g.name;
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct RunStep {
  Goal goal;
  Condition condition;
  std::string note;    // witness data (e.g. the E_mu exponent)
  Report certificate;  // universal-mode certificate (empty in plain mode)
};

struct Run {
  std::vector<RunStep> steps;
  bool universal = false;
  APrime aprime;

  const Condition& final_condition() const { return steps.back().condition; }
};

namespace detail {

// Exact quotient of x by w^g, if any.
inline std::optional<SmallOrd> div_pow_exact(const SmallOrd& x, const SmallOrd& g) {
  SmallOrd q;
  for (const auto& t : x.terms) {
    if (!(t.exp >= g)) return std::nullopt;
    q.terms.push_back({left_sub(g, t.exp), t.coeff});
  }
  if (mul(omega_pow(g), q) != x) return std::nullopt;
  return q;
}

// Smallest convenient alpha with lambda + w^g*alpha >= target (exact when
// the difference divides).
inline SmallOrd tower_to(const SmallOrd& lambda, const SmallOrd& target,
                         const SmallOrd& g) {
  SmallOrd d = left_sub(lambda, target);
  if (auto q = div_pow_exact(d, g)) return q->is_zero() ? nat(1) : *q;
  SmallOrd q;
  for (const auto& t : d.terms)
    if (t.exp >= g) q.terms.push_back({left_sub(g, t.exp), t.coeff});
  return succ(q);
}

}  // namespace detail

// The E_mu shape witness: alpha with lambda^r = mu + w^{ot(S)}*alpha and
// alpha > ot(S), when the shape holds.
inline std::optional<SmallOrd> emu_witness(const Condition& r, const SmallOrd& mu) {
  if (r.lambda() < mu) return std::nullopt;
  SmallOrd g = ot_blocks(r.blocks);
  auto alpha = detail::div_pow_exact(left_sub(mu, r.lambda()), g);
  if (!alpha || !(*alpha > g)) return std::nullopt;
  return alpha;
}

namespace detail {

inline std::pair<Condition, std::string> apply_goal(const Condition& cur,
                                                    const Goal& goal,
                                                    bool universal,
                                                    const APrime& a) {
  switch (goal.kind) {
    case GoalKind::Start:
      return {cur, "start"};
    case GoalKind::EnsureS: {
      Condition c = cur;
      size_t added = 0;
      for (const auto& b : goal.bases)
        if (!block_index(c.blocks, b)) {
          c = universal ? add_block_u(c, b, a) : add_block(c, b);
          ++added;
        }
      if (added == 0) {
        // goal already satisfied; tower once to keep the run strictly
        // descending
        c = tower_ext(c, nat(1));
        return {c, "already satisfied"};
      }
      return {c, "added " + std::to_string(added) + " block(s)"};
    }
    case GoalKind::EnsureLambda: {
      SmallOrd g = ot_blocks(cur.blocks);
      SmallOrd alpha = cur.lambda() < goal.beta
                           ? tower_to(cur.lambda(), goal.beta, g)
                           : nat(1);
      return {tower_ext(cur, alpha), "alpha=" + format(KOrd(alpha))};
    }
    case GoalKind::EnsureEmu: {
      Condition c = cur;
      SmallOrd g = ot_blocks(c.blocks);
      if (c.lambda() < goal.beta)
        c = tower_ext(c, tower_to(c.lambda(), goal.beta, g));
      SmallOrd d = left_sub(goal.beta, c.lambda());
      SmallOrd at = succ(g);
      if (!d.is_zero())
        at = add(omega_pow(succ(d.terms.front().exp)), at);
      c = tower_ext(c, at);
      auto w = emu_witness(c, goal.beta);
      if (!w) fail("Internal", "E_mu shape failed to materialize");
      return {c, "alpha=" + format(KOrd(*w))};
    }
    case GoalKind::Custom:
      return {goal.custom(cur), goal.name};
  }
  fail("Internal", "bad goal kind");
}

}  // namespace detail

inline Run extend(Run base, const std::vector<Goal>& script) {
  for (const auto& goal : script) {
    const Condition& cur = base.final_condition();
    auto [next, note] = detail::apply_goal(cur, goal, base.universal, base.aprime);
    if (goal.kind != GoalKind::Start) {
      auto cert = leq(next, cur);
      if (cert.verdict != Verdict::Proven)
        fail("Internal", "goal step is not an extension: " + cert.witness);
      if (next == cur) fail("Internal", "goal step is not strictly descending");
    }
    RunStep step{goal, std::move(next), std::move(note), {}};
    if (base.universal) {
      step.certificate = check_universal(step.condition, base.aprime);
      if (!step.certificate.all_pass())
        fail("NotUniversal", "step '" + goal_name(goal) +
                                 "' left the universal class");
    }
    base.steps.push_back(std::move(step));
  }
  return base;
}

inline Run start_run(const Condition& root = bamboo()) {
  Run r;
  r.steps.push_back({Goal{}, root, "start", {}});
  return r;
}

inline Run start_run_universal(const APrime& a, const Condition& root = bamboo()) {
  Run r;
  r.universal = true;
  r.aprime = a;
  RunStep step{Goal{}, root, "start", check_universal(root, a)};
  if (!step.certificate.all_pass())
    fail("NotUniversal", "root condition is not universal");
  r.steps.push_back(std::move(step));
  return r;
}

inline Run run(const std::vector<Goal>& script) {
  return extend(start_run(), script);
}

inline Run run_universal(const std::vector<Goal>& script, const APrime& a) {
  return extend(start_run_universal(a), script);
}

// ---------------------------------------------------------------------------
// Fragments of the run limit
// ---------------------------------------------------------------------------

// Fragment of the final condition including every run boundary lambda^{p_i};
// decorated with A-sets in universal mode.
inline Fragment limit_fragment(const Run& r, std::vector<Level> levels,
                               const KOrd& max_order, size_t max_nodes) {
  for (const auto& step : r.steps)
    levels.push_back(below(step.condition.lambda()));
  std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
    if (a.is_kappa != b.is_kappa) return b.is_kappa;
    return a.value < b.value;
  });
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  Fragment f = extract_fragment(r.final_condition(), levels, max_order, max_nodes);
  f.origin = "run(" + std::to_string(r.steps.size()) + " steps);" + f.origin;
  if (r.universal) decorate_fragment(f, r.final_condition(), r.aprime);
  return f;
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

namespace detail {

inline std::string node_label(const Node& x) {
  std::string l = x.level.is_kappa ? "kappa" : format(KOrd(x.level.value));
  return "(" + l + "," + format(x.order) + ")";
}

}  // namespace detail

inline std::string to_dot(const Fragment& f) {
  std::string out = "digraph fragment {\n  rankdir=BT;\n";
  for (const auto& x : f.nodes)
    out += "  \"" + detail::node_label(x) + "\";\n";
  for (const auto& [x, y] : f.edges)
    out += "  \"" + detail::node_label(x) + "\" -> \"" +
           detail::node_label(y) + "\";\n";
  out += "}\n";
  return out;
}

}  // namespace mangrove
