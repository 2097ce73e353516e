// SPDX-License-Identifier: Apache-2.0
//
// Homogeneity machinery: the self-inverse automorphisms phi of the suborder
// of conditions reaching a fixed seam level, alignment of two conditions to
// a common (lambda, theta_top, S) profile, and run patching.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <mangrove/sim.hpp>

namespace mangrove {

// ---------------------------------------------------------------------------
// Automorphisms
// ---------------------------------------------------------------------------

// The map swapping the lower parts p and r (two conditions with the same
// seam level and seam width) inside every condition extending either.
struct AutoMap {
  Condition p, r;

  const SmallOrd& seam() const { return p.lambda(); }
};

inline AutoMap auto_map(Condition p, Condition r) {
  if (p.lambda() != r.lambda())
    fail("NotAligned", "automorphism parts must share their top level");
  if (p.theta_top() != r.theta_top())
    fail("NotAligned", "automorphism parts must share their top width");
  return AutoMap{std::move(p), std::move(r)};
}

inline Condition phi(const AutoMap& a, const Condition& q) {
  const SmallOrd& mu = a.seam();
  if (!in_upper(q, mu))
    fail("NotInSuborder", "phi acts only on conditions reaching level " +
                              format(KOrd(mu)));
  VerdictReport ep = mu_equiv(q, a.p, mu);
  if (ep.verdict == Verdict::Unknown)
    fail("Undecided", "equivalence with the left part is undecided");
  if (ep.verdict == Verdict::Proven) return splice(q, a.p, a.r);
  VerdictReport er = mu_equiv(q, a.r, mu);
  if (er.verdict == Verdict::Unknown)
    fail("Undecided", "equivalence with the right part is undecided");
  if (er.verdict == Verdict::Proven) return splice(q, a.r, a.p);
  return q;
}

// ---------------------------------------------------------------------------
// Alignment
// ---------------------------------------------------------------------------

namespace detail {

// Tower exponent alpha such that lambda + w^g*alpha equals
// max + w^g*alpha_top for BOTH inputs: the leading omega-power of alpha
// absorbs the lambda difference d.
inline SmallOrd absorbing_alpha(const SmallOrd& d) {
  if (d.is_zero()) return nat(1);
  return add(omega_pow(succ(d.terms.front().exp)), nat(1));
}

}  // namespace detail

// Extend both conditions to a common profile (equal blocks, lambda and top
// width): union the block sets, then tower both sides by a shared exponent
// whose leading term absorbs the lambda difference.
inline std::pair<Condition, Condition> align(const Condition& p,
                                             const Condition& q) {
  Condition a = p, b = q;
  for (const auto& base : q.blocks.bases)
    if (!block_index(a.blocks, base)) a = add_block(a, base);
  for (const auto& base : p.blocks.bases)
    if (!block_index(b.blocks, base)) b = add_block(b, base);
  if (a.blocks != b.blocks)
    fail("NotMatchable", "block alignment failed");
  SmallOrd g = ot_blocks(a.blocks);
  const SmallOrd& la = a.lambda();
  const SmallOrd& lb = b.lambda();
  SmallOrd d = la < lb ? left_sub(la, lb) : left_sub(lb, la);
  SmallOrd alpha = detail::absorbing_alpha(d);
  a = tower_ext(a, alpha);
  b = tower_ext(b, alpha);
  if (a.lambda() != b.lambda() || a.theta_top() != g || b.theta_top() != g)
    fail("NotMatchable", "lambda difference is not an w^{ot(S)} multiple");
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// Patching
// ---------------------------------------------------------------------------

// Rebuild a run around the requested condition p: extend the given run so
// its final condition r has p's blocks and an E_{lambda^p} shaped top, build
// p' <= p with r's exact profile, and return the upward-closed descending
// run through p' (the phi^{p',r} image of the extended run's tail).
inline Run patch(const Run& run_in, const Condition& p) {
  std::vector<Goal> fix;
  fix.push_back(ensure_s(p.blocks.bases));
  fix.push_back(ensure_emu(p.lambda()));
  Run ext = extend(run_in, fix);
  const Condition& r = ext.final_condition();

  Condition p1 = p;
  for (const auto& base : r.blocks.bases)
    if (!block_index(p1.blocks, base)) p1 = add_block(p1, base);
  if (p1.blocks != r.blocks)
    fail("NotMatchable", "profile block sets disagree after transfer");
  SmallOrd g = ot_blocks(p1.blocks);
  auto q = detail::div_pow_exact(left_sub(p1.lambda(), r.lambda()), g);
  if (!q || q->is_zero())
    fail("NotMatchable", "lambda difference is not an w^{ot(S)} multiple");
  Condition pp = tower_ext(p1, *q);
  if (pp.lambda() != r.lambda() || pp.theta_top() != r.theta_top())
    fail("NotMatchable", "profile transfer failed");

  // phi^{pp,r} maps r (and everything below the seam on r's side) onto pp
  AutoMap am = auto_map(pp, r);
  Condition image = phi(am, r);
  if (!(image == pp)) fail("Internal", "phi failed to transport the run tail");

  // upward closure: run elements above p, then the chain p >= p1 >= pp
  Run out;
  out.universal = false;
  for (const auto& step : run_in.steps) {
    if (leq(p, step.condition).verdict != Verdict::Proven) break;
    out.steps.push_back({step.goal, step.condition, step.note, {}});
  }
  if (out.steps.empty() || !(out.steps.back().condition == p))
    out.steps.push_back({custom_goal(nullptr, "patch-target"), p, "requested", {}});
  if (!(p1 == p))
    out.steps.push_back(
        {custom_goal(nullptr, "patch-blocks"), p1, "profile blocks", {}});
  out.steps.push_back({custom_goal(nullptr, "patch-phi"), pp,
                       "phi image of the run tail", {}});
  for (size_t i = 1; i < out.steps.size(); ++i) {
    auto v = leq(out.steps[i].condition, out.steps[i - 1].condition);
    if (v.verdict != Verdict::Proven)
      fail("Internal", "patched run is not descending: " + v.witness);
  }
  return out;
}

}  // namespace mangrove
