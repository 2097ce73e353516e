// SPDX-License-Identifier: Apache-2.0
//
// Universal conditions for a predicate A': the combined characteristic
// function chi, the carried set A_kappa, pullbacks of A along boundary maps,
// the three universality requirements, and the primed constructor variants
// that preserve them.

#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <mangrove/morcode.hpp>

namespace mangrove {

// ---------------------------------------------------------------------------
// The predicate A'
// ---------------------------------------------------------------------------

// An explicit finite set standing in for a subset of kappa^+.  The interface
// exposes membership plus finite support so that all pullback computations
// stay finite.
struct APrime {
  std::vector<KOrd> members;  // sorted ascending, no duplicates

  bool contains(const KOrd& v) const {
    return std::binary_search(members.begin(), members.end(), v,
                              [](const KOrd& a, const KOrd& b) { return a < b; });
  }

  // members in [lo, hi)
  std::vector<KOrd> support_in(const KOrd& lo, const KOrd& hi) const {
    std::vector<KOrd> out;
    for (const auto& m : members)
      if (!(m < lo) && m < hi) out.push_back(m);
    return out;
  }
};

inline APrime make_aprime(std::vector<KOrd> members) {
  std::sort(members.begin(), members.end(),
            [](const KOrd& a, const KOrd& b) { return a < b; });
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return APrime{std::move(members)};
}

// File format: one ordinal per line in the kord grammar.
inline APrime parse_aprime(const std::string& text) {
  std::vector<KOrd> members;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    size_t i = 0;
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) continue;
    members.push_back(parse(line.substr(i)));
  }
  return make_aprime(std::move(members));
}

inline std::string format_aprime(const APrime& a) {
  std::string out;
  for (const auto& m : a.members) {
    out += format(m);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// The combined characteristic function chi and the set A_kappa
// ---------------------------------------------------------------------------

// chi(tau) reads A' at successor positions and the code at the rest.
inline std::optional<int> chi(const Condition& p, const APrime& a,
                              const KOrd& tau) {
  if (!limit_or_zero(tau)) {
    KOrd nu = tau;
    if (nu.tail.terms.back().coeff == 1) nu.tail.terms.pop_back();
    else nu.tail.terms.back().coeff -= 1;
    return a.contains(nu) ? 1 : 0;
  }
  return code_at(p, tau).value;
}

// The members of A_kappa that lie in S (block bases whose code bit is 1,
// plus successors of A'-members falling inside a block).  Every pullback
// along a boundary map factors through S, so this finite set suffices.
inline std::vector<KOrd> akappa_in_S(const Condition& p, const APrime& a) {
  std::vector<KOrd> out;
  for (const auto& base : p.blocks.bases)
    if (code_at(p, base).value == 1) out.push_back(base);
  for (const auto& m : a.members) {
    KOrd s = succ(m);
    if (block_index(p.blocks, s)) out.push_back(s);
  }
  std::sort(out.begin(), out.end(),
            [](const KOrd& x, const KOrd& y) { return x < y; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct AKappaView {
  Condition p;
  APrime a;

  std::optional<int> chi_at(const KOrd& tau) const { return chi(p, a, tau); }
  bool in_akappa(const KOrd& tau) const {
    auto c = chi_at(tau);
    return c && *c == 1;
  }
  std::vector<KOrd> carried() const { return akappa_in_S(p, a); }
};

// ---------------------------------------------------------------------------
// Pullbacks
// ---------------------------------------------------------------------------

// The preimage of A_kappa below tau under the boundary map into <kappa,tau>.
inline std::vector<KOrd> pullback(const Condition& p, const APrime& a,
                                  const Node& x, const KOrd& tau) {
  Node y = kappa_node(tau);
  if (!tree_rel(p, x, y))
    fail("NotRelated", "node is not below <kappa," + format(tau) + ">");
  PiecewiseShift pi = pi_map(p, x, y);
  std::vector<KOrd> out;
  for (const auto& c : akappa_in_S(p, a)) {
    if (!(c < tau)) continue;
    auto g = shift_preimage(pi, c);
    if (g) out.push_back(*g);
  }
  std::sort(out.begin(), out.end(),
            [](const KOrd& u, const KOrd& v) { return u < v; });
  return out;
}

// (f^p)^{-1}``A_kappa^p: the enumeration positions of the carried set.
inline std::vector<KOrd> f_pullback_akappa(const Condition& p, const APrime& a) {
  std::vector<KOrd> out;
  for (const auto& c : akappa_in_S(p, a)) {
    auto nu = f_inv(p, c);
    if (nu) out.push_back(KOrd(*nu));
  }
  std::sort(out.begin(), out.end(),
            [](const KOrd& u, const KOrd& v) { return u < v; });
  return out;
}

// ---------------------------------------------------------------------------
// The universality requirements
// ---------------------------------------------------------------------------

namespace detail {

// Deterministic probe nodes for the coherence requirement: small orders at
// segment starts, fundamental-sequence levels, and boundaries.
inline std::vector<Node> universal_probes(const Condition& p) {
  std::vector<Node> out;
  std::vector<SmallOrd> levels;
  for (const auto& s : p.segs) {
    levels.push_back(succ(s.lo));
    levels.push_back(s.hi);
    if (limit_or_zero(s.hi) && !s.hi.is_zero())
      for (std::uint64_t k = 1; k <= 2; ++k) levels.push_back(fund_seq(s.hi, k));
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<KOrd> orders;
  for (std::uint64_t k = 0; k < 4; ++k) orders.push_back(knat(k));
  for (const auto& s : p.segs)
    for (const SmallOrd& b : {s.tau_bar, s.gamma0, s.gamma_p})
      if (!b.is_zero())
        for (std::uint64_t k = 0; k < 2; ++k) orders.push_back(add(KOrd(b), knat(k)));
  std::sort(orders.begin(), orders.end(),
            [](const KOrd& u, const KOrd& v) { return u < v; });
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  for (const auto& l : levels) {
    if (l > p.lambda()) continue;
    for (const auto& o : orders) {
      Node x = node(l, o);
      if (contains(p, x)) out.push_back(x);
    }
  }
  return out;
}

}  // namespace detail

inline Report check_universal(const Condition& p, const APrime& a,
                              std::uint64_t budget = 0, std::uint64_t seed = 0) {
  Report rep;
  rep.seed = seed;
  rep.budget = budget ? budget : 32;

  // requirement 1: every limit member of S lies in the code's domain
  AxiomRecord r1{"S-in-dom", 0, 0, Verdict::Proven, ""};
  for (const auto& base : p.blocks.bases) {
    ++r1.checked;
    if (!code_at(p, base).value && r1.verdict == Verdict::Proven) {
      r1.verdict = Verdict::Refuted;
      r1.witness = "block base " + format(base) + " is outside the code domain";
    }
  }
  rep.records.push_back(r1);

  // requirement 2: nodes with several kappa-targets pull A_kappa back equally
  AxiomRecord r2{"pullback-coherence", 0, 0, Verdict::Proven, ""};
  for (const auto& x : detail::universal_probes(p)) {
    std::vector<KOrd> targets;
    for (const auto& base : p.blocks.bases)
      for (std::uint64_t k = 0; k < 4; ++k) {
        KOrd tau = add(base, knat(k));
        if (block_index(p.blocks, tau) && tree_rel(p, x, kappa_node(tau)))
          targets.push_back(tau);
      }
    if (targets.size() < 2) {
      ++r2.skipped;
      continue;
    }
    ++r2.checked;
    std::vector<KOrd> first = pullback(p, a, x, targets[0]);
    for (size_t i = 1; i < targets.size(); ++i) {
      if (pullback(p, a, x, targets[i]) != first &&
          r2.verdict == Verdict::Proven) {
        r2.verdict = Verdict::Refuted;
        r2.witness = "pullbacks through <kappa," + format(targets[0]) +
                     "> and <kappa," + format(targets[i]) + "> differ at (" +
                     format(KOrd(x.level.value)) + "," + format(x.order) + ")";
      }
    }
  }
  rep.records.push_back(r2);

  // requirement 3: every node reaches a kappa-node; structurally this is the
  // top width matching ot(S), since branches always extend to the top level
  AxiomRecord r3{"kappa-coverage", 1, 0, Verdict::Proven, ""};
  if (p.theta_top() != ot_blocks(p.blocks)) {
    r3.verdict = Verdict::Refuted;
    r3.witness = "top node (" + format(KOrd(p.lambda())) + "," +
                 format(KOrd(ot_blocks(p.blocks))) +
                 ") has no kappa-target: ot(S) = " +
                 format(KOrd(ot_blocks(p.blocks))) + " < top width " +
                 format(KOrd(p.theta_top()));
  }
  rep.records.push_back(r3);
  return rep;
}

// ---------------------------------------------------------------------------
// Primed constructors
// ---------------------------------------------------------------------------

namespace detail {

// The limit part of tau (strip a finite tail).
inline KOrd limit_base(const KOrd& tau) {
  KOrd r = tau;
  if (!r.tail.terms.empty() && r.tail.terms.back().exp.is_zero())
    r.tail.terms.pop_back();
  return r;
}

// Smallest alpha with w^g * alpha >= x.
inline SmallOrd div_ceil_pow(const SmallOrd& x, const SmallOrd& g) {
  SmallOrd q;
  for (const auto& t : x.terms)
    if (t.exp >= g) q.terms.push_back({left_sub(g, t.exp), t.coeff});
  return succ(q);
}

// Vertical pre-extension until lambda exceeds the target level; since both
// iota and delta dominate lambda, this also enlarges the coded region past
// any enumeration index below the target.
inline Condition ensure_level(const Condition& p, const SmallOrd& target) {
  if (p.lambda() > target) return p;
  SmallOrd diff = left_sub(p.lambda(), succ(target));
  return tower_ext(p, div_ceil_pow(diff, ot_blocks(p.blocks)));
}

}  // namespace detail

// add_block that keeps the result universal: before adding sigma's block,
// grow the condition until sigma lies in the code domain, recursively adding
// the paired kappa-order's block first when sigma sits in the edge-table
// range of the code.
inline Condition add_block_u(const Condition& p, const KOrd& sigma,
                             const APrime& a, int depth = 0) {
  if (depth > 8)
    fail("RecursionDepth", "dependency chain of paired blocks is too deep");
  if (!limit_or_zero(sigma)) fail("NotLimit", "block base must be limit or zero");
  Condition cur = p;
  auto addr = detail::classify_position(sigma);
  if (addr) {
    switch (addr->clause) {
      case 1:
      case 2:
      case 3:
        cur = detail::ensure_level(cur, addr->s1);
        break;
      case 4: {
        if (!block_index(cur.blocks, addr->k1)) {
          KOrd tau_base = detail::limit_base(addr->k1);
          if (tau_base != sigma) cur = add_block_u(cur, tau_base, a, depth + 1);
        }
        cur = detail::ensure_level(cur, addr->s1);
        break;
      }
      default:
        break;
    }
  }
  (void)a;
  return add_block(cur, sigma);
}

inline Condition tower_ext_u(const Condition& p, const SmallOrd& alpha,
                             const APrime& a) {
  (void)a;  // vertical extensions preserve universality unconditionally
  return tower_ext(p, alpha);
}

// Amalgamation under the extra hypothesis that both sides carry the same
// A_kappa positions through their enumeration maps.
inline Condition amalgam_u(const Condition& p, const Condition& q,
                           const APrime& a) {
  std::vector<KOrd> ap = f_pullback_akappa(p, a);
  std::vector<KOrd> aq = f_pullback_akappa(q, a);
  if (ap != aq) {
    std::string w = "carried sets differ:";
    for (const auto& v : ap) w += " " + format(v);
    w += " vs";
    for (const auto& v : aq) w += " " + format(v);
    fail("PullbackMismatch", w);
  }
  return amalgam(p, q);
}

// ---------------------------------------------------------------------------
// Decorated fragments
// ---------------------------------------------------------------------------

// Attach the pulled-back A-sets to a fragment's nodes: kappa nodes carry
// A_kappa below their order (restricted to the finite carried family), other
// nodes the pullback through any kappa-edge present in the fragment.
inline void decorate_fragment(Fragment& f, const Condition& p, const APrime& a) {
  f.a_sets.clear();
  std::vector<KOrd> carried = akappa_in_S(p, a);
  for (const auto& x : f.nodes) {
    if (x.level.is_kappa) {
      std::vector<KOrd> set;
      for (const auto& c : carried)
        if (c < x.order) set.push_back(c);
      f.a_sets.push_back({x, std::move(set)});
      continue;
    }
    for (const auto& e : f.edges) {
      if (e.first == x && e.second.level.is_kappa) {
        f.a_sets.push_back({x, pullback(p, a, x, e.second.order)});
        break;
      }
    }
  }
}

}  // namespace mangrove
