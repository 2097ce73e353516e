// SPDX-License-Identifier: Apache-2.0
//
// Axiom verification for conditions and for extracted finite fragments.
//
// Checkers consume an abstract CheckTarget: a bundle of query closures
// (theta, contains, tree, pi, branch, f) plus the underlying condition used
// only to guide sampling. Real targets come from target_of; the mutation
// corpus wraps a real target and perturbs exactly one query family, which the
// matching checker must flag. All sampling is seeded and replayable.

#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <mangrove/cond.hpp>

namespace mangrove {

// ---------------------------------------------------------------------------
// Fundamental sequences and bounded random ordinals
// ---------------------------------------------------------------------------

// n-th element (n >= 1) of the canonical fundamental sequence of a nonzero
// limit ordinal: strictly increasing in n with supremum lim.
inline SmallOrd fund_seq(const SmallOrd& lim, std::uint64_t n) {
  if (lim.is_zero() || !limit_or_zero(lim))
    fail("NotLimit", "fund_seq needs a nonzero limit ordinal");
  if (n == 0) n = 1;
  SmallOrd head = lim;
  SmallOrd::Term last = head.terms.back();
  head.terms.pop_back();
  if (last.coeff > 1) {
    SmallOrd::Term t = last;
    t.coeff -= 1;
    head.terms.push_back(t);
  }
  const SmallOrd& e = last.exp;  // nonzero since lim is a limit
  if (e.terms.back().exp.is_zero()) {
    SmallOrd d = e;
    if (d.terms.back().coeff > 1) d.terms.back().coeff -= 1;
    else d.terms.pop_back();
    return add(head, mul(omega_pow(d), nat(n)));
  }
  return add(head, omega_pow(fund_seq(e, n)));
}

// Random ordinal strictly below a nonzero bound.
inline SmallOrd random_below(Rng& rng, const SmallOrd& bound) {
  if (bound.is_zero()) fail("Internal", "random_below: empty range");
  SmallOrd prefix;
  for (size_t i = 0; i < bound.terms.size(); ++i) {
    const SmallOrd::Term& t = bound.terms[i];
    bool last = (i + 1 == bound.terms.size());
    if (!last && rng.below(2)) {
      prefix = add(prefix, mul(omega_pow(t.exp), nat(t.coeff)));
      continue;
    }
    std::uint64_t c2 = rng.below(t.coeff);
    if (c2) prefix = add(prefix, mul(omega_pow(t.exp), nat(c2)));
    if (!t.exp.is_zero()) {
      SmallOrd sub = random_small(rng, 2);
      SmallOrd clipped;
      for (const auto& u : sub.terms)
        if (u.exp < t.exp) clipped.terms.push_back(u);
      prefix = add(prefix, clipped);
    }
    return prefix;
  }
  return prefix;  // unreachable: the last term always returns
}

// ---------------------------------------------------------------------------
// Check targets
// ---------------------------------------------------------------------------

struct CheckTarget {
  SmallOrd lambda;
  BlockSet blocks;
  std::function<SmallOrd(const SmallOrd&)> theta;
  std::function<bool(const Node&)> contains;
  std::function<bool(const Node&, const Node&)> tree;
  std::function<PiecewiseShift(const Node&, const Node&)> pi;
  // Order of the tree predecessor of y at the given level, when y's branch
  // reaches that level inside the structure; nullopt otherwise.
  std::function<std::optional<KOrd>(const SmallOrd&, const Node&)> branch;
  std::function<KOrd(const SmallOrd&)> f;  // block enumeration
  std::vector<Node> hint_nodes;            // deterministic probe nodes
  std::vector<std::pair<Node, Node>> hint_edges;  // deterministic probe edges
  Condition cond;  // sampling geometry only; never queried directly
};

namespace detail {

inline std::string fmt_level(const Level& l) {
  return l.is_kappa ? std::string("kappa") : format(KOrd(l.value));
}

inline std::string fmt_node(const Node& x) {
  return "(" + fmt_level(x.level) + "," + format(x.order) + ")";
}

inline void build_hints(CheckTarget& t) {
  const Condition& p = t.cond;
  std::vector<SmallOrd> levels;
  levels.push_back(nat(1));
  for (const auto& s : p.segs) {
    levels.push_back(s.hi);
    if (s.kind == SegKind::Tower) {
      SmallOrd first = add(s.lo, omega_pow(s.g));
      if (first < s.hi) levels.push_back(first);
    }
    SmallOrd len = left_sub(s.lo, s.hi);
    if (limit_or_zero(len) && !len.is_zero())
      for (std::uint64_t k = 1; k <= 2; ++k)
        levels.push_back(add(s.lo, fund_seq(len, k)));
  }
  std::sort(levels.begin(), levels.end(),
            [](const SmallOrd& a, const SmallOrd& b) { return a < b; });
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (const auto& mu : levels) {
    if (mu > p.lambda()) continue;
    SmallOrd th = theta(p, mu);
    std::vector<KOrd> orders;
    for (std::uint64_t k = 0; k < 4; ++k) orders.push_back(knat(k));
    orders.push_back(KOrd(omega()));
    if (limit_or_zero(th) && !th.is_zero()) orders.push_back(KOrd(fund_seq(th, 1)));
    for (const auto& nu : orders)
      if (nu < KOrd(th)) t.hint_nodes.push_back(node(mu, nu));
  }
  for (const auto& b : p.blocks.bases)
    for (std::uint64_t k = 0; k < 3; ++k)
      t.hint_nodes.push_back(kappa_node(add(b, knat(k))));
  for (const auto& x : t.hint_nodes) {
    if (x.level.is_kappa) continue;
    for (const auto& y : t.hint_nodes) {
      bool above = y.level.is_kappa ||
                   (!y.level.is_kappa && x.level.value < y.level.value);
      if (!above) continue;
      if (tree_rel(p, x, y)) t.hint_edges.push_back({x, y});
    }
  }
}

}  // namespace detail

inline CheckTarget target_of(const Condition& p) {
  CheckTarget t;
  t.lambda = p.lambda();
  t.blocks = p.blocks;
  t.cond = p;
  t.theta = [p](const SmallOrd& a) { return theta(p, a); };
  t.contains = [p](const Node& x) { return contains(p, x); };
  t.tree = [p](const Node& x, const Node& y) {
    if (!contains(p, x) || !contains(p, y)) return false;
    return tree_rel(p, x, y);
  };
  t.pi = [p](const Node& x, const Node& y) { return pi_map(p, x, y); };
  t.branch = [p](const SmallOrd& level, const Node& y) -> std::optional<KOrd> {
    if (!contains(p, y)) return std::nullopt;
    SmallOrd ylev;
    KOrd yord;
    if (y.level.is_kappa) {
      auto inv = f_inv(p, y.order);
      if (!inv) return std::nullopt;
      ylev = p.lambda();
      yord = KOrd(*inv);
      if (level == ylev) return yord;
      if (level > ylev) return std::nullopt;
    } else {
      ylev = y.level.value;
      yord = y.order;
      if (!(level < ylev)) return std::nullopt;
    }
    auto br = detail::branch_at(p, ylev, yord, seg_index(p, level));
    if (!br) return std::nullopt;
    if (!(br->first < KOrd(theta(p, level)))) return std::nullopt;
    return br->first;
  };
  t.f = [p](const SmallOrd& nu) { return f_apply(p, nu); };
  detail::build_hints(t);
  return t;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct AxiomRecord {
  std::string axiom;
  std::uint64_t checked = 0;
  std::uint64_t skipped = 0;
  Verdict verdict = Verdict::Proven;
  std::string witness;
};

struct Report {
  std::vector<AxiomRecord> records;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  bool all_pass() const {
    for (const auto& r : records)
      if (r.verdict == Verdict::Refuted) return false;
    return true;
  }
  const AxiomRecord* record(const std::string& id) const {
    for (const auto& r : records)
      if (r.axiom == id) return &r;
    return nullptr;
  }
};

inline const std::vector<std::string>& axiom_ids() {
  static const std::vector<std::string> ids = {
      "left-alignment", "f-links", "tree-order", "monotonicity",
      "commutativity",  "M.1",     "M.2",        "M.3",
      "M.4",            "M.5",     "M.6",        "M.7"};
  return ids;
}

namespace detail {

class Rec {
 public:
  explicit Rec(std::string id) { r_.axiom = std::move(id); }
  void ok() { ++r_.checked; }
  void skip() { ++r_.skipped; }
  void bad(std::string w) {
    ++r_.checked;
    if (r_.verdict == Verdict::Refuted) return;
    r_.verdict = Verdict::Refuted;
    r_.witness = std::move(w);
  }
  AxiomRecord take() { return r_; }

 private:
  AxiomRecord r_;
};

// Run one probe, converting thrown query errors into a refutation.
template <class F>
inline void guarded(Rec& rec, const std::string& what, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    rec.bad(what + ": query failed: " + e.what());
  }
}

struct Pools {
  std::vector<Node> nodes;
  std::vector<std::pair<Node, Node>> edges;
};

inline SmallOrd sample_level(const Condition& p, Rng& rng) {
  const Segment& s = p.segs[rng.below(p.segs.size())];
  SmallOrd len = left_sub(s.lo, s.hi);
  SmallOrd off = random_below(rng, len);
  if (off.is_zero()) return s.hi;
  return add(s.lo, off);
}

inline Pools build_pools(const CheckTarget& t, std::uint64_t budget, Rng& rng) {
  Pools pools;
  pools.nodes = t.hint_nodes;
  std::uint64_t nsamples = budget < 128 ? budget : 128;
  for (std::uint64_t i = 0; i < nsamples; ++i) {
    if (rng.below(6) == 0 && !t.blocks.bases.empty()) {
      const KOrd& b = t.blocks.bases[rng.below(t.blocks.bases.size())];
      pools.nodes.push_back(kappa_node(add(b, knat(rng.below(8)))));
      continue;
    }
    SmallOrd mu = sample_level(t.cond, rng);
    SmallOrd th;
    try {
      th = t.theta(mu);
    } catch (const Error&) {
      continue;
    }
    if (th.is_zero()) continue;
    pools.nodes.push_back(node(mu, KOrd(random_below(rng, th))));
  }
  for (const auto& e : t.hint_edges) {
    try {
      if (t.tree(e.first, e.second)) pools.edges.push_back(e);
    } catch (const Error&) {
    }
  }
  for (std::uint64_t i = 0; i < nsamples && !pools.nodes.empty(); ++i) {
    const Node& y = pools.nodes[rng.below(pools.nodes.size())];
    SmallOrd top = y.level.is_kappa ? t.lambda : y.level.value;
    if (top.is_zero()) continue;
    SmallOrd level;
    if (y.level.is_kappa && rng.below(2)) {
      level = t.lambda;
    } else if (limit_or_zero(top)) {
      level = fund_seq(top, 1 + rng.below(6));
    } else {
      level = random_below(rng, top);
    }
    if (!y.level.is_kappa && !(level < top)) continue;
    try {
      auto ord = t.branch(level, y);
      if (!ord) continue;
      Node x = node(level, *ord);
      if (x == y) continue;
      if (t.tree(x, y)) pools.edges.push_back({x, y});
    } catch (const Error&) {
    }
  }
  return pools;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// check_target: the axiom checker suite
// ---------------------------------------------------------------------------

inline Report check_target(const CheckTarget& t, std::uint64_t budget = 0,
                           std::uint64_t seed = 0) {
  using detail::fmt_node;
  using detail::guarded;
  using detail::Rec;
  if (budget == 0) budget = 96;
  Rng rng(seed ^ 0x76657269667900ULL);
  detail::Pools pools = detail::build_pools(t, budget, rng);
  Report rep;
  rep.seed = seed;
  rep.budget = budget;

  // --- left-alignment: widths are nonzero ordinals consistent with
  // membership.
  {
    Rec rec("left-alignment");
    std::vector<SmallOrd> levels;
    levels.push_back(SmallOrd{});
    levels.push_back(nat(1));
    levels.push_back(omega());
    for (const auto& s : t.cond.segs) levels.push_back(s.hi);
    for (std::uint64_t i = 0; i < budget / 4; ++i)
      levels.push_back(detail::sample_level(t.cond, rng));
    for (const auto& mu : levels) {
      if (mu > t.lambda) continue;
      guarded(rec, "left-alignment at " + format(KOrd(mu)), [&] {
        SmallOrd th = t.theta(mu);
        if (th.is_zero()) {
          rec.bad("theta vanishes at level " + format(KOrd(mu)));
          return;
        }
        if (!t.contains(node(mu, KOrd{}))) {
          rec.bad("order 0 missing at level " + format(KOrd(mu)));
          return;
        }
        if (t.contains(node(mu, KOrd(th)))) {
          rec.bad("order theta itself is a member at level " + format(KOrd(mu)));
          return;
        }
        rec.ok();
      });
    }
    rep.records.push_back(rec.take());
  }

  // --- f-links: the block enumeration is an order isomorphism onto S
  // preserving limit classes.
  {
    Rec rec("f-links");
    SmallOrd ot = ot_blocks(t.blocks);
    std::vector<SmallOrd> args;
    for (size_t i = 0; i < t.blocks.bases.size(); ++i)
      for (std::uint64_t k = 0; k < 3; ++k)
        args.push_back(add(mul(omega(), nat(i)), nat(k)));
    for (std::uint64_t i = 0; i < budget / 4; ++i)
      args.push_back(random_below(rng, ot));
    std::sort(args.begin(), args.end(),
              [](const SmallOrd& a, const SmallOrd& b) { return a < b; });
    args.erase(std::unique(args.begin(), args.end()), args.end());
    std::optional<KOrd> prev;
    for (const auto& nu : args) {
      if (!(nu < ot)) continue;
      guarded(rec, "f-links at " + format(KOrd(nu)), [&] {
        KOrd tau = t.f(nu);
        if (!t.contains(kappa_node(tau))) {
          rec.bad("f(" + format(KOrd(nu)) + ") = " + format(tau) +
                  " is not a member of S");
          return;
        }
        if (limit_or_zero(nu) != limit_or_zero(tau)) {
          rec.bad("f does not preserve the limit class at " + format(KOrd(nu)));
          return;
        }
        if (prev && !(*prev < tau)) {
          rec.bad("f is not strictly increasing at " + format(KOrd(nu)));
          return;
        }
        prev = tau;
        rec.ok();
      });
    }
    rep.records.push_back(rec.take());
  }

  // --- tree-order: irreflexive, antisymmetric, transitive, with linearly
  // ordered predecessors.
  {
    Rec rec("tree-order");
    for (const auto& x : pools.nodes)
      guarded(rec, "tree-order reflexivity at " + fmt_node(x), [&] {
        if (t.tree(x, x)) rec.bad("tree relation is reflexive at " + fmt_node(x));
        else rec.ok();
      });
    for (const auto& e : pools.edges)
      guarded(rec, "tree-order antisymmetry", [&] {
        if (t.tree(e.second, e.first))
          rec.bad("tree relation has a 2-cycle through " + fmt_node(e.first));
        else rec.ok();
      });
    std::uint64_t cap = 4000;
    for (const auto& e1 : pools.edges) {
      for (const auto& e2 : pools.edges) {
        if (cap == 0) break;
        if (!(e1.second == e2.first)) continue;
        --cap;
        guarded(rec, "tree-order transitivity", [&] {
          if (!t.tree(e1.first, e2.second))
            rec.bad("transitivity fails: " + fmt_node(e1.first) + " below " +
                    fmt_node(e1.second) + " below " + fmt_node(e2.second));
          else rec.ok();
        });
      }
    }
    // linear predecessors: two branch points below the same y compare.
    for (const auto& e : pools.edges) {
      const Node& y = e.second;
      const Node& x2 = e.first;
      if (x2.level.is_kappa) continue;
      SmallOrd l2 = x2.level.value;
      if (l2.is_zero() || !limit_or_zero(l2)) continue;
      guarded(rec, "tree-order linear predecessors", [&] {
        SmallOrd l1 = fund_seq(l2, 2);
        auto o1 = t.branch(l1, y);
        if (!o1) {
          rec.skip();
          return;
        }
        Node x1 = node(l1, *o1);
        if (!t.tree(x1, x2))
          rec.bad("predecessors of " + fmt_node(y) + " not linearly ordered at " +
                  fmt_node(x1) + " vs " + fmt_node(x2));
        else rec.ok();
      });
    }
    rep.records.push_back(rec.take());
  }

  // --- monotonicity: the tree relation increases levels.
  {
    Rec rec("monotonicity");
    std::uint64_t cap = 6000;
    for (const auto& a : pools.nodes) {
      for (const auto& b : pools.nodes) {
        if (cap == 0) break;
        if (a == b) continue;
        --cap;
        guarded(rec, "monotonicity", [&] {
          if (!t.tree(a, b)) return;  // not an instance
          bool increases =
              (b.level.is_kappa && !a.level.is_kappa) ||
              (!a.level.is_kappa && !b.level.is_kappa &&
               a.level.value < b.level.value);
          if (!increases)
            rec.bad("edge " + fmt_node(a) + " below " + fmt_node(b) +
                    " does not increase the level");
          else rec.ok();
        });
      }
    }
    rep.records.push_back(rec.take());
  }

  // --- commutativity: composing along chains agrees with the direct map.
  {
    Rec rec("commutativity");
    std::uint64_t cap = 2000;
    for (const auto& e1 : pools.edges) {
      for (const auto& e2 : pools.edges) {
        if (cap == 0) break;
        if (!(e1.second == e2.first)) continue;
        --cap;
        guarded(rec, "commutativity through " + fmt_node(e1.second), [&] {
          if (!t.tree(e1.first, e2.second)) {
            rec.skip();
            return;
          }
          PiecewiseShift lhs =
              shift_compose(t.pi(e2.first, e2.second), t.pi(e1.first, e1.second));
          PiecewiseShift rhs = t.pi(e1.first, e2.second);
          if (!shift_equal(normalize(lhs), normalize(rhs)))
            rec.bad("maps do not compose along " + fmt_node(e1.first) + " -> " +
                    fmt_node(e1.second) + " -> " + fmt_node(e2.second));
          else rec.ok();
        });
      }
    }
    rep.records.push_back(rec.take());
  }

  // --- M.1: every edge map is a structure-preserving shift sending the top
  // order to the top order.
  {
    Rec rec("M.1");
    for (const auto& e : pools.edges)
      guarded(rec, "M.1 at " + fmt_node(e.first) + " -> " + fmt_node(e.second), [&] {
        PiecewiseShift m = t.pi(e.first, e.second);
        auto sl = check_sloop(m);
        if (!sl.ok) {
          rec.bad("edge map violates the shift conditions: " + sl.violations[0]);
          return;
        }
        if (shift_apply(m, e.first.order) != e.second.order) {
          rec.bad("edge map does not send o(x) to o(y) on " + fmt_node(e.first) +
                  " -> " + fmt_node(e.second));
          return;
        }
        rec.ok();
      });
    rep.records.push_back(rec.take());
  }

  // --- M.2: edges restrict along smaller orders on both sides.
  {
    Rec rec("M.2");
    for (const auto& e : pools.edges) {
      const Node& x = e.first;
      const Node& y = e.second;
      if (x.level.is_kappa) continue;
      if (x.order.is_zero()) {
        rec.skip();
        continue;
      }
      std::vector<KOrd> nus;
      nus.push_back(KOrd{});
      nus.push_back(knat(1));
      SmallOrd ox = small_part(x.order);
      if (limit_or_zero(ox) && !ox.is_zero())
        nus.push_back(KOrd(fund_seq(ox, 1)));
      nus.push_back(KOrd(random_below(rng, ox)));
      for (const auto& nu : nus) {
        if (!(nu < x.order)) continue;
        guarded(rec, "M.2 at " + fmt_node(x) + " -> " + fmt_node(y), [&] {
          PiecewiseShift m = t.pi(x, y);
          KOrd img = shift_apply(m, nu);
          Node w = node(x.level.value, nu);
          Node z = y.level.is_kappa ? kappa_node(img) : node(y.level.value, img);
          if (!t.contains(w) || !t.contains(z)) {
            rec.bad("M.2 companion pair " + fmt_node(w) + ", " + fmt_node(z) +
                    " not in the structure");
            return;
          }
          if (!t.tree(w, z)) {
            rec.bad("M.2 edge missing: " + fmt_node(w) + " below " + fmt_node(z));
            return;
          }
          if (!shift_equal(normalize(t.pi(w, z)),
                           normalize(shift_restrict(m, succ(nu))))) {
            rec.bad("M.2 restriction mismatch at " + fmt_node(w));
            return;
          }
          rec.ok();
        });
      }
    }
    rep.records.push_back(rec.take());
  }

  // --- M.3: predecessor levels are closed below the node's level.
  {
    Rec rec("M.3");
    for (const auto& y : pools.nodes) {
      SmallOrd top = y.level.is_kappa ? t.lambda : y.level.value;
      std::vector<SmallOrd> mus;
      for (const auto& s : t.cond.segs)
        if (s.hi < top || (y.level.is_kappa && s.hi == top)) mus.push_back(s.hi);
      if (limit_or_zero(top) && !top.is_zero() && !y.level.is_kappa)
        for (std::uint64_t k = 1; k <= 3; ++k) mus.push_back(fund_seq(top, k));
      for (const auto& mu : mus) {
        if (mu.is_zero() || !limit_or_zero(mu)) continue;
        guarded(rec, "M.3 at " + fmt_node(y) + " / " + format(KOrd(mu)), [&] {
          for (int family = 0; family < 2; ++family) {
            bool hyp = true;
            for (std::uint64_t k = 1; k <= 5 && hyp; ++k) {
              SmallOrd pt = fund_seq(mu, k);
              if (family == 0) pt = succ(pt);
              if (!(pt < mu)) { hyp = false; break; }
              if (!t.branch(pt, y)) hyp = false;
            }
            if (!hyp) continue;
            if (!t.branch(mu, y)) {
              rec.bad("predecessor levels of " + fmt_node(y) +
                      " not closed at " + format(KOrd(mu)));
              return;
            }
            rec.ok();
            return;
          }
          rec.skip();
        });
      }
    }
    rep.records.push_back(rec.take());
  }

  // --- M.4: below the full width, predecessor levels are unbounded.
  {
    Rec rec("M.4");
    for (const auto& y : pools.nodes) {
      if (y.level.is_kappa) {
        rec.skip();  // instances at the top level need kappa-many conditions
        continue;
      }
      const SmallOrd& ly = y.level.value;
      if (ly.is_zero() || !limit_or_zero(ly)) continue;
      guarded(rec, "M.4 at " + fmt_node(y), [&] {
        if (succ(small_part(y.order)) == t.theta(ly)) {
          rec.skip();  // hypothesis fails: y realizes the full width
          return;
        }
        for (std::uint64_t n = 8; n <= 72; ++n) {
          if (t.branch(fund_seq(ly, n), y)) {
            rec.ok();
            return;
          }
        }
        rec.bad("predecessor levels of " + fmt_node(y) + " appear bounded");
      });
    }
    rep.records.push_back(rec.take());
  }

  // --- M.5: when predecessor levels are unbounded, the images of the edge
  // maps cover the node's order.
  {
    Rec rec("M.5");
    for (const auto& y : pools.nodes) {
      if (y.level.is_kappa) {
        rec.skip();
        continue;
      }
      const SmallOrd& ly = y.level.value;
      if (ly.is_zero() || !limit_or_zero(ly)) continue;
      guarded(rec, "M.5 at " + fmt_node(y), [&] {
        std::vector<Node> xs;
        bool unbounded = false;
        for (std::uint64_t n : {4, 6, 8, 10, 12, 14}) {
          SmallOrd lvl = fund_seq(ly, n);
          auto ord = t.branch(lvl, y);
          if (!ord) continue;
          xs.push_back(node(lvl, *ord));
          if (n >= 10) unbounded = true;
        }
        if (!unbounded) {
          rec.skip();
          return;
        }
        // union of the image intervals of the restricted edge maps
        std::vector<std::pair<KOrd, KOrd>> ivs;
        for (const auto& x : xs) {
          if (!t.tree(x, y)) continue;
          PiecewiseShift m = shift_restrict(t.pi(x, y), x.order);
          PiecewiseShift nm = normalize(m);
          for (size_t i = 0; i < nm.pieces.size(); ++i) {
            const KOrd& lo = nm.pieces[i].first;
            if (!(lo < nm.domain)) break;
            KOrd hi = (i + 1 < nm.pieces.size()) ? nm.pieces[i + 1].first : nm.domain;
            if (nm.domain < hi) hi = nm.domain;
            ivs.push_back({nm.pieces[i].second,
                           add(nm.pieces[i].second, left_sub(lo, hi))});
          }
        }
        std::sort(ivs.begin(), ivs.end(),
                  [](const auto& a, const auto& b) { return cmp(a.first, b.first) < 0; });
        KOrd cur{};
        for (const auto& iv : ivs) {
          if (cur < iv.first) break;  // gap
          if (cur < iv.second) cur = iv.second;
        }
        if (cur < y.order)
          rec.bad("edge images below " + fmt_node(y) + " only cover up to " +
                  format(cur));
        else rec.ok();
      });
    }
    rep.records.push_back(rec.take());
  }

  // --- M.6: limit orders propagate to the image supremum node, on
  // level-successor edges below lambda.
  {
    Rec rec("M.6");
    for (const auto& e : pools.edges) {
      const Node& x = e.first;
      const Node& y = e.second;
      if (x.level.is_kappa || y.level.is_kappa) {
        rec.skip();
        continue;
      }
      if (y.level.value != succ(x.level.value)) continue;
      if (x.order.is_zero() || !limit_or_zero(x.order)) {
        rec.skip();
        continue;
      }
      guarded(rec, "M.6 at " + fmt_node(x) + " -> " + fmt_node(y), [&] {
        PiecewiseShift m = t.pi(x, y);
        KOrd nu = shift_image_sup(shift_restrict(m, x.order));
        Node z = node(y.level.value, nu);
        if (!t.contains(z)) {
          rec.bad("M.6 companion " + fmt_node(z) + " not in the structure");
          return;
        }
        if (!t.tree(x, z)) {
          rec.bad("M.6 edge missing: " + fmt_node(x) + " below " + fmt_node(z));
          return;
        }
        if (!shift_equal(normalize(shift_restrict(t.pi(x, z), x.order)),
                         normalize(shift_restrict(m, x.order)))) {
          rec.bad("M.6 restriction mismatch at " + fmt_node(x));
          return;
        }
        rec.ok();
      });
    }
    rep.records.push_back(rec.take());
  }

  // --- M.7: interpolation at intermediate levels, below lambda. Probed on a
  // finite hypothesis set with a targeted falsification pass, so genuinely
  // vacuous instances are skipped rather than misreported.
  {
    Rec rec("M.7");
    for (const auto& e : pools.edges) {
      const Node& x = e.first;
      const Node& y = e.second;
      if (x.level.is_kappa || y.level.is_kappa) {
        rec.skip();
        continue;
      }
      if (x.order.is_zero() || !limit_or_zero(x.order)) continue;
      guarded(rec, "M.7 at " + fmt_node(x) + " -> " + fmt_node(y), [&] {
        PiecewiseShift m = t.pi(x, y);
        if (shift_image_sup(shift_restrict(m, x.order)) != y.order) {
          rec.skip();
          return;
        }
        std::vector<SmallOrd> alphas;
        alphas.push_back(succ(x.level.value));
        alphas.push_back(add(x.level.value, omega()));
        alphas.push_back(add(x.level.value, omega_pow(omega())));
        if (limit_or_zero(y.level.value) && !y.level.value.is_zero())
          for (std::uint64_t k = 1; k <= 3; ++k)
            alphas.push_back(fund_seq(y.level.value, k));
        for (const auto& alpha : alphas) {
          if (!(x.level.value < alpha) || !(alpha < y.level.value)) continue;
          // hypothesis on probe orders
          std::vector<KOrd> nus;
          nus.push_back(KOrd{});
          SmallOrd ox = small_part(x.order);
          for (std::uint64_t k = 1; k <= 4; ++k)
            nus.push_back(KOrd(fund_seq(ox, k)));
          bool hyp = true;
          for (const auto& nu : nus) {
            if (!(nu < x.order)) continue;
            Node z = node(y.level.value, shift_apply(m, nu));
            if (!t.contains(z) || !t.branch(alpha, z)) {
              hyp = false;
              break;
            }
          }
          if (!hyp) {
            rec.skip();
            continue;
          }
          // targeted falsification: a probe order at the width of alpha
          SmallOrd th = t.theta(alpha);
          if (KOrd(th) < x.order) {
            Node z = node(y.level.value, shift_apply(m, KOrd(th)));
            if (!t.contains(z) || !t.branch(alpha, z)) {
              rec.skip();  // the full hypothesis fails
              continue;
            }
          }
          if (!t.branch(alpha, y)) {
            rec.bad("M.7 interpolation fails at level " + format(KOrd(alpha)) +
                    " below " + fmt_node(y));
            return;
          }
          rec.ok();
        }
      });
    }
    rep.records.push_back(rec.take());
  }

  return rep;
}

inline Report check_condition(const Condition& p, std::uint64_t budget = 0,
                              std::uint64_t seed = 0) {
  return check_target(target_of(p), budget, seed);
}

// ---------------------------------------------------------------------------
// Fragments
// ---------------------------------------------------------------------------

struct Fragment {
  std::vector<Node> nodes;
  std::vector<std::pair<Node, Node>> edges;
  std::vector<PiecewiseShift> pi_tables;  // parallel to edges
  std::vector<std::pair<SmallOrd, SmallOrd>> theta_table;  // level -> width
  std::vector<std::pair<Node, std::vector<KOrd>>> a_sets;  // optional
  std::string origin;
};

inline Fragment extract_fragment(const Condition& p, const std::vector<Level>& levels,
                                 const KOrd& max_order, size_t max_nodes) {
  Fragment f;
  f.origin = "lambda=" + format(KOrd(p.lambda())) +
             ";max_order=" + format(max_order) +
             ";levels=" + std::to_string(levels.size());
  for (const auto& lv : levels) {
    std::vector<KOrd> orders;
    if (lv.is_kappa) {
      for (const auto& b : p.blocks.bases)
        for (std::uint64_t k = 0; k < 4; ++k) {
          KOrd tau = add(b, knat(k));
          if (tau < max_order) orders.push_back(tau);
        }
    } else {
      if (lv.value > p.lambda()) fail("AboveLambda", "fragment level exceeds lambda");
      SmallOrd th = theta(p, lv.value);
      KOrd bound = KOrd(th) < max_order ? KOrd(th) : max_order;
      std::vector<KOrd> breakpoints;
      breakpoints.push_back(KOrd{});
      const Segment& s = p.segs[seg_index(p, lv.value)];
      if (s.kind == SegKind::AddBlock) {
        breakpoints.push_back(KOrd(s.tau_bar));
        breakpoints.push_back(KOrd(add(s.tau_bar, omega())));
      } else if (s.kind == SegKind::Amalgam) {
        breakpoints.push_back(KOrd(s.gamma0));
        breakpoints.push_back(KOrd(s.gamma_p));
      }
      if (is_nat(small_part(bound)) && bound.kappa_free()) {
        for (std::uint64_t k = 0; k < to_nat(small_part(bound)); ++k)
          orders.push_back(knat(k));
      } else {
        for (const auto& bp : breakpoints)
          for (std::uint64_t k = 0; k < 4; ++k) {
            KOrd nu = add(bp, knat(k));
            if (nu < bound) orders.push_back(nu);
          }
      }
      f.theta_table.push_back({lv.value, th});
    }
    std::sort(orders.begin(), orders.end(),
              [](const KOrd& a, const KOrd& b) { return cmp(a, b) < 0; });
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    for (const auto& nu : orders) {
      Node x = lv.is_kappa ? kappa_node(nu) : node(lv.value, nu);
      if (!contains(p, x)) continue;
      f.nodes.push_back(x);
      if (f.nodes.size() > max_nodes)
        fail("BudgetExceeded", "fragment exceeds the node budget");
    }
  }
  for (const auto& x : f.nodes) {
    if (x.level.is_kappa) continue;
    for (const auto& y : f.nodes) {
      bool above = y.level.is_kappa ||
                   (!y.level.is_kappa && x.level.value < y.level.value);
      if (!above) continue;
      if (tree_rel(p, x, y)) {
        f.edges.push_back({x, y});
        f.pi_tables.push_back(pi_map(p, x, y));
      }
    }
  }
  return f;
}

inline Report check_fragment(const Fragment& f) {
  using detail::fmt_node;
  using detail::Rec;
  Report rep;
  auto member = [&](const Node& x) {
    for (const auto& n : f.nodes)
      if (n == x) return true;
    return false;
  };
  auto edge_index = [&](const Node& x, const Node& y) -> std::optional<size_t> {
    for (size_t i = 0; i < f.edges.size(); ++i)
      if (f.edges[i].first == x && f.edges[i].second == y) return i;
    return std::nullopt;
  };
  auto theta_at = [&](const SmallOrd& mu) -> std::optional<SmallOrd> {
    for (const auto& e : f.theta_table)
      if (e.first == mu) return e.second;
    return std::nullopt;
  };

  {
    Rec rec("left-alignment");
    for (const auto& e : f.theta_table) {
      if (e.second.is_zero()) rec.bad("zero width at level " + format(KOrd(e.first)));
      else rec.ok();
    }
    for (const auto& x : f.nodes) {
      if (x.level.is_kappa) {
        rec.skip();
        continue;
      }
      auto th = theta_at(x.level.value);
      if (!th) {
        rec.skip();
        continue;
      }
      if (!(x.order < KOrd(*th)))
        rec.bad("node " + fmt_node(x) + " exceeds the recorded width");
      else rec.ok();
    }
    rep.records.push_back(rec.take());
  }
  {
    Rec rec("f-links");
    rec.skip();  // the enumeration is not part of the finite trace
    rep.records.push_back(rec.take());
  }
  {
    Rec rec("tree-order");
    for (size_t i = 0; i < f.edges.size(); ++i) {
      const auto& [x, y] = f.edges[i];
      if (!member(x) || !member(y)) {
        rec.bad("edge endpoint outside the fragment: " + fmt_node(x));
        continue;
      }
      if (x == y) {
        rec.bad("reflexive edge at " + fmt_node(x));
        continue;
      }
      if (edge_index(y, x)) {
        rec.bad("2-cycle through " + fmt_node(x));
        continue;
      }
      rec.ok();
    }
    for (size_t i = 0; i < f.edges.size(); ++i)
      for (size_t j = 0; j < f.edges.size(); ++j) {
        if (!(f.edges[i].second == f.edges[j].first)) continue;
        if (!edge_index(f.edges[i].first, f.edges[j].second))
          rec.bad("transitivity gap: " + fmt_node(f.edges[i].first) + " to " +
                  fmt_node(f.edges[j].second));
        else rec.ok();
      }
    // linear predecessors
    for (const auto& y : f.nodes) {
      std::vector<Node> preds;
      for (const auto& e : f.edges)
        if (e.second == y) preds.push_back(e.first);
      for (size_t i = 0; i < preds.size(); ++i)
        for (size_t j = i + 1; j < preds.size(); ++j) {
          if (!edge_index(preds[i], preds[j]) && !edge_index(preds[j], preds[i]))
            rec.bad("predecessors of " + fmt_node(y) + " incomparable: " +
                    fmt_node(preds[i]) + " vs " + fmt_node(preds[j]));
          else rec.ok();
        }
    }
    rep.records.push_back(rec.take());
  }
  {
    Rec rec("monotonicity");
    for (const auto& [x, y] : f.edges) {
      bool increases = (y.level.is_kappa && !x.level.is_kappa) ||
                       (!x.level.is_kappa && !y.level.is_kappa &&
                        x.level.value < y.level.value);
      if (!increases)
        rec.bad("edge " + fmt_node(x) + " -> " + fmt_node(y) +
                " does not increase the level");
      else rec.ok();
    }
    rep.records.push_back(rec.take());
  }
  {
    Rec rec("commutativity");
    for (size_t i = 0; i < f.edges.size(); ++i)
      for (size_t j = 0; j < f.edges.size(); ++j) {
        if (!(f.edges[i].second == f.edges[j].first)) continue;
        auto k = edge_index(f.edges[i].first, f.edges[j].second);
        if (!k) {
          rec.skip();
          continue;
        }
        try {
          PiecewiseShift lhs = shift_compose(f.pi_tables[j], f.pi_tables[i]);
          if (!shift_equal(normalize(lhs), normalize(f.pi_tables[*k])))
            rec.bad("maps do not compose through " + fmt_node(f.edges[i].second));
          else rec.ok();
        } catch (const Error& e) {
          rec.bad(std::string("composition failed: ") + e.what());
        }
      }
    rep.records.push_back(rec.take());
  }
  {
    Rec rec("M.1");
    for (size_t i = 0; i < f.edges.size(); ++i) {
      try {
        auto sl = check_sloop(f.pi_tables[i]);
        if (!sl.ok) {
          rec.bad("edge map violates the shift conditions at " +
                  fmt_node(f.edges[i].first));
          continue;
        }
        if (shift_apply(f.pi_tables[i], f.edges[i].first.order) !=
            f.edges[i].second.order) {
          rec.bad("edge map top value wrong at " + fmt_node(f.edges[i].first));
          continue;
        }
        rec.ok();
      } catch (const Error& e) {
        rec.bad(std::string("M.1 evaluation failed: ") + e.what());
      }
    }
    rep.records.push_back(rec.take());
  }
  {
    Rec rec("M.2");
    for (size_t i = 0; i < f.edges.size(); ++i) {
      const auto& [x, y] = f.edges[i];
      if (x.level.is_kappa) continue;
      for (const auto& w : f.nodes) {
        if (w.level.is_kappa || !(w.level == x.level)) continue;
        if (!(cmp(w.order, x.order) < 0)) continue;
        try {
          KOrd img = shift_apply(f.pi_tables[i], w.order);
          Node z = y.level.is_kappa ? kappa_node(img) : node(y.level.value, img);
          if (!member(z)) {
            rec.skip();
            continue;
          }
          auto k = edge_index(w, z);
          if (!k) {
            rec.bad("M.2 edge missing: " + fmt_node(w) + " below " + fmt_node(z));
            continue;
          }
          if (!shift_equal(normalize(f.pi_tables[*k]),
                           normalize(shift_restrict(f.pi_tables[i], succ(w.order)))))
            rec.bad("M.2 restriction mismatch at " + fmt_node(w));
          else rec.ok();
        } catch (const Error& e) {
          rec.bad(std::string("M.2 evaluation failed: ") + e.what());
        }
      }
    }
    rep.records.push_back(rec.take());
  }
  for (const char* id : {"M.3", "M.4", "M.5", "M.6", "M.7"}) {
    Rec rec(id);
    // boundary-dependent: quantifiers range over levels outside the trace
    for (size_t i = 0; i < f.edges.size(); ++i) rec.skip();
    rep.records.push_back(rec.take());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Mutation corpus: one targeted perturbation per axiom
// ---------------------------------------------------------------------------

namespace detail {

// A level strictly inside the condition whose width exceeds omega.
inline SmallOrd wide_level(const Condition& p) {
  for (size_t i = p.segs.size(); i-- > 0;) {
    const Segment& s = p.segs[i];
    SmallOrd cand = add(s.lo, omega_pow(omega()));
    if (cand < s.hi && omega() < theta(p, cand)) return cand;
  }
  fail("Internal", "mutation corpus needs a condition with width above omega");
}

}  // namespace detail

inline CheckTarget make_mutant(const std::string& axiom, const Condition& p) {
  CheckTarget t = target_of(p);
  if (axiom == "left-alignment") {
    auto base = t.theta;
    t.theta = [base](const SmallOrd& a) {
      if (a == omega()) return SmallOrd{};
      return base(a);
    };
  } else if (axiom == "f-links") {
    auto base = t.f;
    t.f = [base](const SmallOrd& nu) {
      KOrd v = base(nu);
      if (!nu.is_zero() && limit_or_zero(nu)) return add(v, knat(1));
      return v;
    };
  } else if (axiom == "tree-order") {
    auto base = t.tree;
    auto has = t.contains;
    t.tree = [base, has](const Node& a, const Node& b) {
      if (a == b && has(a)) return true;
      return base(a, b);
    };
  } else if (axiom == "monotonicity") {
    auto base = t.tree;
    auto has = t.contains;
    t.tree = [base, has](const Node& a, const Node& b) {
      if (!a.level.is_kappa && !b.level.is_kappa && a.level == b.level &&
          a.order.is_zero() && b.order == knat(1) && has(a) && has(b))
        return true;
      return base(a, b);
    };
  } else if (axiom == "commutativity") {
    auto base = t.pi;
    SmallOrd lam = t.lambda;
    t.pi = [base, lam](const Node& x, const Node& y) {
      PiecewiseShift m = base(x, y);
      if (y.level.is_kappa || y.level.value == lam) return m;
      PiecewiseShift bump;
      bump.domain = add(shift_image_sup(m), knat(2));
      bump.pieces.push_back({KOrd{}, KOrd{}});
      bump.pieces.push_back({knat(1), knat(2)});
      return shift_compose(bump, m);
    };
  } else if (axiom == "M.1") {
    auto base = t.pi;
    t.pi = [base](const Node& x, const Node& y) {
      PiecewiseShift m = base(x, y);
      KOrd top = shift_apply(m, x.order);
      m.pieces.push_back({x.order, add(top, knat(1))});
      return m;
    };
  } else if (axiom == "M.2") {
    auto base = t.tree;
    t.tree = [base](const Node& a, const Node& b) {
      if (!a.level.is_kappa && a.order.is_zero() && !a.level.value.is_zero())
        return false;  // drop order-0 edges above level 0
      return base(a, b);
    };
  } else if (axiom == "M.3") {
    auto base = t.branch;
    t.branch = [base](const SmallOrd& level, const Node& y) -> std::optional<KOrd> {
      if (!level.is_zero() && limit_or_zero(level)) return std::nullopt;
      return base(level, y);
    };
  } else if (axiom == "M.4") {
    auto base = t.branch;
    t.branch = [base](const SmallOrd& level, const Node& y) -> std::optional<KOrd> {
      if (!y.level.is_kappa && !y.level.value.is_zero() &&
          limit_or_zero(y.level.value) && !(level < fund_seq(y.level.value, 2)))
        return std::nullopt;
      return base(level, y);
    };
  } else if (axiom == "M.5") {
    auto base = t.pi;
    t.pi = [base](const Node& x, const Node& y) {
      PiecewiseShift m = base(x, y);
      KOrd one = knat(1);
      if (cmp(one, m.domain) < 0) return shift_restrict(m, one);
      return m;
    };
  } else if (axiom == "M.6") {
    SmallOrd alpha0 = detail::wide_level(p);
    Node x0 = node(alpha0, KOrd(omega()));
    Node y0 = node(succ(alpha0), KOrd{});
    auto base_tree = t.tree;
    t.tree = [base_tree, x0, y0](const Node& a, const Node& b) {
      if (a == x0 && b == y0) return true;
      return base_tree(a, b);
    };
    auto base_pi = t.pi;
    t.pi = [base_pi, x0, y0](const Node& a, const Node& b) {
      if (a == x0 && b == y0) return identity_shift(succ(KOrd(omega())));
      return base_pi(a, b);
    };
    auto base_branch = t.branch;
    t.branch = [base_branch, x0, y0, alpha0](const SmallOrd& level,
                                             const Node& y) -> std::optional<KOrd> {
      if (y == y0 && level == alpha0) return KOrd(omega());
      return base_branch(level, y);
    };
    t.hint_edges.push_back({x0, y0});
  } else if (axiom == "M.7") {
    const Segment& s = p.segs.back();
    SmallOrd lo = s.lo;
    if (!(omega() < theta(p, lo)) || !(omega() < p.theta_top()))
      fail("Internal", "mutation corpus needs a wide top segment");
    Node x0 = node(lo, KOrd(omega()));
    Node y0 = node(p.lambda(), KOrd(omega()));
    SmallOrd alpha0 = add(lo, omega_pow(omega()));
    if (!(alpha0 < p.lambda()))
      fail("Internal", "mutation corpus needs a longer top segment");
    auto base = t.branch;
    t.branch = [base, y0, alpha0](const SmallOrd& level,
                                  const Node& y) -> std::optional<KOrd> {
      if (y == y0 && level == alpha0) return std::nullopt;
      return base(level, y);
    };
    t.hint_edges.push_back({x0, y0});
  } else {
    fail("Internal", "unknown axiom id: " + axiom);
  }
  return t;
}

}  // namespace mangrove
