// SPDX-License-Identifier: Apache-2.0
//
// Morass conditions as immutable constructor terms with lazy query evaluation.
//
// Every condition normalizes to a stack of *segments* covering the level
// interval (0, lambda]. Each segment carries a closed-form width function and
// a boundary map describing how branches entering at the segment's floor
// continue upward. All queries (theta, containment, the tree relation, the
// maps pi, the block enumeration f) evaluate against this normal form, so
// constructor terms that describe the same structure answer identically.
//
// Segment kinds:
//   Tower    — (lo, lo + w^g * alpha]; constant-order vertical chains,
//              close-off levels at each multiple of w^g have width g.
//              The base condition is the one-storey tower over a single
//              block (g = w), so vertical extensions merge with it.
//   AddBlock — a region appended when a new block is inserted; orders of the
//              old structure at or above tau_bar are shifted up by w to make
//              room for the new block's branch.
//   Amalgam  — a region joining two conditions that share an initial block
//              run; the right-hand branches re-enter shifted above the
//              left-hand width.

#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <mangrove/kord.hpp>

namespace mangrove {

// ---------------------------------------------------------------------------
// Levels, nodes, block sets
// ---------------------------------------------------------------------------

struct Level {
  bool is_kappa = false;
  SmallOrd value;  // meaningful when !is_kappa
};

inline Level below(SmallOrd v) { return Level{false, std::move(v)}; }
inline Level kappa_level() { return Level{true, {}}; }

inline bool operator==(const Level& a, const Level& b) {
  if (a.is_kappa != b.is_kappa) return false;
  return a.is_kappa || a.value == b.value;
}
inline bool operator!=(const Level& a, const Level& b) { return !(a == b); }

struct Node {
  Level level;
  KOrd order;
};

inline Node node(SmallOrd level, KOrd order) {
  return Node{below(std::move(level)), std::move(order)};
}
inline Node kappa_node(KOrd order) { return Node{kappa_level(), std::move(order)}; }

inline bool operator==(const Node& a, const Node& b) {
  return a.level == b.level && a.order == b.order;
}
inline bool operator!=(const Node& a, const Node& b) { return !(a == b); }

// A finite union of blocks [base, base + w); bases strictly increasing,
// each limit or zero, the first one 0.
struct BlockSet {
  std::vector<KOrd> bases;
};

inline bool operator==(const BlockSet& a, const BlockSet& b) {
  if (a.bases.size() != b.bases.size()) return false;
  for (size_t i = 0; i < a.bases.size(); ++i)
    if (a.bases[i] != b.bases[i]) return false;
  return true;
}
inline bool operator!=(const BlockSet& a, const BlockSet& b) { return !(a == b); }

inline void validate_blocks(const BlockSet& s) {
  if (s.bases.empty() || !s.bases[0].is_zero())
    fail("Internal", "block set must start at 0");
  for (size_t i = 0; i < s.bases.size(); ++i) {
    if (!limit_or_zero(s.bases[i]))
      fail("NotLimit", "block base " + format(s.bases[i]) + " is a successor");
    if (i > 0 && !(s.bases[i - 1] < s.bases[i]))
      fail("Internal", "block bases must be strictly increasing");
  }
}

inline SmallOrd ot_blocks(const BlockSet& s) {
  return mul(omega(), nat(s.bases.size()));
}

// Index of the block containing tau, if any.
inline std::optional<size_t> block_index(const BlockSet& s, const KOrd& tau) {
  for (size_t i = s.bases.size(); i-- > 0;) {
    if (s.bases[i] <= tau) {
      KOrd off = left_sub(s.bases[i], tau);
      if (off.kappa_free() && is_nat(off.tail)) return i;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline KOrd sup_blocks(const BlockSet& s) {
  return add(s.bases.back(), KOrd(omega()));
}

// ---------------------------------------------------------------------------
// Segments
// ---------------------------------------------------------------------------

enum class SegKind { Tower, AddBlock, Amalgam };

struct Segment {
  SegKind kind = SegKind::Tower;
  SmallOrd lo, hi;  // covers the level interval (lo, hi]

  // Tower: hi = lo + w^g * alpha.
  SmallOrd g, alpha;
  // AddBlock: hi = lo + w^(tau_bar + w + xi).
  SmallOrd tau_bar, xi;
  // Amalgam: hi = lo + w^(gamma_p + gamma_q); gamma0 = order type of the
  // shared initial block run.
  SmallOrd gamma0, gamma_p, gamma_q;

  SmallOrd theta_top() const {
    switch (kind) {
      case SegKind::Tower: return g;
      case SegKind::AddBlock: return add(tau_bar, add(omega(), xi));
      case SegKind::Amalgam: return add(gamma_p, gamma_q);
    }
    fail("Internal", "bad segment kind");
  }
};

inline bool operator==(const Segment& a, const Segment& b) {
  return a.kind == b.kind && a.lo == b.lo && a.hi == b.hi && a.g == b.g &&
         a.alpha == b.alpha && a.tau_bar == b.tau_bar && a.xi == b.xi &&
         a.gamma0 == b.gamma0 && a.gamma_p == b.gamma_p && a.gamma_q == b.gamma_q;
}
inline bool operator!=(const Segment& a, const Segment& b) { return !(a == b); }

namespace detail {

// Split beta into (w^g-divisible part, remainder below w^g).
inline std::pair<SmallOrd, SmallOrd> split_pow(const SmallOrd& beta, const SmallOrd& g) {
  SmallOrd div, rem;
  for (const auto& t : beta.terms)
    (t.exp >= g ? div : rem).terms.push_back(t);
  return {div, rem};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Conditions
// ---------------------------------------------------------------------------

enum class TermKind { Bamboo, ReplaceS, AddBlock, TowerExt, Amalgam, Splice };

struct Condition {
  // Constructor term (retained for serialization and provenance queries).
  TermKind kind = TermKind::Bamboo;
  std::shared_ptr<const Condition> arg1, arg2, arg3;
  BlockSet term_blocks;  // ReplaceS
  KOrd term_sigma;       // AddBlock
  SmallOrd term_alpha;   // TowerExt

  // Normal form. All queries evaluate against these two fields; two
  // conditions are equal iff they agree here.
  std::vector<Segment> segs;
  BlockSet blocks;

  const SmallOrd& lambda() const { return segs.back().hi; }
  SmallOrd theta_top() const { return segs.back().theta_top(); }
};

inline bool operator==(const Condition& a, const Condition& b) {
  if (a.blocks != b.blocks || a.segs.size() != b.segs.size()) return false;
  for (size_t i = 0; i < a.segs.size(); ++i)
    if (a.segs[i] != b.segs[i]) return false;
  return true;
}
inline bool operator!=(const Condition& a, const Condition& b) { return !(a == b); }

// Segment owning level alpha; level 0 is assigned to the first segment.
inline size_t seg_index(const Condition& p, const SmallOrd& alpha) {
  if (alpha > p.lambda()) fail("AboveLambda", "level exceeds lambda");
  for (size_t i = 0; i < p.segs.size(); ++i)
    if (alpha <= p.segs[i].hi) return i;
  fail("Internal", "segment lookup failed");
}

inline SmallOrd theta(const Condition& p, const SmallOrd& alpha) {
  if (alpha > p.lambda()) fail("AboveLambda", "level exceeds lambda");
  if (alpha.is_zero()) return nat(1);
  const Segment& s = p.segs[seg_index(p, alpha)];
  SmallOrd beta = left_sub(s.lo, alpha);
  switch (s.kind) {
    case SegKind::Tower: {
      auto [div, rem] = detail::split_pow(beta, s.g);
      return rem.is_zero() ? s.g : succ(deg(rem));
    }
    case SegKind::AddBlock:
    case SegKind::Amalgam:
      return alpha == s.hi ? s.theta_top() : succ(deg(beta));
  }
  fail("Internal", "bad segment kind");
}

inline bool contains(const Condition& p, const Node& x) {
  if (x.level.is_kappa) return block_index(p.blocks, x.order).has_value();
  if (x.level.value > p.lambda()) return false;
  if (!x.order.kappa_free()) return false;
  return x.order < KOrd(theta(p, x.level.value));
}

// ---------------------------------------------------------------------------
// Block enumeration f : ot(S) -> S
// ---------------------------------------------------------------------------

inline KOrd f_apply(const Condition& p, const SmallOrd& nu) {
  if (nu >= ot_blocks(p.blocks)) fail("OutOfDomain", "f argument exceeds ot(S)");
  // nu = w*i + k with i, k finite.
  std::uint64_t i = 0, k = 0;
  for (const auto& t : nu.terms) {
    if (t.exp == nat(1)) i = t.coeff;
    else if (t.exp.is_zero()) k = t.coeff;
  }
  return add(p.blocks.bases[i], knat(k));
}

inline std::optional<SmallOrd> f_inv(const Condition& p, const KOrd& tau) {
  auto i = block_index(p.blocks, tau);
  if (!i) return std::nullopt;
  KOrd off = left_sub(p.blocks.bases[*i], tau);
  return add(mul(omega(), nat(*i)), small_part(off));
}

// The enumeration as a piecewise shift on [0, ot(S)).
inline PiecewiseShift f_shift(const Condition& p) {
  PiecewiseShift m;
  m.domain = KOrd(ot_blocks(p.blocks));
  for (size_t i = 0; i < p.blocks.bases.size(); ++i)
    m.pieces.push_back({KOrd(mul(omega(), nat(i))), p.blocks.bases[i]});
  return normalize(m);
}

// ---------------------------------------------------------------------------
// Boundary maps and the tree relation
// ---------------------------------------------------------------------------

namespace detail {

// Order at seg.lo of the branch carrying order nu inside the segment's
// region; nullopt when the branch is born inside the region.
inline std::optional<KOrd> seg_down(const Segment& s, const KOrd& nu) {
  switch (s.kind) {
    case SegKind::Tower:
      return nu;
    case SegKind::AddBlock: {
      KOrd tb(s.tau_bar), tbw(add(s.tau_bar, omega()));
      if (nu < tb) return nu;
      if (nu < tbw) return std::nullopt;  // the new block's branch
      return add(tb, left_sub(tbw, nu));
    }
    case SegKind::Amalgam: {
      KOrd gp(s.gamma_p);
      if (nu < gp) return nu;
      return add(KOrd(s.gamma0), left_sub(gp, nu));
    }
  }
  fail("Internal", "bad segment kind");
}

// Shift mapping orders at seg.lo to branch orders inside the region, chosen
// for the branch that carries region order nu (relevant for Amalgam, whose
// floor map splits into two monotone branches).
inline PiecewiseShift seg_up_shift(const Segment& s, const KOrd& nu, const KOrd& dom) {
  PiecewiseShift m;
  m.domain = dom;
  m.pieces.push_back({KOrd{}, KOrd{}});
  switch (s.kind) {
    case SegKind::Tower:
      break;
    case SegKind::AddBlock:
      m.pieces.push_back({KOrd(s.tau_bar), KOrd(add(s.tau_bar, omega()))});
      break;
    case SegKind::Amalgam:
      if (nu >= KOrd(s.gamma_p))
        m.pieces.push_back({KOrd(s.gamma0), KOrd(s.gamma_p)});
      break;
  }
  return normalize(m);
}

// Walk the branch of the node at (level, nu) down to the segment with index
// target; returns the branch order constant throughout that segment and the
// composed shift from orders there up to orders at the starting side.
inline std::optional<std::pair<KOrd, PiecewiseShift>> branch_at(
    const Condition& p, SmallOrd level, KOrd nu, size_t target) {
  size_t idx = seg_index(p, level);
  std::vector<PiecewiseShift> ups;
  while (idx > target) {
    const Segment& s = p.segs[idx];
    auto d = seg_down(s, nu);
    if (!d) return std::nullopt;
    ups.push_back(seg_up_shift(s, nu, KOrd(theta(p, s.lo))));
    nu = *d;
    level = s.lo;
    idx = seg_index(p, level);
  }
  PiecewiseShift total = identity_shift(succ(nu));
  for (auto it = ups.rbegin(); it != ups.rend(); ++it)
    total = shift_compose(*it, total);
  return std::make_pair(nu, total);
}

}  // namespace detail

inline bool tree_rel(const Condition& p, const Node& x, const Node& y) {
  if (!contains(p, x) || !contains(p, y))
    fail("NotInCondition", "tree_rel argument outside the condition");
  if (y.level.is_kappa) {
    if (x.level.is_kappa) return false;
    SmallOrd nu = *f_inv(p, y.order);
    Node top = node(p.lambda(), KOrd(nu));
    return x == top || tree_rel(p, x, top);
  }
  if (x.level.is_kappa) return false;
  if (!(x.level.value < y.level.value)) return false;
  size_t ix = seg_index(p, x.level.value);
  auto br = detail::branch_at(p, y.level.value, y.order, ix);
  return br && br->first == x.order;
}

inline PiecewiseShift pi_map(const Condition& p, const Node& x, const Node& y) {
  if (!tree_rel(p, x, y)) fail("NotRelated", "pi_map requires x below y in the tree");
  if (y.level.is_kappa) {
    SmallOrd nu = *f_inv(p, y.order);
    Node top = node(p.lambda(), KOrd(nu));
    PiecewiseShift inner =
        (x == top) ? identity_shift(succ(KOrd(nu))) : pi_map(p, x, top);
    return normalize(shift_compose(f_shift(p), inner));
  }
  size_t ix = seg_index(p, x.level.value);
  auto br = detail::branch_at(p, y.level.value, y.order, ix);
  return normalize(shift_restrict(br->second, succ(x.order)));
}

// ---------------------------------------------------------------------------
// Branch pieces
// ---------------------------------------------------------------------------

struct BranchPiece {
  SmallOrd lo, hi;  // level interval (lo, hi]; hi of the topmost piece is
                    // the level of y itself (kappa edges: lambda)
  KOrd order;       // branch order constant on the piece
  PiecewiseShift map_to_target;  // orders on the piece -> orders at y
};

inline std::vector<BranchPiece> branch_pieces(const Condition& p, const Node& y) {
  if (!contains(p, y)) fail("NotInCondition", "branch_pieces argument outside");
  std::vector<BranchPiece> out;
  SmallOrd level;
  KOrd nu;
  PiecewiseShift acc;  // orders at current depth -> orders at y
  if (y.level.is_kappa) {
    SmallOrd inv = *f_inv(p, y.order);
    nu = KOrd(inv);
    level = p.lambda();
    acc = shift_restrict(f_shift(p), succ(nu));
    out.push_back({p.segs.back().lo, level, nu, acc});
  } else {
    nu = y.order;
    level = y.level.value;
    acc = identity_shift(succ(nu));
    out.push_back({p.segs[seg_index(p, level)].lo, level, nu, acc});
  }
  size_t idx = seg_index(p, level);
  while (idx > 0) {
    const Segment& s = p.segs[idx];
    // When level sits strictly inside the segment the piece above already
    // covers it; descend through the segment floor.
    auto d = detail::seg_down(s, nu);
    if (!d) break;
    PiecewiseShift up = detail::seg_up_shift(s, nu, KOrd(theta(p, s.lo)));
    nu = *d;
    acc = normalize(shift_compose(acc, shift_restrict(up, succ(nu))));
    level = s.lo;
    idx = seg_index(p, level);
    out.push_back({p.segs[idx].lo, level, nu, acc});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline Condition bamboo() {
  Condition c;
  c.kind = TermKind::Bamboo;
  Segment s;
  s.kind = SegKind::Tower;
  s.lo = nat(0);
  s.g = omega();
  s.alpha = nat(1);
  s.hi = omega_pow(omega());
  c.segs.push_back(std::move(s));
  c.blocks.bases.push_back(KOrd{});
  return c;
}

inline Condition replace_s(const Condition& p, const BlockSet& newBlocks) {
  validate_blocks(newBlocks);
  if (ot_blocks(newBlocks) > p.theta_top())
    fail("TooWide", "ot(S) = " + format(KOrd(ot_blocks(newBlocks))) +
                        " exceeds the top width " + format(KOrd(p.theta_top())));
  Condition c;
  c.kind = TermKind::ReplaceS;
  c.arg1 = std::make_shared<Condition>(p);
  c.term_blocks = newBlocks;
  c.segs = p.segs;
  c.blocks = newBlocks;
  return c;
}

inline Condition add_block(const Condition& p, const KOrd& sigma) {
  if (!limit_or_zero(sigma)) fail("NotLimit", "new block base must be limit or zero");
  for (const auto& b : p.blocks.bases)
    if (b == sigma) return p;  // already a block
  size_t idx = p.blocks.bases.size();
  for (size_t i = 0; i < p.blocks.bases.size(); ++i)
    if (p.blocks.bases[i] > sigma) { idx = i; break; }
  SmallOrd tau_bar = mul(omega(), nat(idx));
  SmallOrd xi = left_sub(tau_bar, ot_blocks(p.blocks));
  Condition c;
  c.kind = TermKind::AddBlock;
  c.arg1 = std::make_shared<Condition>(p);
  c.term_sigma = sigma;
  c.segs = p.segs;
  Segment s;
  s.kind = SegKind::AddBlock;
  s.lo = p.lambda();
  s.tau_bar = tau_bar;
  s.xi = xi;
  s.hi = add(s.lo, omega_pow(s.theta_top()));
  c.segs.push_back(std::move(s));
  c.blocks = p.blocks;
  c.blocks.bases.insert(c.blocks.bases.begin() + idx, sigma);
  return c;
}

inline Condition tower_ext(const Condition& p, const SmallOrd& alpha) {
  if (alpha.is_zero()) fail("ZeroAlpha", "tower extension needs alpha >= 1");
  Condition c;
  c.kind = TermKind::TowerExt;
  c.arg1 = std::make_shared<Condition>(p);
  c.term_alpha = alpha;
  c.segs = p.segs;
  c.blocks = p.blocks;
  SmallOrd g = ot_blocks(p.blocks);
  SmallOrd growth = mul(omega_pow(g), alpha);
  if (!c.segs.empty() && c.segs.back().kind == SegKind::Tower &&
      c.segs.back().g == g) {
    Segment& s = c.segs.back();
    s.alpha = add(s.alpha, alpha);
    s.hi = add(s.hi, growth);
  } else {
    Segment s;
    s.kind = SegKind::Tower;
    s.lo = p.lambda();
    s.g = g;
    s.alpha = alpha;
    s.hi = add(s.lo, growth);
    c.segs.push_back(std::move(s));
  }
  return c;
}

namespace detail {

// Truncate the segment stack of p at level mu (a tower segment may be split
// at a close-off); nullopt when mu falls strictly inside a non-splittable
// region.
inline std::optional<std::vector<Segment>> segs_below(const Condition& p,
                                                      const SmallOrd& mu) {
  std::vector<Segment> out;
  for (const auto& s : p.segs) {
    if (s.hi <= mu) { out.push_back(s); continue; }
    if (s.lo >= mu) break;
    if (s.kind != SegKind::Tower) return std::nullopt;
    SmallOrd beta = left_sub(s.lo, mu);
    auto [div, rem] = split_pow(beta, s.g);
    if (!rem.is_zero()) return std::nullopt;
    Segment t = s;
    t.hi = mu;
    // alpha such that w^g * alpha = div.
    SmallOrd a;
    for (const auto& term : div.terms)
      a.terms.push_back({left_sub(s.g, term.exp), term.coeff});
    t.alpha = a;
    out.push_back(std::move(t));
    break;
  }
  return out;
}

// Segments of p strictly above level mu; nullopt when mu splits no segment
// boundary or close-off.
inline std::optional<std::vector<Segment>> segs_above(const Condition& p,
                                                      const SmallOrd& mu) {
  std::vector<Segment> out;
  for (const auto& s : p.segs) {
    if (s.hi <= mu) continue;
    if (s.lo >= mu) { out.push_back(s); continue; }
    if (s.kind != SegKind::Tower) return std::nullopt;
    SmallOrd beta = left_sub(s.lo, mu);
    auto [div, rem] = split_pow(beta, s.g);
    if (!rem.is_zero()) return std::nullopt;
    Segment t = s;
    t.lo = mu;
    SmallOrd used;
    for (const auto& term : div.terms)
      used.terms.push_back({left_sub(s.g, term.exp), term.coeff});
    t.alpha = left_sub(used, s.alpha);
    out.push_back(std::move(t));
  }
  return out;
}

// Structural agreement of the two conditions below level mu.
inline bool equiv_below(const Condition& p, const Condition& q, const SmallOrd& mu) {
  auto a = segs_below(p, mu), b = segs_below(q, mu);
  if (!a || !b || a->size() != b->size()) return false;
  for (size_t i = 0; i < a->size(); ++i)
    if ((*a)[i] != (*b)[i]) return false;
  return true;
}

// Append upper to lower, merging a tower seam.
inline std::vector<Segment> stack_join(std::vector<Segment> lower,
                                       const std::vector<Segment>& upper) {
  for (const auto& s : upper) {
    if (!lower.empty() && lower.back().kind == SegKind::Tower &&
        s.kind == SegKind::Tower && lower.back().g == s.g) {
      lower.back().alpha = add(lower.back().alpha, s.alpha);
      lower.back().hi = s.hi;
    } else {
      lower.push_back(s);
    }
  }
  return lower;
}

}  // namespace detail

inline Condition amalgam(const Condition& p, const Condition& q) {
  if (p.lambda() != q.lambda() || p.theta_top() != q.theta_top())
    fail("NotAligned", "amalgamation requires equal lambda and top width");
  if (!detail::equiv_below(p, q, p.lambda()))
    fail("NotEquivalent", "amalgamation requires agreement below lambda");
  size_t k = 0;
  while (k < p.blocks.bases.size() && k < q.blocks.bases.size() &&
         p.blocks.bases[k] == q.blocks.bases[k])
    ++k;
  std::vector<KOrd> q_tail(q.blocks.bases.begin() + k, q.blocks.bases.end());
  if (q_tail.empty()) fail("Overlap", "right block tail is empty");
  for (const auto& b : q_tail)
    for (size_t i = k; i < p.blocks.bases.size(); ++i)
      if (p.blocks.bases[i] == b) fail("Overlap", "block tails intersect");
  if (q_tail.front() < sup_blocks(p.blocks))
    fail("Overlap", "right tail starts below sup of the left block set");
  Condition c;
  c.kind = TermKind::Amalgam;
  c.arg1 = std::make_shared<Condition>(p);
  c.arg2 = std::make_shared<Condition>(q);
  c.segs = p.segs;
  Segment s;
  s.kind = SegKind::Amalgam;
  s.lo = p.lambda();
  s.gamma0 = mul(omega(), nat(k));
  s.gamma_p = ot_blocks(p.blocks);
  s.gamma_q = mul(omega(), nat(q_tail.size()));
  s.hi = add(s.lo, omega_pow(s.theta_top()));
  c.segs.push_back(std::move(s));
  c.blocks = p.blocks;
  for (auto& b : q_tail) c.blocks.bases.push_back(std::move(b));
  return c;
}

inline Condition splice(const Condition& upper, const Condition& old_lower,
                        const Condition& new_lower) {
  const SmallOrd& mu = old_lower.lambda();
  if (new_lower.lambda() != mu || mu > upper.lambda())
    fail("NotAligned", "splice requires matching lambda below the seam");
  if (theta(old_lower, mu) != theta(new_lower, mu))
    fail("NotAligned", "splice requires matching width at the seam");
  if (!detail::equiv_below(upper, old_lower, mu))
    fail("NotEquivalent", "upper condition must agree with the old lower part");
  auto tail = detail::segs_above(upper, mu);
  if (!tail) fail("NotAligned", "seam level splits a segment of the upper condition");
  Condition c;
  c.kind = TermKind::Splice;
  c.arg1 = std::make_shared<Condition>(upper);
  c.arg2 = std::make_shared<Condition>(old_lower);
  c.arg3 = std::make_shared<Condition>(new_lower);
  c.segs = detail::stack_join(new_lower.segs, *tail);
  c.blocks = upper.blocks;
  return c;
}

// ---------------------------------------------------------------------------
// Mangals
// ---------------------------------------------------------------------------

inline std::vector<SmallOrd> boundaries(const Condition& p) {
  std::vector<SmallOrd> out;
  for (const auto& s : p.segs) out.push_back(s.hi);
  return out;
}

enum class Verdict { Proven, Refuted, Unknown };

struct MangalStatus {
  Verdict verdict = Verdict::Unknown;
  std::optional<std::pair<Node, Node>> witness;  // crossing pair for Refuted
};

namespace detail {

// Least order strictly above w that some branch carries when entering the
// segment from below, together with the matching order at the segment floor;
// nullopt when no entering branch exceeds w. The bound cap keeps the answer
// inside orders realized within the region.
inline std::optional<std::pair<SmallOrd, SmallOrd>> entering_above(
    const Segment& s, const SmallOrd& theta_lo, const SmallOrd& w) {
  SmallOrd want = succ(w);
  SmallOrd cap = s.theta_top();
  switch (s.kind) {
    case SegKind::Tower:
      if (want < s.g && want < theta_lo) return std::make_pair(want, want);
      return std::nullopt;
    case SegKind::AddBlock: {
      if (want < s.tau_bar) return std::make_pair(want, want);
      SmallOrd base = add(s.tau_bar, omega());
      SmallOrd v = std::max(base, want, [](const SmallOrd& a, const SmallOrd& b) {
        return a < b;
      });
      SmallOrd sup = add(base, left_sub(s.tau_bar, theta_lo));
      if (v < sup && v < cap)
        return std::make_pair(v, add(s.tau_bar, left_sub(base, v)));
      return std::nullopt;
    }
    case SegKind::Amalgam: {
      if (want < theta_lo) return std::make_pair(want, want);
      SmallOrd v = std::max(s.gamma_p, want, [](const SmallOrd& a, const SmallOrd& b) {
        return a < b;
      });
      SmallOrd sup = add(s.gamma_p, left_sub(s.gamma0, theta_lo));
      if (v < sup && v < cap)
        return std::make_pair(v, add(s.gamma0, left_sub(s.gamma_p, v)));
      return std::nullopt;
    }
  }
  fail("Internal", "bad segment kind");
}

}  // namespace detail

inline MangalStatus mangal_status(const Condition& p, const SmallOrd& alpha,
                                  std::uint64_t budget = 0, std::uint64_t seed = 0) {
  (void)budget;
  (void)seed;  // the analysis is exact; parameters kept for interface stability
  if (alpha > p.lambda()) fail("AboveLambda", "level exceeds lambda");
  if (alpha.is_zero()) return {Verdict::Proven, std::nullopt};
  size_t idx = seg_index(p, alpha);
  const Segment& s = p.segs[idx];
  if (alpha == s.hi) return {Verdict::Proven, std::nullopt};
  SmallOrd beta = left_sub(s.lo, alpha);

  // Locate the graded stretch containing alpha.
  SmallOrd stretch_lo = s.lo;  // level where the stretch starts
  SmallOrd rest = beta;        // offset of alpha inside the stretch
  bool incoming = idx > 0;     // branches enter the stretch from below
  if (s.kind == SegKind::Tower) {
    auto [div, rem] = detail::split_pow(beta, s.g);
    if (rem.is_zero()) return {Verdict::Proven, std::nullopt};
    stretch_lo = add(s.lo, div);
    rest = rem;
    if (!div.is_zero()) incoming = true;
  }

  if (rest.terms.size() > 1) {
    // Impure offset: a wider level below and above alpha pin a crossing pair.
    SmallOrd nu = succ(deg(rest));
    SmallOrd lead = rest.terms[0].exp;
    SmallOrd x_off;
    x_off.terms.assign(rest.terms.begin(), rest.terms.end() - 1);
    SmallOrd y_off = omega_pow(lead);
    y_off.terms[0].coeff = rest.terms[0].coeff + 1;
    Node x = node(add(stretch_lo, x_off), KOrd(nu));
    Node y = node(add(stretch_lo, y_off), KOrd(nu));
    return {Verdict::Refuted, std::make_pair(x, y)};
  }

  // Pure offset w^w * c: refuted exactly when some branch of order above w
  // enters the stretch from below.
  SmallOrd w = rest.terms[0].exp;
  if (s.kind == SegKind::Tower) {
    if (!incoming) return {Verdict::Proven, std::nullopt};
    SmallOrd nu = succ(w);
    Node x = node(stretch_lo, KOrd(nu));
    Node y = node(add(stretch_lo, omega_pow(nu)), KOrd(nu));
    return {Verdict::Refuted, std::make_pair(x, y)};
  }
  auto ent = detail::entering_above(s, theta(p, s.lo), w);
  if (!ent) return {Verdict::Proven, std::nullopt};
  Node x = node(s.lo, KOrd(ent->second));
  Node y = node(add(s.lo, omega_pow(ent->first)), KOrd(ent->first));
  return {Verdict::Refuted, std::make_pair(x, y)};
}

}  // namespace mangrove
