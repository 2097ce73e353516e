// SPDX-License-Identifier: Apache-2.0
//
// The extension order on conditions: leq with certificates, mu-equivalence,
// compatibility with explicit common extensions, the suborders by block
// support and by lambda, the indiscernibility maps sigma_f, and reductions.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <mangrove/cond.hpp>

namespace mangrove {

struct VerdictReport {
  Verdict verdict = Verdict::Unknown;
  std::string witness;        // populated for Refuted
  std::uint64_t samples = 0;  // populated for Unknown
  std::uint64_t seed = 0;
};

inline VerdictReport proven() { return {Verdict::Proven, "", 0, 0}; }
inline VerdictReport refuted(std::string w) {
  return {Verdict::Refuted, std::move(w), 0, 0};
}

// ---------------------------------------------------------------------------
// Extension order
// ---------------------------------------------------------------------------

// Does q extend p? Decided structurally: q's segment stack must restrict to
// p's below lambda^p, q's blocks must contain p's, the kappa-branches of the
// shared blocks must factor through level lambda^p with matching enumeration
// maps, and lambda^p must be a mangal of q.
inline VerdictReport leq(const Condition& q, const Condition& p,
                         std::uint64_t budget = 0, std::uint64_t seed = 0) {
  (void)budget;
  (void)seed;  // the decision is exact for constructor terms
  if (q.lambda() < p.lambda())
    return refuted("lambda shrinks from " + format(KOrd(p.lambda())) + " to " +
                   format(KOrd(q.lambda())));
  auto low = detail::segs_below(q, p.lambda());
  if (!low) return refuted("lambda^p falls inside a region of q");
  if (low->size() != p.segs.size())
    return refuted("segment stacks disagree below lambda^p");
  for (size_t i = 0; i < low->size(); ++i)
    if ((*low)[i] != p.segs[i])
      return refuted("segment " + std::to_string(i) + " differs below lambda^p");
  size_t top_idx = seg_index(q, p.lambda());
  for (size_t i = 0; i < p.blocks.bases.size(); ++i) {
    const KOrd& b = p.blocks.bases[i];
    std::optional<size_t> j;
    for (size_t k = 0; k < q.blocks.bases.size(); ++k)
      if (q.blocks.bases[k] == b) { j = k; break; }
    if (!j) return refuted("block " + format(b) + " of p is dropped by q");
    KOrd nu_q = KOrd(mul(omega(), nat(*j)));
    auto br = detail::branch_at(q, q.lambda(), nu_q, top_idx);
    if (!br)
      return refuted("kappa-branch of block " + format(b) +
                     " does not reach level lambda^p in q");
    KOrd nu_p = KOrd(mul(omega(), nat(i)));
    if (br->first != nu_p)
      return refuted("kappa-branch of block " + format(b) + " sits at order " +
                     format(br->first) + " in q but " + format(nu_p) + " in p");
    PiecewiseShift through = shift_compose(f_shift(q), br->second);
    PiecewiseShift direct = shift_restrict(f_shift(p), succ(nu_p));
    if (!shift_equal(normalize(through), normalize(direct)))
      return refuted("enumeration maps conflict on block " + format(b));
  }
  if (mangal_status(q, p.lambda()).verdict != Verdict::Proven)
    return refuted("lambda^p is not a mangal of q");
  return proven();
}

struct TransReport {
  VerdictReport qp, rq, rp;
  bool ok = false;
};

inline TransReport leq_transitive_check(const Condition& p, const Condition& q,
                                        const Condition& r) {
  TransReport rep;
  rep.qp = leq(q, p);
  rep.rq = leq(r, q);
  rep.rp = leq(r, p);
  rep.ok = !(rep.qp.verdict == Verdict::Proven && rep.rq.verdict == Verdict::Proven &&
             rep.rp.verdict != Verdict::Proven);
  return rep;
}

// ---------------------------------------------------------------------------
// mu-equivalence and compatibility
// ---------------------------------------------------------------------------

namespace detail {

// Segment descriptors clipped at level mu: full segments below mu, plus the
// straddling segment truncated there. Storey counts of tower segments
// reaching mu are zeroed on both sides: alpha is redundant given (lo, hi, g),
// and a condition must stay equivalent to its own vertical extensions, whose
// merged boundary tower straddles mu.
inline std::vector<Segment> clipped_stack(const Condition& p, const SmallOrd& mu) {
  std::vector<Segment> out;
  for (const auto& s : p.segs) {
    if (s.hi <= mu) { out.push_back(s); continue; }
    if (s.lo >= mu) break;
    Segment t = s;
    t.hi = mu;
    out.push_back(std::move(t));
    break;
  }
  if (!out.empty() && out.back().hi == mu && out.back().kind == SegKind::Tower)
    out.back().alpha = SmallOrd{};
  return out;
}

}  // namespace detail

inline VerdictReport mu_equiv(const Condition& p, const Condition& q,
                              const SmallOrd& mu, std::uint64_t budget = 0,
                              std::uint64_t seed = 0) {
  (void)budget;
  (void)seed;
  auto a = detail::clipped_stack(p, mu), b = detail::clipped_stack(q, mu);
  if (a.size() != b.size()) return refuted("segment stacks differ below mu");
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i])
      return refuted("segment " + std::to_string(i) + " differs below mu");
  auto mp = mangal_status(p, mu);
  if (mp.verdict != Verdict::Proven)
    return refuted("mu is not a mangal of the left condition");
  auto mq = mangal_status(q, mu);
  if (mq.verdict != Verdict::Proven)
    return refuted("mu is not a mangal of the right condition");
  return proven();
}

struct CompatReport {
  Verdict verdict = Verdict::Unknown;
  std::optional<Condition> extension;  // common extension for Proven
  std::string witness;
};

inline CompatReport compatible(const Condition& p, const Condition& q) {
  if (leq(p, q).verdict == Verdict::Proven) return {Verdict::Proven, p, ""};
  if (leq(q, p).verdict == Verdict::Proven) return {Verdict::Proven, q, ""};
  // An enumeration conflict is fatal when both conditions already share the
  // full structure below their common lambda: no extension can re-route the
  // kappa-branches.
  if (p.lambda() == q.lambda() &&
      detail::equiv_below(p, q, p.lambda())) {
    for (size_t i = 0; i < p.blocks.bases.size(); ++i)
      for (size_t j = 0; j < q.blocks.bases.size(); ++j)
        if (p.blocks.bases[i] == q.blocks.bases[j] && i != j)
          return {Verdict::Refuted, std::nullopt,
                  "block " + format(p.blocks.bases[i]) +
                      " enumerated at positions " + std::to_string(i) + " and " +
                      std::to_string(j)};
    try {
      Condition r = amalgam(p, q);
      return {Verdict::Proven, r, ""};
    } catch (const Error&) {
    }
    try {
      Condition r = amalgam(q, p);
      return {Verdict::Proven, r, ""};
    } catch (const Error&) {
    }
  }
  return {Verdict::Unknown, std::nullopt, ""};
}

// ---------------------------------------------------------------------------
// Suborders
// ---------------------------------------------------------------------------

inline bool in_suborder(const Condition& p, const KOrd& alpha) {
  return sup_blocks(p.blocks) <= alpha;
}

inline bool in_upper(const Condition& p, const SmallOrd& alpha) {
  return p.lambda() >= alpha;
}

// ---------------------------------------------------------------------------
// Indiscernibility maps and reductions
// ---------------------------------------------------------------------------

inline Condition sigma_f(const PiecewiseShift& f, const Condition& p) {
  auto rep = check_sloop(f);
  if (!rep.ok) fail("DomainMismatch", "sigma_f requires a structure-preserving shift");
  BlockSet image;
  for (const auto& b : p.blocks.bases) {
    if (!(b < f.domain))
      fail("DomainMismatch", "block base " + format(b) + " outside the map's domain");
    image.bases.push_back(shift_apply(f, b));
  }
  return replace_s(p, image);
}

inline Condition reduction(const Condition& q, const KOrd& alpha) {
  if (!limit_or_zero(alpha) || alpha.is_zero())
    fail("NotLimit", "reduction cut must be a limit ordinal");
  BlockSet low;
  size_t tail = 0;
  for (const auto& b : q.blocks.bases) {
    if (b < alpha) low.bases.push_back(b);
    else ++tail;
  }
  if (tail == 0) return q;
  KOrd tau = low.bases.empty() ? KOrd{} : add(low.bases.back(), KOrd(omega()));
  for (size_t k = 0; k < tail; ++k)
    low.bases.push_back(add(tau, mul(KOrd(omega()), knat(k))));
  return replace_s(q, low);
}

}  // namespace mangrove
