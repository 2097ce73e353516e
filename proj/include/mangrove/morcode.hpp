// SPDX-License-Identifier: Apache-2.0
//
// The coding layer: determined mangals, the level sums iota and delta, the
// lexicographic node enumerations m and n, the code c^p on limit-ordinal
// positions, window decoding, and reconstruction of a determined level from
// the data strictly below it.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <mangrove/verify.hpp>

namespace mangrove {

// ---------------------------------------------------------------------------
// Determined mangals
// ---------------------------------------------------------------------------

// A level beta is a determined mangal when theta_beta is a limit ordinal and
// every node at beta lies below some kappa-node.  On constructor terms both
// clauses are structurally decidable: limit widths occur exactly at tower
// close-offs and segment boundaries, where every order is carried by a branch
// reaching the top level (and thus a kappa-node via the block enumeration).
inline Verdict is_determined_mangal(const Condition& p, const SmallOrd& beta) {
  if (beta > p.lambda()) fail("AboveLambda", "level exceeds lambda");
  SmallOrd th = theta(p, beta);
  if (!limit_or_zero(th) || th.is_zero()) return Verdict::Refuted;
  if (mangal_status(p, beta).verdict != Verdict::Proven) return Verdict::Refuted;
  return Verdict::Proven;
}

inline bool is_determined(const Condition& p, const SmallOrd& beta) {
  return is_determined_mangal(p, beta) == Verdict::Proven;
}

// Least determined mangal strictly above level l, if any (<= lambda).
inline std::optional<SmallOrd> next_determined(const Condition& p,
                                               const SmallOrd& l) {
  for (const auto& s : p.segs) {
    if (s.hi <= l) continue;
    if (s.kind == SegKind::Tower) {
      SmallOrd beta = (l <= s.lo) ? SmallOrd{} : left_sub(s.lo, l);
      auto [div, rem] = detail::split_pow(beta, s.g);
      SmallOrd cand = add(s.lo, add(div, omega_pow(s.g)));
      while (cand <= s.hi) {
        if (cand > l && is_determined(p, cand)) return cand;
        cand = add(cand, omega_pow(s.g));
      }
    }
    if (s.hi > l && is_determined(p, s.hi)) return s.hi;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Level sums iota and delta
// ---------------------------------------------------------------------------

namespace detail {

// Sum of the widths succ(deg(.)) over the offsets in (0, x) of a graded
// stretch.  Within a single CNF block w^e*c the sum telescopes to the block
// itself; at the joint offset between consecutive blocks the width succ(e)
// of the earlier block's end is paid explicitly (it is only absorbed when
// the next block is large enough to swallow it).
inline SmallOrd graded_sum(const SmallOrd& x) {
  SmallOrd acc, prev_e;
  bool first = true;
  for (const auto& t : x.terms) {
    if (!first) acc = add(acc, succ(prev_e));
    if (t.exp.is_zero()) acc = add(acc, nat(t.coeff - 1));
    else acc = add(acc, mul(omega_pow(t.exp), nat(t.coeff)));
    prev_e = t.exp;
    first = false;
  }
  return acc;
}

// Sum of widths over the offsets in (0, beta) of a tower with storey
// exponent g, close-off levels included.  Full storeys absorb to w^g each;
// a started storey adds its close-off width g plus the graded remainder.
inline SmallOrd tower_sum(const SmallOrd& g, const SmallOrd& beta) {
  auto [div, rem] = split_pow(beta, g);
  if (rem.is_zero()) return div;
  SmallOrd r = div;
  if (!div.is_zero()) r = add(r, g);
  return add(r, graded_sum(rem));
}

// Same sum with the close-off levels omitted.
inline SmallOrd tower_sum_nd(const SmallOrd& g, const SmallOrd& beta) {
  auto [div, rem] = split_pow(beta, g);
  return add(div, graded_sum(rem));
}

inline SmallOrd level_sum(const Condition& p, const SmallOrd& gamma,
                          bool skip_determined) {
  if (gamma > succ(p.lambda())) fail("AboveLambda", "prefix exceeds lambda+1");
  if (gamma.is_zero()) return {};
  SmallOrd acc = nat(1);  // level 0
  for (const auto& s : p.segs) {
    if (gamma > s.hi) {
      SmallOrd len = left_sub(s.lo, s.hi);
      acc = add(acc, s.kind == SegKind::Tower
                         ? (skip_determined ? tower_sum_nd(s.g, len)
                                            : tower_sum(s.g, len))
                         : graded_sum(len));
      if (!(skip_determined && is_determined(p, s.hi)))
        acc = add(acc, theta(p, s.hi));
      continue;
    }
    if (gamma <= s.lo) break;
    SmallOrd beta = left_sub(s.lo, gamma);
    acc = add(acc, s.kind == SegKind::Tower
                       ? (skip_determined ? tower_sum_nd(s.g, beta)
                                          : tower_sum(s.g, beta))
                       : graded_sum(beta));
    break;
  }
  return acc;
}

}  // namespace detail

// iota(gamma) = sum of theta over all levels below gamma.
inline SmallOrd iota(const Condition& p, const SmallOrd& gamma) {
  return detail::level_sum(p, gamma, false);
}

// delta_sum(gamma) = the same sum restricted to non-determined levels.
inline SmallOrd delta_sum(const Condition& p, const SmallOrd& gamma) {
  return detail::level_sum(p, gamma, true);
}

// ---------------------------------------------------------------------------
// Lexicographic node enumerations
// ---------------------------------------------------------------------------

namespace detail {

// Inverse of graded_sum: the offset and order whose lexicographic position
// within a graded stretch is u.
inline std::pair<SmallOrd, SmallOrd> invert_graded(const SmallOrd& u) {
  if (is_nat(u)) return {succ(u), SmallOrd{}};
  const auto& lead = u.terms.front();
  SmallOrd block = mul(omega_pow(lead.exp), nat(lead.coeff));
  SmallOrd rest = left_sub(block, u);
  SmallOrd width = succ(lead.exp);  // window of the offset at the block end
  if (rest < width) return {block, rest};
  auto [off, ord] = invert_graded(left_sub(width, rest));
  return {add(block, off), ord};
}

// Inverse within a tower segment: position t relative to the segment start,
// returning (level offset, order).  Close-offs are skipped when
// skip_determined (they do not occur in the n-enumeration).
inline std::pair<SmallOrd, SmallOrd> invert_tower(const SmallOrd& g,
                                                  const SmallOrd& t,
                                                  bool skip_determined) {
  auto [div, rem] = split_pow(t, g);
  if (div.is_zero()) {
    auto [off, ord] = invert_graded(t);
    return {off, ord};
  }
  if (skip_determined) {
    auto [off, ord] = invert_graded(rem);
    return {add(div, off), ord};
  }
  if (rem < g) return {div, rem};  // close-off window [div, div+g)
  auto [off, ord] = invert_graded(left_sub(g, rem));
  return {add(div, off), ord};
}

inline Node enum_node(const Condition& p, const SmallOrd& a,
                      bool skip_determined) {
  if (a < nat(1)) return node(SmallOrd{}, KOrd{});
  SmallOrd acc = nat(1);
  for (const auto& s : p.segs) {
    SmallOrd len = left_sub(s.lo, s.hi);
    SmallOrd interior = s.kind == SegKind::Tower
                            ? (skip_determined ? tower_sum_nd(s.g, len)
                                               : tower_sum(s.g, len))
                            : graded_sum(len);
    if (a < add(acc, interior)) {
      SmallOrd t = left_sub(acc, a);
      std::pair<SmallOrd, SmallOrd> loc =
          s.kind == SegKind::Tower ? invert_tower(s.g, t, skip_determined)
                                   : invert_graded(t);
      return node(add(s.lo, loc.first), KOrd(loc.second));
    }
    acc = add(acc, interior);
    if (skip_determined && is_determined(p, s.hi)) continue;
    SmallOrd th = theta(p, s.hi);
    if (a < add(acc, th)) return node(s.hi, KOrd(left_sub(acc, a)));
    acc = add(acc, th);
  }
  fail("OutOfRange", "enumeration index exceeds the node count");
}

}  // namespace detail

// The alpha-th node of p in (level, order) lexicographic order.
inline Node m_enum(const Condition& p, const SmallOrd& alpha) {
  return detail::enum_node(p, alpha, false);
}

// The same enumeration restricted to non-determined levels.
inline Node n_enum(const Condition& p, const SmallOrd& alpha) {
  return detail::enum_node(p, alpha, true);
}

// Inverse lookups.
inline SmallOrd m_index(const Condition& p, const Node& x) {
  if (x.level.is_kappa || !contains(p, x))
    fail("OutOfRange", "node not enumerated");
  return add(iota(p, x.level.value), small_part(x.order));
}

inline SmallOrd n_index(const Condition& p, const Node& x) {
  if (x.level.is_kappa || !contains(p, x) || is_determined(p, x.level.value))
    fail("OutOfRange", "node not enumerated");
  return add(delta_sum(p, x.level.value), small_part(x.order));
}

// ---------------------------------------------------------------------------
// The code c^p
// ---------------------------------------------------------------------------

struct CodePoint {
  KOrd position;
  std::optional<int> value;  // 0 or 1; nullopt = undefined
  int clause = 5;
};

namespace detail {

// Divide a position by omega on the left: pos = w * alpha when the small
// tail has no finite term; kappa-terms absorb the factor.
inline std::optional<KOrd> div_omega(const KOrd& pos) {
  KOrd r = pos;
  SmallOrd s;
  for (const auto& t : r.tail.terms) {
    if (t.exp.is_zero()) return std::nullopt;
    s.terms.push_back({left_sub(nat(1), t.exp), t.coeff});
  }
  r.tail = std::move(s);
  return r;
}

inline SmallOrd kcoeff(const KOrd& a, int e) {
  for (const auto& t : a.kpart)
    if (t.kexp == e) return t.coeff;
  return {};
}

// b with kappa * b = r, for r built from kappa-terms only.
inline KOrd div_kappa(const KOrd& r) {
  KOrd b;
  for (const auto& t : r.kpart) {
    if (t.kexp == 1) b.tail = t.coeff;
    else b.kpart.push_back({t.kexp - 1, t.coeff});
  }
  return b;
}

// A classified code position.  Slot use by clause:
//   1: s1 = level, s2 = zeta
//   2: s1 = m-index, s2 = zeta
//   3: s1 = m-index, s2 = zeta, s3 = eta
//   4: k1 = tau, k2 = nu, s1 = n-index
struct CodeAddr {
  int clause = 5;
  SmallOrd s1, s2, s3;
  KOrd k1, k2;
};

inline std::optional<CodeAddr> classify_position(const KOrd& pos) {
  auto alpha = div_omega(pos);
  if (!alpha) return std::nullopt;
  const KOrd& a = *alpha;
  int top = a.kpart.empty() ? 0 : a.kpart.front().kexp;
  if (top > 8) fail("UnsupportedOrdinal", "position exponent out of range");
  CodeAddr out;
  if (top >= 3) {
    // kappa^3 + kappa*b + index
    out.clause = 4;
    KOrd rest = a;
    rest.tail = SmallOrd{};
    KOrd shifted = left_sub(kappa(3, nat(1)), rest);
    KOrd b = div_kappa(shifted);
    auto [t, v] = godel_unpair(b);
    out.k1 = std::move(t);
    out.k2 = std::move(v);
    out.s1 = a.tail;
    return out;
  }
  SmallOrd c2 = kcoeff(a, 2);
  if (!c2.is_zero()) {
    if (c2 == nat(1)) {
      out.clause = 2;
      out.s1 = kcoeff(a, 1);
      out.s2 = a.tail;
      return out;
    }
    out.clause = 3;
    out.s1 = is_nat(c2) ? nat(to_nat(c2) - 2) : c2;
    out.s2 = kcoeff(a, 1);
    out.s3 = a.tail;
    return out;
  }
  out.clause = 1;
  out.s1 = kcoeff(a, 1);
  out.s2 = a.tail;
  return out;
}

}  // namespace detail

inline CodePoint code_at(const Condition& p, const KOrd& position) {
  CodePoint cp;
  cp.position = position;
  auto addr = detail::classify_position(position);
  if (!addr) return cp;
  cp.clause = addr->clause;
  switch (addr->clause) {
    case 1: {
      const SmallOrd& lvl = addr->s1;
      if (lvl > p.lambda()) { cp.clause = 5; return cp; }
      if (is_determined(p, lvl)) { cp.value = 0; return cp; }
      cp.value = addr->s2 < theta(p, lvl) ? 1 : 0;
      return cp;
    }
    case 2:
    case 3: {
      if (!(addr->s1 < iota(p, p.lambda()))) { cp.clause = 5; return cp; }
      Node ma = m_enum(p, addr->s1);
      auto mu = next_determined(p, ma.level.value);
      SmallOrd bound = mu ? iota(p, *mu) : iota(p, succ(p.lambda()));
      if (!(addr->s2 < bound)) {
        if (mu) { cp.value = 0; return cp; }
        cp.clause = 5;
        return cp;
      }
      Node mz = m_enum(p, addr->s2);
      bool bit = tree_rel(p, ma, mz);
      if (bit && addr->clause == 3) {
        PiecewiseShift pi = pi_map(p, ma, mz);
        bit = shift_preimage(pi, KOrd(addr->s3)).has_value();
      }
      cp.value = bit ? 1 : 0;
      return cp;
    }
    case 4: {
      if (!block_index(p.blocks, addr->k1)) { cp.clause = 5; return cp; }
      if (!(addr->s1 < delta_sum(p, succ(p.lambda())))) { cp.clause = 5; return cp; }
      Node na = n_enum(p, addr->s1);
      Node ky = kappa_node(addr->k1);
      bool bit = tree_rel(p, na, ky);
      if (bit) {
        PiecewiseShift pi = pi_map(p, na, ky);
        bit = shift_preimage(pi, addr->k2).has_value();
      }
      cp.value = bit ? 1 : 0;
      return cp;
    }
    default:
      return cp;
  }
}

// Position builders for the four defined clause ranges.
inline KOrd code_pos1(const SmallOrd& level, const SmallOrd& zeta) {
  return add(mul(KOrd(kappa()), KOrd(level)), KOrd(mul(omega(), zeta)));
}
inline KOrd code_pos2(const SmallOrd& a, const SmallOrd& zeta) {
  KOrd r = kappa(2, nat(1));
  r = add(r, mul(KOrd(kappa()), KOrd(a)));
  return add(r, KOrd(mul(omega(), zeta)));
}
inline KOrd code_pos3(const SmallOrd& a, const SmallOrd& zeta, const SmallOrd& eta) {
  KOrd r = kappa(2, add(nat(2), a));
  r = add(r, mul(KOrd(kappa()), KOrd(zeta)));
  return add(r, KOrd(mul(omega(), eta)));
}
inline KOrd code_pos4(const KOrd& tau, const KOrd& nu, const SmallOrd& a) {
  KOrd r = kappa(3, nat(1));
  r = add(r, mul(KOrd(kappa()), godel_pair(tau, nu)));
  return add(r, mul(KOrd(omega()), KOrd(a)));
}

// ---------------------------------------------------------------------------
// Window decoding
// ---------------------------------------------------------------------------

struct Skeleton {
  SmallOrd iota_lambda;  // bound on m-indices of nodes below the top level
  SmallOrd delta_top;    // bound on n-indices
};

struct DecodedTables {
  std::vector<std::pair<SmallOrd, SmallOrd>> theta;  // level -> width
  std::vector<SmallOrd> zero_rows;                   // determined levels
  std::vector<std::tuple<SmallOrd, SmallOrd, bool>> tree;  // m-index pairs
  std::vector<std::tuple<SmallOrd, SmallOrd, SmallOrd, bool>> pi_member;
  std::vector<std::tuple<KOrd, KOrd, SmallOrd, bool>> kappa_edge;
};

inline DecodedTables decode_window(
    const std::function<CodePoint(const KOrd&)>& code,
    const std::vector<KOrd>& window, const Skeleton& skeleton) {
  (void)skeleton;
  DecodedTables out;
  std::map<std::string, std::vector<std::pair<SmallOrd, std::pair<int, KOrd>>>>
      rows;  // clause-1 rows keyed by formatted level
  std::map<std::string, SmallOrd> row_level;
  for (const KOrd& pos : window) {
    CodePoint cp = code(pos);
    if (!cp.value) continue;
    auto addr = detail::classify_position(pos);
    if (!addr) fail("InconsistentCode", "defined bit at a non-limit position " + format(pos));
    switch (addr->clause) {
      case 1: {
        std::string key = format(KOrd(addr->s1));
        rows[key].push_back({addr->s2, {*cp.value, pos}});
        row_level[key] = addr->s1;
        break;
      }
      case 2:
        out.tree.push_back({addr->s1, addr->s2, *cp.value == 1});
        break;
      case 3:
        out.pi_member.push_back({addr->s1, addr->s2, addr->s3, *cp.value == 1});
        break;
      case 4:
        out.kappa_edge.push_back({addr->k1, addr->k2, addr->s1, *cp.value == 1});
        break;
      default:
        break;
    }
  }
  for (auto& [key, row] : rows) {
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // bits must be 1 on an initial segment of the row
    std::optional<KOrd> first_zero;
    std::optional<SmallOrd> cut;
    for (const auto& [zeta, bp] : row) {
      if (bp.first == 0) {
        if (!first_zero) { first_zero = bp.second; cut = zeta; }
      } else if (first_zero) {
        fail("InconsistentCode", "width row rises after a zero: positions " +
                                     format(*first_zero) + " and " + format(bp.second));
      }
    }
    const SmallOrd& lvl = row_level[key];
    if (cut && cut->is_zero()) {
      out.zero_rows.push_back(lvl);
      continue;
    }
    if (cut && is_nat(*cut)) {
      // the width is the least zero, provided the window shows the full
      // 1-prefix below it
      std::uint64_t n = to_nat(*cut);
      std::vector<bool> seen(n, false);
      for (const auto& [zeta, bp] : row)
        if (is_nat(zeta) && to_nat(zeta) < n && bp.first == 1)
          seen[to_nat(zeta)] = true;
      if (std::find(seen.begin(), seen.end(), false) == seen.end())
        out.theta.push_back({lvl, *cut});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction of a determined level
// ---------------------------------------------------------------------------

struct LevelReconstruction {
  SmallOrd theta_beta;                     // class-count order type
  std::vector<std::vector<KOrd>> classes;  // kappa orders, by class rank
  std::vector<std::pair<Node, Node>> edges;
  std::vector<std::tuple<Node, Node, std::vector<std::pair<KOrd, KOrd>>>> maps;
};

inline LevelReconstruction reconstruct_determined_level(const Fragment& f,
                                                        const SmallOrd& beta) {
  std::vector<KOrd> kappas;
  std::vector<Node> below;
  for (const auto& x : f.nodes) {
    if (x.level.is_kappa) kappas.push_back(x.order);
    else if (x.level.value < beta) below.push_back(x);
  }
  std::sort(kappas.begin(), kappas.end(),
            [](const KOrd& a, const KOrd& b) { return a < b; });
  auto edge_at = [&](const Node& x, const Node& y) -> std::optional<size_t> {
    for (size_t i = 0; i < f.edges.size(); ++i)
      if (f.edges[i].first == x && f.edges[i].second == y) return i;
    return std::nullopt;
  };
  for (const auto& x : below) {
    bool witnessed = false;
    for (const auto& t : kappas)
      if (edge_at(x, kappa_node(t))) { witnessed = true; break; }
    if (!witnessed)
      fail("NotCovered", "node " + format(x.order) + " at level " +
                             format(KOrd(x.level.value)) +
                             " has no kappa-edge in the fragment");
  }
  // sigma ~ tau iff the lower nodes see the same kappa-edges; kappa orders
  // with no lower witness lie outside the reconstructed family
  auto profile = [&](const KOrd& t) {
    std::vector<bool> pr;
    pr.reserve(below.size());
    for (const auto& x : below) pr.push_back(edge_at(x, kappa_node(t)).has_value());
    return pr;
  };
  LevelReconstruction out;
  std::vector<std::vector<bool>> profiles;
  for (const auto& t : kappas) {
    std::vector<bool> pr = profile(t);
    if (std::find(pr.begin(), pr.end(), true) == pr.end()) continue;
    bool placed = false;
    for (size_t c = 0; c < out.classes.size(); ++c)
      if (profiles[c] == pr) { out.classes[c].push_back(t); placed = true; break; }
    if (!placed) {
      out.classes.push_back({t});
      profiles.push_back(std::move(pr));
    }
  }
  // classes arrive ordered by least element since kappas is sorted
  out.theta_beta = nat(out.classes.size());
  for (size_t c = 0; c < out.classes.size(); ++c) {
    Node level_node = node(beta, knat(c));
    for (const auto& t : out.classes[c])
      out.edges.push_back({level_node, kappa_node(t)});
    const KOrd& rep = out.classes[c].front();
    for (const auto& x : below) {
      auto ei = edge_at(x, kappa_node(rep));
      if (!ei) continue;
      out.edges.push_back({x, level_node});
      // pointwise boundary maps forced by commutativity
      const PiecewiseShift& up = f.pi_tables[*ei];
      std::vector<KOrd> args = {KOrd{}, knat(1), knat(2), knat(3)};
      for (const auto& piece : up.pieces) args.push_back(piece.first);
      std::sort(args.begin(), args.end(),
                [](const KOrd& a, const KOrd& b) { return a < b; });
      args.erase(std::unique(args.begin(), args.end()), args.end());
      std::vector<std::pair<KOrd, KOrd>> via_level;   // mu -> class rank
      std::vector<std::pair<KOrd, KOrd>> level_to_k;  // class rank -> kappa order
      for (const auto& mu : args) {
        if (!(mu < up.domain)) continue;
        KOrd img = shift_apply(up, mu);
        for (size_t d = 0; d < out.classes.size(); ++d) {
          if (std::find(out.classes[d].begin(), out.classes[d].end(), img) !=
              out.classes[d].end()) {
            via_level.push_back({mu, knat(d)});
            level_to_k.push_back({knat(d), img});
            break;
          }
        }
      }
      out.maps.push_back({x, level_node, std::move(via_level)});
      out.maps.push_back({level_node, kappa_node(rep), std::move(level_to_k)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Code dump
// ---------------------------------------------------------------------------

inline std::string dump_code(const Condition& p, std::vector<KOrd> positions,
                             bool include_undefined = false) {
  std::sort(positions.begin(), positions.end(),
            [](const KOrd& a, const KOrd& b) { return a < b; });
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  std::string out;
  for (const auto& pos : positions) {
    CodePoint cp = code_at(p, pos);
    if (!cp.value && !include_undefined) continue;
    out += format(pos);
    out += '\t';
    out += cp.value ? std::to_string(*cp.value) : "U";
    out += '\n';
  }
  return out;
}

}  // namespace mangrove
