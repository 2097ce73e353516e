// SPDX-License-Identifier: Apache-2.0
// Condition constructor tests: width tables, block arithmetic, tree relation
// and pi maps across region boundaries, kappa edges, branch pieces, mangals.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mangrove/cond.hpp>

using namespace mangrove;

namespace {

KOrd K(const std::string& s) { return parse(s); }
SmallOrd S(const std::string& s) { return parse_small(s); }
BlockSet B(const std::vector<std::string>& v) {
  BlockSet b;
  for (const auto& s : v) b.bases.push_back(parse(s));
  return b;
}

}  // namespace

TEST_CASE("bamboo widths and membership") {
  Condition b = bamboo();
  CHECK(b.lambda() == S("w^(w)"));
  CHECK(theta(b, S("w")) == S("2"));
  CHECK(theta(b, S("5")) == S("1"));
  CHECK(theta(b, S("w^2*3")) == S("3"));
  CHECK(theta(b, S("w^(w)")) == S("w"));
  CHECK(theta(b, S("0")) == S("1"));
  CHECK_THROWS_WITH_AS(theta(b, S("w^(w)+1")), doctest::Contains("AboveLambda"),
                       Error);

  CHECK(contains(b, node(S("w"), K("1"))));
  CHECK(contains(b, node(S("3"), K("0"))));
  CHECK_FALSE(contains(b, node(S("3"), K("1"))));
  CHECK_FALSE(contains(b, kappa_node(K("w"))));
  CHECK(contains(b, kappa_node(K("5"))));
}

TEST_CASE("bamboo tree relation: constant-order verticals") {
  Condition b = bamboo();
  CHECK(tree_rel(b, node(S("w"), K("1")), node(S("w^2"), K("1"))));
  CHECK_FALSE(tree_rel(b, node(S("w"), K("1")), node(S("w^2"), K("0"))));
  CHECK_FALSE(tree_rel(b, node(S("w^2"), K("1")), node(S("w"), K("1"))));
  PiecewiseShift pi = pi_map(b, node(S("w"), K("1")), node(S("w^2"), K("1")));
  CHECK(shift_apply(pi, K("0")) == K("0"));
  CHECK(shift_apply(pi, K("1")) == K("1"));
  CHECK_THROWS_WITH_AS(pi_map(b, node(S("w"), K("1")), node(S("w^2"), K("0"))),
                       doctest::Contains("NotRelated"), Error);
  CHECK_THROWS_WITH_AS(tree_rel(b, node(S("3"), K("2")), node(S("w"), K("0"))),
                       doctest::Contains("NotInCondition"), Error);
}

TEST_CASE("add_block geometry") {
  Condition b = bamboo();
  Condition p = add_block(b, K("w*7"));
  CHECK(p.lambda() == S("w^(w*2)"));  // w^w + w^(w*2) absorbs the low part
  CHECK(p.blocks.bases.size() == 2);
  CHECK(p.blocks.bases[1] == K("w*7"));
  CHECK(theta(p, p.lambda()) == S("w*2"));
  // interior of the new region is graded
  CHECK(theta(p, add(S("w^(w)"), S("w^(w+1)*2"))) == S("w+2"));
  // structure below the old lambda is untouched
  CHECK(theta(p, S("w^2*3")) == S("3"));
  CHECK(theta(p, S("w^(w)")) == S("w"));

  Condition q = add_block(p, K("w*3"));
  CHECK(q.lambda() == S("w^(w*3)"));
  CHECK(q.blocks.bases.size() == 3);
  CHECK(q.blocks.bases[1] == K("w*3"));
  CHECK(q.blocks.bases[2] == K("w*7"));
  CHECK(theta(q, q.lambda()) == S("w*3"));

  // adding an existing block is the identity
  CHECK(add_block(q, K("w*7")) == q);
  CHECK(add_block(q, K("0")) == q);
  CHECK_THROWS_WITH_AS(add_block(b, K("w+1")), doctest::Contains("NotLimit"),
                       Error);
}

TEST_CASE("add_block boundary shift in the tree") {
  Condition b = bamboo();
  Condition p = add_block(b, K("w*7"));  // tau_bar = w
  SmallOrd lam = S("w^(w)");
  // Finite orders pass the boundary unshifted.
  CHECK(tree_rel(p, node(S("w^3"), K("2")), node(p.lambda(), K("2"))));
  // Old orders >= tau_bar are shifted up by w inside the new region.
  Condition q = add_block(p, K("w*3"));  // tau_bar = w, xi = w
  Node x = node(q.segs[1].hi, K("w+1"));         // order w+1 at the old top
  Node y = node(q.lambda(), K("w*2+1"));         // continues as w*2+1 above
  CHECK(tree_rel(q, x, y));
  PiecewiseShift pi = pi_map(q, x, y);
  CHECK(shift_apply(pi, K("3")) == K("3"));
  CHECK(shift_apply(pi, K("w+1")) == K("w*2+1"));
  CHECK_FALSE(tree_rel(q, node(q.segs[1].hi, K("w+1")), node(q.lambda(), K("w+1"))));
  // The new block's branch does not reach below the region.
  CHECK_FALSE(tree_rel(q, node(q.segs[1].hi, K("w+1")), node(q.lambda(), K("w+3"))));
  (void)lam;
}

TEST_CASE("block enumeration f") {
  Condition b = bamboo();
  CHECK(f_apply(b, S("5")) == K("5"));
  Condition p = add_block(b, K("w*7"));
  CHECK(f_apply(p, S("w+3")) == K("w*7+3"));
  CHECK(*f_inv(p, K("w*7+3")) == S("w+3"));
  CHECK_FALSE(f_inv(p, K("w*5")).has_value());
  CHECK_THROWS_WITH_AS(f_apply(p, S("w*2")), doctest::Contains("OutOfDomain"),
                       Error);
}

TEST_CASE("kappa edges factor through level lambda") {
  Condition p = add_block(bamboo(), K("w*7"));
  Node top = node(p.lambda(), K("w+3"));
  Node ky = kappa_node(K("w*7+3"));
  CHECK(tree_rel(p, top, ky));
  CHECK_FALSE(tree_rel(p, node(p.lambda(), K("w+2")), ky));
  PiecewiseShift pi = pi_map(p, top, ky);
  CHECK(shift_apply(pi, K("w+3")) == K("w*7+3"));
  CHECK(shift_apply(pi, K("2")) == K("2"));
  // every image point lies in S
  for (std::uint64_t k = 0; k < 20; ++k) {
    KOrd v = shift_apply(pi, add(K("w"), knat(k % 4)));
    CHECK(block_index(p.blocks, v).has_value());
  }
  // the new block's branch is born inside the new region: nothing below the
  // old top lies on it
  Node low = node(S("w^(w)"), K("3"));
  CHECK_FALSE(tree_rel(p, low, ky));
  Node low2 = node(S("w^(w+4)"), K("w+3"));
  CHECK(contains(p, low2));
  CHECK(tree_rel(p, low2, ky));
}

TEST_CASE("tower extension and merging") {
  Condition b = bamboo();
  Condition t1 = tower_ext(b, S("1"));
  CHECK(t1.lambda() == S("w^(w)*2"));
  CHECK(theta(t1, t1.lambda()) == S("w"));
  CHECK(t1.segs.size() == 1);  // merged with the base storey
  CHECK(tower_ext(tower_ext(b, S("1")), S("1")) == tower_ext(b, S("2")));
  CHECK_THROWS_WITH_AS(tower_ext(b, S("0")), doctest::Contains("ZeroAlpha"),
                       Error);

  Condition t = tower_ext(b, S("w+1"));
  CHECK(t.lambda() == S("w^(w+1)+w^(w)"));  // w^w * (1 + w + 1)
  CHECK(theta(t, S("w^(w)*3")) == S("w"));
  CHECK(theta(t, add(S("w^(w)*3"), S("w^2"))) == S("3"));

  // verticals cross close-off levels
  CHECK(tree_rel(t1, node(S("w^2"), K("2")), node(S("w^(w)+w^3"), K("2"))));
  CHECK(tree_rel(t1, node(S("w^(w)"), K("5")), node(t1.lambda(), K("5"))));

  // towers over several blocks use g = ot(S)
  Condition p = add_block(b, K("w*7"));
  Condition tp = tower_ext(p, S("1"));
  CHECK(tp.segs.size() == 3);
  CHECK(tp.lambda() == add(p.lambda(), S("w^(w*2)")));
}

TEST_CASE("replace_s") {
  Condition b = bamboo();
  CHECK_THROWS_WITH_AS(replace_s(b, B({"0", "w*9"})), doctest::Contains("TooWide"),
                       Error);
  Condition p = add_block(b, K("w*5"));
  Condition q = replace_s(p, B({"0", "w*9"}));
  CHECK(q.lambda() == p.lambda());
  CHECK(q.blocks.bases[1] == K("w*9"));
  CHECK(theta(q, q.lambda()) == theta(p, p.lambda()));
  CHECK(replace_s(p, p.blocks) == p);
  // kappa edges follow the new enumeration
  CHECK(tree_rel(q, node(q.lambda(), K("w+2")), kappa_node(K("w*9+2"))));
  CHECK_FALSE(contains(q, kappa_node(K("w*5"))));
}

TEST_CASE("amalgam of a worked pair") {
  Condition b = bamboo();
  Condition p2 = add_block(b, K("w*5"));
  Condition q2 = replace_s(p2, B({"0", "w*9"}));
  Condition r = amalgam(p2, q2);
  CHECK(r.blocks.bases.size() == 3);
  CHECK(r.blocks.bases[1] == K("w*5"));
  CHECK(r.blocks.bases[2] == K("w*9"));
  CHECK(r.lambda() == add(p2.lambda(), S("w^(w*3)")));
  CHECK(theta(r, r.lambda()) == S("w*3"));

  // left branches keep their orders; right branches re-enter shifted
  Node x = node(p2.lambda(), K("w+1"));
  Node y = node(r.lambda(), K("w*2+1"));
  CHECK(tree_rel(r, x, y));
  PiecewiseShift pi = pi_map(r, x, y);
  CHECK(shift_apply(pi, K("3")) == K("3"));
  CHECK(shift_apply(pi, K("w+1")) == K("w*2+1"));
  CHECK(tree_rel(r, node(p2.lambda(), K("w+1")), node(r.lambda(), K("w+1"))));

  CHECK_THROWS_WITH_AS(amalgam(p2, p2), doctest::Contains("Overlap"), Error);
  CHECK_THROWS_WITH_AS(amalgam(p2, replace_s(p2, B({"0", "w*2"}))),
                       doctest::Contains("Overlap"), Error);
  CHECK_THROWS_WITH_AS(amalgam(b, p2), doctest::Contains("NotAligned"), Error);

  // kappa edges of the union
  CHECK(tree_rel(r, node(r.lambda(), K("w*2+4")), kappa_node(K("w*9+4"))));
  CHECK(tree_rel(r, node(r.lambda(), K("w+4")), kappa_node(K("w*5+4"))));
}

TEST_CASE("splice") {
  Condition b = bamboo();
  Condition p = tower_ext(b, S("1"));
  Condition q = add_block(p, K("w*7"));
  // replacing the lower part by itself gives q back
  CHECK(splice(q, p, p) == q);
  // replacing p by a same-profile r transports the upper region onto r
  Condition r = tower_ext(b, S("1"));
  CHECK(splice(q, p, r) == q);
  // a seam strictly inside a tower splits at a close-off
  Condition q2 = add_block(tower_ext(b, S("2")), K("w*7"));
  Condition s2 = splice(q2, tower_ext(b, S("2")), tower_ext(b, S("2")));
  CHECK(s2 == q2);
  CHECK_THROWS_WITH_AS(splice(q, add_block(b, K("w*3")), p),
                       doctest::Contains("NotAligned"), Error);
}

TEST_CASE("branch pieces") {
  Condition b = bamboo();
  auto ps = branch_pieces(b, node(S("w^2"), K("1")));
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].lo == S("0"));
  CHECK(ps[0].hi == S("w^2"));
  CHECK(ps[0].order == K("1"));

  Condition p = add_block(b, K("w*7"));
  Condition q = add_block(p, K("w*3"));
  // block w*7 entered when S was {0, w*7}, so its branch is born in the
  // first add-block region and has exactly two pieces
  auto qs = branch_pieces(q, kappa_node(K("w*7+1")));
  REQUIRE(qs.size() == 2);
  CHECK(qs[0].order == K("w*2+1"));  // at the top region (index 2 under f)
  CHECK(qs[1].order == K("w+1"));    // in p's region (index 1 under f)
  // block 0's branch descends through every region
  auto zs = branch_pieces(q, kappa_node(K("1")));
  REQUIRE(zs.size() == 3);
  for (const auto& piece : zs) CHECK(piece.order == K("1"));
  // cross-check against tree_rel at sampled levels
  for (const auto& piece : qs) {
    if (piece.hi == q.lambda()) continue;
    Node x{below(piece.hi), piece.order};
    CHECK(tree_rel(q, x, kappa_node(K("w*7+1"))));
    CHECK(shift_apply(piece.map_to_target, piece.order) == K("w*7+1"));
  }
  // the new block's branch stops at its own region
  auto ns = branch_pieces(q, kappa_node(K("w*3")));
  CHECK(ns.size() == 1);
  CHECK(ns[0].order == K("w"));
}

TEST_CASE("mangals") {
  Condition b = bamboo();
  auto st = mangal_status(b, S("w^2+w"));
  CHECK(st.verdict == Verdict::Refuted);
  REQUIRE(st.witness.has_value());
  CHECK(st.witness->first == node(S("w^2"), K("2")));
  CHECK(st.witness->second == node(S("w^2*2"), K("2")));
  // the witness is a real crossing pair with nothing at the crossed level
  CHECK(tree_rel(b, st.witness->first, st.witness->second));
  CHECK_FALSE(contains(b, node(S("w^2+w"), K("2"))));

  CHECK(mangal_status(b, S("w^2")).verdict == Verdict::Proven);
  CHECK(mangal_status(b, b.lambda()).verdict == Verdict::Proven);
  CHECK(mangal_status(b, S("0")).verdict == Verdict::Proven);

  Condition t = tower_ext(b, S("2"));
  CHECK(mangal_status(t, S("w^(w)*2")).verdict == Verdict::Proven);
  CHECK(mangal_status(t, t.lambda()).verdict == Verdict::Proven);
  // pure levels in later storeys are crossed by verticals
  auto st2 = mangal_status(t, S("w^(w)+w^2"));
  CHECK(st2.verdict == Verdict::Refuted);
  CHECK(tree_rel(t, st2.witness->first, st2.witness->second));
  CHECK_FALSE(
      contains(t, Node{below(S("w^(w)+w^2")), st2.witness->second.order}));

  Condition p = add_block(b, K("w*7"));
  for (const auto& lvl : boundaries(p))
    CHECK(mangal_status(p, lvl).verdict == Verdict::Proven);
  // only finite orders enter the new region from below, so a pure level of
  // infinite degree is a mangal...
  CHECK(mangal_status(p, S("w^(w+1)")).verdict == Verdict::Proven);
  // ...while pure levels of finite degree are crossed
  auto st3 = mangal_status(p, add(S("w^(w)"), S("w^2")));
  CHECK(st3.verdict == Verdict::Refuted);
  CHECK(tree_rel(p, st3.witness->first, st3.witness->second));

  // witness sanity over a sweep of refuted levels
  Condition r = amalgam(add_block(b, K("w*5")), replace_s(add_block(b, K("w*5")), B({"0", "w*9"})));
  std::vector<SmallOrd> probes = {
      add(r.segs.back().lo, S("w^2+w")), add(r.segs.back().lo, S("w^(w+1)")),
      add(r.segs.back().lo, S("w^(w*2)*4")), S("w^3+w^2*2")};
  for (const auto& a : probes) {
    auto ms = mangal_status(r, a);
    if (ms.verdict == Verdict::Refuted) {
      CHECK(tree_rel(r, ms.witness->first, ms.witness->second));
      CHECK(ms.witness->first.level.value < a);
      CHECK(a < ms.witness->second.level.value);
      CHECK_FALSE(contains(r, Node{below(a), ms.witness->second.order}));
    }
  }
}

TEST_CASE("pi commutativity and restriction on sampled chains") {
  Condition b = bamboo();
  Condition q = add_block(add_block(b, K("w*7")), K("w*3"));
  Condition r = tower_ext(q, S("2"));
  Rng rng(314);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    // pick a kappa edge and walk two lower nodes on its branch
    KOrd tau = add(r.blocks.bases[rng.below(3)], knat(rng.below(5)));
    Node top = kappa_node(tau);
    auto pieces = branch_pieces(r, top);
    if (pieces.size() < 3) continue;
    const auto& pa = pieces[1];
    const auto& pb = pieces[2];
    Node y{below(pa.hi), pa.order};
    Node x{below(pb.hi), pb.order};
    if (!tree_rel(r, x, y)) continue;
    PiecewiseShift xy = pi_map(r, x, y);
    PiecewiseShift ytop = pi_map(r, y, top);
    PiecewiseShift xtop = pi_map(r, x, top);
    CHECK(shift_equal(shift_restrict(shift_compose(ytop, xy), succ(x.order)), xtop));
    // M.2: restriction to a smaller order gives the pi of the shrunk pair
    if (!x.order.is_zero()) {
      KOrd nu = knat(0);
      Node w{x.level, nu};
      Node z{y.level, shift_apply(xy, nu)};
      CHECK(tree_rel(r, w, z));
      CHECK(shift_equal(pi_map(r, w, z), shift_restrict(xy, succ(nu))));
    }
    ++checked;
  }
  CHECK(checked > 50);
}
