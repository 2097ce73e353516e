// SPDX-License-Identifier: Apache-2.0
// Verification tests: full-condition axiom checks, report determinism,
// mutation sensitivity, fragment extraction and fragment checking.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mangrove/order.hpp>
#include <mangrove/verify.hpp>

using namespace mangrove;

namespace {

KOrd K(const std::string& s) { return parse(s); }
SmallOrd S(const std::string& s) { return parse_small(s); }

Condition wide_base() { return tower_ext(add_block(bamboo(), K("w*7")), omega()); }

}  // namespace

TEST_CASE("fundamental sequences") {
  CHECK(fund_seq(S("w"), 3) == S("3"));
  CHECK(fund_seq(S("w^2"), 2) == S("w*2"));
  CHECK(fund_seq(S("w^(w)"), 2) == S("w^2"));
  CHECK(fund_seq(S("w^(w)*2"), 3) == S("w^(w)+w^3"));
  CHECK(fund_seq(S("w^(w*2)"), 4) == S("w^(w+4)"));
  CHECK(fund_seq(S("w^2+w"), 5) == S("w^2+5"));
  for (std::uint64_t n = 1; n < 6; ++n)
    CHECK(fund_seq(S("w^(w)"), n) < fund_seq(S("w^(w)"), n + 1));
  CHECK_THROWS_WITH_AS(fund_seq(S("w+1"), 1), doctest::Contains("NotLimit"), Error);
}

TEST_CASE("random_below stays below the bound") {
  Rng rng(42);
  for (const char* b : {"5", "w", "w*3+4", "w^2*2+w", "w^(w)", "w^(w*2)*3"}) {
    SmallOrd bound = S(b);
    for (int i = 0; i < 200; ++i) CHECK(random_below(rng, bound) < bound);
  }
}

TEST_CASE("check_condition: base condition passes all axioms") {
  Report r = check_condition(bamboo(), 64, 1);
  CHECK(r.records.size() == axiom_ids().size());
  for (const auto& rec : r.records) {
    INFO(rec.axiom, ": ", rec.witness);
    CHECK(rec.verdict != Verdict::Refuted);
  }
  CHECK(r.all_pass());
}

TEST_CASE("check_condition: wide vertical extension passes all axioms") {
  Report r = check_condition(wide_base(), 64, 2);
  for (const auto& rec : r.records) {
    INFO(rec.axiom, ": ", rec.witness);
    CHECK(rec.verdict != Verdict::Refuted);
  }
  CHECK(r.all_pass());
}

TEST_CASE("check_condition: amalgams and splices pass") {
  Condition b = bamboo();
  Condition p2 = add_block(b, K("w*5"));
  Condition q2 = replace_s(p2, BlockSet{{K("0"), K("w*9")}});
  Condition r = amalgam(p2, q2);
  Report rr = check_condition(r, 48, 3);
  for (const auto& rec : rr.records) {
    INFO(rec.axiom, ": ", rec.witness);
    CHECK(rec.verdict != Verdict::Refuted);
  }
  Condition t = tower_ext(r, S("1"));
  CHECK(check_condition(t, 48, 4).all_pass());
}

TEST_CASE("reports are deterministic") {
  Report a = check_condition(wide_base(), 40, 77);
  Report b = check_condition(wide_base(), 40, 77);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].axiom == b.records[i].axiom);
    CHECK(a.records[i].checked == b.records[i].checked);
    CHECK(a.records[i].skipped == b.records[i].skipped);
    CHECK(a.records[i].verdict == b.records[i].verdict);
    CHECK(a.records[i].witness == b.records[i].witness);
  }
}

TEST_CASE("mutation sensitivity: each checker flags its own mutant") {
  Condition base = wide_base();
  for (const auto& id : axiom_ids()) {
    CAPTURE(id);
    CheckTarget mut = make_mutant(id, base);
    Report r = check_target(mut, 64, 7);
    const AxiomRecord* rec = r.record(id);
    REQUIRE(rec != nullptr);
    INFO("axiom ", id, " checked=", rec->checked, " witness=", rec->witness);
    CHECK(rec->verdict == Verdict::Refuted);
    CHECK(!rec->witness.empty());
  }
}

TEST_CASE("fragment extraction: base condition chains") {
  Condition b = bamboo();
  std::vector<Level> levels = {below(S("0")), below(S("w")), below(S("w^2")),
                               below(S("w^(w)")), kappa_level()};
  Fragment f = extract_fragment(b, levels, K("w"), 64);
  // widths 1, 2, 3 plus four naturals at the top level and four at kappa
  CHECK(f.nodes.size() == 1 + 2 + 3 + 4 + 4);
  CHECK(f.theta_table.size() == 4);
  // every non-kappa node of order 0 chains up to the top
  size_t zero_chain = 0;
  for (const auto& [x, y] : f.edges)
    if (x.order.is_zero() && y.order.is_zero()) ++zero_chain;
  CHECK(zero_chain == 4 + 3 + 2 + 1);
  Report r = check_fragment(f);
  for (const auto& rec : r.records) {
    INFO(rec.axiom, ": ", rec.witness);
    CHECK(rec.verdict != Verdict::Refuted);
  }
  CHECK(r.all_pass());
}

TEST_CASE("fragment extraction: empty, single node, budget") {
  Condition b = bamboo();
  Fragment e = extract_fragment(b, {}, K("w"), 8);
  CHECK(e.nodes.empty());
  CHECK(e.edges.empty());
  CHECK(check_fragment(e).all_pass());
  Fragment s = extract_fragment(b, {below(S("0"))}, K("w"), 8);
  CHECK(s.nodes.size() == 1);
  CHECK(check_fragment(s).all_pass());
  CHECK_THROWS_WITH_AS(
      extract_fragment(b,
                       {below(S("0")), below(S("w")), below(S("w^2")),
                        below(S("w^(w)"))},
                       K("w"), 3),
      doctest::Contains("BudgetExceeded"), Error);
}

TEST_CASE("fragment extraction: amalgam shows the shifted edges") {
  Condition b = bamboo();
  Condition p2 = add_block(b, K("w*5"));
  Condition q2 = replace_s(p2, BlockSet{{K("0"), K("w*9")}});
  Condition r = amalgam(p2, q2);
  const Segment& top = r.segs.back();
  std::vector<Level> levels = {below(top.lo), below(r.lambda())};
  Fragment f = extract_fragment(r, levels, K("w*4"), 64);
  // the right-hand branch re-enters above gamma_p: expect an edge from
  // (lo, gamma0) to (lambda, gamma_p) with the shifted map
  Node x = node(top.lo, KOrd(top.gamma0));
  Node y = node(r.lambda(), KOrd(top.gamma_p));
  bool found = false;
  for (size_t i = 0; i < f.edges.size(); ++i) {
    if (f.edges[i].first == x && f.edges[i].second == y) {
      found = true;
      CHECK(shift_equal(normalize(f.pi_tables[i]), normalize(pi_map(r, x, y))));
      CHECK(shift_apply(f.pi_tables[i], KOrd(top.gamma0)) == KOrd(top.gamma_p));
    }
  }
  CHECK(found);
  CHECK(check_fragment(f).all_pass());
}

TEST_CASE("fragment mutation: a deleted edge is flagged") {
  Condition b = bamboo();
  std::vector<Level> levels = {below(S("w")), below(S("w^2")), below(S("w^(w)"))};
  Fragment f = extract_fragment(b, levels, K("w"), 64);
  REQUIRE(f.edges.size() >= 3);
  // remove a middle edge of a 3-chain: (w,0) -> (w^2,0)
  Node x = node(S("w"), K("0"));
  Node y = node(S("w^2"), K("0"));
  for (size_t i = 0; i < f.edges.size(); ++i) {
    if (f.edges[i].first == x && f.edges[i].second == y) {
      f.edges.erase(f.edges.begin() + i);
      f.pi_tables.erase(f.pi_tables.begin() + i);
      break;
    }
  }
  Report r = check_fragment(f);
  CHECK_FALSE(r.all_pass());
  bool structural = r.record("tree-order")->verdict == Verdict::Refuted ||
                    r.record("M.2")->verdict == Verdict::Refuted;
  CHECK(structural);
}
