#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mangrove/io.hpp>

using namespace mangrove;

namespace {

KOrd K(const std::string& s) { return parse(s); }
SmallOrd S(const std::string& s) { return parse_small(s); }

}  // namespace

TEST_CASE("term files round trip bit-exactly") {
  Condition p2 = add_block(bamboo(), K("w*5"));
  Condition q2 = replace_s(p2, BlockSet{{K("0"), K("w*9")}});
  std::vector<Condition> corpus = {
      bamboo(),
      p2,
      q2,
      tower_ext(p2, S("w+2")),
      amalgam(p2, q2),
      tower_ext(amalgam(p2, q2), S("1")),
  };
  for (const Condition& t : corpus) {
    std::string s1 = write_term(t);
    Condition back = read_term(s1);
    CHECK(back == t);
    CHECK(back.kind == t.kind);
    CHECK(write_term(back) == s1);
  }
}

TEST_CASE("splice terms serialize") {
  auto [a1, a2] = align(add_block(tower_ext(bamboo(), S("1")), K("w*5")),
                        add_block(bamboo(), K("w*5")));
  Condition q = add_block(a1, K("w*9"));
  Condition spl = splice(q, a1, a2);
  std::string s = write_term(spl);
  Condition back = read_term(s);
  CHECK(back == spl);
  CHECK(write_term(back) == s);
}

TEST_CASE("term files are validated on load") {
  CHECK_THROWS_WITH_AS(read_term("{\"kind\": \"nope\"}"),
                       doctest::Contains("BadTermFile"), Error);
  // constructor preconditions re-fire on load
  CHECK_THROWS_WITH_AS(
      read_term("{\"kind\": \"add_block\", \"arg\": {\"kind\": \"bamboo\"}, "
                "\"sigma\": \"w+1\"}"),
      doctest::Contains("NotLimit"), Error);
  CHECK_THROWS(read_term("not json at all"));
}

TEST_CASE("goal scripts round trip") {
  std::vector<Goal> script = {ensure_s({K("w*5"), K("k^3")}),
                              ensure_lambda(S("w^(w)*3")),
                              ensure_emu(S("w^(w*4)"))};
  json j = json::array();
  for (const auto& g : script) j.push_back(goal_to_json(g));
  auto back = script_from_json(j);
  REQUIRE(back.size() == 3);
  CHECK(back[0].kind == GoalKind::EnsureS);
  CHECK(back[0].bases == script[0].bases);
  CHECK(back[1].beta == script[1].beta);
  CHECK(back[2].kind == GoalKind::EnsureEmu);
}

TEST_CASE("run files round trip") {
  Run r = run({ensure_s({K("w*5")}), ensure_lambda(S("w^(w)*3"))});
  std::string s = write_run(r);
  Run back = read_run(s);
  REQUIRE(back.steps.size() == r.steps.size());
  for (size_t i = 0; i < r.steps.size(); ++i) {
    CHECK(back.steps[i].condition == r.steps[i].condition);
    CHECK(goal_name(back.steps[i].goal) == goal_name(r.steps[i].goal));
  }
  CHECK(write_run(back) == s);
}

TEST_CASE("universal run files carry the predicate and certificates") {
  APrime a = make_aprime({K("0"), K("w")});
  Run r = run_universal({ensure_s({K("w*5")})}, a);
  std::string s = write_run(r);
  CHECK(s.find("\"mode\": \"universal\"") != std::string::npos);
  CHECK(s.find("\"certificate\"") != std::string::npos);
  Run back = read_run(s);
  CHECK(back.universal);
  CHECK(back.aprime.members == a.members);
  for (const auto& step : back.steps) CHECK(step.certificate.all_pass());
  CHECK(write_run(back) == s);
}

TEST_CASE("report document shape") {
  Report rep = check_condition(bamboo(), 64, 7);
  json j = report_to_json(rep);
  CHECK(j.at("seed") == 7);
  CHECK(j.at("budget") == 64);
  CHECK(j.at("pass") == true);
  CHECK(j.at("records").size() == axiom_ids().size());
  CHECK(j.at("records")[0].contains("witness"));
}

TEST_CASE("fragment document mirrors the fragment") {
  Fragment f = extract_fragment(
      bamboo(), {below(S("w")), below(S("w^2")), kappa_level()}, K("3"), 200);
  json j = fragment_to_json(f);
  CHECK(j.at("nodes").size() == f.nodes.size());
  CHECK(j.at("edges").size() == f.edges.size());
  CHECK(j.at("theta").size() == f.theta_table.size());
  CHECK(j.at("origin") == f.origin);
  // pi tables survive the trip
  for (size_t i = 0; i < f.edges.size(); ++i) {
    PiecewiseShift back = shift_from_json(j.at("edges")[i].at("pi"));
    CHECK(shift_equal(back, f.pi_tables[i]));
  }
  CHECK(write_fragment(f) == write_fragment(f));
}
