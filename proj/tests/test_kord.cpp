// SPDX-License-Identifier: Apache-2.0
// Ordinal kernel tests: integer differential oracle, algebraic laws on seeded
// random triples, brute-force max-lex pairing oracle, parse/format round trip,
// piecewise-shift calculus.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mangrove/kord.hpp>

using namespace mangrove;

namespace {

KOrd K(const std::string& s) { return parse(s); }
SmallOrd S(const std::string& s) { return parse_small(s); }

}  // namespace

TEST_CASE("naturals embed: add/mul/cmp agree with integers below 300") {
  for (std::uint64_t a = 0; a < 300; a += 7) {
    for (std::uint64_t b = 0; b < 300; b += 11) {
      CHECK(add(knat(a), knat(b)) == knat(a + b));
      CHECK(mul(knat(a), knat(b)) == knat(a * b));
      int c = cmp(knat(a), knat(b));
      CHECK(c == (a < b ? -1 : a > b ? 1 : 0));
    }
  }
}

TEST_CASE("frozen arithmetic values") {
  CHECK(add(S("w"), S("1")) == S("w+1"));
  CHECK(add(S("w^2+w"), S("w^3")) == S("w^3"));
  CHECK(mul(S("2"), S("w")) == S("w"));
  CHECK(mul(S("w^2"), S("w")) == S("w^3"));
  // w*(k*3+5) = k*3+w*5
  CHECK(mul(K("w"), K("k*3+5")) == K("k*3+w*5"));
  CHECK(left_sub(K("0"), K("k+w")) == K("k+w"));
  CHECK(left_sub(S("w"), S("w*2")) == S("w"));
  CHECK(left_sub(S("w^(w)"), add(S("w^(w)"), S("w^(w*2)"))) == S("w^(w*2)"));
  CHECK_THROWS_WITH_AS(left_sub(S("w*2"), S("w")), doctest::Contains("Underflow"),
                       Error);
  CHECK(omega_pow(nat(0)) == nat(1));
  CHECK(omega_pow(S("w")) == S("w^(w)"));
  CHECK(omega_pow(S("w*2")) == S("w^(w*2)"));
  CHECK(deg(S("7")) == nat(0));
  CHECK(deg(S("w^3+w")) == nat(1));
  CHECK(deg(S("w^(w)*5")) == S("w"));
  CHECK_THROWS_AS(deg(SmallOrd{}), Error);
  CHECK(cmp(knat(3), K("w")) < 0);
  CHECK(cmp(K("k"), K("w^(w)")) > 0);
}

TEST_CASE("classification") {
  CHECK(classify(K("0")).kind == OrdClassKind::Zero);
  auto c = classify(K("w+1"));
  CHECK(c.kind == OrdClassKind::Successor);
  CHECK(c.predecessor == K("w"));
  CHECK(classify(K("k")).kind == OrdClassKind::Limit);
  CHECK(limit_or_zero(K("0")));
  CHECK(limit_or_zero(K("w*2")));
  CHECK_FALSE(limit_or_zero(K("w+3")));
}

TEST_CASE("algebraic laws on seeded random triples") {
  Rng rng(20260826);
  int triples = 10000;
  for (int i = 0; i < triples; ++i) {
    KOrd a = random_kord(rng), b = random_kord(rng), c = random_kord(rng);
    CHECK(add(add(a, b), c) == add(a, add(b, c)));
    CHECK(mul(a, add(b, c)) == add(mul(a, b), mul(a, c)));
    CHECK(mul(mul(a, b), c) == mul(a, mul(b, c)));
    // left_sub inverse
    if (cmp(a, b) <= 0) CHECK(add(a, left_sub(a, b)) == b);
    // cmp total order: antisymmetry + transitivity
    if (cmp(a, b) <= 0 && cmp(b, c) <= 0) CHECK(cmp(a, c) <= 0);
    if (cmp(a, b) == 0) CHECK(cmp(b, a) == 0);
  }
}

TEST_CASE("parse/format round trip") {
  CHECK(format(K("w^2*3+w+5")) == "w^2*3+w+5");
  CHECK(K("k^2*w+k*3+w").kpart.size() == 2);
  CHECK(K("k^2*w+k*3+w").tail == S("w"));
  CHECK_THROWS_WITH_AS(parse("w+w^2"), doctest::Contains("NonCanonical"), Error);
  CHECK_THROWS_WITH_AS(parse("w^1"), doctest::Contains("NonCanonical"), Error);
  CHECK_THROWS_WITH_AS(parse("w*1"), doctest::Contains("NonCanonical"), Error);
  CHECK_THROWS_WITH_AS(parse("w+0"), doctest::Contains("NonCanonical"), Error);
  CHECK_THROWS_WITH_AS(parse("3+4"), doctest::Contains("NonCanonical"), Error);
  CHECK_THROWS_WITH_AS(parse("w^"), doctest::Contains("SyntaxError"), Error);
  CHECK_THROWS_WITH_AS(parse(""), doctest::Contains("SyntaxError"), Error);
  CHECK_THROWS_WITH_AS(parse("x"), doctest::Contains("SyntaxError"), Error);
  CHECK(parse("0") == KOrd{});
  CHECK(parse("k^3+k*w+1") == add(kappa(3), add(kappa(1, omega()), knat(1))));

  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    KOrd a = random_kord(rng);
    CHECK(parse(format(a)) == a);
  }
}

namespace {
// Brute-force max-lex rank for pairs of naturals.
std::uint64_t brute_rank(std::uint64_t t, std::uint64_t n) {
  std::uint64_t rank = 0;
  for (std::uint64_t a = 0; a < 60; ++a)
    for (std::uint64_t b = 0; b < 60; ++b) {
      std::uint64_t ma = std::max(a, b), mb = std::max(t, n);
      bool before = ma < mb || (ma == mb && (a < t || (a == t && b < n)));
      if (before) ++rank;
    }
  return rank;
}
}  // namespace

TEST_CASE("godel pairing matches brute force below 50") {
  for (std::uint64_t t = 0; t < 50; t += 3)
    for (std::uint64_t n = 0; n < 50; n += 3)
      CHECK(godel_pair(knat(t), knat(n)) == knat(brute_rank(t, n)));
  CHECK(godel_pair(knat(0), knat(0)) == knat(0));
  CHECK(godel_pair(knat(1), knat(1)) == knat(3));
  CHECK(godel_pair(K("0"), K("w")) == K("w"));
}

TEST_CASE("godel pairing transfinite spot values and monotonicity") {
  // Shell bases: P(w)=w, P(w*2)=w^2, P(w^2)=w^3.
  CHECK(godel_pair(K("0"), K("w")) == K("w"));
  CHECK(godel_pair(K("0"), K("w*2")) == K("w^2"));
  CHECK(godel_pair(K("0"), K("w^2")) == K("w^3"));
  // Order-preservation on a seeded sample.
  Rng rng(7);
  for (int i = 0; i < 400; ++i) {
    KOrd a = KOrd(random_small(rng, 1)), b = KOrd(random_small(rng, 1));
    KOrd c = KOrd(random_small(rng, 1)), d = KOrd(random_small(rng, 1));
    KOrd ma = std::max(a, b, [](const KOrd& x, const KOrd& y) { return cmp(x, y) < 0; });
    KOrd mc = std::max(c, d, [](const KOrd& x, const KOrd& y) { return cmp(x, y) < 0; });
    bool lt = cmp(ma, mc) < 0 ||
              (cmp(ma, mc) == 0 &&
               (cmp(a, c) < 0 || (cmp(a, c) == 0 && cmp(b, d) < 0)));
    if (lt) CHECK(cmp(godel_pair(a, b), godel_pair(c, d)) < 0);
  }
}

TEST_CASE("godel unpair inverts pairing") {
  Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    KOrd a = KOrd(random_small(rng, 1)), b = KOrd(random_small(rng, 1));
    auto [t, n] = godel_unpair(godel_pair(a, b));
    CHECK(t == a);
    CHECK(n == b);
  }
  auto [t, n] = godel_unpair(godel_pair(K("w*3"), knat(2)));
  CHECK(t == K("w*3"));
  CHECK(n == knat(2));
}

TEST_CASE("piecewise shifts: apply, preimage, compose, sloop") {
  PiecewiseShift id = identity_shift(K("w"));
  CHECK(shift_apply(id, knat(5)) == knat(5));

  // Block enumeration for bases {0, w*7}: [0,w) identity, [w, w*2) -> w*7+.
  PiecewiseShift blockenum{
      K("w*3"), {{K("0"), K("0")}, {K("w"), K("w*7")}, {K("w*2"), K("w*9")}}};
  CHECK(shift_apply(blockenum, K("w+3")) == K("w*7+3"));
  CHECK(*shift_preimage(blockenum, K("w*7+3")) == K("w+3"));
  CHECK_FALSE(shift_preimage(blockenum, K("w*2")).has_value());

  // Amalgam boundary shift: identity below w, then w+eta -> w*2+eta.
  PiecewiseShift amal{K("w*2"), {{K("0"), K("0")}, {K("w"), K("w*2")}}};
  CHECK(shift_apply(amal, K("w+1")) == K("w*2+1"));

  // Composition agrees pointwise.
  PiecewiseShift comp = shift_compose(blockenum, amal);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    KOrd g = add(mul(K("w"), knat(rng.below(2))), knat(rng.below(20)));
    CHECK(shift_apply(comp, g) == shift_apply(blockenum, shift_apply(amal, g)));
  }
  CHECK(shift_equal(shift_compose(identity_shift(K("w*10")), blockenum), blockenum));

  // Single-piece compositions stay single-piece.
  PiecewiseShift s1{K("w"), {{K("0"), K("0")}}};
  PiecewiseShift s2{K("w"), {{K("0"), K("0")}}};
  CHECK(shift_compose(s2, s1).pieces.size() == 1);

  CHECK(check_sloop(identity_shift(K("w^(w)"))).ok);
  PiecewiseShift bad{K("w*2"), {{K("0"), K("0")}, {K("w"), K("w+1")}}};
  auto rep = check_sloop(bad);
  CHECK_FALSE(rep.ok);
  CHECK(!rep.violations.empty());
}

TEST_CASE("shift monotonicity and preimage inverse (sampled)") {
  PiecewiseShift m{K("w*3"),
                   {{K("0"), K("0")}, {K("w"), K("w*4")}, {K("w*2"), K("w*9")}}};
  CHECK(check_sloop(m).ok);
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    KOrd g = add(mul(K("w"), knat(rng.below(3))), knat(rng.below(30)));
    KOrd h = add(mul(K("w"), knat(rng.below(3))), knat(rng.below(30)));
    if (cmp(g, h) < 0) CHECK(cmp(shift_apply(m, g), shift_apply(m, h)) < 0);
    CHECK(*shift_preimage(m, shift_apply(m, g)) == g);
    // SLOOP behavior: zero, successors, limits preserved.
    auto cg = classify(g).kind;
    CHECK(classify(shift_apply(m, g)).kind == cg);
  }
}
