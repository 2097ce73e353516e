// SPDX-License-Identifier: Apache-2.0
//
// kord.hpp — exact symbolic arithmetic for ordinals below kappa^+.
//
// Two-tier representation:
//   SmallOrd — Cantor normal form ordinals below epsilon_0 (hereditary CNF).
//   KOrd     — formal polynomials in a distinguished regular-cardinal symbol
//              "k" (kappa) with finite exponents, SmallOrd coefficients and a
//              SmallOrd tail.
// Plus PiecewiseShift, the calculus of order-preserving piecewise-translation
// maps ("SLOOP" maps: successor, limit, zero and order preserving).
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mangrove {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// All library errors carry a stable short code (e.g. "Underflow") plus a
// human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

// ---------------------------------------------------------------------------
// SmallOrd — hereditary Cantor normal form below epsilon_0
// ---------------------------------------------------------------------------

struct SmallOrd {
  struct Term;
  // Strictly decreasing exponents, coefficients >= 1; empty vector is 0.
  std::vector<Term> terms;

  SmallOrd() = default;
  bool is_zero() const { return terms.empty(); }
};

struct SmallOrd::Term {
  SmallOrd exp;
  std::uint64_t coeff = 1;
};

inline int cmp(const SmallOrd& a, const SmallOrd& b);

inline int cmp_term(const SmallOrd::Term& x, const SmallOrd::Term& y) {
  int c = cmp(x.exp, y.exp);
  if (c != 0) return c;
  if (x.coeff != y.coeff) return x.coeff < y.coeff ? -1 : 1;
  return 0;
}

inline int cmp(const SmallOrd& a, const SmallOrd& b) {
  size_t n = std::min(a.terms.size(), b.terms.size());
  for (size_t i = 0; i < n; ++i) {
    int c = cmp(a.terms[i].exp, b.terms[i].exp);
    if (c != 0) return c;
    if (a.terms[i].coeff != b.terms[i].coeff)
      return a.terms[i].coeff < b.terms[i].coeff ? -1 : 1;
  }
  if (a.terms.size() != b.terms.size())
    return a.terms.size() < b.terms.size() ? -1 : 1;
  return 0;
}

inline bool operator==(const SmallOrd& a, const SmallOrd& b) { return cmp(a, b) == 0; }
inline bool operator!=(const SmallOrd& a, const SmallOrd& b) { return cmp(a, b) != 0; }
inline bool operator<(const SmallOrd& a, const SmallOrd& b) { return cmp(a, b) < 0; }
inline bool operator<=(const SmallOrd& a, const SmallOrd& b) { return cmp(a, b) <= 0; }
inline bool operator>(const SmallOrd& a, const SmallOrd& b) { return cmp(a, b) > 0; }
inline bool operator>=(const SmallOrd& a, const SmallOrd& b) { return cmp(a, b) >= 0; }

inline SmallOrd nat(std::uint64_t n) {
  SmallOrd r;
  if (n) r.terms.push_back({SmallOrd{}, n});
  return r;
}

inline bool is_nat(const SmallOrd& a) {
  return a.terms.empty() || (a.terms.size() == 1 && a.terms[0].exp.is_zero());
}

// Value as a natural number; error if infinite.
inline std::uint64_t to_nat(const SmallOrd& a) {
  if (a.is_zero()) return 0;
  if (!is_nat(a)) fail("NotFinite", "ordinal is not a natural number");
  return a.terms[0].coeff;
}

// w^e (single-term CNF with exponent e).
inline SmallOrd omega_pow(const SmallOrd& e) {
  SmallOrd r;
  r.terms.push_back({e, 1});
  return r;
}

inline SmallOrd omega() { return omega_pow(nat(1)); }

inline SmallOrd add(const SmallOrd& a, const SmallOrd& b) {
  if (b.is_zero()) return a;
  SmallOrd r;
  const SmallOrd& lead = b.terms[0].exp;
  for (const auto& t : a.terms) {
    if (cmp(t.exp, lead) > 0)
      r.terms.push_back(t);
    else
      break;  // absorbed by b's leading term
  }
  // Merge equal leading exponent if a still has one at the cut.
  size_t bi = 0;
  size_t kept = r.terms.size();
  if (kept < a.terms.size() && cmp(a.terms[kept].exp, lead) == 0) {
    r.terms.push_back({lead, a.terms[kept].coeff + b.terms[0].coeff});
    bi = 1;
  }
  for (; bi < b.terms.size(); ++bi) r.terms.push_back(b.terms[bi]);
  return r;
}

// The unique minimal g with a + g = b; requires a <= b.
inline SmallOrd left_sub(const SmallOrd& a, const SmallOrd& b) {
  if (cmp(a, b) > 0) fail("Underflow", "left_sub: first argument exceeds second");
  size_t i = 0;
  while (i < a.terms.size() && i < b.terms.size() &&
         cmp_term(a.terms[i], b.terms[i]) == 0)
    ++i;
  SmallOrd r;
  if (i == a.terms.size()) {
    r.terms.assign(b.terms.begin() + static_cast<long>(i), b.terms.end());
    return r;
  }
  // First difference: exponents equal with larger b-coefficient, or b's term
  // is larger in exponent (then a's remainder is absorbed).
  const auto& ta = a.terms[i];
  const auto& tb = b.terms[i];
  if (cmp(ta.exp, tb.exp) == 0) {
    r.terms.push_back({tb.exp, tb.coeff - ta.coeff});
    r.terms.insert(r.terms.end(), b.terms.begin() + static_cast<long>(i) + 1,
                   b.terms.end());
    return r;
  }
  r.terms.assign(b.terms.begin() + static_cast<long>(i), b.terms.end());
  return r;
}

// Exponent of the least CNF term: largest e with w^e left-dividing a.
inline SmallOrd deg(const SmallOrd& a) {
  if (a.is_zero()) fail("ZeroArgument", "deg(0) undefined");
  return a.terms.back().exp;
}

inline SmallOrd mul(const SmallOrd& a, const SmallOrd& b) {
  SmallOrd r;
  if (a.is_zero() || b.is_zero()) return r;
  for (const auto& tb : b.terms) {
    SmallOrd piece;
    if (tb.exp.is_zero()) {
      // a * finite: multiply leading coefficient, keep the rest.
      piece = a;
      piece.terms[0].coeff *= tb.coeff;
    } else {
      piece.terms.push_back({add(a.terms[0].exp, tb.exp), tb.coeff});
    }
    r = add(r, piece);
  }
  return r;
}

enum class OrdClassKind { Zero, Successor, Limit };

inline OrdClassKind classify_kind(const SmallOrd& a) {
  if (a.is_zero()) return OrdClassKind::Zero;
  if (a.terms.back().exp.is_zero()) return OrdClassKind::Successor;
  return OrdClassKind::Limit;
}

inline bool limit_or_zero(const SmallOrd& a) {
  return classify_kind(a) != OrdClassKind::Successor;
}

inline SmallOrd succ(const SmallOrd& a) { return add(a, nat(1)); }

// Predecessor of a successor ordinal.
inline SmallOrd pred(const SmallOrd& a) {
  if (classify_kind(a) != OrdClassKind::Successor)
    fail("NotSuccessor", "pred of a non-successor");
  SmallOrd r = a;
  if (--r.terms.back().coeff == 0) r.terms.pop_back();
  return r;
}

// ---------------------------------------------------------------------------
// KOrd — kappa-polynomials with SmallOrd coefficients and tail
// ---------------------------------------------------------------------------

struct KOrd {
  struct KTerm {
    int kexp = 1;     // >= 1
    SmallOrd coeff;   // >= 1
  };
  std::vector<KTerm> kpart;  // strictly decreasing kexp
  SmallOrd tail;

  KOrd() = default;
  /*implicit*/ KOrd(SmallOrd t) : tail(std::move(t)) {}
  bool is_zero() const { return kpart.empty() && tail.is_zero(); }
  bool kappa_free() const { return kpart.empty(); }
};

inline KOrd kappa(int kexp = 1, SmallOrd coeff = nat(1)) {
  KOrd r;
  r.kpart.push_back({kexp, std::move(coeff)});
  return r;
}

inline KOrd knat(std::uint64_t n) { return KOrd(nat(n)); }

// The kappa-free value as a SmallOrd; error when a kappa term is present.
inline SmallOrd small_part(const KOrd& a) {
  if (!a.kappa_free()) fail("NotKappaFree", "value has a kappa part");
  return a.tail;
}

// --- Generalized term lists -------------------------------------------------
// A KOrd denotes sum of w^(K*ke + se) * n over generalized terms, where K is
// the (additively indecomposable) exponent with kappa = w^K. All arithmetic
// routes through these flat term lists.

struct GExp {
  int ke = 0;
  SmallOrd se;
};

inline int cmp(const GExp& a, const GExp& b) {
  if (a.ke != b.ke) return a.ke < b.ke ? -1 : 1;
  return cmp(a.se, b.se);
}

inline bool operator==(const GExp& a, const GExp& b) { return cmp(a, b) == 0; }

// Ordinal sum of exponents: (K*k1+s1) + (K*k2+s2).
inline GExp gexp_add(const GExp& a, const GExp& b) {
  if (b.ke > 0) return GExp{a.ke + b.ke, b.se};
  return GExp{a.ke, add(a.se, b.se)};
}

struct GTerm {
  GExp exp;
  std::uint64_t coeff = 1;
};

using GTerms = std::vector<GTerm>;

inline GTerms expand(const KOrd& a) {
  GTerms out;
  for (const auto& kt : a.kpart)
    for (const auto& st : kt.coeff.terms)
      out.push_back({GExp{kt.kexp, st.exp}, st.coeff});
  for (const auto& st : a.tail.terms) out.push_back({GExp{0, st.exp}, st.coeff});
  return out;
}

inline KOrd collapse(const GTerms& ts) {
  KOrd r;
  for (const auto& t : ts) {
    if (t.exp.ke == 0) {
      r.tail.terms.push_back({t.exp.se, t.coeff});
    } else if (!r.kpart.empty() && r.kpart.back().kexp == t.exp.ke) {
      r.kpart.back().coeff.terms.push_back({t.exp.se, t.coeff});
    } else {
      KOrd::KTerm kt;
      kt.kexp = t.exp.ke;
      kt.coeff.terms.push_back({t.exp.se, t.coeff});
      r.kpart.push_back(std::move(kt));
    }
  }
  return r;
}

inline GTerms gadd(const GTerms& a, const GTerms& b) {
  if (b.empty()) return a;
  GTerms r;
  const GExp& lead = b[0].exp;
  for (const auto& t : a) {
    if (cmp(t.exp, lead) > 0)
      r.push_back(t);
    else
      break;
  }
  size_t bi = 0;
  if (r.size() < a.size() && cmp(a[r.size()].exp, lead) == 0) {
    r.push_back({lead, a[r.size()].coeff + b[0].coeff});
    bi = 1;
  }
  for (; bi < b.size(); ++bi) r.push_back(b[bi]);
  return r;
}

inline int gcmp(const GTerms& a, const GTerms& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int c = cmp(a[i].exp, b[i].exp);
    if (c != 0) return c;
    if (a[i].coeff != b[i].coeff) return a[i].coeff < b[i].coeff ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

// --- KOrd operations ---------------------------------------------------------

inline int cmp(const KOrd& a, const KOrd& b) { return gcmp(expand(a), expand(b)); }
inline bool operator==(const KOrd& a, const KOrd& b) { return cmp(a, b) == 0; }
inline bool operator!=(const KOrd& a, const KOrd& b) { return cmp(a, b) != 0; }
inline bool operator<(const KOrd& a, const KOrd& b) { return cmp(a, b) < 0; }
inline bool operator<=(const KOrd& a, const KOrd& b) { return cmp(a, b) <= 0; }
inline bool operator>(const KOrd& a, const KOrd& b) { return cmp(a, b) > 0; }
inline bool operator>=(const KOrd& a, const KOrd& b) { return cmp(a, b) >= 0; }

inline KOrd add(const KOrd& a, const KOrd& b) {
  return collapse(gadd(expand(a), expand(b)));
}

inline KOrd left_sub(const KOrd& a, const KOrd& b) {
  GTerms ta = expand(a), tb = expand(b);
  if (gcmp(ta, tb) > 0) fail("Underflow", "left_sub: first argument exceeds second");
  size_t i = 0;
  while (i < ta.size() && i < tb.size() && cmp(ta[i].exp, tb[i].exp) == 0 &&
         ta[i].coeff == tb[i].coeff)
    ++i;
  GTerms r;
  if (i == ta.size()) {
    r.assign(tb.begin() + static_cast<long>(i), tb.end());
  } else if (cmp(ta[i].exp, tb[i].exp) == 0) {
    r.push_back({tb[i].exp, tb[i].coeff - ta[i].coeff});
    r.insert(r.end(), tb.begin() + static_cast<long>(i) + 1, tb.end());
  } else {
    r.assign(tb.begin() + static_cast<long>(i), tb.end());
  }
  return collapse(r);
}

inline KOrd mul(const KOrd& a, const KOrd& b) {
  GTerms ta = expand(a), tb = expand(b);
  if (ta.empty() || tb.empty()) return KOrd{};
  GTerms r;
  for (const auto& t : tb) {
    GTerms piece;
    if (t.exp.ke == 0 && t.exp.se.is_zero()) {
      piece = ta;
      piece[0].coeff *= t.coeff;
    } else {
      piece.push_back({gexp_add(ta[0].exp, t.exp), t.coeff});
    }
    r = gadd(r, piece);
  }
  return collapse(r);
}

struct OrdClass {
  OrdClassKind kind;
  KOrd predecessor;  // meaningful for Successor only
};

inline OrdClass classify(const KOrd& a) {
  GTerms ts = expand(a);
  if (ts.empty()) return {OrdClassKind::Zero, {}};
  const GTerm& last = ts.back();
  if (last.exp.ke == 0 && last.exp.se.is_zero()) {
    GTerms p = ts;
    if (--p.back().coeff == 0) p.pop_back();
    return {OrdClassKind::Successor, collapse(p)};
  }
  return {OrdClassKind::Limit, {}};
}

inline bool limit_or_zero(const KOrd& a) {
  return classify(a).kind != OrdClassKind::Successor;
}

inline KOrd succ(const KOrd& a) { return add(a, knat(1)); }

// w^E for a generalized exponent: w^(K*ke+se) = k^ke * w^se.
inline KOrd gpow(const GExp& e) {
  if (e.ke == 0) return KOrd(omega_pow(e.se));
  return kappa(e.ke, omega_pow(e.se));
}

// ---------------------------------------------------------------------------
// Formatting and parsing (grammar: ord := kterm ("+" kterm)* ; see README)
// ---------------------------------------------------------------------------

inline std::string format(const SmallOrd& a);

inline std::string format_small_exp(const SmallOrd& e) {
  // Exponent position of "w": nat exponents bare, others parenthesized.
  if (is_nat(e)) return std::to_string(to_nat(e));
  return "(" + format(e) + ")";
}

inline std::string format(const SmallOrd& a) {
  if (a.is_zero()) return "0";
  std::string out;
  for (size_t i = 0; i < a.terms.size(); ++i) {
    const auto& t = a.terms[i];
    if (i) out += "+";
    if (t.exp.is_zero()) {
      out += std::to_string(t.coeff);
      continue;
    }
    out += "w";
    if (!(is_nat(t.exp) && to_nat(t.exp) == 1)) out += "^" + format_small_exp(t.exp);
    if (t.coeff != 1) out += "*" + std::to_string(t.coeff);
  }
  return out;
}

inline std::string format(const KOrd& a) {
  if (a.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& g : expand(a)) {
    if (!first) out += "+";
    first = false;
    if (g.exp.ke > 0) {
      out += "k";
      if (g.exp.ke != 1) out += "^" + std::to_string(g.exp.ke);
      SmallOrd c;
      c.terms.push_back({g.exp.se, g.coeff});
      if (!(is_nat(c) && to_nat(c) == 1)) out += "*" + format(c);
    } else if (g.exp.se.is_zero()) {
      out += std::to_string(g.coeff);
    } else {
      out += "w";
      if (!(is_nat(g.exp.se) && to_nat(g.exp.se) == 1))
        out += "^" + format_small_exp(g.exp.se);
      if (g.coeff != 1) out += "*" + std::to_string(g.coeff);
    }
  }
  return out;
}

namespace detail {

class OrdParser {
 public:
  explicit OrdParser(std::string s) : s_(std::move(s)) {}

  KOrd parse_ord() {
    GTerms ts;
    parse_kterm(ts);
    while (peek() == '+') {
      ++pos_;
      parse_kterm(ts);
    }
    if (pos_ != s_.size()) err("trailing input");
    // Canonicality: strictly decreasing generalized exponents, no zero terms,
    // no "0" inside a sum.
    for (size_t i = 0; i + 1 < ts.size(); ++i)
      if (cmp(ts[i].exp, ts[i + 1].exp) <= 0)
        fail("NonCanonical", "exponents must strictly decrease in '" + s_ + "'");
    if (ts.size() > 1)
      for (const auto& t : ts)
        if (t.coeff == 0) fail("NonCanonical", "zero term inside a sum");
    if (ts.size() == 1 && ts[0].coeff == 0) ts.clear();
    return collapse(ts);
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  [[noreturn]] void err(const std::string& what) {
    fail("SyntaxError", what + " at position " + std::to_string(pos_) + " in '" +
                            s_ + "'");
  }

  std::uint64_t parse_nat() {
    if (!isdigit(static_cast<unsigned char>(peek()))) err("expected number");
    std::uint64_t v = 0;
    size_t start = pos_;
    while (isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + static_cast<std::uint64_t>(s_[pos_] - '0');
      ++pos_;
    }
    if (s_[start] == '0' && pos_ - start > 1) err("leading zero");
    return v;
  }

  // One small term: "w"("^"("(" ord ")" | nat))?("*" nat)? | nat.
  GTerm parse_small_term() {
    if (peek() == 'w') {
      ++pos_;
      SmallOrd e = nat(1);
      if (peek() == '^') {
        ++pos_;
        if (peek() == '(') {
          ++pos_;
          size_t depth = 1, start = pos_;
          while (pos_ < s_.size() && depth) {
            if (s_[pos_] == '(') ++depth;
            if (s_[pos_] == ')') --depth;
            if (depth) ++pos_;
          }
          if (depth) err("unbalanced parenthesis");
          OrdParser inner(s_.substr(start, pos_ - start));
          KOrd v = inner.parse_ord();
          if (!v.kappa_free()) err("kappa inside an exponent");
          e = v.tail;
          if (is_nat(e)) fail("NonCanonical", "finite exponent must be bare");
          ++pos_;  // ')'
        } else {
          std::uint64_t n = parse_nat();
          if (n < 2) fail("NonCanonical", "exponent " + std::to_string(n) +
                                              " must be elided or bare 'w'");
          e = nat(n);
        }
      }
      std::uint64_t c = 1;
      if (peek() == '*') {
        ++pos_;
        c = parse_nat();
        if (c < 2) fail("NonCanonical", "coefficient must be >= 2 when written");
      }
      return GTerm{GExp{0, e}, c};
    }
    std::uint64_t n = parse_nat();
    return GTerm{GExp{0, SmallOrd{}}, n};
  }

  void parse_kterm(GTerms& ts) {
    if (peek() == 'k') {
      ++pos_;
      int ke = 1;
      if (peek() == '^') {
        ++pos_;
        std::uint64_t n = parse_nat();
        if (n < 2) fail("NonCanonical", "kappa exponent must be elided or >= 2");
        ke = static_cast<int>(n);
      }
      GTerm coeff{GExp{0, SmallOrd{}}, 1};
      if (peek() == '*') {
        ++pos_;
        coeff = parse_small_term();
        if (coeff.exp.se.is_zero() && coeff.coeff < 2)
          fail("NonCanonical", "coefficient must be >= 2 when written");
      }
      ts.push_back({GExp{ke, coeff.exp.se}, coeff.coeff});
      return;
    }
    ts.push_back(parse_small_term());
  }

  const std::string s_;
  size_t pos_ = 0;
};

}  // namespace detail

inline KOrd parse(const std::string& text) {
  detail::OrdParser p(text);
  KOrd v = p.parse_ord();
  if (format(v) != text) fail("NonCanonical", "'" + text + "' is not canonical");
  return v;
}

inline SmallOrd parse_small(const std::string& text) { return small_part(parse(text)); }

// ---------------------------------------------------------------------------
// Max-lex pairing (Godel pairing below kappa^+)
// ---------------------------------------------------------------------------
// Pairs are ordered by max first, then lexicographically; godel_pair(t,n) is
// the order type of the set of pairs preceding (t,n).

namespace detail {

// Ordinal doubling of a generalized exponent: (K*ke+se)*2.
inline GExp gexp_double(const GExp& e) {
  if (e.ke > 0) return GExp{e.ke * 2, e.se};
  return GExp{0, mul(e.se, nat(2))};
}

// P(w^F) = order type of (w^F x w^F) under the max-lex order.
inline KOrd pair_shell_pow(const GExp& f);

// P(m) = order type of (m x m) under the max-lex order.
inline KOrd pair_base(const KOrd& m) {
  GTerms ts = expand(m);
  KOrd acc;      // prefix of m consumed so far
  KOrd result;
  for (const auto& t : ts) {
    if (t.exp.ke == 0 && t.exp.se.is_zero()) {
      // Finite block of shells: sum over d<c of (acc+d)*2+1.
      if (acc.is_zero()) {
        result = add(result, knat(t.coeff * t.coeff));
      } else {
        KOrd twoacc = mul(acc, knat(2));
        result = add(result, add(mul(twoacc, knat(t.coeff)), knat(t.coeff)));
      }
    } else {
      KOrd unit = gpow(t.exp);
      for (std::uint64_t d = 0; d < t.coeff; ++d) {
        if (acc.is_zero() && d == 0) {
          result = add(result, pair_shell_pow(t.exp));
        } else {
          // Sum over j<w^E of (A+j)*2+1 with A >= w^E: equals A*w^E.
          KOrd a = add(acc, mul(unit, knat(d)));
          result = add(result, mul(a, unit));
        }
      }
    }
    acc = add(acc, collapse(GTerms{t}));
  }
  return result;
}

inline KOrd pair_shell_pow(const GExp& f) {
  if (f.ke == 0 && f.se.is_zero()) return knat(1);  // P(1) = 1
  // Successor exponent F = E+1: P(w^F) = w^(E*2+1).
  if (classify_kind(f.se) == OrdClassKind::Successor) {
    GExp e{f.ke, pred(f.se)};
    GExp l = gexp_double(e);
    l.se = add(l.se, nat(1));
    return gpow(l);
  }
  // Limit exponent. Additively indecomposable F: P(w^F) = w^F.
  bool indecomposable;
  if (f.ke > 0)
    indecomposable = (f.ke == 1 && f.se.is_zero());
  else
    indecomposable = (f.se.terms.size() == 1 && f.se.terms[0].coeff == 1);
  if (indecomposable) return gpow(f);
  // Decomposable limit F = H' + u (u the last CNF unit of F):
  // P(w^F) = w^(H'*2 + u).
  GExp h = f;
  GExp l;
  if (f.ke > 0 && f.se.is_zero()) {
    // F = K*ke, last unit K: L = K*(2*ke-1).
    l = GExp{2 * f.ke - 1, SmallOrd{}};
  } else {
    // Last unit comes from se.
    SmallOrd u = omega_pow(h.se.terms.back().exp);
    if (--h.se.terms.back().coeff == 0) h.se.terms.pop_back();
    l = gexp_double(h);
    l.se = add(l.se, u);
  }
  return gpow(l);
}

}  // namespace detail

inline KOrd godel_pair(const KOrd& t, const KOrd& n) {
  const KOrd& m = (cmp(t, n) >= 0) ? t : n;
  KOrd base = detail::pair_base(m);
  if (cmp(t, m) < 0) return add(base, t);  // (t, m) with t < m
  return add(base, add(m, n));             // (m, n)
}

// Inverse of godel_pair. Greedy monotone inversion of pair_base; the result
// is always validated by re-pairing.
inline std::pair<KOrd, KOrd> godel_unpair(const KOrd& rho) {
  KOrd m;
  // Grow m term by term while pair_base(m) <= rho.
  for (;;) {
    KOrd pb = detail::pair_base(m);
    if (cmp(pb, rho) > 0) fail("Internal", "godel_unpair overshoot");
    KOrd rem = left_sub(pb, rho);
    if (rem.is_zero()) break;
    // Candidate units from the remainder's scale, largest first.
    GTerms rts = expand(rem);
    GTerms mts = expand(m);
    bool grew = false;
    std::vector<GExp> cands;
    for (const auto& t : rts) {
      cands.push_back(t.exp);
      // Once m is nonzero, adding w^E contributes blocks of size w^(L+E)
      // with L the leading exponent of m, so the exact candidate is the
      // left difference of exponents.
      if (!mts.empty()) {
        const GExp& l = mts[0].exp;
        const GExp& tgt = t.exp;
        if (l.ke < tgt.ke) {
          cands.push_back(tgt);
        } else if (l.ke == tgt.ke && cmp(l.se, tgt.se) <= 0) {
          cands.push_back(GExp{0, left_sub(l.se, tgt.se)});
        }
      }
      // Rough "half" exponents: P(w^(E+1)) = w^(E*2+1), so invert doubling.
      GExp e = t.exp;
      if (e.ke > 0) {
        cands.push_back(GExp{(e.ke + 1) / 2, e.se});
        cands.push_back(GExp{e.ke / 2, e.se});
      }
      if (e.ke == 0 && !e.se.is_zero() && is_nat(e.se)) {
        std::uint64_t v = to_nat(e.se);
        cands.push_back(GExp{0, nat((v + 1) / 2)});
        cands.push_back(GExp{0, nat(v / 2)});
      }
      if (e.ke == 0 && !e.se.is_zero() && !is_nat(e.se)) {
        SmallOrd half = e.se;
        if (!half.terms.empty() && is_nat(half.terms[0].exp)) {
          // halve the leading coefficient as a cheap candidate
          SmallOrd h2 = half;
          h2.terms[0].coeff = (h2.terms[0].coeff + 1) / 2;
          cands.push_back(GExp{0, h2});
        }
        cands.push_back(e);
      }
    }
    cands.push_back(GExp{0, SmallOrd{}});
    std::sort(cands.begin(), cands.end(),
              [](const GExp& a, const GExp& b) { return cmp(a, b) > 0; });
    for (const auto& c : cands) {
      KOrd unit = gpow(c);
      KOrd next = add(m, unit);
      if (cmp(detail::pair_base(next), rho) <= 0) {
        // Scale up the unit greedily (finite coefficient doubling).
        std::uint64_t lo = 1, hi = 2;
        while (cmp(detail::pair_base(add(m, mul(unit, knat(hi)))), rho) <= 0) {
          lo = hi;
          hi *= 2;
          if (hi > (1ULL << 50)) fail("Internal", "godel_unpair: runaway unit");
        }
        while (lo + 1 < hi) {
          std::uint64_t mid = lo + (hi - lo) / 2;
          if (cmp(detail::pair_base(add(m, mul(unit, knat(mid)))), rho) <= 0)
            lo = mid;
          else
            hi = mid;
        }
        m = add(m, mul(unit, knat(lo)));
        grew = true;
        break;
      }
    }
    if (!grew) break;
  }
  KOrd rem = left_sub(detail::pair_base(m), rho);
  KOrd t, n;
  if (cmp(rem, m) < 0) {
    t = rem;
    n = m;
  } else {
    t = m;
    n = left_sub(m, rem);
  }
  if (godel_pair(t, n) != rho) fail("Internal", "godel_unpair failed to invert");
  return {t, n};
}

// ---------------------------------------------------------------------------
// PiecewiseShift — order-preserving piecewise-translation maps
// ---------------------------------------------------------------------------

struct PiecewiseShift {
  KOrd domain;  // total on [0, domain)
  // Piece i covers [src_lo_i, src_lo_{i+1}) and maps g to dst_lo_i+(g-src_lo_i).
  std::vector<std::pair<KOrd, KOrd>> pieces;
};

inline PiecewiseShift identity_shift(const KOrd& domain) {
  return PiecewiseShift{domain, {{KOrd{}, KOrd{}}}};
}

// Merge pieces whose translations agree across the seam.
inline PiecewiseShift normalize(const PiecewiseShift& m) {
  PiecewiseShift r;
  r.domain = m.domain;
  for (const auto& p : m.pieces) {
    if (cmp(p.first, m.domain) >= 0) continue;  // empty piece
    if (!r.pieces.empty()) {
      const auto& q = r.pieces.back();
      // Same translation iff dst - src offsets align: p.dst == q.dst + (p.src - q.src)
      if (cmp(q.first, p.first) <= 0 &&
          add(q.second, left_sub(q.first, p.first)) == p.second)
        continue;
    }
    r.pieces.push_back(p);
  }
  return r;
}

inline KOrd shift_apply(const PiecewiseShift& m, const KOrd& g) {
  if (cmp(g, m.domain) >= 0) fail("OutOfDomain", "shift_apply: argument beyond domain");
  size_t i = m.pieces.size();
  while (i > 0 && cmp(m.pieces[i - 1].first, g) > 0) --i;
  if (i == 0) fail("OutOfDomain", "shift_apply: below first piece");
  const auto& p = m.pieces[i - 1];
  return add(p.second, left_sub(p.first, g));
}

inline std::optional<KOrd> shift_preimage(const PiecewiseShift& m, const KOrd& v) {
  for (size_t i = 0; i < m.pieces.size(); ++i) {
    const auto& p = m.pieces[i];
    if (cmp(v, p.second) < 0) continue;
    KOrd g = add(p.first, left_sub(p.second, v));
    KOrd hi = (i + 1 < m.pieces.size()) ? m.pieces[i + 1].first : m.domain;
    if (cmp(g, hi) < 0 && cmp(g, m.domain) < 0) return g;
  }
  return std::nullopt;
}

// Supremum of the image (the image of [0, domain) is a union of intervals;
// this returns the least upper bound of the last one).
inline KOrd shift_image_sup(const PiecewiseShift& m) {
  if (m.pieces.empty() || m.domain.is_zero()) return KOrd{};
  const auto& p = m.pieces.back();
  return add(p.second, left_sub(p.first, m.domain));
}

inline PiecewiseShift shift_compose(const PiecewiseShift& outer,
                                    const PiecewiseShift& inner) {
  if (cmp(shift_image_sup(inner), outer.domain) > 0)
    fail("DomainMismatch", "compose: inner image exceeds outer domain");
  std::vector<KOrd> cuts;
  for (const auto& p : inner.pieces) cuts.push_back(p.first);
  for (const auto& p : outer.pieces)
    if (auto g = shift_preimage(inner, p.first)) cuts.push_back(*g);
  std::sort(cuts.begin(), cuts.end(), [](const KOrd& a, const KOrd& b) {
    return cmp(a, b) < 0;
  });
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](const KOrd& a, const KOrd& b) { return a == b; }),
             cuts.end());
  PiecewiseShift r;
  r.domain = inner.domain;
  for (const auto& c : cuts) {
    if (cmp(c, inner.domain) >= 0) continue;
    r.pieces.push_back({c, shift_apply(outer, shift_apply(inner, c))});
  }
  return normalize(r);
}

// Restriction to [0, new_domain).
inline PiecewiseShift shift_restrict(const PiecewiseShift& m, const KOrd& new_domain) {
  if (cmp(new_domain, m.domain) > 0)
    fail("DomainMismatch", "restrict: enlarging the domain");
  PiecewiseShift r;
  r.domain = new_domain;
  for (const auto& p : m.pieces) {
    if (cmp(p.first, new_domain) < 0) r.pieces.push_back(p);
  }
  return r;
}

// Extensional equality on the shared domain.
inline bool shift_equal(const PiecewiseShift& a, const PiecewiseShift& b) {
  if (a.domain != b.domain) return false;
  PiecewiseShift na = normalize(a), nb = normalize(b);
  if (na.pieces.size() != nb.pieces.size()) return false;
  for (size_t i = 0; i < na.pieces.size(); ++i) {
    if (na.pieces[i].first != nb.pieces[i].first ||
        na.pieces[i].second != nb.pieces[i].second)
      return false;
  }
  return true;
}

struct SloopReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Structural SLOOP check: anchored at (0,0); boundaries limit-or-zero;
// strictly increasing across piece seams.
inline SloopReport check_sloop(const PiecewiseShift& m) {
  SloopReport rep;
  auto bad = [&](const std::string& s) {
    rep.ok = false;
    rep.violations.push_back(s);
  };
  if (m.pieces.empty()) {
    if (!m.domain.is_zero()) bad("no pieces but nonempty domain");
    return rep;
  }
  if (!m.pieces[0].first.is_zero() || !m.pieces[0].second.is_zero())
    bad("first piece not anchored at (0,0)");
  for (size_t i = 0; i < m.pieces.size(); ++i) {
    const auto& p = m.pieces[i];
    if (!limit_or_zero(p.first))
      bad("source boundary " + format(p.first) + " is a successor");
    if (!limit_or_zero(p.second))
      bad("target boundary " + format(p.second) + " is a successor");
    if (i > 0) {
      const auto& q = m.pieces[i - 1];
      if (cmp(q.first, p.first) >= 0)
        bad("source boundaries not increasing at " + format(p.first));
      else {
        // End of previous piece's image must not exceed this piece's start.
        KOrd prev_end = add(q.second, left_sub(q.first, p.first));
        if (cmp(prev_end, p.second) > 0)
          bad("map not strictly increasing across boundary " + format(p.first));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Seeded random generation (for property sampling)
// ---------------------------------------------------------------------------
// Deterministic 64-bit mix (splitmix64); avoids engine-distribution differences
// across standard libraries so sampled verdicts replay everywhere.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed + 0x9E3779B97F4A7C15ULL) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

 private:
  std::uint64_t state_;
};

// Random CNF ordinal: term count <= 4, exponent depth <= 3, coefficients <= 9.
inline SmallOrd random_small(Rng& rng, int depth = 3) {
  int nterms = static_cast<int>(rng.below(5));  // 0..4
  SmallOrd r;
  for (int i = 0; i < nterms; ++i) {
    SmallOrd e = depth > 0 ? random_small(rng, depth - 1) : nat(rng.below(4));
    std::uint64_t c = 1 + rng.below(9);
    r = add(r, mul(omega_pow(e), nat(c)));
  }
  return r;
}

inline KOrd random_kord(Rng& rng) {
  KOrd r(random_small(rng));
  int nk = static_cast<int>(rng.below(3));  // 0..2 kappa terms
  for (int i = 0; i < nk; ++i) {
    int ke = 1 + static_cast<int>(rng.below(3));
    SmallOrd c = random_small(rng, 1);
    if (c.is_zero()) c = nat(1 + rng.below(9));
    r = add(r, kappa(ke, c));
  }
  return r;
}

}  // namespace mangrove
