#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "lmd/families.hpp"
#include "lmd/suites.hpp"

using namespace lmd;

namespace {

// Random zero pattern stored as a set of zeroed variable ids.
struct Mask {
  std::uint32_t n = 0;
  std::set<VarId> zero;
  bool operator()(std::uint32_t q, std::uint32_t i, std::uint32_t j) const { return zero.count(imm_var(n, q, i, j)) > 0; }
};

Mask random_mask(Rng& rng, std::uint32_t n, std::uint32_t d, int percent) {
  Mask m{n, {}};
  for (VarId v = 0; v < n * n * d; ++v) {
    if (rng.range(0, 99) < percent) m.zero.insert(v);
  }
  return m;
}

// Surviving paths from row i through matrices a..b to column j.
std::size_t count_paths(std::uint32_t n, const Mask& z, std::uint32_t a, std::uint32_t b, std::uint32_t i, std::uint32_t j) {
  if (a > b) return i == j ? 1 : 0;
  std::size_t total = 0;
  for (std::uint32_t k = 1; k <= n; ++k) {
    if (a == b && k != j) continue;
    if (z(a, i, k)) continue;
    total += count_paths(n, z, a + 1, b, k, j);
  }
  return total;
}

}  // namespace

TEST_CASE("univariates and evaluation") {
  const auto all = all_univariates(5, 2, 1000);
  CHECK(all.size() == 25);
  CHECK(all.front() == Univariate{0, 0});
  CHECK(all[1] == Univariate{0, 1});
  CHECK(eval_univariate({1, 2, 3}, 2, 5) == (1 + 4 + 12) % 5);
  CHECK_THROWS_AS(all_univariates(7, 9, 1000), BudgetExceeded);
}

TEST_CASE("design polynomial counts and intersections") {
  for (std::uint32_t n : {3u, 5u, 7u}) {
    for (std::uint32_t k : {1u, 2u}) {
      const NwParams p{n, k};
      const SparsePoly f = nw_poly(p);
      std::size_t expected = 1;
      for (std::uint32_t i = 0; i < k; ++i) expected *= n;
      CHECK(f.num_terms() == expected);

      const auto family = all_univariates(n, k, 100000);
      std::vector<Monomial> derivs;
      for (const auto& a : family) {
        const Monomial m = nw_monomial(p, a);
        CHECK(m.degree() == n);
        CHECK(f.coefficient(m) == 1);
        derivs.push_back(nw_prefix_derivative(f, p, a));
        CHECK(derivs.back().degree() == n - k);
      }
      for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
          // at most k-1 shared variables
          CHECK(n - mono_distance(nw_monomial(p, family[i]), nw_monomial(p, family[j])) <= k - 1);
          CHECK(static_cast<std::int64_t>(mono_distance(derivs[i], derivs[j])) >= static_cast<std::int64_t>(n) - 2 * static_cast<std::int64_t>(k));
        }
      }
    }
  }
}

TEST_CASE("design polynomial monomial layout") {
  // a(z) = 1 + z over GF(3): rows take columns a(0)+1, a(1)+1, a(2)+1 = 2, 3, 1
  const NwParams p{3, 2};
  auto t = nw_table(3);
  CHECK(nw_monomial(p, {1, 1}).to_string(*t) == "x1_2*x2_3*x3_1");
  // constant a = 1 maps every row to column 2
  CHECK(nw_monomial({3, 1}, {1}).to_string(*t) == "x1_2*x2_2*x3_2");
  CHECK_THROWS_AS(nw_poly({4, 1}), PreconditionError);
  CHECK_THROWS_AS(nw_poly({5, 0}), PreconditionError);
}

TEST_CASE("IMM shape") {
  for (std::uint32_t n = 1; n <= 3; ++n) {
    for (std::uint32_t d = 2; d <= 4; ++d) {
      const SparsePoly f = imm_poly({n, d});
      std::size_t expected = 1;
      for (std::uint32_t i = 1; i < d; ++i) expected *= n;
      CHECK(f.num_terms() == expected);
      for (const auto& [m, c] : f.terms()) {
        CHECK(m.degree() == d);
        std::set<std::uint32_t> mats;
        for (const auto& fac : m.factors()) {
          CHECK(fac.exp == 1);
          mats.insert(fac.var / (n * n));
        }
        CHECK(mats.size() == d);
      }
    }
  }
  auto ones = [](std::uint32_t n, std::uint32_t d) {
    Assignment pt;
    for (VarId v = 0; v < n * n * d; ++v) pt[v] = 1;
    return evaluate(imm_poly({n, d}), pt);
  };
  CHECK(ones(2, 2) == 2);
  CHECK(ones(3, 3) == 9);
  auto t = imm_table(2, 2);
  CHECK(t->name(imm_var(2, 2, 1, 2)) == "x2_1_2");
}

TEST_CASE("restricted IMM term count matches path enumeration") {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = static_cast<std::uint32_t>(rng.range(1, 3));
    const auto d = static_cast<std::uint32_t>(rng.range(2, 4));
    const Mask z = random_mask(rng, n, d, 30);
    const SparsePoly f = imm_segment_poly(n, d, 1, d, 1, 1, z);
    CHECK(f.num_terms() == count_paths(n, z, 1, d, 1, 1));
  }
}

TEST_CASE("segment leading monomial agrees with full expansion for n <= 3") {
  Rng rng(43);
  std::size_t checked = 0;
  for (std::uint32_t n = 1; n <= 3; ++n) {
    const std::uint32_t d = 4;
    for (int rep = 0; rep < 6; ++rep) {
      const Mask z = random_mask(rng, n, d, rep == 0 ? 0 : 35);
      for (std::uint32_t a = 1; a <= d; ++a) {
        for (std::uint32_t b = a; b <= std::min(d, a + 2); ++b) {
          for (std::uint32_t i = 1; i <= n; ++i) {
            for (std::uint32_t j = 1; j <= n; ++j) {
              const SparsePoly f = imm_segment_poly(n, d, a, b, i, j, z);
              const auto lm = lm_of_segment(n, z, a, b, i, j);
              if (f.is_zero()) {
                CHECK_FALSE(lm.has_value());
              } else {
                REQUIRE(lm.has_value());
                CHECK(*lm == leading_monomial(f));
              }
              ++checked;
            }
          }
        }
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("segment leading monomial: unrestricted n=3 pair takes the (1,1) path") {
  const ZeroPattern none = [](std::uint32_t, std::uint32_t, std::uint32_t) { return false; };
  auto t = imm_table(3, 3);
  const auto lm = lm_of_segment(3, none, 1, 2, 1, 1);
  REQUIRE(lm.has_value());
  CHECK(lm->to_string(*t) == "x1_1_1*x2_1_1");
  CHECK(lm_of_segment(3, none, 2, 1, 2, 2)->is_one());
  CHECK_FALSE(lm_of_segment(3, none, 2, 1, 1, 2).has_value());
}

TEST_CASE("derivative leading monomial agrees with restrict, derive, LM") {
  Rng rng(47);
  for (int trial = 0; trial < 150; ++trial) {
    const auto n = static_cast<std::uint32_t>(rng.range(1, 3));
    const auto d = static_cast<std::uint32_t>(rng.range(2, 4));
    const Mask z = random_mask(rng, n, d, 25);
    const SparsePoly f = imm_segment_poly(n, d, 1, d, 1, 1, z);
    std::vector<VarLabel> vars;
    Monomial dm;
    for (int c = static_cast<int>(rng.range(0, 3)); c > 0; --c) {
      const VarLabel l{static_cast<int>(rng.range(1, d)), static_cast<int>(rng.range(1, n)),
                       static_cast<int>(rng.range(1, n))};
      vars.push_back(l);
      dm = dm * Monomial::variable(imm_var(n, l.t, l.i, l.j));
    }
    const SparsePoly g = derive(f, dm);
    const auto lm = lm_of_imm_derivative(n, d, z, vars);
    if (g.is_zero()) {
      CHECK_FALSE(lm.has_value());
    } else {
      REQUIRE(lm.has_value());
      CHECK(*lm == leading_monomial(g));
    }
  }
}

TEST_CASE("restriction plan layout") {
  const RestrictionPlan p8(8, 1);
  CHECK(p8.spacing() == 2);
  CHECK(p8.chosen() == std::vector<std::uint32_t>{2, 5});
  CHECK(p8.frozen(3));
  CHECK_FALSE(p8.frozen(4));
  CHECK(p8.zeroed(3, 1, 2));
  CHECK_FALSE(p8.zeroed(3, 2, 2));
  CHECK_FALSE(p8.zeroed(5, 1, 2));
  CHECK(p8.unconstrained() == std::vector<std::uint32_t>{1, 4, 6, 7, 8});

  const RestrictionPlan p16(16, 2);
  CHECK(p16.chosen() == std::vector<std::uint32_t>{2, 5, 8, 11});
  for (std::uint32_t q : {3u, 6u, 9u}) CHECK(p16.frozen(q));
  CHECK(p16.unconstrained() == std::vector<std::uint32_t>{1, 4, 7, 10, 12, 13, 14, 15, 16});

  CHECK_THROWS_AS(RestrictionPlan(10, 1), PreconditionError);
  CHECK_THROWS_AS(RestrictionPlan(8, 0), PreconditionError);
}

TEST_CASE("restricted IMM leading monomial families") {
  struct Case {
    std::uint32_t n, k;
    std::size_t size;
  };
  for (const auto& c : {Case{8, 1, 7}, Case{16, 2, 169}}) {
    const ImmLmFamily fam = imm_restricted_lm_family(c.n, c.k);
    REQUIRE(fam.members.size() == c.size);
    CHECK(fam.members.size() >= static_cast<std::size_t>(std::pow(c.n / 2.0, c.k)));
    for (const auto& m : fam.members) {
      CHECK(m.s_set.size() == 2 * c.k);
      CHECK(m.lm.degree() == c.n - 2 * c.k);
    }
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      for (std::size_t j = i + 1; j < fam.members.size(); ++j) {
        const auto& a = fam.members[i];
        const auto& b = fam.members[j];
        std::size_t common = 0;
        for (const auto& v : a.s_set) common += std::count(b.s_set.begin(), b.s_set.end(), v);
        CHECK(common < c.k);
        CHECK(mono_distance(a.lm, b.lm) >= c.n / 4);
      }
    }
  }
}

TEST_CASE("family LMs agree with expanded segments") {
  // the derivative is a product of segment entries, and LM is multiplicative
  const RestrictionPlan plan(8, 1);
  const ZeroPattern z = plan.pattern();
  for (const auto& m : imm_restricted_lm_family(8, 1).members) {
    Monomial expect;
    std::uint32_t prev = 0, row = 1;
    for (const auto& l : m.s_set) {
      expect = expect * leading_monomial(imm_segment_poly(8, 8, prev + 1, l.t - 1, row, l.i, z));
      prev = l.t;
      row = l.j;
    }
    expect = expect * leading_monomial(imm_segment_poly(8, 8, prev + 1, 8, row, 1, z));
    CHECK(m.lm == expect);
  }
  CHECK_THROWS_AS(RestrictionPlan(4, 1), PreconditionError);
}

TEST_CASE("depth-4 bound formula") {
  CHECK(depth4_upper_bound(1, 2, 1, 1, 2, 1) == 9);
  CHECK(depth4_upper_bound(3, 2, 0, 2, 4, 0) == 3);
  CHECK(depth4_upper_bound(2, 3, 2, 2, 3, 1) == 2 * 10 * 20);
  CHECK_THROWS_AS(depth4_upper_bound(1, 1, 2, 1, 1, 1), PreconditionError);
}

TEST_CASE("depth-4 expansion") {
  auto t = make_indexed_table(2);
  Depth4Circuit c(t, Field::rationals());
  CHECK(depth4_expand(c).is_zero());
  c.add_product({parse_poly("x1 + x2", t, Field::rationals()), parse_poly("x1", t, Field::rationals())});
  CHECK(depth4_expand(c) == parse_poly("x1^2 + x1*x2", t, Field::rationals()));
  CHECK(c.top_fanin() == 1);
  CHECK(c.product_fanin() == 2);
  CHECK(c.bottom_degree() == 1);
}

TEST_CASE("random circuits: expansion agrees with pointwise evaluation") {
  Rng rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const CircuitInstance inst = random_circuit_instance(rng);
    const SparsePoly f = depth4_expand(inst.circuit);
    for (int pt = 0; pt < 10; ++pt) {
      Assignment x;
      for (VarId v = 0; v < inst.circuit.num_vars(); ++v) x[v] = BigRational(rng.range(-4, 4));
      BigRational direct = 0;
      for (const auto& prod : inst.circuit.products()) {
        BigRational term = 1;
        for (const auto& q : prod) term *= evaluate(q, x);
        direct += term;
      }
      CHECK(evaluate(f, x) == direct);
    }
  }
}

TEST_CASE("random circuits: the bound dominates the shifted dimension") {
  Rng rng(59);
  for (int trial = 0; trial < 50; ++trial) {
    const CircuitInstance inst = random_circuit_instance(rng);
    CHECK(check_circuit_instance(inst).ok);
  }
}
