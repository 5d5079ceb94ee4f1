#include <gtest/gtest.h>

#include <cmath>

#include "corpus.hpp"
#include "nilword/nilword.hpp"
#include "oracles.hpp"

using namespace nilword;

namespace {

std::vector<Element> random_tuple(const Group& g, SplitMix64& rng, int k) {
  std::vector<Element> t;
  for (int i = 0; i < k; ++i) t.push_back(g.element_at(rng.below(g.order())));
  return t;
}

u64 fiber_size(const Group& g, const Word& w, const Element& target) {
  return exact_distribution(g, w, w.rank()).counts[g.index_of(target)];
}

}  // namespace

TEST(ExactDistribution, IdentityWordIsUniform) {
  for (const char* name : {"heisenberg:3:1", "cyclic:12", "extraspecial:3:1:-"}) {
    Group g = catalog_group(name);
    Dist d = exact_distribution(g, parse_word("x1"), 1);
    EXPECT_TRUE(d.uniform());
    EXPECT_TRUE(d.surjective());
    EXPECT_EQ(d.counts.front(), 1u);
  }
}

TEST(ExactDistribution, CommutatorOnHeisenberg) {
  Group g = catalog_group("heisenberg:3:1");
  Dist d = exact_distribution(g, parse_word("[x1,x2]"), 2);
  EXPECT_EQ(d.total, 729u);
  EXPECT_EQ(d.counts[0], 297u);
  EXPECT_EQ(d.probability(0), Rational(11, 27));
  u64 classes = 0;
  // conjugacy classes: |G| * #classes = #commuting pairs
  for (u64 x = 0; x < g.order(); ++x) {
    bool first = true;
    for (u64 y = 0; y < x && first; ++y)
      for (u64 h = 0; h < g.order(); ++h)
        if (g.multiply(g.multiply(g.element_at(h), g.element_at(y)), g.inverse(g.element_at(h))) == g.element_at(x)) {
          first = false;
          break;
        }
    classes += first;
  }
  EXPECT_EQ(d.counts[0], g.order() * classes);
  for (const auto& z : g.derived_elements())
    if (z != g.identity()) EXPECT_EQ(d.probability(g.index_of(z)), Rational(8, 27));
  EXPECT_EQ(d.support_size(), 3u);
}

TEST(ExactDistribution, UnusedVariableScales) {
  Group g = catalog_group("heisenberg:3:1");
  Dist one = exact_distribution(g, parse_word("x1"), 1), two = exact_distribution(g, parse_word("x1"), 2);
  for (u64 i = 0; i < g.order(); ++i) {
    EXPECT_EQ(two.counts[i], 27 * one.counts[i]);
    EXPECT_EQ(two.probability(i), one.probability(i));
  }
  Dist gap = exact_distribution(g, parse_word("x3"), 3);
  EXPECT_EQ(gap.counts[5], 729u);
}

TEST(ExactDistribution, MatchesBruteForceOracle) {
  SplitMix64 rng(31);
  for (const char* name : {"heisenberg:3:1", "extraspecial:3:1:-", "heisenberg:2:2", "product:heisenberg:2:1,cyclic:3"}) {
    Group g = catalog_group(name);
    for (int i = 0; i < 25; ++i) {
      Word w = corpus::random_word(rng, 1 + static_cast<int>(rng.below(2)), 20);
      const int k = std::max(w.rank(), 2);
      auto expected = oracle::brute_force_counts(g, w.with_rank(k), k);
      for (Engine e : {Engine::class2, Engine::direct}) {
        Dist d = exact_distribution(g, w, k, {.engine = e});
        ASSERT_EQ(d.counts, expected) << render_word(w) << " on " << name;
      }
    }
  }
}

TEST(ExactDistribution, EnginesAgreeWithoutCayleyTable) {
  Group g = catalog_group("heisenberg:3:2");
  EXPECT_GT(g.order(), 500u);
  for (const char* text : {"x1^3 [x1,x2]", "x1 x2^2 x1^-1 x2", "[x1,x2]^3", "x1^9"}) {
    Word w = parse_word(text);
    EXPECT_EQ(exact_distribution(g, w, 2, {.engine = Engine::class2}), exact_distribution(g, w, 2, {.engine = Engine::direct})) << text;
  }
  Group big = catalog_group("special9:3");
  EXPECT_EQ(exact_distribution(big, parse_word("x1^3"), 1, {.engine = Engine::class2}), exact_distribution(big, parse_word("x1^3"), 1, {.engine = Engine::direct}));
}

TEST(ExactDistribution, Normalization) {
  SplitMix64 rng(37);
  Group g = catalog_group("extraspecial:3:1:+");
  for (const auto& w : corpus::build(40, 3, 3)) {
    Dist d = exact_distribution(g, w, w.rank());
    u64 sum = 0;
    Rational psum = 0;
    for (u64 i = 0; i < d.counts.size(); ++i) {
      sum += d.counts[i];
      psum += d.probability(i);
      EXPECT_LE(d.probability(i), 1);
    }
    EXPECT_EQ(sum, d.total);
    EXPECT_EQ(psum, 1);
  }
}

TEST(ExactDistribution, PartitionIndependence) {
  Group g = catalog_group("extraspecial:3:1:-");
  for (const auto& w : corpus::build(15, 3, 41)) {
    Dist base = exact_distribution(g, w, 3, {.jobs = 1});
    for (unsigned jobs : {2u, 8u}) EXPECT_EQ(exact_distribution(g, w, 3, {.jobs = jobs}), base) << render_word(w);
  }
}

TEST(ExactDistribution, Budget) {
  Group g = catalog_group("heisenberg:3:1");
  Word w = parse_word("[x1,x2][x2,x3]");
  EXPECT_EQ(required_evaluations(g, w), 19683u);
  try {
    exact_distribution(g, w, 3, {.budget = 1000});
    FAIL() << "no budget error";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.required(), 19683u);
    EXPECT_NE(std::string(e.what()).find("19683"), std::string::npos);
  }
  EXPECT_NO_THROW(exact_distribution(g, w, 3, {.budget = 19683}));
  EXPECT_THROW(exact_distribution(g, w, 2), std::invalid_argument);
}

TEST(SampledDistribution, Deterministic) {
  Group g = catalog_group("extraspecial:3:1:+");
  Word w = parse_word("x1^2 [x1,x2]");
  Dist a = sampled_distribution(g, w, 2, 5000, 99), b = sampled_distribution(g, w, 2, 5000, 99);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.approximate);
  EXPECT_EQ(a.total, 5000u);
  EXPECT_NE(sampled_distribution(g, w, 2, 5000, 100), a);
}

TEST(SampledDistribution, IdentityWordConcentrates) {
  Group g = catalog_group("heisenberg:3:1");
  Dist d = sampled_distribution(g, parse_word("x1"), 1, 10000, 2024);
  EXPECT_TRUE(d.surjective());
  for (u64 i = 0; i < g.order(); ++i) EXPECT_LE(std::abs(static_cast<double>(d.counts[i]) / 10000.0 - 1.0 / 27.0), 0.02);
}

TEST(SampledDistribution, CommutatorLandsInDerived) {
  Group g = catalog_group("special9:3");
  Dist d = sampled_distribution(g, parse_word("[x1,x2]"), 2, 100000, 7);
  for (u64 i = 0; i < d.counts.size(); ++i)
    if (d.counts[i] != 0) EXPECT_TRUE(g.in_derived(g.element_at(i)));
  EXPECT_GT(d.support_size(), 1u);
}

TEST(SameDistribution, Examples) {
  Group g = catalog_group("heisenberg:3:1");
  EXPECT_TRUE(same_distribution(g, parse_word("x1"), parse_word("x1^2")).equal);
  auto r = same_distribution(g, parse_word("x1"), parse_word("x1^3"));
  EXPECT_FALSE(r.equal);
  ASSERT_TRUE(r.first_divergence.has_value());
  EXPECT_EQ(*r.first_divergence, 0u);
  EXPECT_EQ(r.left, Rational(1, 27));
  EXPECT_EQ(r.right, 1);
  EXPECT_TRUE(same_distribution(g, parse_word("x1"), parse_word("x1 x2 x3")).equal);
}

TEST(SameDistribution, NielsenMovesPreserveDistribution) {
  SplitMix64 rng(43);
  Group g = catalog_group("extraspecial:3:1:-");
  const std::vector<Substitution> subs = {Substitution::swap(3, 1, 2), Substitution::cycle(3), Substitution::invert(3, 3),
                                          Substitution::right_multiply(3, 2, 1, 2), Substitution::right_multiply(3, 3, 2, -1)};
  for (int i = 0; i < 20; ++i) {
    Word w = corpus::random_word(rng, 3, 16).with_rank(3);
    for (const auto& s : subs) EXPECT_TRUE(same_distribution(g, w, substitute(w, s)).equal) << render_word(w) << " / " << render_substitution(s);
  }
}

TEST(BoundReport, CommutatorOnExtraspecial) {
  Group g = catalog_group("extraspecial:3:1:+");
  auto b = bound_report(g, parse_word("[x1,x2]"), 2);
  EXPECT_EQ(b.min_prob_on_image, Rational(8, 27));
  EXPECT_EQ(b.improved_bound, Rational(1, 81));
  EXPECT_EQ(b.amit_bound, Rational(1, 27));
  ASSERT_TRUE(b.square_bound.has_value());
  EXPECT_EQ(*b.square_bound, Rational(1, 9));
  EXPECT_TRUE(b.improved_holds);
  EXPECT_TRUE(b.amit_holds_on_image);
  EXPECT_TRUE(*b.square_holds);
  EXPECT_TRUE(b.extraspecial);
  EXPECT_TRUE(b.amit_applicable());
  EXPECT_FALSE(b.literal_improved_holds);
}

TEST(BoundReport, IdentityWordMeetsAmitExactly) {
  for (const char* name : {"heisenberg:3:1", "heisenberg:2:2", "cyclic:12"}) {
    Group g = catalog_group(name);
    auto b = bound_report(g, parse_word("x1"), 1);
    EXPECT_TRUE(b.uniform);
    EXPECT_EQ(b.min_prob_on_image, b.amit_bound);
    EXPECT_TRUE(b.amit_holds_on_image);
    EXPECT_TRUE(b.literal_improved_holds);
  }
}

TEST(BoundReport, ConstantWord) {
  auto b = bound_report(catalog_group("heisenberg:3:1"), parse_word("x1^3"), 1);
  EXPECT_EQ(b.min_prob_on_image, 1);
  EXPECT_TRUE(b.improved_holds);
  EXPECT_TRUE(b.amit_holds_on_image);
  EXPECT_TRUE(bound_report(catalog_group("heisenberg:3:2"), parse_word("x1^3"), 1).power_word);
}

TEST(BoundReport, NoSquareBoundWithoutHypotheses) {
  auto b = bound_report(catalog_group("heisenberg:3:2"), parse_word("x1^3"), 1);
  EXPECT_FALSE(b.gp_in_derived);
  EXPECT_FALSE(b.square_bound.has_value());
}

TEST(KernelBound, CommutatorAtIdentity) {
  Group g = catalog_group("heisenberg:3:1");
  auto kb = kernel_lower_bound(g, {0, 1}, {g.identity(), g.identity()});
  EXPECT_EQ(kb.kernel_odd, 3u);
  EXPECT_EQ(kb.kernel_even, 27u);
  EXPECT_EQ(kb.product, 81u);
  EXPECT_EQ(kb.constructed, 81u);
  EXPECT_EQ(kb.generic, 9);
  ASSERT_TRUE(kb.psi_product.has_value());
  EXPECT_EQ(*kb.psi_generic, 81);
  // Every commuting pair: the psi construction recovers the whole fiber.
  EXPECT_EQ(*kb.psi_constructed, 297u);
  // The bare product of the two witness kernels overshoots it.
  EXPECT_EQ(*kb.psi_product, 729u);
}

TEST(KernelBound, DegenerateArity) {
  Group g = catalog_group("extraspecial:3:1:-");
  auto kb = kernel_lower_bound(g, {3}, {g.noncentral_generator(0)});
  EXPECT_EQ(kb.kernel_even, 1u);
  EXPECT_EQ(kb.product, kb.kernel_odd);
  u64 direct = 0;
  for (const auto& z : g.derived_elements()) direct += g.power(z, 3) == g.identity();
  EXPECT_EQ(kb.kernel_odd, direct);
}

TEST(KernelBound, FiberDominatesKernels) {
  SplitMix64 rng(47);
  for (const char* name : {"extraspecial:3:1:+", "heisenberg:3:1", "extraspecial:3:1:-"}) {
    Group g = catalog_group(name);
    for (const auto& t : std::vector<std::vector<i64>>{{0, 1}, {3, 1}, {1, 1}, {0, 1, 1}, {3, 0, 1}, {0, 3, 1}, {3, 1, 1}}) {
      const int k = static_cast<int>(t.size());
      const Word w = ChainForm{k, 3, 1, t}.word().with_rank(k);
      for (int i = 0; i < 5; ++i) {
        auto witness = random_tuple(g, rng, k);
        auto kb = kernel_lower_bound(g, t, witness);
        const u64 fiber = fiber_size(g, w, evaluate_word(g, w, witness));
        EXPECT_GE(fiber, kb.product) << name;
        EXPECT_GE(fiber, kb.constructed);
        EXPECT_GE(Rational(kb.constructed), kb.generic);
        if (kb.psi_constructed) {
          EXPECT_GE(fiber, *kb.psi_constructed);
          EXPECT_GE(Rational(*kb.psi_constructed), *kb.psi_generic);
        }
      }
    }
  }
}

TEST(KernelMaps, Homomorphisms) {
  SplitMix64 rng(53);
  for (const char* name : {"heisenberg:3:1", "extraspecial:3:1:-", "heisenberg:2:2", "heisenberg:3:2"}) {
    Group g = catalog_group(name);
    const std::vector<i64> t = {3, 1, 2};
    KernelMaps maps(g, t, random_tuple(g, rng, 3));
    auto derived = g.derived_elements();
    auto odd_input = [&] {
      std::vector<Element> y = random_tuple(g, rng, maps.odd_count());
      y[0] = derived[rng.below(derived.size())];
      return y;
    };
    auto pointwise = [&](const std::vector<Element>& u, const std::vector<Element>& v) {
      std::vector<Element> uv;
      for (std::size_t i = 0; i < u.size(); ++i) uv.push_back(g.multiply(u[i], v[i]));
      return uv;
    };
    for (int i = 0; i < 1000; ++i) {
      auto u = odd_input(), v = odd_input();
      ASSERT_EQ(maps.phi_odd(pointwise(u, v)), g.multiply(maps.phi_odd(u), maps.phi_odd(v))) << name;
      auto a = random_tuple(g, rng, maps.even_count()), b = random_tuple(g, rng, maps.even_count());
      ASSERT_EQ(maps.phi_even(pointwise(a, b)), g.multiply(maps.phi_even(a), maps.phi_even(b))) << name;
    }
  }
}

TEST(Classify, Examples) {
  Group g = catalog_group("heisenberg:3:1");
  auto r = classify_surjectivity(g, parse_word("x1 x2"));
  EXPECT_TRUE(r.predicted_surjective);
  EXPECT_TRUE(r.predicted_uniform);
  EXPECT_EQ(r.empirical_uniform, true);
  EXPECT_EQ(r.equivalence_holds(), true);
  EXPECT_EQ(exact_distribution(g, parse_word("x1 x2"), 2).probability(4), Rational(1, 27));

  auto cube = classify_surjectivity(g, parse_word("x1^3"));
  EXPECT_FALSE(cube.predicted_surjective);
  EXPECT_EQ(cube.dividing_primes, (std::vector<u64>{3}));
  EXPECT_EQ(cube.empirical_surjective, false);

  for (const char* name : {"heisenberg:3:1", "extraspecial:3:1:-", "heisenberg:2:2"}) {
    auto c = classify_surjectivity(catalog_group(name), parse_word("[x1,x2]"));
    EXPECT_EQ(c.empirical_surjective, false);
    EXPECT_EQ(c.empirical_uniform, false);
    EXPECT_EQ(c.equivalence_holds(), true);
  }
}

TEST(Classify, CompositeOrder) {
  Group g = catalog_group("product:heisenberg:2:1,cyclic:3");
  EXPECT_EQ(classify_surjectivity(g, parse_word("x1^3")).dividing_primes, (std::vector<u64>{3}));
  EXPECT_EQ(classify_surjectivity(g, parse_word("x1^5")).equivalence_holds(), true);
  EXPECT_THROW(classify_surjectivity(g, parse_word("[x1,x2][x3,x4]"), {.budget = 10}, true), BudgetExceeded);
  EXPECT_FALSE(classify_surjectivity(g, parse_word("[x1,x2][x3,x4]"), {.budget = 10}).empirical_surjective.has_value());
}

TEST(Csv, Format) {
  Group g = catalog_group("heisenberg:3:1");
  std::string csv = to_csv(g, exact_distribution(g, parse_word("[x1,x2]"), 2));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "element,count,probability");
  std::getline(in, line);
  EXPECT_EQ(line, "0 0|0,297,11/27");
  std::getline(in, line);
  EXPECT_EQ(line, "0 0|1,216,8/27");
  std::size_t rows = 2;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 27u);
}

TEST(Certificate, EmpiricalReplayRejectsWrongExponent) {
  auto c = canonicalize(parse_word("x1^3 [x1,x2]"), 3, 1);
  auto v = verify_certificate(c.full_certificate(), catalog_group("heisenberg:3:2"));
  EXPECT_FALSE(v.passed);
}
