#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ctm/complexity.hpp"
#include "ctm/enumeration.hpp"
#include "oracle/naive_tm.hpp"

namespace ctm {
namespace {

const Distribution& full_d2() {
  static const Distribution d = enumerate_exhaustive(2);
  return d;
}

const Distribution& full_d3() {
  static const Distribution d = enumerate_exhaustive(3);
  return d;
}

TEST(EstimatedComplexity, MostFrequentStringIsSimplest) {
  const auto table = make_complexity_table(full_d2());
  const std::string top = sorted_rows(full_d2()).front().first;
  for (const auto& [s, k] : table.entries) EXPECT_GE(k, estimated_complexity(top, full_d2()));
}

TEST(EstimatedComplexity, SingleSymbolsBeatAlternation) {
  EXPECT_LT(estimated_complexity("0", full_d3()), estimated_complexity("010", full_d3()));
}

TEST(EstimatedComplexity, ComplementInvariantOnThreeStates) {
  for (const auto& [s, c] : full_d3().counts)
    EXPECT_EQ(estimated_complexity(s, full_d3()), estimated_complexity(complement(s), full_d3())) << s;
}

TEST(EstimatedComplexity, StrictlyMonotoneInFrequency) {
  const auto table = make_complexity_table(full_d3());
  for (std::size_t i = 1; i < table.entries.size(); ++i) {
    const auto& [a, ka] = table.entries[i - 1];
    const auto& [b, kb] = table.entries[i];
    EXPECT_GT(ka, 0.0);
    if (full_d3().counts.at(a) > full_d3().counts.at(b)) EXPECT_LT(ka, kb);
    else EXPECT_EQ(ka, kb);
  }
}

TEST(EstimatedComplexity, UnseenStringIsNotObserved) {
  const std::string forty(40, '1');
  try {
    estimated_complexity(forty, full_d3());
    FAIL();
  } catch (const NotObserved& e) {
    EXPECT_EQ(e.bitstring, forty);
  }
  EXPECT_THROW(algorithmic_probability(forty, full_d3()), NotObserved);
}

TEST(AlgorithmicProbability, SumsToOne) {
  for (const Distribution* d : {&full_d2(), &full_d3()}) {
    double total = 0.0;
    for (const auto& [s, c] : d->counts) total += algorithmic_probability(s, *d);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(AlgorithmicProbability, SymbolsAreEquallyLikely) {
  EXPECT_EQ(algorithmic_probability("0", full_d2()), algorithmic_probability("1", full_d2()));
}

TEST(AlgorithmicProbability, MatchesNaiveSimulatorFrequencies) {
  const auto naive = oracle::naive_distribution(2, 6);
  std::uint64_t total = 0;
  for (const auto& [s, c] : naive) total += c;
  for (const auto& [s, c] : naive)
    EXPECT_DOUBLE_EQ(algorithmic_probability(s, full_d2()), static_cast<double>(c) / static_cast<double>(total)) << s;
}

TEST(AlgorithmicProbability, InverseOfComplexity) {
  for (const auto& [s, c] : full_d3().counts) {
    const double k = estimated_complexity(s, full_d3());
    const double p = algorithmic_probability(s, full_d3());
    EXPECT_NEAR(-std::log2(p), k, 4 * std::numeric_limits<double>::epsilon() * k) << s;
  }
}

TEST(ComplexityTable, ExportFormat) {
  const std::string text = serialize_complexity_table(make_complexity_table(full_d2()));
  EXPECT_EQ(text.rfind("# ctm-complexity\n", 0), 0u);
  EXPECT_NE(text.find("# n=2\n"), std::string::npos);
  EXPECT_NE(text.find("# cutoff=6\n"), std::string::npos);
  // 19568 / 6912 -> log2 = 1.501279...
  const double k0 = std::log2(19568.0 / 6912.0);
  EXPECT_NE(text.find("\n0\t" + format_fixed(k0, 6) + "\n"), std::string::npos);
}

// --- classes and the randomness model --------------------------------------------

TEST(Classes, SixteenComplementPairsInTableOrder) {
  const auto classes = make_classes();
  ASSERT_EQ(classes.size(), 16u);
  EXPECT_EQ(classes.front().representative, "00000");
  EXPECT_EQ(classes[6].representative, "00110");
  EXPECT_EQ(classes.back().representative, "01111");
  std::set<std::string> covered;
  for (const auto& c : classes) {
    EXPECT_EQ(c.representative[0], '0');
    EXPECT_EQ(c.members[1], complement(c.members[0]));
    covered.insert(c.members.begin(), c.members.end());
  }
  EXPECT_EQ(covered.size(), 32u);
}

TEST(Classes, ClassOfPicksTheZeroLeadingMember) {
  EXPECT_EQ(class_of("11001").representative, "00110");
  EXPECT_EQ(class_of("10000").representative, "01111");
  EXPECT_EQ(class_of("01111").representative, "01111");
  EXPECT_THROW(class_of("0101"), ValidationError);
}

std::map<std::string, double> uniform_machine_likelihood() {
  std::map<std::string, double> m;
  for (const auto& s : all_bitstrings(5)) m[s] = 1.0 / 32.0;
  return m;
}

TEST(PRandom, SymmetricLikelihoodsGiveOneHalf) {
  const RandomnessModel model = make_randomness_model(uniform_machine_likelihood(), 0.5);
  for (const auto& c : make_classes()) EXPECT_DOUBLE_EQ(p_random(c, model), 0.5);
}

TEST(PRandom, DecreasesAsMachineLikelihoodGrows) {
  auto lik = uniform_machine_likelihood();
  const AggregateClass c = class_of("01010");
  double prev = 1.0;
  for (double v : {0.001, 0.01, 0.03, 0.1, 0.3}) {
    lik["01010"] = v;
    const double p = p_random(c, make_randomness_model(lik, 0.5));
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(PRandom, MissingMemberIsNotObserved) {
  auto lik = uniform_machine_likelihood();
  lik.erase("10101");
  EXPECT_THROW(p_random(class_of("01010"), make_randomness_model(lik, 0.5)), NotObserved);
}

const Distribution& sampled_d4() {
  static const Distribution d = enumerate_sampled(4, 0, 2'000'000, 42);
  return d;
}

TEST(RandomnessModel, LengthFiveLikelihoodsAreNormalized) {
  const RandomnessModel m = make_randomness_model(sampled_d4());
  ASSERT_EQ(m.likelihood_machine.size(), 32u);
  double sr = 0.0, sm = 0.0;
  for (const auto& [s, v] : m.likelihood_random) sr += v;
  for (const auto& [s, v] : m.likelihood_machine) sm += v;
  EXPECT_NEAR(sr, 1.0, 1e-12);
  EXPECT_NEAR(sm, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.prior_random + m.prior_machine, 1.0);
  EXPECT_THROW(make_randomness_model(sampled_d4(), 1.0), ValidationError);
}

TEST(RandomnessModel, PosteriorsAreProperAndComplementInvariant) {
  const RandomnessModel m = make_randomness_model(sampled_d4());
  for (const auto& s : all_bitstrings(5)) {
    const double p = p_random(class_of(s), m);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
    EXPECT_EQ(p, p_random(class_of(complement(s)), m));
  }
}

TEST(RandomnessModel, RankingFollowsClassComplexity) {
  const RandomnessModel m = make_randomness_model(sampled_d4());
  const auto classes = make_classes();
  for (const auto& a : classes) {
    for (const auto& b : classes) {
      const double ka = -std::log2(class_likelihood(a, m.likelihood_machine));
      const double kb = -std::log2(class_likelihood(b, m.likelihood_machine));
      if (ka > kb) EXPECT_GT(p_random(a, m), p_random(b, m));
    }
  }
}

TEST(RandomnessModel, AllLengthsSwitchUsesRawFrequency) {
  const RandomnessModel m = make_randomness_model(sampled_d4(), 0.5, MachineLikelihood::AllLengths);
  EXPECT_DOUBLE_EQ(m.likelihood_machine.at("00000"), sampled_d4().frequency("00000"));
}

}  // namespace
}  // namespace ctm
