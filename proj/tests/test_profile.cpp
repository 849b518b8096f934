#include <gtest/gtest.h>

#include <random>

#include "lscd/profile.hpp"
#include "support/fixtures.hpp"
#include "support/test_util.hpp"

using namespace lscd;
using namespace lscd::testkit;

TEST(BuildProfile, CountsTenseValuesFromTokens) {
  std::string text;
  for (int i = 0; i < 93; ++i) {
    text += conllu_line(1, "went", "go", "VERB", i < 42 ? "Tense=Past" : "Tense=Pres", i % 3 ? "root" : "ccomp");
    text += "\n";
  }
  auto corpus = parse(text);
  TargetLexicon lex({{"go", {}, {}, {}, {}}}, "en");
  auto idx = index_usages(corpus, lex, Period::T1);
  auto p = build_profile(corpus, idx, "go", Period::T1);
  EXPECT_EQ(p.n_usages, 93u);
  ASSERT_NE(p.find_morph("Tense"), nullptr);
  EXPECT_EQ(p.find_morph("Tense")->counts, (std::map<std::string, std::uint64_t>{{"Past", 42}, {"Pres", 51}}));
  EXPECT_EQ(p.synt.total(), 93u);
  EXPECT_NO_THROW(p.validate());
}

TEST(BuildProfile, ZeroOccurrencesGivesEmptyProfile) {
  auto corpus = parse(conllu_line(1, "a", "a", "DET", "_", "det") + "\n");
  TargetLexicon lex({{"go", {}, {}, {}, {}}}, "en");
  auto idx = index_usages(corpus, lex, Period::T2);
  auto p = build_profile(corpus, idx, "go", Period::T2);
  EXPECT_EQ(p.n_usages, 0u);
  EXPECT_TRUE(p.morph.empty());
  EXPECT_TRUE(p.synt.counts.empty());
}

TEST(BuildProfile, RejectsIndexForOtherPeriod) {
  UsageIndex idx;
  idx.period = Period::T1;
  EXPECT_THROW(build_profile({}, idx, "go", Period::T2), ContractError);
}

TEST(ProfileAccumulator, MatchesBuildProfile) {
  std::string text;
  std::mt19937_64 rng(3);
  for (int s = 0; s < 40; ++s) {
    for (int t = 1; t <= 5; ++t) {
      bool hit = rng() % 3 == 0;
      text += conllu_line(t, hit ? "bags" : "x", hit ? "bag" : "x", "NOUN", rng() % 2 ? "Number=Plur" : "Number=Sing|Case=Acc",
                          rng() % 2 ? "obj" : "nsubj");
    }
    text += "\n";
  }
  auto corpus = parse(text);
  TargetLexicon lex({{"bag", {}, {}, {}, {}}}, "en");
  ProfileAccumulator acc(lex, Period::T1);
  for (const auto& s : corpus) acc.add(s);
  EXPECT_EQ(acc.profile("bag"), build_profile(corpus, index_usages(corpus, lex), "bag", Period::T1));
}

TEST(ProfileJson, InconsistentCategoryCountsRejected) {
  // VerbForm values sum to 102 over 93 usages.
  nlohmann::json j = {{"lemma", "go"},
                      {"period", "T1"},
                      {"n_usages", 93},
                      {"morph", {{"Tense", {{"Past", 42}, {"Pres", 51}}}, {"VerbForm", {{"Part", 68}, {"Fin", 25}, {"Inf", 9}}}}},
                      {"synt", {{"root", 93}}}};
  EXPECT_THROW(profile_from_json(j), ContractError);
  j["morph"].erase("VerbForm");
  EXPECT_NO_THROW(profile_from_json(j));
}

TEST(ProfileJson, RoundTrips) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    auto p = random_profile(rng, i % 2 ? Period::T1 : Period::T2);
    EXPECT_EQ(profile_from_json(to_json(p)), p);
  }
}

TEST(ProfileJson, SyntaxSumMustEqualUsages) {
  nlohmann::json j = {{"lemma", "go"}, {"period", "T2"}, {"n_usages", 5}, {"morph", nlohmann::json::object()},
                      {"synt", {{"root", 4}}}};
  EXPECT_THROW(profile_from_json(j), ContractError);
}

TEST(CategoryDistance, IdenticalIsZero) {
  auto a = cv("Tense", {{"Past", 42}, {"Pres", 51}});
  EXPECT_EQ(*category_distance(a, a), 0.0);
}

TEST(CategoryDistance, OrthogonalIsOne) {
  EXPECT_EQ(*category_distance(cv("Tense", {{"Past", 1}}), cv("Tense", {{"Pres", 1}})), 1.0);
}

TEST(CategoryDistance, TreeNumberPercentagesNearlyIdentical) {
  std::map<std::string, double> t1{{"Sing", 43.73}, {"Plur", 56.27}};
  std::map<std::string, double> t2{{"Sing", 43.67}, {"Plur", 56.33}};
  auto d = category_distance(t1, t2);
  ASSERT_TRUE(d);
  EXPECT_LT(*d, 1e-5);
  // numpy: 1 - a.b/(|a||b|) = 6.976714467255007e-07
  EXPECT_NEAR(*d, 6.976714467255007e-07, 1e-12);
  EXPECT_LT(*category_distance(cv("Number", {{"Sing", 4373}, {"Plur", 5627}}), cv("Number", {{"Sing", 4367}, {"Plur", 5633}})),
            1e-5);
}

TEST(CategoryDistance, AllZeroIsAbsent) {
  EXPECT_FALSE(category_distance(cv("Tense", {}), cv("Tense", {{"Past", 3}})));
  EXPECT_FALSE(category_distance(cv("Tense", {{"Past", 0}}), cv("Tense", {{"Past", 3}})));
}

TEST(ScoreProfiles, IdenticalProfilesScoreZero) {
  auto p1 = make_profile("go", Period::T1, {cv("Tense", {{"Past", 42}, {"Pres", 51}})}, {{"root", 60}, {"ccomp", 33}});
  auto p2 = p1;
  p2.period = Period::T2;
  for (auto k : {ProfileKind::Morph, ProfileKind::Synt, ProfileKind::MorphSynt}) EXPECT_EQ(*score_profiles(p1, p2, k), 0.0);
}

TEST(ScoreProfiles, TenseFlip) {
  auto p1 = make_profile("go", Period::T1, {cv("Tense", {{"Past", 10}})}, {{"root", 10}});
  auto p2 = make_profile("go", Period::T2, {cv("Tense", {{"Pres", 10}})}, {{"root", 10}});
  EXPECT_EQ(*score_profiles(p1, p2, ProfileKind::Morph), 1.0);
  EXPECT_EQ(*score_profiles(p1, p2, ProfileKind::Synt), 0.0);
  EXPECT_EQ(*score_profiles(p1, p2, ProfileKind::MorphSynt), 1.0);
}

TEST(ScoreProfiles, OnlySyntaxShared) {
  auto p1 = make_profile("go", Period::T1, {cv("Tense", {{"Past", 10}})}, {{"root", 8}, {"obj", 2}});
  auto p2 = make_profile("go", Period::T2, {cv("Case", {{"Nom", 10}})}, {{"root", 2}, {"obj", 8}});
  auto morph = score_profiles(p1, p2, ProfileKind::Morph);
  EXPECT_FALSE(morph.has_value());
  EXPECT_FALSE(morph.reason.empty());
  EXPECT_EQ(*score_profiles(p1, p2, ProfileKind::MorphSynt), *score_profiles(p1, p2, ProfileKind::Synt));
}

TEST(ScoreProfiles, ZeroUsagePeriodIsMissingNotZero) {
  auto p1 = make_profile("go", Period::T1, {cv("Tense", {{"Past", 10}})}, {{"root", 10}});
  GrammaticalProfile p2;
  p2.lemma = "go";
  p2.period = Period::T2;
  for (auto k : {ProfileKind::Morph, ProfileKind::Synt, ProfileKind::MorphSynt})
    EXPECT_FALSE(score_profiles(p1, p2, k).has_value());
}

TEST(ScoreProfiles, DifferentLemmasRejected) {
  auto p1 = make_profile("go", Period::T1, {}, {{"root", 1}});
  auto p2 = make_profile("come", Period::T2, {}, {{"root", 1}});
  EXPECT_THROW(score_profiles(p1, p2, ProfileKind::Synt), ContractError);
}

TEST(ScoreProfiles, MinFrequencyDropsRareCategories) {
  auto p1 = make_profile("go", Period::T1, {cv("Tense", {{"Past", 50}}), cv("Mood", {{"Imp", 1}})}, {{"root", 50}});
  auto p2 = make_profile("go", Period::T2, {cv("Tense", {{"Past", 50}}), cv("Mood", {{"Ind", 1}})}, {{"root", 50}});
  EXPECT_EQ(*score_profiles(p1, p2, ProfileKind::Morph), 1.0);
  EXPECT_EQ(*score_profiles(p1, p2, ProfileKind::Morph, {5}), 0.0);
}

TEST(ScoreProfiles, PropertiesOnRandomProfiles) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    auto p1 = random_profile(rng, Period::T1);
    auto p2 = random_profile(rng, Period::T2);
    const std::uint64_t k = 1 + rng() % 7;
    auto scaled = p1;
    for (auto& c : scaled.morph)
      for (auto& [v, n] : c.counts) n *= k;
    for (auto& [v, n] : scaled.synt.counts) n *= k;
    scaled.n_usages *= k;

    for (auto kind : {ProfileKind::Morph, ProfileKind::Synt, ProfileKind::MorphSynt}) {
      auto s = score_profiles(p1, p2, kind);
      auto r = score_profiles(p2, p1, kind);
      auto sc = score_profiles(scaled, p2, kind);
      ASSERT_EQ(s.has_value(), r.has_value());
      ASSERT_EQ(s.has_value(), sc.has_value());
      if (!s) continue;
      EXPECT_EQ(*s, *r);
      EXPECT_NEAR(*s, *sc, 1e-12);
      EXPECT_GE(*s, 0.0);
      EXPECT_LE(*s, 1.0);
    }
    auto morph = score_profiles(p1, p2, ProfileKind::Morph);
    auto synt = score_profiles(p1, p2, ProfileKind::Synt);
    auto ms = score_profiles(p1, p2, ProfileKind::MorphSynt);
    EXPECT_EQ(*ms, std::max(morph.value.value_or(0.0), *synt));
  }
}
