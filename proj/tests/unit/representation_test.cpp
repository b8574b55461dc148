#include <gtest/gtest.h>

#include <algorithm>

#include "amber/representation.hpp"
#include "amber/serialization.hpp"
#include "amber_test.hpp"

namespace amber {
namespace {

Scheme emotions(SchemeConstraint c) {
  return Scheme{"emotions",
                {make_categorical("anger"), make_categorical("happy"), make_categorical("excited"),
                 make_categorical("sadness")},
                c};
}

EmotionRepresentation point_labels(const Scheme& s, const std::vector<std::string>& present) {
  EmotionRepresentation rep{s.name, {}};
  for (const auto& d : s.descriptors) {
    const bool on = std::find(present.begin(), present.end(), d.name) != present.end();
    rep.per_descriptor.emplace(d.name, from_point_label(d, Element::level(on ? kPresent : kAbsent)));
  }
  return rep;
}

TEST(SchemeConstraints, SinglePresentIsValid) {
  const auto s = emotions({ConstraintType::MutuallyExclusive});
  const auto r = check_scheme_constraints(point_labels(s, {"happy"}), s);
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.warnings.empty());
}

TEST(SchemeConstraints, TwoPresentViolatesExclusivity) {
  const auto s = emotions({ConstraintType::MutuallyExclusive});
  EXPECT_FALSE(check_scheme_constraints(point_labels(s, {"happy", "anger"}), s).ok());
}

TEST(SchemeConstraints, NeutralAcceptedWithWarning) {
  const auto s = emotions({ConstraintType::MutuallyExclusive});
  const auto r = check_scheme_constraints(point_labels(s, {}), s);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.warnings.size(), 1U);
}

TEST(SchemeConstraints, BlendedValid) {
  const auto s = emotions({ConstraintType::Blended, 0.4, 0.6});
  EmotionRepresentation rep{s.name, {}};
  rep.per_descriptor.emplace("happy", presence(s.at("happy"), 0.6));
  rep.per_descriptor.emplace("excited", presence(s.at("excited"), 0.4));
  rep.per_descriptor.emplace("anger", presence(s.at("anger"), 0.0));
  rep.per_descriptor.emplace("sadness", presence(s.at("sadness"), 0.0));
  EXPECT_TRUE(check_scheme_constraints(rep, s).ok());
}

TEST(SchemeConstraints, BlendedViolationsListed) {
  const auto s = emotions({ConstraintType::Blended, 0.4, 0.6});
  EmotionRepresentation rep{s.name, {}};
  rep.per_descriptor.emplace("happy", presence(s.at("happy"), 0.5));
  rep.per_descriptor.emplace("excited", presence(s.at("excited"), 0.3));
  rep.per_descriptor.emplace("anger", presence(s.at("anger"), 0.2));
  rep.per_descriptor.emplace("sadness", presence(s.at("sadness"), 0.0));
  const auto r = check_scheme_constraints(rep, s);
  // three weights outside {p, q} and three nonzero categories; the sum is 1
  EXPECT_EQ(r.violations.size(), 4U);
}

TEST(SchemeConstraints, TimeVaryingLabelViolatesConstancy) {
  const auto s = emotions({ConstraintType::MutuallyExclusive});
  auto rep = point_labels(s, {"happy"});
  for (auto& [name, entry] : rep.per_descriptor) {
    const auto xi = std::get<AmbiguityFunction>(entry);
    entry = TimeVaryingAmbiguity{{0.0, 1.0}, {xi, xi}};
  }
  EXPECT_TRUE(check_scheme_constraints(rep, s).ok());
  std::get<TimeVaryingAmbiguity>(rep.per_descriptor.at("anger")).functions[1] =
      from_point_label(s.at("anger"), Element::level(kPresent));
  std::get<TimeVaryingAmbiguity>(rep.per_descriptor.at("happy")).functions[1] =
      from_point_label(s.at("happy"), Element::level(kAbsent));
  const auto r = check_scheme_constraints(rep, s);
  EXPECT_EQ(r.violations.size(), 2U);
}

TEST(SchemeConstraints, DescriptorSetMismatch) {
  const auto s = emotions({ConstraintType::MutuallyExclusive});
  auto rep = point_labels(s, {"happy"});
  rep.per_descriptor.erase("sadness");
  EXPECT_AMBER_ERROR((void)check_scheme_constraints(rep, s), ErrorCode::SchemeMismatch);
}

TEST(SchemeConstraints, MonotoneUnderAddedViolations) {
  const auto s = emotions({ConstraintType::MutuallyExclusive});
  auto rep = point_labels(s, {"happy", "anger"});
  const auto before = check_scheme_constraints(rep, s).violations.size();
  rep.per_descriptor.at("sadness") = from_point_label(s.at("sadness"), Element::level(kPresent));
  EXPECT_GE(check_scheme_constraints(rep, s).violations.size(), before);
  rep.per_descriptor.at("excited") = presence(s.at("excited"), 0.5);
  EXPECT_GE(check_scheme_constraints(rep, s).violations.size(), before);
}

TEST(MakeBlended, MajorAndMinor) {
  const auto s = emotions({ConstraintType::Blended, 0.4, 0.6});
  const auto rep = make_blended("anger", "sadness", 0.6, 0.4, s);
  EXPECT_EQ(presence_weight(std::get<AmbiguityFunction>(rep.per_descriptor.at("anger")), s.at("anger")), 0.6);
  EXPECT_EQ(presence_weight(std::get<AmbiguityFunction>(rep.per_descriptor.at("sadness")), s.at("sadness")), 0.4);
  EXPECT_EQ(presence_weight(std::get<AmbiguityFunction>(rep.per_descriptor.at("happy")), s.at("happy")), 0.0);
  EXPECT_TRUE(check_scheme_constraints(rep, s).ok());
}

TEST(MakeBlended, RejectsBadInput) {
  const auto s = emotions({ConstraintType::Blended, 0.4, 0.6});
  EXPECT_AMBER_ERROR(make_blended("anger", "anger", 0.6, 0.4, s), ErrorCode::MajorEqualsMinor);
  EXPECT_AMBER_ERROR(make_blended("anger", "fear", 0.6, 0.4, s), ErrorCode::UnknownDescriptor);
  EXPECT_AMBER_ERROR(make_blended("anger", "sadness", 0.4, 0.6, s), ErrorCode::InvalidWeights);
  EXPECT_AMBER_ERROR(make_blended("anger", "sadness", 0.7, 0.4, s), ErrorCode::InvalidWeights);
  EXPECT_AMBER_ERROR(make_blended("anger", "sadness", 0.5, 0.5, s), ErrorCode::InvalidWeights);
}

TEST(SingleValued, PolicyExamples) {
  const Scheme s{"mixed", {make_numerical("valence"), make_ordinal("ab", {"A", "B"})}, {}};
  EmotionRepresentation rep{s.name, {}};
  rep.per_descriptor.emplace("valence", from_point_label(s.at("valence"), Element::value(0.3)));
  rep.per_descriptor.emplace(
      "ab", AmbiguityFunction{FiniteSupport{{{Element::level("A"), 0.7}, {Element::level("B"), 0.3}}}, "ab"});
  const auto mode = to_single_valued(rep, s, SingleValuePolicy::Mode);
  EXPECT_EQ(mode.values.at("valence").front(), Element::value(0.3));
  EXPECT_EQ(mode.values.at("ab").front(), Element::level("A"));
  EXPECT_AMBER_ERROR(to_single_valued(rep, s, SingleValuePolicy::Mean), ErrorCode::PolicyUnsupported);

  const Scheme numeric{"numeric", {make_numerical("valence")}, {}};
  EmotionRepresentation g{numeric.name, {{"valence", AmbiguityFunction{Gaussian{0.2, 0.1}, "valence"}}}};
  EXPECT_DOUBLE_EQ(to_single_valued(g, numeric, SingleValuePolicy::Mean).values.at("valence").front().as_value(), 0.2);
  g.per_descriptor.at("valence") = from_point_label(numeric.at("valence"), Element::value(0.3));
  EXPECT_EQ(to_single_valued(g, numeric, SingleValuePolicy::Mean).values.at("valence").front(), Element::value(0.3));
}

TEST(SingleValued, FiniteSupportMeanUsesMappedValues) {
  const Scheme s{"n", {make_numerical("rating", 0.0, 10.0, AffineMap{-1.0, 1.0})}, {}};
  EmotionRepresentation rep{
      s.name,
      {{"rating", AmbiguityFunction{FiniteSupport{{{Element::value(2.0), 1.0}, {Element::value(8.0), 3.0}}}, "rating"}}}};
  EXPECT_DOUBLE_EQ(to_single_valued(rep, s, SingleValuePolicy::Mean).values.at("rating").front().as_value(), 6.5);
}

TEST(Centroids, ArithmeticMeanWithAssumptions) {
  const Scheme s{"va",
                 {make_numerical("valence"), make_numerical("arousal"), make_categorical("happy"),
                  make_categorical("sad")},
                 {}};
  const auto r = categorical_centroids(
      {{"happy", {0.5, 0.5}}, {"happy", {0.7, 0.3}}, {"sad", {-0.4, -0.2}}, {"sad", {0.4, 0.2}}}, s);
  EXPECT_DOUBLE_EQ(r.centroids.at("happy")[0], 0.6);
  EXPECT_DOUBLE_EQ(r.centroids.at("happy")[1], 0.4);
  EXPECT_EQ(r.centroids.at("sad"), (std::vector<double>{0.0, 0.0}));
  EXPECT_NE(std::find(r.assumptions.begin(), r.assumptions.end(), kOrthogonalAxesNote), r.assumptions.end());

  const auto single = categorical_centroids({{"happy", {0.1, 0.9}}, {"sad", {-0.3, 0.2}}}, s);
  EXPECT_EQ(single.centroids.at("sad"), (std::vector<double>{-0.3, 0.2}));

  EXPECT_AMBER_ERROR(categorical_centroids({{"happy", {0.1, 0.9}}}, s), ErrorCode::EmptyCategory);
}

TEST(Serialization, RepresentationRoundTrip) {
  const auto s = emotions({ConstraintType::Blended, 0.4, 0.6});
  const auto rep = make_blended("excited", "happy", 0.6, 0.4, s);
  const auto doc = parse_representation(representation_to_json(rep, &s));
  EXPECT_EQ(doc.representation, rep);
  ASSERT_TRUE(doc.scheme.has_value());
  EXPECT_EQ(*doc.scheme, s);

  const Scheme n{"n", {make_numerical("valence")}, {}};
  EmotionRepresentation series{
      "n",
      {{"valence", TimeVaryingAmbiguity{{0.0, 0.04, 0.08},
                                        {AmbiguityFunction{Gaussian{0.1, 0.2}, "valence"},
                                         AmbiguityFunction{GaussianMixture{{{0.5, -0.3, 0.1}, {0.5, 0.3, 0.1}}}, "valence"},
                                         from_point_label(n.at("valence"), Element::value(-0.7))}}}}};
  EXPECT_EQ(parse_representation(representation_to_json(series)).representation, series);
}

}  // namespace
}  // namespace amber
