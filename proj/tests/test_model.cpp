//------------------------------------------------------------------------------
//
//   Copyright 2026 The flexclinch authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "flexclinch/model.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "flexclinch/errors.hpp"

namespace flexclinch {
namespace {

RewardParams standard_reward()
{
  RewardParams reward;
  reward.a = 3.0;
  reward.b = 0.02;
  reward.L = 75.0;
  return reward;
}

Instance two_user_instance()
{
  User u1{"u1", 0.1, {15.0}, 37.5};
  User u2{"u2", 0.1, {15.0}, 37.5};
  return make_instance({u1, u2}, 3.0, 0.02);
}

TEST(RewardCurve, TotalRewardMatchesHandValues)
{
  RewardParams reward = standard_reward();
  EXPECT_DOUBLE_EQ(reward_total(0.0, reward), 0.0);
  EXPECT_DOUBLE_EQ(reward_total(25.0, reward), 62.5);
  EXPECT_DOUBLE_EQ(reward_total(75.0, reward), 112.5);
}

TEST(RewardCurve, TotalRewardRejectsOutOfDomain)
{
  RewardParams reward = standard_reward();
  EXPECT_THROW(reward_total(-1.0, reward), InputError);
  EXPECT_THROW(reward_total(75.1, reward), InputError);
}

TEST(RewardCurve, MarginalRewardIsLinear)
{
  RewardParams reward = standard_reward();
  EXPECT_DOUBLE_EQ(marginal_reward(0.0, reward), 3.0);
  EXPECT_DOUBLE_EQ(marginal_reward(25.0, reward), 2.0);
  EXPECT_DOUBLE_EQ(marginal_reward(75.0, reward), 0.0);
}

TEST(RewardCurve, DesiredReductionInvertsTheMarginal)
{
  RewardParams reward = standard_reward();
  EXPECT_DOUBLE_EQ(desired_reduction(2.0, reward), 25.0);
  EXPECT_DOUBLE_EQ(desired_reduction(0.0, reward), 75.0);
  EXPECT_DOUBLE_EQ(desired_reduction(3.0, reward), 0.0);
  // Above the intercept the utility wants nothing.
  EXPECT_DOUBLE_EQ(desired_reduction(5.0, reward), 0.0);
}

TEST(RewardCurve, DesiredReductionClampsAtTheDomainEnd)
{
  RewardParams reward = standard_reward();
  reward.L = 20.0;  // tighter fleet than the curve could absorb
  EXPECT_DOUBLE_EQ(desired_reduction(0.0, reward), 20.0);
}

TEST(RewardCurve, FlatCurveHasNoDemandSchedule)
{
  RewardParams flat;
  flat.a = 3.0;
  flat.b = 0.0;
  flat.L = 75.0;
  EXPECT_THROW(desired_reduction(1.0, flat), DegenerateDemandError);
  EXPECT_THROW(desired_reduction(-0.5, standard_reward()), InputError);
}

TEST(Discomfort, QuadraticValuesMatchHandValues)
{
  QuadraticDiscomfort model(0.1);
  EXPECT_DOUBLE_EQ(discomfort(10.0, model), 10.0);
  EXPECT_DOUBLE_EQ(discomfort(25.0, model), 62.5);
  EXPECT_DOUBLE_EQ(discomfort(0.0, model), 0.0);
}

TEST(Discomfort, RejectsNegativeReductionAndCoefficient)
{
  QuadraticDiscomfort model(0.1);
  EXPECT_THROW(discomfort(-0.1, model), InputError);
  EXPECT_THROW(QuadraticDiscomfort(0.0), InputError);
  EXPECT_THROW(QuadraticDiscomfort(-2.0), InputError);
}

TEST(Discomfort, QuadraticSurplusArgmaxHasClosedForm)
{
  QuadraticDiscomfort model(0.1);
  EXPECT_DOUBLE_EQ(model.argmax_surplus(2.0, 15.0), 10.0);
  EXPECT_DOUBLE_EQ(model.argmax_surplus(2.0, 8.0), 8.0);  // cap binds
  EXPECT_DOUBLE_EQ(model.argmax_surplus(0.0, 15.0), 0.0);
}

// A quartic model exercises the search-based default argmax.
class QuarticDiscomfort final : public DiscomfortModel
{
public:
  Money value(Energy q) const override { return q * q * q * q; }
};

TEST(Discomfort, DefaultArgmaxHandlesModelsWithoutClosedForms)
{
  QuarticDiscomfort model;
  // argmax of 4q - q^4 is (4/4)^(1/3) = 1. Value-based search can only
  // localize a flat top to about sqrt(machine eps) of the bracket.
  EXPECT_NEAR(model.argmax_surplus(4.0, 10.0), 1.0, 1e-6);
  EXPECT_NEAR(model.argmax_surplus(4.0, 0.5), 0.5, 1e-9);  // cap binds
}

TEST(FeasibleSetTest, ClampAndContains)
{
  FeasibleSet feasible{10.0};
  EXPECT_TRUE(feasible.contains(0.0));
  EXPECT_TRUE(feasible.contains(10.0));
  EXPECT_FALSE(feasible.contains(-0.1));
  EXPECT_FALSE(feasible.contains(10.1));
  EXPECT_DOUBLE_EQ(feasible.clamp(-3.0), 0.0);
  EXPECT_DOUBLE_EQ(feasible.clamp(4.0), 4.0);
  EXPECT_DOUBLE_EQ(feasible.clamp(12.0), 10.0);
}

TEST(InstanceBuilder, DerivesDomainFromBaselines)
{
  Instance instance = two_user_instance();
  EXPECT_DOUBLE_EQ(instance.reward.L, 75.0);
  EXPECT_EQ(instance.users.size(), 2u);
  EXPECT_TRUE(validate_instance(instance).ok());
}

TEST(Validation, AcceptsTheShippedShape)
{
  Instance instance = two_user_instance();
  EXPECT_NO_THROW(require_valid(instance));
}

TEST(Validation, FlagsDuplicateIds)
{
  User u1{"dup", 0.1, {15.0}, 37.5};
  User u2{"dup", 0.1, {15.0}, 37.5};
  Instance instance = make_instance({u1, u2}, 3.0, 0.02);
  ValidationReport report = validate_instance(instance);
  ASSERT_FALSE(report.ok());
  EXPECT_NE(report.to_string().find("duplicate"), std::string::npos);
}

TEST(Validation, FlagsBadUserParameters)
{
  {
    User u{"u1", 0.0, {15.0}, 37.5};  // omega must be positive
    EXPECT_FALSE(validate_instance(make_instance({u}, 3.0, 0.02)).ok());
  }
  {
    User u{"u1", 0.1, {0.0}, 37.5};  // capacity must be positive
    EXPECT_FALSE(validate_instance(make_instance({u}, 3.0, 0.02)).ok());
  }
  {
    User u{"u1", 0.1, {40.0}, 37.5};  // capacity beyond the baseline
    EXPECT_FALSE(validate_instance(make_instance({u}, 3.0, 0.02)).ok());
  }
}

TEST(Validation, FlagsRewardProblems)
{
  User u1{"u1", 0.1, {15.0}, 37.5};
  User u2{"u2", 0.1, {15.0}, 37.5};

  EXPECT_FALSE(validate_instance(make_instance({u1, u2}, 0.0, 0.02)).ok());
  EXPECT_FALSE(validate_instance(make_instance({u1, u2}, 3.0, -0.01)).ok());
  // a < 2*b*L: reward would decrease inside the feasible range.
  EXPECT_FALSE(validate_instance(make_instance({u1, u2}, 2.0, 0.02)).ok());

  Instance drifted = make_instance({u1, u2}, 3.0, 0.02);
  drifted.reward.L = 60.0;  // no longer the summed baselines
  EXPECT_FALSE(validate_instance(drifted).ok());
}

TEST(Validation, FlagsEmptyFleetAndBadSlot)
{
  Instance empty = make_instance({}, 3.0, 0.02);
  EXPECT_FALSE(validate_instance(empty).ok());

  Instance instance = two_user_instance();
  instance.slot_duration_hours = 0.0;
  EXPECT_FALSE(validate_instance(instance).ok());
  EXPECT_THROW(require_valid(instance), InputError);
}

}  // namespace
}  // namespace flexclinch
