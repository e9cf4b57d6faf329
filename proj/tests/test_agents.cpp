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

#include "flexclinch/agents.hpp"

#include <gtest/gtest.h>

#include <memory>

#include "flexclinch/errors.hpp"

namespace flexclinch {
namespace {

Instance two_user_instance()
{
  User u1{"u1", 0.1, {15.0}, 37.5};
  User u2{"u2", 0.1, {15.0}, 37.5};
  return make_instance({u1, u2}, 3.0, 0.02);
}

TEST(BestResponse, InteriorAndCapped)
{
  QuadraticDiscomfort model(0.1);
  EXPECT_DOUBLE_EQ(best_response(2.0, model, {15.0}), 10.0);
  EXPECT_DOUBLE_EQ(best_response(2.0, model, {8.0}), 8.0);
  EXPECT_DOUBLE_EQ(best_response(0.0, model, {15.0}), 0.0);
  EXPECT_DOUBLE_EQ(best_response(2.0, model, {0.0}), 0.0);
}

TEST(BestResponse, RejectsBadInputs)
{
  QuadraticDiscomfort model(0.1);
  EXPECT_THROW(best_response(-1.0, model, {15.0}), InputError);
  EXPECT_THROW(best_response(2.0, model, {-1.0}), InputError);
}

TEST(Policies, TruthfulBidsTheTrueBestResponse)
{
  auto policy = AgentPolicy::truthful(std::make_shared<QuadraticDiscomfort>(0.1),
                                      {15.0});
  EXPECT_DOUBLE_EQ(respond(policy, 2.0), 10.0);
  EXPECT_DOUBLE_EQ(respond_at(policy, 2.0, 7), 10.0);  // iteration ignored
}

TEST(Policies, MisreportBidsTheForgedBestResponse)
{
  auto policy = AgentPolicy::misreport(
      std::make_shared<QuadraticDiscomfort>(0.1),
      std::make_shared<QuadraticDiscomfort>(0.2), {15.0});
  EXPECT_DOUBLE_EQ(respond(policy, 2.0), 5.0);  // 2 / (2 * 0.2)
}

TEST(Policies, ScriptedReplaysItsEntries)
{
  auto policy = AgentPolicy::scripted(std::make_shared<QuadraticDiscomfort>(0.1),
                                      {10.0}, {4.0, 25.0, 0.5});
  EXPECT_THROW(respond(policy, 2.0), InputError);  // needs the iteration
  EXPECT_DOUBLE_EQ(respond_at(policy, 2.0, 0), 4.0);
  EXPECT_DOUBLE_EQ(respond_at(policy, 2.0, 1), 10.0);  // clamped to q_max
  EXPECT_DOUBLE_EQ(respond_at(policy, 2.0, 2), 0.5);
  EXPECT_DOUBLE_EQ(respond_at(policy, 2.0, 3), 0.0);  // script exhausted
  EXPECT_THROW(respond_at(policy, 2.0, -1), InputError);
}

TEST(Policies, ConstructorsRejectNullModels)
{
  EXPECT_THROW(AgentPolicy::truthful(nullptr, {10.0}), InputError);
  EXPECT_THROW(AgentPolicy::misreport(nullptr, nullptr, {10.0}), InputError);
  EXPECT_THROW(AgentPolicy::scripted(nullptr, {10.0}, {}), InputError);
}

TEST(Utility, PaymentMinusTrueDiscomfort)
{
  // 1218.75/49 - 0.1 * (75/7)^2 = 656.25/49
  Money pay = 1218.75 / 49.0;
  Energy alloc = 75.0 / 7.0;
  EXPECT_NEAR(realized_utility(alloc, pay, 0.1), 656.25 / 49.0, 1e-12);
  EXPECT_DOUBLE_EQ(realized_utility(0.0, 0.0, 0.1), 0.0);
  // Misreports are scored against the true model, whatever was reported.
  QuadraticDiscomfort true_model(0.1);
  EXPECT_NEAR(realized_utility(alloc, pay, true_model), 656.25 / 49.0, 1e-12);
}

TEST(Fleet, TruthfulPoliciesMatchTheInstance)
{
  Instance instance = two_user_instance();
  auto policies = truthful_policies(instance);
  ASSERT_EQ(policies.size(), 2u);
  for (const AgentPolicy &p : policies)
  {
    EXPECT_EQ(p.kind, PolicyKind::Truthful);
    EXPECT_DOUBLE_EQ(respond(p, 2.0), 10.0);
  }
}

TEST(Fleet, MisreportFleetForgesExactlyOneUser)
{
  Instance instance = two_user_instance();
  auto policies = policies_with_misreport(instance, 1, 0.2);
  EXPECT_EQ(policies[0].kind, PolicyKind::Truthful);
  EXPECT_EQ(policies[1].kind, PolicyKind::Misreport);
  EXPECT_DOUBLE_EQ(respond(policies[0], 2.0), 10.0);
  EXPECT_DOUBLE_EQ(respond(policies[1], 2.0), 5.0);

  EXPECT_THROW(policies_with_misreport(instance, 2, 0.2), InputError);
  EXPECT_THROW(policies_with_misreport(instance, 0, 0.0), InputError);
}

}  // namespace
}  // namespace flexclinch
