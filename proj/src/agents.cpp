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

#include "flexclinch/errors.hpp"

namespace flexclinch {

Energy best_response(Price lambda, const DiscomfortModel &model,
                     const FeasibleSet &feasible)
{
  if (!(lambda >= 0.0))
  {
    throw InputError("best_response: negative price");
  }
  if (!(feasible.q_max >= 0.0))
  {
    throw InputError("best_response: negative capacity");
  }
  return model.argmax_surplus(lambda, feasible.q_max);
}

AgentPolicy AgentPolicy::truthful(std::shared_ptr<const DiscomfortModel> model,
                                  FeasibleSet feasible)
{
  if (!model)
  {
    throw InputError("truthful policy: null model");
  }
  AgentPolicy policy;
  policy.kind = PolicyKind::Truthful;
  policy.true_model = std::move(model);
  policy.feasible = feasible;
  return policy;
}

AgentPolicy AgentPolicy::misreport(
    std::shared_ptr<const DiscomfortModel> true_model,
    std::shared_ptr<const DiscomfortModel> reported_model, FeasibleSet feasible)
{
  if (!true_model || !reported_model)
  {
    throw InputError("misreport policy: null model");
  }
  AgentPolicy policy;
  policy.kind = PolicyKind::Misreport;
  policy.true_model = std::move(true_model);
  policy.reported_model = std::move(reported_model);
  policy.feasible = feasible;
  return policy;
}

AgentPolicy AgentPolicy::scripted(std::shared_ptr<const DiscomfortModel> true_model,
                                  FeasibleSet feasible, std::vector<Energy> bids)
{
  if (!true_model)
  {
    throw InputError("scripted policy: null model");
  }
  AgentPolicy policy;
  policy.kind = PolicyKind::Scripted;
  policy.true_model = std::move(true_model);
  policy.feasible = feasible;
  policy.scripted_bids = std::move(bids);
  return policy;
}

const DiscomfortModel &AgentPolicy::bidding_model() const
{
  if (kind == PolicyKind::Misreport)
  {
    return *reported_model;
  }
  return *true_model;
}

Energy respond(const AgentPolicy &policy, Price lambda)
{
  if (policy.kind == PolicyKind::Scripted)
  {
    throw InputError("respond: scripted policy needs an iteration index");
  }
  return best_response(lambda, policy.bidding_model(), policy.feasible);
}

Energy respond_at(const AgentPolicy &policy, Price lambda, long iteration)
{
  if (policy.kind != PolicyKind::Scripted)
  {
    return respond(policy, lambda);
  }
  if (iteration < 0)
  {
    throw InputError("respond_at: negative iteration");
  }
  auto index = static_cast<std::size_t>(iteration);
  if (index >= policy.scripted_bids.size())
  {
    return 0.0;
  }
  return policy.feasible.clamp(policy.scripted_bids[index]);
}

Money realized_utility(Energy allocation, Money payment,
                       const DiscomfortModel &true_model)
{
  return payment - discomfort(allocation, true_model);
}

Money realized_utility(Energy allocation, Money payment, double omega_true)
{
  return realized_utility(allocation, payment, QuadraticDiscomfort(omega_true));
}

std::vector<AgentPolicy> truthful_policies(const Instance &instance)
{
  std::vector<AgentPolicy> policies;
  policies.reserve(instance.users.size());
  for (const User &u : instance.users)
  {
    policies.push_back(AgentPolicy::truthful(
        std::make_shared<QuadraticDiscomfort>(u.omega), u.feasible));
  }
  return policies;
}

std::vector<AgentPolicy> policies_with_misreport(const Instance &instance,
                                                 std::size_t cheater,
                                                 double omega_fake)
{
  if (cheater >= instance.users.size())
  {
    throw InputError("policies_with_misreport: cheater index out of range");
  }
  if (!(omega_fake > 0.0))
  {
    throw InputError("policies_with_misreport: fake omega must be positive");
  }
  std::vector<AgentPolicy> policies = truthful_policies(instance);
  const User &u = instance.users[cheater];
  policies[cheater] = AgentPolicy::misreport(
      std::make_shared<QuadraticDiscomfort>(u.omega),
      std::make_shared<QuadraticDiscomfort>(omega_fake), u.feasible);
  return policies;
}

}  // namespace flexclinch
