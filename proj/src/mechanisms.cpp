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

#include "flexclinch/mechanisms.hpp"

#include <algorithm>
#include <cmath>

#include "flexclinch/errors.hpp"
#include "flexclinch/numeric.hpp"

namespace flexclinch {

namespace {

using numeric::canonical_sum;
using numeric::clinch_increment;
using numeric::fold_excluding;
using numeric::price_at;
using numeric::ration_factor;
using numeric::ration_increment;

void check_policies(const Instance &instance,
                    const std::vector<AgentPolicy> &policies)
{
  if (policies.size() != instance.users.size())
  {
    throw InputError("policy count does not match user count");
  }
}

Energy clamp_to_domain(Energy total, const RewardParams &reward)
{
  if (total < 0.0)
  {
    return 0.0;
  }
  return total < reward.L ? total : reward.L;
}

// Truthful best responses of a user subset at one price.
std::vector<Energy> subset_responses(const std::vector<User> &users, Price lambda)
{
  std::vector<Energy> out;
  out.reserve(users.size());
  for (const User &u : users)
  {
    out.push_back(best_response(lambda, u.model(), u.feasible));
  }
  return out;
}

// Crossing price of a supply curve against the reward's demand schedule.
// `supply` must be nondecreasing in lambda.
Price crossing_price(const std::function<Energy(Price)> &supply,
                     const RewardParams &reward, double tolerance)
{
  if (reward.flat())
  {
    throw DegenerateDemandError(
        "crossing price: flat reward curve has no demand schedule");
  }
  auto gap = [&](double lambda)
  { return supply(lambda) - desired_reduction(lambda, reward); };
  return numeric::bisect_nondecreasing(gap, 0.0, reward.a, tolerance);
}

// Efficient allocation over an arbitrary user subset; the reward curve is
// shared by every subset, so it is passed unshrunk.
WelfareSolution solve_subset(const std::vector<User> &users,
                             const RewardParams &reward, double tolerance)
{
  WelfareSolution solution;
  solution.lambda_star = crossing_price(
      [&](Price lambda) { return canonical_sum(subset_responses(users, lambda)); },
      reward, tolerance);
  solution.allocation = subset_responses(users, solution.lambda_star);
  return solution;
}

Money subset_welfare(const std::vector<User> &users,
                     const std::vector<Energy> &allocation,
                     const RewardParams &reward)
{
  Money total = canonical_sum(allocation);
  Money welfare = reward_total(clamp_to_domain(total, reward), reward);
  for (std::size_t i = 0; i < users.size(); ++i)
  {
    welfare -= discomfort(allocation[i], users[i].model());
  }
  return welfare;
}

}  // namespace

std::string to_string(Mechanism mechanism)
{
  switch (mechanism)
  {
  case Mechanism::Mca:
    return "mca";
  case Mechanism::Vcg:
    return "vcg";
  case Mechanism::MarketClearing:
    return "market-clearing";
  }
  throw InternalError("to_string: unknown mechanism");
}

Outcome finalize_outcome(Mechanism mechanism, std::vector<Energy> allocation,
                         std::vector<Money> payment, const Instance &instance,
                         const std::vector<AgentPolicy> &policies,
                         Price lambda_terminal, long iterations)
{
  Outcome outcome;
  outcome.mechanism = mechanism;
  outcome.total_reduction = canonical_sum(allocation);
  outcome.welfare = reward_total(clamp_to_domain(outcome.total_reduction,
                                                 instance.reward),
                                 instance.reward);
  for (std::size_t i = 0; i < allocation.size(); ++i)
  {
    outcome.welfare -= discomfort(allocation[i], *policies[i].true_model);
  }
  outcome.allocation = std::move(allocation);
  outcome.payment = std::move(payment);
  outcome.lambda_terminal = lambda_terminal;
  outcome.iterations = iterations;
  return outcome;
}

WelfareSolution solve_welfare_max(const Instance &instance, double tolerance)
{
  return solve_subset(instance.users, instance.reward, tolerance);
}

Outcome run_vcg(const Instance &instance, const VcgOptions &options)
{
  require_valid(instance);
  const RewardParams &reward = instance.reward;
  if (reward.flat())
  {
    throw DegenerateDemandError("vcg: flat reward curve");
  }

  WelfareSolution full = solve_subset(instance.users, reward, options.tolerance);
  Money reward_full = reward_total(
      clamp_to_domain(canonical_sum(full.allocation), reward), reward);

  std::size_t n = instance.users.size();
  std::vector<Money> payment(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    std::vector<User> rivals;
    rivals.reserve(n - 1);
    std::vector<Energy> rival_allocation;
    rival_allocation.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
    {
      if (j != i)
      {
        rivals.push_back(instance.users[j]);
        rival_allocation.push_back(full.allocation[j]);
      }
    }

    // Value the rivals contribute while i participates...
    Money rivals_reward =
        options.compat_eq6
            ? reward_total(clamp_to_domain(canonical_sum(rival_allocation), reward),
                           reward)
            : reward_full;
    Money with_i = rivals_reward;
    for (std::size_t j = 0; j < rivals.size(); ++j)
    {
      with_i -= discomfort(rival_allocation[j], rivals[j].model());
    }

    // ...minus what they would produce on their own.
    WelfareSolution without = solve_subset(rivals, reward, options.tolerance);
    Money without_i = subset_welfare(rivals, without.allocation, reward);

    payment[i] = with_i - without_i;
  }

  return finalize_outcome(Mechanism::Vcg, full.allocation, std::move(payment),
                          instance, truthful_policies(instance),
                          full.lambda_star, 0);
}

Outcome run_market_clearing(const Instance &instance,
                            const std::vector<AgentPolicy> &policies,
                            const ClearingOptions &options)
{
  require_valid(instance);
  check_policies(instance, policies);

  Price lambda = crossing_price(
      [&](Price p)
      {
        std::vector<Energy> bids;
        bids.reserve(policies.size());
        for (const AgentPolicy &policy : policies)
        {
          bids.push_back(respond(policy, p));
        }
        return canonical_sum(bids);
      },
      instance.reward, options.tolerance);

  std::size_t n = policies.size();
  std::vector<Energy> allocation(n, 0.0);
  std::vector<Money> payment(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    allocation[i] = respond(policies[i], lambda);
    payment[i] = lambda * allocation[i];
  }
  return finalize_outcome(Mechanism::MarketClearing, std::move(allocation),
                          std::move(payment), instance, policies, lambda, 0);
}

Outcome run_market_clearing(const Instance &instance,
                            const ClearingOptions &options)
{
  return run_market_clearing(instance, truthful_policies(instance), options);
}

std::vector<Energy> clinch_step(const std::vector<Energy> &bids, Energy demand,
                                const std::vector<Energy> &prior_cumulative)
{
  if (bids.size() != prior_cumulative.size())
  {
    throw InputError("clinch_step: size mismatch");
  }
  std::vector<Energy> sorted = bids;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Energy> increments(bids.size(), 0.0);
  for (std::size_t i = 0; i < bids.size(); ++i)
  {
    Energy rivals = fold_excluding(sorted, bids[i]);
    increments[i] = clinch_increment(demand, rivals, prior_cumulative[i]);
  }
  return increments;
}

std::vector<Energy> final_rationing(const std::vector<Energy> &previous_bids,
                                    const std::vector<Energy> &prior_cumulative,
                                    Energy demand, bool compat_line11)
{
  if (previous_bids.size() != prior_cumulative.size())
  {
    throw InputError("final_rationing: size mismatch");
  }
  std::vector<Energy> out(previous_bids.size(), 0.0);
  Energy sum_bids = canonical_sum(previous_bids);
  if (compat_line11)
  {
    // Legacy one-line form: residual bids scaled by demand over total
    // bids. It ignores how much of the demand is already clinched, so it
    // over-awards whenever prior clinches exist.
    double scale = sum_bids > 0.0 ? demand / sum_bids : 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
    {
      Energy residual = previous_bids[i] - prior_cumulative[i];
      Energy increment = residual > 0.0 ? residual * scale : 0.0;
      out[i] = prior_cumulative[i] + increment;
    }
    return out;
  }
  Energy sum_prior = canonical_sum(prior_cumulative);
  double factor = ration_factor(demand, sum_prior, sum_bids);
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] = prior_cumulative[i] +
             ration_increment(previous_bids[i], prior_cumulative[i], factor);
  }
  return out;
}

McaResult run_mca(const Instance &instance,
                  const std::vector<AgentPolicy> &policies,
                  const McaOptions &options)
{
  require_valid(instance);
  check_policies(instance, policies);
  if (!(options.epsilon > 0.0))
  {
    throw InputError("mca: epsilon must be positive");
  }
  const RewardParams &reward = instance.reward;
  if (reward.flat())
  {
    throw DegenerateDemandError("mca: flat reward curve");
  }

  std::size_t n = policies.size();
  std::vector<Energy> cumulative(n, 0.0);
  std::vector<Money> payment(n, 0.0);
  std::vector<Energy> bids(n, 0.0);
  std::vector<Energy> previous_bids(n, 0.0);
  ClinchLedger ledger;

  // The price reaches zero after ceil(a / epsilon) rounds, where demand
  // covers the whole fleet; anything past that is a logic error.
  long max_rounds =
      static_cast<long>(std::ceil(reward.a / options.epsilon)) + 2;

  for (long k = 0;; ++k)
  {
    if (k > max_rounds)
    {
      throw InternalError("mca: price grid exhausted without termination");
    }
    Price lambda = price_at(reward.a, options.epsilon, k);
    for (std::size_t i = 0; i < n; ++i)
    {
      bids[i] = respond_at(policies[i], lambda, k);
    }
    Energy supply = canonical_sum(bids);
    Energy demand = desired_reduction(lambda, reward);

    if (demand >= supply)
    {
      // Offers are covered: close the books at the previous round's
      // price. At k == 0 there is no previous round; the opening offer
      // is degenerate (demand is zero at the starting price), so awards
      // are scaled by average reward per unit - which only triggers for
      // an empty opening book anyway.
      Price lambda_close = lambda;
      if (k == 0)
      {
        // No previous round exists. The whole (necessarily worthless-at-a)
        // opening book is bought at the average reward per unit, which
        // costs the operator exactly the reward it reaps. With a curved
        // reward this only happens for an empty book.
        double unit_price =
            supply > 0.0
                ? reward_total(clamp_to_domain(supply, reward), reward) / supply
                : 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
          Energy increment = bids[i];
          cumulative[i] += increment;
          payment[i] += unit_price * increment;
          if (increment > 0.0)
          {
            ledger.events.push_back({i, k, unit_price, increment});
          }
        }
      }
      else
      {
        lambda_close = price_at(reward.a, options.epsilon, k - 1);
        Energy demand_close = desired_reduction(lambda_close, reward);
        Energy sum_bids = canonical_sum(previous_bids);
        if (options.compat_line11)
        {
          double scale = sum_bids > 0.0 ? demand_close / sum_bids : 0.0;
          for (std::size_t i = 0; i < n; ++i)
          {
            Energy residual = previous_bids[i] - cumulative[i];
            Energy increment = residual > 0.0 ? residual * scale : 0.0;
            cumulative[i] += increment;
            payment[i] += lambda_close * increment;
            if (increment > 0.0)
            {
              ledger.events.push_back({i, k, lambda_close, increment});
            }
          }
        }
        else
        {
          Energy sum_prior = canonical_sum(cumulative);
          double factor = ration_factor(demand_close, sum_prior, sum_bids);
          for (std::size_t i = 0; i < n; ++i)
          {
            Energy increment =
                ration_increment(previous_bids[i], cumulative[i], factor);
            cumulative[i] += increment;
            payment[i] += lambda_close * increment;
            if (increment > 0.0)
            {
              ledger.events.push_back({i, k, lambda_close, increment});
            }
          }
        }
      }

      McaResult result;
      result.outcome = finalize_outcome(Mechanism::Mca, std::move(cumulative),
                                        std::move(payment), instance, policies,
                                        lambda_close, k + 1);
      result.ledger = std::move(ledger);
      return result;
    }

    // The book still exceeds demand: the clock keeps falling, and everyone
    // clinches whatever their rivals can no longer cover.
    std::vector<Energy> sorted = bids;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i)
    {
      Energy rivals = fold_excluding(sorted, bids[i]);
      Energy increment = clinch_increment(demand, rivals, cumulative[i]);
      if (increment > 0.0)
      {
        cumulative[i] += increment;
        payment[i] += lambda * increment;
        ledger.events.push_back({i, k, lambda, increment});
      }
    }
    previous_bids = bids;
  }
}

McaResult run_mca(const Instance &instance, const McaOptions &options)
{
  return run_mca(instance, truthful_policies(instance), options);
}

Outcome evaluate_fixed_price(const Instance &instance,
                             const std::vector<AgentPolicy> &policies,
                             Price lambda)
{
  require_valid(instance);
  check_policies(instance, policies);
  if (!(lambda >= 0.0))
  {
    throw InputError("evaluate_fixed_price: negative price");
  }
  std::size_t n = policies.size();
  std::vector<Energy> allocation(n, 0.0);
  std::vector<Money> payment(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    allocation[i] = respond(policies[i], lambda);
    payment[i] = lambda * allocation[i];
  }
  return finalize_outcome(Mechanism::MarketClearing, std::move(allocation),
                          std::move(payment), instance, policies, lambda, 0);
}

}  // namespace flexclinch
