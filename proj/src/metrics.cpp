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

#include "flexclinch/metrics.hpp"

#include <cmath>

#include "flexclinch/errors.hpp"
#include "flexclinch/numeric.hpp"

namespace flexclinch {

namespace {

Energy clamp_total(const Outcome &outcome, const Instance &instance)
{
  // Recomputed from the allocation so hand-built outcomes work too; for
  // mechanism outcomes this equals total_reduction bit for bit.
  Energy total = numeric::canonical_sum(outcome.allocation);
  if (total < 0.0)
  {
    return 0.0;
  }
  return total < instance.reward.L ? total : instance.reward.L;
}

void check_outcome(const Outcome &outcome, const Instance &instance)
{
  if (outcome.allocation.size() != instance.users.size() ||
      outcome.payment.size() != instance.users.size())
  {
    throw InputError("outcome does not match the instance's user count");
  }
}

}  // namespace

Money social_welfare(const Outcome &outcome, const Instance &instance)
{
  check_outcome(outcome, instance);
  Money welfare = reward_total(clamp_total(outcome, instance), instance.reward);
  for (std::size_t i = 0; i < instance.users.size(); ++i)
  {
    welfare -= discomfort(outcome.allocation[i], instance.users[i].model());
  }
  return welfare;
}

Money fsp_profit(const Outcome &outcome, const Instance &instance)
{
  check_outcome(outcome, instance);
  Money profit = reward_total(clamp_total(outcome, instance), instance.reward);
  for (Money p : outcome.payment)
  {
    profit -= p;
  }
  return profit;
}

Money welfare_loss_bound(double epsilon, double lambda_max, double b)
{
  if (!(epsilon > 0.0) || !(lambda_max > 0.0))
  {
    throw InputError("welfare_loss_bound: epsilon and lambda_max must be positive");
  }
  if (!(b > 0.0))
  {
    throw InputError("welfare_loss_bound: curvature must be positive");
  }
  return (epsilon * epsilon + lambda_max * epsilon) / (2.0 * b);
}

double proportional_welfare_loss(Money w_opt, Money w_actual)
{
  if (w_opt == 0.0)
  {
    return 0.0;
  }
  return (w_opt - w_actual) / std::fabs(w_opt);
}

std::vector<double> default_omega_grid(double omega_real, int points)
{
  if (!(omega_real > 0.0))
  {
    throw InputError("default_omega_grid: omega must be positive");
  }
  if (points < 3)
  {
    throw InputError("default_omega_grid: need at least 3 points");
  }
  int center = points / 2;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k)
  {
    double exponent = static_cast<double>(k - center) / static_cast<double>(center);
    grid.push_back(omega_real * std::pow(10.0, exponent));
  }
  return grid;
}

SweepResult cheater_sweep(const Instance &instance, Mechanism mechanism,
                          std::size_t cheater,
                          const std::vector<double> &omega_grid,
                          double epsilon)
{
  require_valid(instance);
  if (cheater >= instance.users.size())
  {
    throw InputError("cheater_sweep: cheater index out of range");
  }
  if (omega_grid.empty())
  {
    throw InputError("cheater_sweep: empty grid");
  }

  double omega_true = instance.users[cheater].omega;

  auto evaluate = [&](double omega_reported) -> std::pair<Money, Money>
  {
    Outcome outcome;
    switch (mechanism)
    {
    case Mechanism::Mca:
    {
      auto policies = policies_with_misreport(instance, cheater, omega_reported);
      outcome = run_mca(instance, policies, McaOptions{epsilon, false}).outcome;
      break;
    }
    case Mechanism::MarketClearing:
    {
      auto policies = policies_with_misreport(instance, cheater, omega_reported);
      outcome = run_market_clearing(instance, policies);
      break;
    }
    case Mechanism::Vcg:
    {
      // The oracle only sees reports; forging the coefficient in the
      // instance it solves is exactly what a misreport looks like to it.
      Instance forged = instance;
      forged.users[cheater].omega = omega_reported;
      outcome = run_vcg(forged);
      break;
    }
    }
    Money utility = realized_utility(outcome.allocation[cheater],
                                     outcome.payment[cheater], omega_true);
    return {utility, fsp_profit(outcome, instance)};
  };

  SweepResult result;
  result.cheater = cheater;
  result.omega_grid = omega_grid;
  result.cheater_utility.reserve(omega_grid.size());
  result.operator_profit.reserve(omega_grid.size());
  for (double omega : omega_grid)
  {
    auto [utility, profit] = evaluate(omega);
    result.cheater_utility.push_back(utility);
    result.operator_profit.push_back(profit);
  }

  result.best_index = 0;
  for (std::size_t k = 1; k < omega_grid.size(); ++k)
  {
    if (result.cheater_utility[k] > result.cheater_utility[result.best_index])
    {
      result.best_index = k;
    }
  }
  result.best_omega = omega_grid[result.best_index];
  result.utility_best = result.cheater_utility[result.best_index];

  auto [utility_honest, profit_honest] = evaluate(omega_true);
  result.utility_truthful = utility_honest;
  result.profit_truthful = profit_honest;
  result.profit_best = result.operator_profit[result.best_index];
  return result;
}

}  // namespace flexclinch
