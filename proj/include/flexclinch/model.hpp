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

#pragma once

#include <memory>
#include <string>
#include <vector>

namespace flexclinch {

using Energy = double;  // kWh of load reduction
using Price = double;   // currency per kWh
using Money = double;   // currency

// Utility-side reward for an aggregate demand reduction D during one event:
//   R(D) = a*D - b*D^2 on [0, L],  with a >= 2*b*L so R is nondecreasing
// over the whole feasible range. L is the fleet's aggregated baseline load.
struct RewardParams
{
  double a = 0.0;  // marginal reward at zero reduction
  double b = 0.0;  // curvature; 0 means a flat (non-invertible) curve
  double L = 0.0;  // aggregated baseline load, domain end of the curve

  bool flat() const { return b == 0.0; }
};

// R(D). Throws InputError when D is outside [0, L].
Money reward_total(Energy reduction, const RewardParams &reward);

// R'(D) = a - 2*b*D.
Price marginal_reward(Energy reduction, const RewardParams &reward);

// Inverse of the marginal reward, clamped to [0, L]: the reduction the
// utility wants to buy when the going price is `lambda`. Throws
// DegenerateDemandError when the curve is flat (b == 0).
Energy desired_reduction(Price lambda, const RewardParams &reward);

// Cost a participant experiences for curtailing q kWh. Implementations
// must be 0 at 0, strictly increasing and convex on q >= 0.
class DiscomfortModel
{
public:
  virtual ~DiscomfortModel() = default;

  // d(q), for q >= 0.
  virtual Money value(Energy q) const = 0;

  // Surplus maximizer argmax_{0 <= q <= q_max} (lambda*q - d(q)).
  // The default runs a ternary search, which convexity makes exact
  // enough for any model without a closed form.
  virtual Energy argmax_surplus(Price lambda, Energy q_max) const;
};

// d(q) = omega * q^2, the workhorse model. Closed forms everywhere.
class QuadraticDiscomfort final : public DiscomfortModel
{
public:
  explicit QuadraticDiscomfort(double omega);

  Money value(Energy q) const override;
  Energy argmax_surplus(Price lambda, Energy q_max) const override;

  double omega() const { return omega_; }

private:
  double omega_;
};

// d(q) with domain checking: q < 0 throws InputError.
Money discomfort(Energy q, const DiscomfortModel &model);

// Hard curtailment capacity: offered reductions live in [0, q_max].
struct FeasibleSet
{
  Energy q_max = 0.0;

  bool contains(Energy q) const { return q >= 0.0 && q <= q_max; }
  Energy clamp(Energy q) const;
};

// One flexibility provider. Discomfort is quadratic at the instance level,
// matching the on-disk format; richer models enter through agent policies.
struct User
{
  std::string id;
  double omega = 0.0;        // quadratic discomfort coefficient
  FeasibleSet feasible;      // curtailment capacity
  Energy baseline_load = 0.0;

  QuadraticDiscomfort model() const { return QuadraticDiscomfort(omega); }
};

// One demand-response event: a user fleet facing one reward curve.
struct Instance
{
  std::vector<User> users;
  RewardParams reward;
  int timeslot = 0;
  double slot_duration_hours = 1.0;
};

// Builds an instance, deriving the reward domain L from the users'
// aggregated baseline load.
Instance make_instance(std::vector<User> users, double a, double b,
                       int timeslot = 0, double slot_duration_hours = 1.0);

struct Violation
{
  std::string subject;  // instance | reward | user:<id>
  std::string message;
};

struct ValidationReport
{
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Checks every structural requirement an instance must meet before any
// mechanism may run: at least one user, unique non-empty ids, omega > 0,
// 0 < q_max <= baseline_load per user, a > 0, b >= 0, L equal to the
// summed baselines, a >= 2*b*L, and a positive slot duration.
ValidationReport validate_instance(const Instance &instance);

// validate_instance, throwing InputError on the first failure instead.
void require_valid(const Instance &instance);

}  // namespace flexclinch
