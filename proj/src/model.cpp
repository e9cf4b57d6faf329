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

#include <cmath>
#include <set>
#include <sstream>

#include "flexclinch/errors.hpp"

namespace flexclinch {

Money reward_total(Energy reduction, const RewardParams &reward)
{
  if (!(reduction >= 0.0) || reduction > reward.L)
  {
    throw InputError("reward_total: reduction outside [0, L]");
  }
  return reward.a * reduction - reward.b * reduction * reduction;
}

Price marginal_reward(Energy reduction, const RewardParams &reward)
{
  if (!(reduction >= 0.0) || reduction > reward.L)
  {
    throw InputError("marginal_reward: reduction outside [0, L]");
  }
  return reward.a - 2.0 * reward.b * reduction;
}

Energy desired_reduction(Price lambda, const RewardParams &reward)
{
  if (!(lambda >= 0.0))
  {
    throw InputError("desired_reduction: negative price");
  }
  if (reward.flat())
  {
    throw DegenerateDemandError(
        "desired_reduction: flat reward curve (b == 0) has no demand schedule");
  }
  Energy d = (reward.a - lambda) / (2.0 * reward.b);
  if (d < 0.0)
  {
    return 0.0;
  }
  return d < reward.L ? d : reward.L;
}

Energy DiscomfortModel::argmax_surplus(Price lambda, Energy q_max) const
{
  // Ternary search on a concave objective. 200 thirds shrink the bracket
  // far below double resolution, but value comparisons go blind once the
  // objective flattens within machine epsilon, so the result is only
  // reliable to about sqrt(eps) of the bracket width (~1e-8 relative).
  double lo = 0.0;
  double hi = q_max;
  for (int i = 0; i < 200; ++i)
  {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    double s1 = lambda * m1 - value(m1);
    double s2 = lambda * m2 - value(m2);
    if (s1 < s2)
    {
      lo = m1;
    }
    else
    {
      hi = m2;
    }
  }
  return 0.5 * (lo + hi);
}

QuadraticDiscomfort::QuadraticDiscomfort(double omega) : omega_(omega)
{
  if (!(omega > 0.0))
  {
    throw InputError("QuadraticDiscomfort: omega must be positive");
  }
}

Money QuadraticDiscomfort::value(Energy q) const
{
  return omega_ * q * q;
}

Energy QuadraticDiscomfort::argmax_surplus(Price lambda, Energy q_max) const
{
  Energy unconstrained = lambda / (2.0 * omega_);
  if (unconstrained < 0.0)
  {
    return 0.0;
  }
  return unconstrained < q_max ? unconstrained : q_max;
}

Money discomfort(Energy q, const DiscomfortModel &model)
{
  if (!(q >= 0.0))
  {
    throw InputError("discomfort: negative reduction");
  }
  return model.value(q);
}

Energy FeasibleSet::clamp(Energy q) const
{
  if (q < 0.0)
  {
    return 0.0;
  }
  return q < q_max ? q : q_max;
}

Instance make_instance(std::vector<User> users, double a, double b,
                       int timeslot, double slot_duration_hours)
{
  Instance instance;
  instance.users = std::move(users);
  instance.reward.a = a;
  instance.reward.b = b;
  double total_baseline = 0.0;
  for (const User &u : instance.users)
  {
    total_baseline += u.baseline_load;
  }
  instance.reward.L = total_baseline;
  instance.timeslot = timeslot;
  instance.slot_duration_hours = slot_duration_hours;
  return instance;
}

std::string ValidationReport::to_string() const
{
  std::ostringstream out;
  for (const Violation &v : violations)
  {
    out << v.subject << ": " << v.message << "\n";
  }
  return out.str();
}

ValidationReport validate_instance(const Instance &instance)
{
  ValidationReport report;
  auto fail = [&report](const std::string &subject, const std::string &message)
  { report.violations.push_back({subject, message}); };

  if (instance.users.empty())
  {
    fail("instance", "no users");
  }
  if (!(instance.slot_duration_hours > 0.0))
  {
    fail("instance", "slot duration must be positive");
  }
  if (!(instance.reward.a > 0.0))
  {
    fail("reward", "marginal reward intercept a must be positive");
  }
  if (!(instance.reward.b >= 0.0))
  {
    fail("reward", "curvature b must be nonnegative");
  }

  double total_baseline = 0.0;
  std::set<std::string> seen_ids;
  for (const User &u : instance.users)
  {
    const std::string subject = "user:" + u.id;
    if (u.id.empty())
    {
      fail("instance", "user with empty id");
    }
    else if (!seen_ids.insert(u.id).second)
    {
      fail("instance", "duplicate user id '" + u.id + "'");
    }
    if (!(u.omega > 0.0))
    {
      fail(subject, "discomfort coefficient omega must be positive");
    }
    if (!(u.feasible.q_max > 0.0))
    {
      fail(subject, "curtailment capacity q_max must be positive");
    }
    else if (u.feasible.q_max > u.baseline_load)
    {
      fail(subject, "q_max exceeds baseline load");
    }
    if (!(u.baseline_load >= 0.0))
    {
      fail(subject, "baseline load must be nonnegative");
    }
    total_baseline += u.baseline_load;
  }

  if (!instance.users.empty())
  {
    double drift = std::fabs(instance.reward.L - total_baseline);
    double scale = std::fabs(total_baseline) > 1.0 ? std::fabs(total_baseline) : 1.0;
    if (drift > 1e-9 * scale)
    {
      fail("reward", "domain L does not match the summed baseline loads");
    }
    if (instance.reward.a < 2.0 * instance.reward.b * instance.reward.L)
    {
      fail("reward", "a < 2*b*L: reward decreases inside the feasible range");
    }
  }
  return report;
}

void require_valid(const Instance &instance)
{
  ValidationReport report = validate_instance(instance);
  if (!report.ok())
  {
    throw InputError("invalid instance:\n" + report.to_string());
  }
}

}  // namespace flexclinch
