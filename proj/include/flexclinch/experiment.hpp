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

#include <cstdint>
#include <vector>

#include "flexclinch/model.hpp"

namespace flexclinch {
namespace experiment {

// Deterministic 64-bit generator (splitmix64). Same seed, same stream,
// on every platform; used everywhere randomness is needed so runs are
// reproducible from the seed alone.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

private:
  std::uint64_t state_;
};

enum class Family
{
  Mixed,    // omega in [0.5, 1.5] * omega_f: comparable fleet
  Spread,   // omega in [0.05, 1.5] * omega_f: cheap outliers bind caps
};

// Synthesizes one event instance for n users. Baseline shapes are drawn,
// then normalized so the fleet baseline is 70 against a reward curve with
// a = 3, b = 0.02 (demand saturates at 75); q_max is the smaller of a
// [5, 50) draw and the user's baseline, so caps bind for part of the
// fleet. omega scales with omega_f per the family above.
Instance make_family_instance(std::uint64_t seed, std::size_t n,
                              double omega_f, Family family);

// A day of hourly slots: returns the slot indices flagged as
// demand-response events (deterministic in the seed, drawn from the
// highest-load hours), with baseline load following a two-peak
// residential shape.
struct DayProfile
{
  std::vector<double> slot_baseline;  // 24 entries, kWh per slot, positive
  std::vector<int> event_slots;       // indices into slot_baseline
};
DayProfile make_day_profile(std::uint64_t seed, std::size_t n_users,
                            std::size_t n_events);

// Instance for one slot of a day profile: the fleet's per-user baselines
// are scaled to the slot's aggregate baseline.
Instance instance_for_slot(const DayProfile &day, int slot,
                           std::uint64_t seed, std::size_t n, double omega_f);

// Mean proportional welfare loss of the clinching auction over a family
// of instances at one epsilon (seeds seed0 .. seed0+count-1).
double mean_proportional_loss(double epsilon, std::uint64_t seed0,
                              std::size_t count, std::size_t n,
                              double omega_f, Family family);

// The closed-form welfare-gap ceiling expressed in the same proportional
// units, averaged over the same instances: mean of bound / |w_opt|. By
// construction mean_proportional_loss(args...) never exceeds it.
double mean_proportional_bound(double epsilon, std::uint64_t seed0,
                               std::size_t count, std::size_t n,
                               double omega_f, Family family);

// Least-squares slope of log(y) against log(x). Used to check how the
// measured welfare loss scales with the price step.
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace experiment
}  // namespace flexclinch
