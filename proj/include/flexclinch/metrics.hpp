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

#include <cstddef>
#include <vector>

#include "flexclinch/mechanisms.hpp"
#include "flexclinch/model.hpp"

namespace flexclinch {

// Reward at the realized total minus the users' true discomfort costs.
// Recomputed from the allocation so it works for any outcome.
Money social_welfare(const Outcome &outcome, const Instance &instance);

// Reward at the realized total minus total payments made.
Money fsp_profit(const Outcome &outcome, const Instance &instance);

// Worst-case welfare shortfall of the clinching auction against the
// interior optimum: (epsilon^2 + lambda_max * epsilon) / (2*b).
Money welfare_loss_bound(double epsilon, double lambda_max, double b);

// (w_opt - w_actual) / |w_opt|; 0 when w_opt == 0.
double proportional_welfare_loss(Money w_opt, Money w_actual);

// Logarithmic misreport grid with `points` entries centered on the true
// coefficient: omega_real * 10^((k - points/2) / (points/2)) spans one
// decade either side by default.
std::vector<double> default_omega_grid(double omega_real, int points = 201);

// One misreport sweep: how one user's utility and the operator's profit
// move as that user's reported discomfort coefficient walks a grid.
struct SweepResult
{
  std::size_t cheater = 0;
  std::vector<double> omega_grid;
  std::vector<Money> cheater_utility;  // one entry per grid point
  std::vector<Money> operator_profit;  // one entry per grid point
  std::size_t best_index = 0;          // argmax of cheater_utility
  double best_omega = 0.0;
  Money utility_truthful = 0.0;        // utility when reporting honestly
  Money utility_best = 0.0;            // utility at best_index
  Money profit_truthful = 0.0;         // operator profit when honest
  Money profit_best = 0.0;             // operator profit at best_index
};

// Runs `mechanism` once per grid point with everyone else truthful and the
// cheater reporting the grid value; utilities are always scored against the
// cheater's true coefficient. For Mechanism::Vcg the oracle is re-run with
// the forged coefficient standing in for the cheater's reported model.
// `epsilon` only matters for Mechanism::Mca.
SweepResult cheater_sweep(const Instance &instance, Mechanism mechanism,
                          std::size_t cheater,
                          const std::vector<double> &omega_grid,
                          double epsilon);

}  // namespace flexclinch
