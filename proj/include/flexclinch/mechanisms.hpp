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

#include <string>
#include <vector>

#include "flexclinch/agents.hpp"
#include "flexclinch/model.hpp"

namespace flexclinch {

enum class Mechanism
{
  Mca,             // descending-price clinching auction
  Vcg,             // pivot-payment oracle
  MarketClearing,  // uniform-price benchmark
};

std::string to_string(Mechanism mechanism);

// One clinched quantity: user `user` locked in `quantity` at price `lambda`
// during iteration `iteration` of the descending auction.
struct ClinchEvent
{
  std::size_t user = 0;
  long iteration = 0;
  Price lambda = 0.0;
  Energy quantity = 0.0;
};

// Every nonzero clinch, in the order it happened. A user's payment is the
// sum over its events of lambda * quantity.
struct ClinchLedger
{
  std::vector<ClinchEvent> events;
};

// What a mechanism decided: per-user allocations and payments plus the
// aggregates every caller wants scored.
struct Outcome
{
  Mechanism mechanism = Mechanism::Mca;
  std::vector<Energy> allocation;
  std::vector<Money> payment;
  Energy total_reduction = 0.0;
  Money welfare = 0.0;          // reward at the total minus true discomforts
  Price lambda_terminal = 0.0;  // price at which the run ended
  long iterations = 0;          // descending-price rounds (0 for one-shot)
};

// Interior welfare maximum: truthful supply meets the demand curve.
struct WelfareSolution
{
  std::vector<Energy> allocation;
  Price lambda_star = 0.0;
};

// Price where aggregate truthful supply crosses desired reduction, found by
// bisection on [0, a]; allocations are the users' best responses there.
// Throws DegenerateDemandError on a flat reward curve.
WelfareSolution solve_welfare_max(const Instance &instance, double tolerance = 1e-10);

struct VcgOptions
{
  double tolerance = 1e-10;
  // Compatibility switch: score each pivot term's reward at the rivals'
  // own optimum total instead of the full optimum total. Matches a legacy
  // one-line statement of the payment; off by default.
  bool compat_eq6 = false;
};

// Efficient allocation with pivot payments, computed from true models:
//   pay_i = [R(D*) - sum_{j!=i} d_j(q*_j)] - [R(D_-i) - sum_{j!=i} d_j(q^_j)]
// where the second bracket re-solves the market without user i.
Outcome run_vcg(const Instance &instance, const VcgOptions &options = {});

struct ClearingOptions
{
  double tolerance = 1e-10;
};

// Uniform-price benchmark: find the crossing price for the *reported*
// supply curves, pay everyone that price. Efficient under truth-telling
// but manipulable, which is exactly what it is here to demonstrate.
Outcome run_market_clearing(const Instance &instance,
                            const std::vector<AgentPolicy> &policies,
                            const ClearingOptions &options = {});
Outcome run_market_clearing(const Instance &instance,
                            const ClearingOptions &options = {});

struct McaOptions
{
  double epsilon = 1e-5;  // price decrement per iteration
  // Compatibility switch: closing-round rationing scales bids by
  // demand / total bids, ignoring already-clinched quantities (a legacy
  // one-line form that can re-award clinched energy). Off by default,
  // where rationing splits only the *residual* demand over residual bids.
  bool compat_line11 = false;
};

struct McaResult
{
  Outcome outcome;
  ClinchLedger ledger;
};

// Descending-price clinching auction against the given policies. The price
// starts at the reward intercept `a` and falls by epsilon each iteration;
// a bidder clinches whatever demand its rivals can no longer cover, priced
// at the current lambda; when demand first covers the aggregate offer the
// previous round's bids are rationed to close the books at that round's
// price. Throws DegenerateDemandError on a flat reward curve and InputError
// on epsilon <= 0.
McaResult run_mca(const Instance &instance,
                  const std::vector<AgentPolicy> &policies,
                  const McaOptions &options = {});
McaResult run_mca(const Instance &instance, const McaOptions &options = {});

// One clinching round in isolation: per-user newly clinched quantities
// given current bids, demand, and cumulative prior clinches.
std::vector<Energy> clinch_step(const std::vector<Energy> &bids, Energy demand,
                                const std::vector<Energy> &prior_cumulative);

// Closing-round awards in isolation, from the previous round's bids and
// the cumulative clinches. `compat_line11` selects the legacy form.
std::vector<Energy> final_rationing(const std::vector<Energy> &previous_bids,
                                    const std::vector<Energy> &prior_cumulative,
                                    Energy demand, bool compat_line11 = false);

// One-shot evaluation at an exogenous price: every policy answers once,
// everyone is paid lambda per unit. The only entry point that accepts a
// flat reward curve.
Outcome evaluate_fixed_price(const Instance &instance,
                             const std::vector<AgentPolicy> &policies,
                             Price lambda);

// Assembles an outcome record from per-user results, scoring welfare with
// the policies' true models. The centralized auction and the distributed
// simulation both finish here, so equal allocations and payments yield
// identical records.
Outcome finalize_outcome(Mechanism mechanism, std::vector<Energy> allocation,
                         std::vector<Money> payment, const Instance &instance,
                         const std::vector<AgentPolicy> &policies,
                         Price lambda_terminal, long iterations);

}  // namespace flexclinch
