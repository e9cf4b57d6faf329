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
#include <vector>

#include "flexclinch/model.hpp"

namespace flexclinch {

// Surplus-maximizing offer at price lambda: argmax over the feasible set of
// lambda*q - d(q). Throws InputError on negative lambda or negative q_max.
Energy best_response(Price lambda, const DiscomfortModel &model,
                     const FeasibleSet &feasible);

enum class PolicyKind
{
  Truthful,   // bid the best response under the true discomfort
  Misreport,  // bid the best response under a fake discomfort
  Scripted    // bid a fixed per-iteration sequence
};

// How one participant answers price queries during an auction. The true
// model is always carried so realized utility can be scored afterwards.
struct AgentPolicy
{
  PolicyKind kind = PolicyKind::Truthful;
  std::shared_ptr<const DiscomfortModel> true_model;
  std::shared_ptr<const DiscomfortModel> reported_model;  // Misreport only
  FeasibleSet feasible;
  std::vector<Energy> scripted_bids;  // Scripted only, indexed by iteration

  static AgentPolicy truthful(std::shared_ptr<const DiscomfortModel> model,
                              FeasibleSet feasible);
  static AgentPolicy misreport(std::shared_ptr<const DiscomfortModel> true_model,
                               std::shared_ptr<const DiscomfortModel> reported_model,
                               FeasibleSet feasible);
  static AgentPolicy scripted(std::shared_ptr<const DiscomfortModel> true_model,
                              FeasibleSet feasible, std::vector<Energy> bids);

  // The model whose best response this policy bids (Truthful/Misreport).
  const DiscomfortModel &bidding_model() const;
};

// Offer at a price, for policies that do not depend on the iteration count.
// Scripted policies throw InputError here; use respond_at.
Energy respond(const AgentPolicy &policy, Price lambda);

// Offer at iteration k of a descending auction. Scripted policies replay
// their k-th entry (clamped to the feasible set); past the end of the
// script they bid 0. Other kinds ignore k.
Energy respond_at(const AgentPolicy &policy, Price lambda, long iteration);

// payment - d_true(allocation): what the participant actually banks.
Money realized_utility(Energy allocation, Money payment,
                       const DiscomfortModel &true_model);
Money realized_utility(Energy allocation, Money payment, double omega_true);

// One truthful policy per user, in instance order.
std::vector<AgentPolicy> truthful_policies(const Instance &instance);

// Truthful fleet except `cheater`, who reports omega_fake instead of the
// true coefficient. Throws InputError on a bad index or omega_fake <= 0.
std::vector<AgentPolicy> policies_with_misreport(const Instance &instance,
                                                 std::size_t cheater,
                                                 double omega_fake);

}  // namespace flexclinch
