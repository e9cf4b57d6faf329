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

#include <functional>
#include <vector>

namespace flexclinch {
namespace numeric {

// Order-canonical floating-point sum: sort ascending, then left-fold.
// Every aggregate that must agree bit-for-bit between the centralized
// auction and the message-passing simulation goes through here, so the
// result is independent of the order values were collected in.
double canonical_sum(std::vector<double> values);

// Left-fold of an ascending vector with one occurrence of `own` removed.
// Equal values are interchangeable, so dropping any one occurrence leaves
// the same multiset; the caller gets exactly the sum a rival set would
// produce through canonical_sum. Throws InternalError if `own` is absent.
double fold_excluding(const std::vector<double> &sorted_ascending, double own);

// Price on the descending grid: max(lambda_max - k * epsilon, 0).
// Computed by multiplication so long runs carry no accumulated drift.
double price_at(double lambda_max, double epsilon, long k);

// Quantity newly guaranteed to one bidder: how far demand exceeds the
// rivals' combined offer, net of what this bidder already holds.
double clinch_increment(double demand, double rivals_sum, double prior_cumulative);

// Scale factor distributing residual demand over residual supply in the
// closing round. Zero residual supply yields factor 0.
double ration_factor(double demand, double sum_prior, double sum_bids);

// One bidder's closing-round award under `ration_factor`'s scale.
double ration_increment(double bid, double prior_cumulative, double factor);

// Root of a nondecreasing function on [lo, hi] by bisection, run until the
// bracket is narrower than `tol`. Requires f(lo) <= 0 <= f(hi).
double bisect_nondecreasing(const std::function<double(double)> &f, double lo,
                            double hi, double tol);

}  // namespace numeric
}  // namespace flexclinch
