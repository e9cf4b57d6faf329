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

#include "flexclinch/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "flexclinch/errors.hpp"

namespace flexclinch {
namespace numeric {

double canonical_sum(std::vector<double> values)
{
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values)
  {
    total += v;
  }
  return total;
}

double fold_excluding(const std::vector<double> &sorted_ascending, double own)
{
  bool removed = false;
  double total = 0.0;
  for (double v : sorted_ascending)
  {
    if (!removed && v == own)
    {
      removed = true;
      continue;
    }
    total += v;
  }
  if (!removed)
  {
    throw InternalError("fold_excluding: own value not present in aggregate");
  }
  return total;
}

double price_at(double lambda_max, double epsilon, long k)
{
  double lambda = lambda_max - static_cast<double>(k) * epsilon;
  return lambda > 0.0 ? lambda : 0.0;
}

double clinch_increment(double demand, double rivals_sum,
                        double prior_cumulative)
{
  double guaranteed = demand - rivals_sum;
  double increment = guaranteed - prior_cumulative;
  return increment > 0.0 ? increment : 0.0;
}

double ration_factor(double demand, double sum_prior, double sum_bids)
{
  double residual_supply = sum_bids - sum_prior;
  if (residual_supply <= 0.0)
  {
    return 0.0;
  }
  double residual_demand = demand - sum_prior;
  if (residual_demand <= 0.0)
  {
    return 0.0;
  }
  double factor = residual_demand / residual_supply;
  // Demand first covered the offers this round, so the factor is a share.
  return factor < 1.0 ? factor : 1.0;
}

double ration_increment(double bid, double prior_cumulative, double factor)
{
  double residual = bid - prior_cumulative;
  if (residual <= 0.0)
  {
    return 0.0;
  }
  return residual * factor;
}

double bisect_nondecreasing(const std::function<double(double)> &f, double lo,
                            double hi, double tol)
{
  if (!(lo <= hi))
  {
    throw InputError("bisect_nondecreasing: empty bracket");
  }
  if (!(tol > 0.0))
  {
    throw InputError("bisect_nondecreasing: tolerance must be positive");
  }
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo > 0.0 || f_hi < 0.0)
  {
    throw InputError("bisect_nondecreasing: root not bracketed");
  }
  while (hi - lo > tol)
  {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
    {
      break;  // bracket no longer representable
    }
    if (f(mid) < 0.0)
    {
      lo = mid;
    }
    else
    {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace numeric
}  // namespace flexclinch
