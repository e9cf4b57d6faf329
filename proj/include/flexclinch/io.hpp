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

#include <nlohmann/json.hpp>

#include "flexclinch/mechanisms.hpp"
#include "flexclinch/metrics.hpp"
#include "flexclinch/model.hpp"

namespace flexclinch {
namespace io {

using json = nlohmann::ordered_json;

// Instance files: {"reward": {"a", "b"}, "slot_duration_hours", "users":
// [{"id", "omega", "q_max", "baseline_load"}], "timeslots", "dr_events"}.
// The reward domain L is derived from the baselines. Throws InputError on
// missing fields, wrong types, or unparseable text.
Instance instance_from_json(const json &root);
Instance load_instance(const std::string &path);
json instance_to_json(const Instance &instance);
void save_instance(const Instance &instance, const std::string &path);

// Outcome files: mechanism, per-user rows (id, allocation, payment,
// utility), totals, welfare, terminal price, iteration count. Numbers are
// emitted at full round-trip precision; field order is fixed, so equal
// outcomes serialize to identical bytes.
json outcome_to_json(const Outcome &outcome, const Instance &instance);
void save_outcome(const Outcome &outcome, const Instance &instance,
                  const std::string &path);

// Clinch ledgers as CSV: user,id,iteration,lambda,quantity.
std::string ledger_to_csv(const ClinchLedger &ledger, const Instance &instance);
void save_ledger(const ClinchLedger &ledger, const Instance &instance,
                 const std::string &path);

// Misreport sweeps as CSV: omega,utility,profit (one row per grid point).
std::string sweep_to_csv(const SweepResult &sweep);
void save_sweep(const SweepResult &sweep, const std::string &path);

// Epsilon sweeps as CSV: epsilon,mean_loss,bound. Both loss and bound are
// proportional (welfare units divided by the optimum), so a row is in
// violation exactly when mean_loss > bound.
struct EpsilonRow
{
  double epsilon = 0.0;
  double mean_proportional_loss = 0.0;
  double bound = 0.0;
};
std::string epsilon_rows_to_csv(const std::vector<EpsilonRow> &rows);

// Shared number formatting: shortest text that round-trips a double.
std::string format_double(double value);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);

}  // namespace io
}  // namespace flexclinch
