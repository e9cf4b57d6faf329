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

#include "flexclinch/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "flexclinch/errors.hpp"

namespace flexclinch {
namespace io {

namespace {

double require_number(const json &obj, const std::string &key,
                      const std::string &where)
{
  if (!obj.contains(key) || !obj[key].is_number())
  {
    throw InputError(where + ": missing or non-numeric field '" + key + "'");
  }
  return obj[key].get<double>();
}

std::string require_string(const json &obj, const std::string &key,
                           const std::string &where)
{
  if (!obj.contains(key) || !obj[key].is_string())
  {
    throw InputError(where + ": missing or non-string field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

}  // namespace

std::string format_double(double value)
{
  // Shortest representation that parses back to the same double.
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc())
  {
    throw InternalError("format_double: conversion failed");
  }
  return std::string(buffer, end);
}

Instance instance_from_json(const json &root)
{
  if (!root.is_object())
  {
    throw InputError("instance: top level must be a JSON object");
  }
  if (!root.contains("reward") || !root["reward"].is_object())
  {
    throw InputError("instance: missing 'reward' object");
  }
  if (!root.contains("users") || !root["users"].is_array() ||
      root["users"].empty())
  {
    throw InputError("instance: missing or empty 'users' array");
  }

  double a = require_number(root["reward"], "a", "instance.reward");
  double b = require_number(root["reward"], "b", "instance.reward");

  double slot_hours = 1.0;
  if (root.contains("slot_duration_hours"))
  {
    slot_hours = require_number(root, "slot_duration_hours", "instance");
  }

  int timeslot = 0;
  if (root.contains("dr_events"))
  {
    if (!root["dr_events"].is_array() || root["dr_events"].empty() ||
        !root["dr_events"][0].is_number_integer())
    {
      throw InputError("instance: 'dr_events' must be a non-empty integer array");
    }
    timeslot = root["dr_events"][0].get<int>();
  }
  if (root.contains("timeslots"))
  {
    if (!root["timeslots"].is_number_integer() ||
        root["timeslots"].get<int>() <= 0)
    {
      throw InputError("instance: 'timeslots' must be a positive integer");
    }
  }

  std::vector<User> users;
  users.reserve(root["users"].size());
  for (const json &u : root["users"])
  {
    if (!u.is_object())
    {
      throw InputError("instance.users: entries must be objects");
    }
    User user;
    user.id = require_string(u, "id", "instance.users");
    user.omega = require_number(u, "omega", "instance.users");
    user.feasible.q_max = require_number(u, "q_max", "instance.users");
    user.baseline_load = require_number(u, "baseline_load", "instance.users");
    users.push_back(std::move(user));
  }

  return make_instance(std::move(users), a, b, timeslot, slot_hours);
}

Instance load_instance(const std::string &path)
{
  json root;
  try
  {
    root = json::parse(read_file(path));
  }
  catch (const json::parse_error &e)
  {
    throw InputError("instance '" + path + "': " + e.what());
  }
  return instance_from_json(root);
}

json instance_to_json(const Instance &instance)
{
  json root;
  root["reward"] = json{{"a", instance.reward.a}, {"b", instance.reward.b}};
  root["slot_duration_hours"] = instance.slot_duration_hours;
  root["users"] = json::array();
  for (const User &u : instance.users)
  {
    json user;
    user["id"] = u.id;
    user["omega"] = u.omega;
    user["q_max"] = u.feasible.q_max;
    user["baseline_load"] = u.baseline_load;
    root["users"].push_back(std::move(user));
  }
  root["timeslots"] = 96;
  root["dr_events"] = json::array({instance.timeslot});
  return root;
}

void save_instance(const Instance &instance, const std::string &path)
{
  write_file(path, instance_to_json(instance).dump(2) + "\n");
}

json outcome_to_json(const Outcome &outcome, const Instance &instance)
{
  if (outcome.allocation.size() != instance.users.size())
  {
    throw InputError("outcome_to_json: outcome does not match instance");
  }
  json root;
  root["mechanism"] = to_string(outcome.mechanism);
  root["users"] = json::array();
  Money total_payment = 0.0;
  for (std::size_t i = 0; i < instance.users.size(); ++i)
  {
    json row;
    row["id"] = instance.users[i].id;
    row["allocation"] = outcome.allocation[i];
    row["payment"] = outcome.payment[i];
    row["utility"] = realized_utility(outcome.allocation[i],
                                      outcome.payment[i],
                                      instance.users[i].omega);
    root["users"].push_back(std::move(row));
    total_payment += outcome.payment[i];
  }
  root["total_reduction"] = outcome.total_reduction;
  root["total_payment"] = total_payment;
  root["welfare"] = outcome.welfare;
  root["operator_profit"] = fsp_profit(outcome, instance);
  root["lambda_terminal"] = outcome.lambda_terminal;
  root["iterations"] = outcome.iterations;
  return root;
}

void save_outcome(const Outcome &outcome, const Instance &instance,
                  const std::string &path)
{
  write_file(path, outcome_to_json(outcome, instance).dump(2) + "\n");
}

std::string ledger_to_csv(const ClinchLedger &ledger, const Instance &instance)
{
  std::ostringstream out;
  out << "user,id,iteration,lambda,quantity\n";
  for (const ClinchEvent &e : ledger.events)
  {
    if (e.user >= instance.users.size())
    {
      throw InputError("ledger_to_csv: event user out of range");
    }
    out << e.user << "," << instance.users[e.user].id << "," << e.iteration
        << "," << format_double(e.lambda) << "," << format_double(e.quantity)
        << "\n";
  }
  return out.str();
}

void save_ledger(const ClinchLedger &ledger, const Instance &instance,
                 const std::string &path)
{
  write_file(path, ledger_to_csv(ledger, instance));
}

std::string sweep_to_csv(const SweepResult &sweep)
{
  std::ostringstream out;
  out << "omega,utility,profit\n";
  for (std::size_t k = 0; k < sweep.omega_grid.size(); ++k)
  {
    out << format_double(sweep.omega_grid[k]) << ","
        << format_double(sweep.cheater_utility[k]) << ","
        << format_double(sweep.operator_profit[k]) << "\n";
  }
  return out.str();
}

void save_sweep(const SweepResult &sweep, const std::string &path)
{
  write_file(path, sweep_to_csv(sweep));
}

std::string epsilon_rows_to_csv(const std::vector<EpsilonRow> &rows)
{
  std::ostringstream out;
  out << "epsilon,mean_loss,bound\n";
  for (const EpsilonRow &r : rows)
  {
    out << format_double(r.epsilon) << ","
        << format_double(r.mean_proportional_loss) << ","
        << format_double(r.bound) << "\n";
  }
  return out.str();
}

std::string read_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw IoError("cannot open '" + path + "' for reading");
  }
  std::ostringstream content;
  content << in.rdbuf();
  if (in.bad())
  {
    throw IoError("read failed for '" + path + "'");
  }
  return content.str();
}

void write_file(const std::string &path, const std::string &content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << content;
  out.flush();
  if (!out)
  {
    throw IoError("write failed for '" + path + "'");
  }
}

}  // namespace io
}  // namespace flexclinch
