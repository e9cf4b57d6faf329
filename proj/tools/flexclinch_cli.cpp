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

// Command-line front end. Everything auction-related goes through the C API
// of the shared library; this file only parses arguments, formats output,
// and writes files.
//
// Exit status: 0 success, 1 property or equivalence failure at runtime,
// 2 usage or input errors.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "flexclinch/flexclinch.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int g_verbosity = 1;  // 0 quiet, 1 normal, 2 debug; set by FLEXCLINCH_LOG

void read_verbosity_from_env()
{
  const char *level = std::getenv("FLEXCLINCH_LOG");
  if (level == nullptr)
  {
    return;
  }
  std::string value(level);
  if (value == "quiet" || value == "0")
  {
    g_verbosity = 0;
  }
  else if (value == "debug" || value == "2")
  {
    g_verbosity = 2;
  }
}

void debug(const std::string &line)
{
  if (g_verbosity >= 2)
  {
    std::cerr << "[debug] " << line << "\n";
  }
}

// Heap strings handed out by the library.
struct CStr
{
  char *s = nullptr;
  ~CStr() { fc_string_free(s); }
  CStr() = default;
  CStr(const CStr &) = delete;
  CStr &operator=(const CStr &) = delete;
};

struct InstanceHandle
{
  fc_instance *p = nullptr;
  ~InstanceHandle() { fc_instance_free(p); }
  InstanceHandle() = default;
  InstanceHandle(const InstanceHandle &) = delete;
  InstanceHandle &operator=(const InstanceHandle &) = delete;
};

struct RunHandle
{
  fc_run *p = nullptr;
  ~RunHandle() { fc_run_free(p); }
  RunHandle() = default;
  RunHandle(const RunHandle &) = delete;
  RunHandle &operator=(const RunHandle &) = delete;
};

// Input-shaped problems are usage errors (2); anything that breaks once a
// valid run is underway is a runtime failure (1).
int exit_code_for(fc_status status)
{
  switch (status)
  {
  case FC_ERR_INPUT:
  case FC_ERR_IO:
  case FC_ERR_DEGENERATE:
    return kExitUsage;
  default:
    return kExitFailure;
  }
}

int fail_with(fc_status status, const std::string &what)
{
  std::cerr << "error: " << what << ": " << fc_last_error() << "\n";
  return exit_code_for(status);
}

// Shortest text that round-trips, matching the library's CSV number style.
std::string num(double value) { return json(value).dump(); }

bool write_text(const fs::path &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out)
  {
    std::cerr << "error: could not write " << path.string() << "\n";
    return false;
  }
  if (g_verbosity >= 1)
  {
    std::cerr << "wrote " << path.string() << "\n";
  }
  return true;
}

bool ensure_out_dir(const std::string &out)
{
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec)
  {
    std::cerr << "error: could not create output directory " << out << ": "
              << ec.message() << "\n";
    return false;
  }
  return true;
}

int load_instance_or_fail(const std::string &path, InstanceHandle *handle)
{
  fc_status status = fc_instance_load(path.c_str(), &handle->p);
  if (status != FC_OK)
  {
    return fail_with(status, "loading " + path);
  }
  CStr report;
  status = fc_instance_validate(handle->p, &report.s);
  if (status != FC_OK)
  {
    std::cerr << "error: invalid instance " << path << ":\n"
              << (report.s != nullptr ? report.s : fc_last_error()) << "\n";
    return kExitUsage;
  }
  return 0;
}

// ---- run --------------------------------------------------------------------

struct RunConfig
{
  std::string instance;
  std::string mechanism = "mca";
  double epsilon = 1e-5;
  std::string out;
  bool compat_line11 = false;
  bool compat_eq6 = false;
};

int cmd_run(const RunConfig &cfg)
{
  InstanceHandle instance;
  if (int code = load_instance_or_fail(cfg.instance, &instance))
  {
    return code;
  }

  RunHandle run;
  fc_status status = FC_OK;
  if (cfg.mechanism == "mca")
  {
    fc_mca_options options{cfg.epsilon, cfg.compat_line11 ? 1 : 0};
    status = fc_run_mca(instance.p, &options, &run.p);
  }
  else if (cfg.mechanism == "vcg")
  {
    fc_vcg_options options{1e-10, cfg.compat_eq6 ? 1 : 0};
    status = fc_run_vcg(instance.p, &options, &run.p);
  }
  else
  {
    status = fc_run_market_clearing(instance.p, &run.p);
  }
  if (status != FC_OK)
  {
    return fail_with(status, "running " + cfg.mechanism);
  }

  CStr outcome_text;
  status = fc_run_outcome_json(run.p, &outcome_text.s);
  if (status != FC_OK)
  {
    return fail_with(status, "reading the outcome");
  }
  json outcome = json::parse(outcome_text.s);

  std::cout << "mechanism " << outcome["mechanism"].get<std::string>() << "\n";
  for (const json &user : outcome["users"])
  {
    std::cout << "user " << user["id"].get<std::string>() << ": allocation "
              << num(user["allocation"].get<double>()) << " payment "
              << num(user["payment"].get<double>()) << " utility "
              << num(user["utility"].get<double>()) << "\n";
  }
  std::cout << "total_reduction " << num(outcome["total_reduction"].get<double>())
            << "\n";
  std::cout << "total_payment " << num(outcome["total_payment"].get<double>())
            << "\n";
  std::cout << "welfare " << num(outcome["welfare"].get<double>()) << "\n";
  std::cout << "operator_profit "
            << num(outcome["operator_profit"].get<double>()) << "\n";
  if (cfg.mechanism == "mca")
  {
    std::cout << "lambda_terminal "
              << num(outcome["lambda_terminal"].get<double>()) << "\n";
    std::cout << "iterations " << outcome["iterations"].get<long>() << "\n";
  }

  if (!cfg.out.empty())
  {
    if (!ensure_out_dir(cfg.out))
    {
      return kExitUsage;
    }
    if (!write_text(fs::path(cfg.out) / "outcome.json", outcome_text.s))
    {
      return kExitFailure;
    }
    if (cfg.mechanism == "mca")
    {
      CStr ledger;
      status = fc_run_ledger_csv(run.p, &ledger.s);
      if (status != FC_OK)
      {
        return fail_with(status, "reading the clinch ledger");
      }
      if (!write_text(fs::path(cfg.out) / "ledger.csv", ledger.s))
      {
        return kExitFailure;
      }
    }
  }
  return 0;
}

// ---- sweep-cheat --------------------------------------------------------------

struct CheatConfig
{
  std::string instance;
  std::vector<double> omega_f = {1.0, 2.0, 3.0, 4.0, 5.0};
  double epsilon = 1e-4;
  std::uint64_t seed = 42;
  int n_users = 20;
  int cheater = 0;
  int grid_points = 201;
  std::string out;
};

int cmd_sweep_cheat(const CheatConfig &cfg)
{
  const std::vector<std::pair<fc_mechanism, std::string>> mechanisms = {
      {FC_MECH_MCA, "mca"},
      {FC_MECH_MARKET_CLEARING, "market-clearing"},
  };

  // With an explicit instance file there is nothing to scale, so the sweep
  // runs once per mechanism; otherwise one synthesized fleet per omega_f,
  // sharing the seed so only the scale changes.
  std::vector<double> factors = cfg.instance.empty()
                                    ? cfg.omega_f
                                    : std::vector<double>{0.0};
  if (!cfg.out.empty() && !ensure_out_dir(cfg.out))
  {
    return kExitUsage;
  }

  for (const auto &[mechanism, tag] : mechanisms)
  {
    std::string ratio_csv = "omega_f,profit_ratio\n";
    for (double factor : factors)
    {
      InstanceHandle instance;
      std::string label;
      if (cfg.instance.empty())
      {
        fc_status status = fc_make_family_instance(
            cfg.seed, cfg.n_users, factor, FC_FAMILY_MIXED, &instance.p);
        if (status != FC_OK)
        {
          return fail_with(status, "synthesizing the fleet");
        }
        label = tag + " omega_f " + num(factor);
      }
      else
      {
        if (int code = load_instance_or_fail(cfg.instance, &instance))
        {
          return code;
        }
        label = tag + " " + cfg.instance;
      }
      debug("sweeping " + label);

      CStr csv;
      fc_cheat_summary summary{};
      fc_status status =
          fc_cheat_sweep(instance.p, mechanism, cfg.cheater, cfg.epsilon,
                         cfg.grid_points, &csv.s, &summary);
      if (status != FC_OK)
      {
        return fail_with(status, "sweeping " + label);
      }

      double ratio = summary.profit_at_best / summary.profit_truthful;
      std::cout << label << ": best_omega " << num(summary.best_omega)
                << " utility_truthful " << num(summary.utility_truthful)
                << " utility_best " << num(summary.utility_best)
                << " profit_ratio " << num(ratio) << "\n";
      ratio_csv += num(factor) + "," + num(ratio) + "\n";

      if (!cfg.out.empty())
      {
        std::string name = cfg.instance.empty()
                               ? "cheat_" + tag + "_f" + num(factor) + ".csv"
                               : "cheat_" + tag + ".csv";
        if (!write_text(fs::path(cfg.out) / name, csv.s))
        {
          return kExitFailure;
        }
      }
    }
    if (!cfg.out.empty() && cfg.instance.empty())
    {
      if (!write_text(fs::path(cfg.out) / ("profit_ratio_" + tag + ".csv"),
                      ratio_csv))
      {
        return kExitFailure;
      }
    }
  }
  return 0;
}

// ---- sweep-epsilon -------------------------------------------------------------

struct EpsilonConfig
{
  std::vector<double> epsilons = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  std::uint64_t seed = 7;
  int instances = 8;
  int n_users = 20;
  double omega_f = 1.0;
  std::string family = "spread";
  std::string out;
};

int cmd_sweep_epsilon(const EpsilonConfig &cfg)
{
  fc_family family =
      (cfg.family == "mixed") ? FC_FAMILY_MIXED : FC_FAMILY_SPREAD;

  CStr csv;
  double slope = 0.0;
  fc_status status = fc_epsilon_sweep(
      cfg.epsilons.data(), static_cast<int>(cfg.epsilons.size()), cfg.seed,
      cfg.instances, cfg.n_users, cfg.omega_f, family, &csv.s, &slope);
  if (status != FC_OK)
  {
    return fail_with(status, "sweeping the price step");
  }

  std::cout << csv.s;
  if (cfg.epsilons.size() >= 2)
  {
    std::cout << "loglog_slope " << num(slope) << "\n";
  }

  // The ceiling column is in the same proportional units, so every row must
  // sit at or under it; a row above it is a genuine property violation.
  bool within = true;
  std::istringstream lines(csv.s);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line))
  {
    std::istringstream fields(line);
    std::string eps_text, loss_text, bound_text;
    std::getline(fields, eps_text, ',');
    std::getline(fields, loss_text, ',');
    std::getline(fields, bound_text, ',');
    if (std::stod(loss_text) > std::stod(bound_text))
    {
      std::cerr << "error: measured loss above its ceiling at epsilon "
                << eps_text << "\n";
      within = false;
    }
  }
  std::cout << (within ? "loss_within_bound yes" : "loss_within_bound NO")
            << "\n";

  if (!cfg.out.empty())
  {
    if (!ensure_out_dir(cfg.out))
    {
      return kExitUsage;
    }
    if (!write_text(fs::path(cfg.out) / "epsilon_sweep.csv", csv.s))
    {
      return kExitFailure;
    }
  }
  return within ? 0 : kExitFailure;
}

// ---- simulate-day --------------------------------------------------------------

struct DayConfig
{
  std::uint64_t seed = 2026;
  int n_users = 20;
  int n_events = 2;
  double omega_f = 1.0;
  double epsilon = 1e-4;
  std::string out;
};

int cmd_simulate_day(const DayConfig &cfg)
{
  CStr report_text;
  fc_status status = fc_simulate_day(cfg.seed, cfg.n_users, cfg.n_events,
                                     cfg.omega_f, cfg.epsilon, &report_text.s);
  if (status != FC_OK)
  {
    return fail_with(status, "simulating the day");
  }
  json report = json::parse(report_text.s);

  std::map<int, double> reduction_at;
  for (const json &event : report["events"])
  {
    reduction_at[event["slot"].get<int>()] = event["reduction"].get<double>();
    std::cout << "event slot " << event["slot"].get<int>() << ": reduction "
              << num(event["reduction"].get<double>()) << " payment "
              << num(event["payment"].get<double>()) << " welfare "
              << num(event["welfare"].get<double>()) << "\n";
  }
  std::cout << "total_reduction " << num(report["total_reduction"].get<double>())
            << "\n";
  std::cout << "total_welfare " << num(report["total_welfare"].get<double>())
            << "\n";

  std::string csv = "slot,load_no_dr,load_with_dr\n";
  const json &profile = report["profile"];
  for (std::size_t t = 0; t < profile.size(); ++t)
  {
    double baseline = profile[t].get<double>();
    auto hit = reduction_at.find(static_cast<int>(t));
    double with_dr =
        baseline - (hit == reduction_at.end() ? 0.0 : hit->second);
    csv += std::to_string(t) + "," + num(baseline) + "," + num(with_dr) + "\n";
  }

  if (!cfg.out.empty())
  {
    if (!ensure_out_dir(cfg.out))
    {
      return kExitUsage;
    }
    if (!write_text(fs::path(cfg.out) / "day_report.json", report_text.s) ||
        !write_text(fs::path(cfg.out) / "day_profile.csv", csv))
    {
      return kExitFailure;
    }
  }
  else
  {
    std::cout << csv;
  }
  return 0;
}

// ---- protocol ------------------------------------------------------------------

struct ProtocolConfig
{
  std::string instance;
  double epsilon = 1e-3;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_protocol(const ProtocolConfig &cfg)
{
  InstanceHandle instance;
  if (int code = load_instance_or_fail(cfg.instance, &instance))
  {
    return code;
  }

  int equivalent = 0;
  int privacy_pass = 0;
  CStr report_text;
  fc_status status = fc_protocol_check(instance.p, cfg.epsilon, cfg.seed,
                                       &equivalent, &privacy_pass,
                                       &report_text.s);
  if (status != FC_OK)
  {
    return fail_with(status, "distributed auction");
  }
  json report = json::parse(report_text.s);

  for (const json &warning : report["warnings"])
  {
    std::cerr << "warning: " << warning.get<std::string>() << "\n";
  }
  std::cout << "centralized-equivalence: " << (equivalent ? "PASS" : "FAIL")
            << "\n";
  for (const json &check : report["checks"])
  {
    std::cout << "privacy " << check["id"].get<int>() << " "
              << check["name"].get<std::string>() << ": "
              << (check["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
  }
  std::cout << "privacy: " << (privacy_pass ? "PASS" : "FAIL") << "\n";
  std::cout << "iterations " << report["iterations"].get<long>() << ", messages "
            << report["messages"].get<long>() << "\n";

  if (!cfg.out.empty())
  {
    if (!ensure_out_dir(cfg.out))
    {
      return kExitUsage;
    }
    RunHandle run;
    status = fc_run_protocol(instance.p, cfg.epsilon, cfg.seed, &run.p);
    if (status != FC_OK)
    {
      return fail_with(status, "replaying the distributed auction");
    }
    CStr trace;
    status = fc_run_trace_jsonl(run.p, &trace.s);
    if (status != FC_OK)
    {
      return fail_with(status, "reading the message trace");
    }
    if (!write_text(fs::path(cfg.out) / "trace.jsonl", trace.s) ||
        !write_text(fs::path(cfg.out) / "protocol_report.json", report_text.s))
    {
      return kExitFailure;
    }
  }

  return (equivalent && privacy_pass) ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char **argv)
{
  read_verbosity_from_env();

  CLI::App app{std::string("flexclinch ") + fc_version() +
               " - clinching-auction flexibility markets"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  CLI::App *run = app.add_subcommand(
      "run", "Run one mechanism on an instance file");
  run->add_option("--instance", run_cfg.instance, "Instance JSON file")
      ->required();
  run->add_option("--mechanism", run_cfg.mechanism,
                  "Mechanism: mca, vcg, or market-clearing")
      ->check(CLI::IsMember({"mca", "vcg", "market-clearing"}));
  run->add_option("--epsilon", run_cfg.epsilon,
                  "Price decrement per iteration (mca)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", run_cfg.out, "Directory for outcome.json and, for "
                                        "mca, ledger.csv");
  run->add_flag("--compat-line11", run_cfg.compat_line11,
                "Legacy closing-round rationing that ignores prior clinches");
  run->add_flag("--compat-eq6", run_cfg.compat_eq6,
                "Legacy pivot-term reward evaluated at the rivals' own total");

  CheatConfig cheat_cfg;
  CLI::App *cheat = app.add_subcommand(
      "sweep-cheat",
      "Walk one user's reported coefficient across a grid of lies");
  cheat->add_option("--instance", cheat_cfg.instance,
                    "Instance JSON file (otherwise fleets are synthesized "
                    "per --omega-f)");
  cheat->add_option("--omega-f", cheat_cfg.omega_f,
                    "Discomfort scale factors for synthesized fleets")
      ->delimiter(',');
  cheat->add_option("--epsilon", cheat_cfg.epsilon,
                    "Price decrement for the clinching auction")
      ->check(CLI::PositiveNumber);
  cheat->add_option("--seed", cheat_cfg.seed, "Fleet synthesis seed");
  cheat->add_option("--n-users", cheat_cfg.n_users, "Synthesized fleet size")
      ->check(CLI::PositiveNumber);
  cheat->add_option("--cheater", cheat_cfg.cheater,
                    "Index of the user whose report is swept");
  cheat->add_option("--grid-points", cheat_cfg.grid_points,
                    "Number of reported coefficients to try")
      ->check(CLI::PositiveNumber);
  cheat->add_option("--out", cheat_cfg.out, "Directory for the sweep CSVs");

  EpsilonConfig eps_cfg;
  CLI::App *eps = app.add_subcommand(
      "sweep-epsilon", "Measure welfare loss as the price step shrinks");
  eps->add_option("--epsilon", eps_cfg.epsilons,
                  "Price steps to measure (comma separated)")
      ->delimiter(',');
  eps->add_option("--seed", eps_cfg.seed, "Fleet synthesis seed");
  eps->add_option("--instances", eps_cfg.instances,
                  "Instances averaged per price step")
      ->check(CLI::PositiveNumber);
  eps->add_option("--n-users", eps_cfg.n_users, "Synthesized fleet size")
      ->check(CLI::PositiveNumber);
  eps->add_option("--omega-f", eps_cfg.omega_f, "Discomfort scale factor");
  eps->add_option("--family", eps_cfg.family,
                  "Fleet family: mixed (comparable users) or spread "
                  "(cheap outliers that bind their caps)")
      ->check(CLI::IsMember({"mixed", "spread"}));
  eps->add_option("--out", eps_cfg.out, "Directory for epsilon_sweep.csv");

  DayConfig day_cfg;
  CLI::App *day = app.add_subcommand(
      "simulate-day", "Auction every event slot of a synthesized day");
  day->add_option("--seed", day_cfg.seed, "Day and fleet synthesis seed");
  day->add_option("--n-users", day_cfg.n_users, "Fleet size")
      ->check(CLI::PositiveNumber);
  day->add_option("--n-events", day_cfg.n_events,
                  "Demand-response events to place on peak hours")
      ->check(CLI::PositiveNumber);
  day->add_option("--omega-f", day_cfg.omega_f, "Discomfort scale factor");
  day->add_option("--epsilon", day_cfg.epsilon,
                  "Price decrement per iteration")
      ->check(CLI::PositiveNumber);
  day->add_option("--out", day_cfg.out,
                  "Directory for day_report.json and day_profile.csv");

  ProtocolConfig proto_cfg;
  CLI::App *proto = app.add_subcommand(
      "protocol",
      "Run the distributed auction and audit it against the centralized one");
  proto->add_option("--instance", proto_cfg.instance, "Instance JSON file")
      ->required();
  proto->add_option("--epsilon", proto_cfg.epsilon,
                    "Price decrement per iteration")
      ->check(CLI::PositiveNumber);
  proto->add_option("--seed", proto_cfg.seed, "Custodian assignment seed");
  proto->add_option("--out", proto_cfg.out,
                    "Directory for trace.jsonl and protocol_report.json");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try
  {
    if (run->parsed())
    {
      return cmd_run(run_cfg);
    }
    if (cheat->parsed())
    {
      return cmd_sweep_cheat(cheat_cfg);
    }
    if (eps->parsed())
    {
      return cmd_sweep_epsilon(eps_cfg);
    }
    if (day->parsed())
    {
      return cmd_simulate_day(day_cfg);
    }
    if (proto->parsed())
    {
      return cmd_protocol(proto_cfg);
    }
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
