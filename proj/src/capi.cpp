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

#include "flexclinch/flexclinch.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "flexclinch/agents.hpp"
#include "flexclinch/errors.hpp"
#include "flexclinch/experiment.hpp"
#include "flexclinch/io.hpp"
#include "flexclinch/mechanisms.hpp"
#include "flexclinch/metrics.hpp"
#include "flexclinch/model.hpp"
#include "flexclinch/numeric.hpp"
#include "flexclinch/protocol.hpp"

using namespace flexclinch;

struct fc_instance
{
  Instance value;
};

struct fc_run
{
  Instance instance;  // snapshot the run was produced from
  Outcome outcome;
  std::optional<ClinchLedger> ledger;
  std::optional<protocol::ProtocolTrace> trace;
};

namespace {

#define FC_API __attribute__((visibility("default")))

thread_local std::string g_last_error;

char *dup_string(const std::string &text)
{
  char *out = static_cast<char *>(std::malloc(text.size() + 1));
  if (out != nullptr)
  {
    std::memcpy(out, text.c_str(), text.size() + 1);
  }
  return out;
}

template <typename F>
fc_status guarded(F &&body)
{
  try
  {
    body();
    return FC_OK;
  }
  catch (const InputError &e)
  {
    g_last_error = e.what();
    return FC_ERR_INPUT;
  }
  catch (const DegenerateDemandError &e)
  {
    g_last_error = e.what();
    return FC_ERR_DEGENERATE;
  }
  catch (const ProtocolStallError &e)
  {
    g_last_error = e.what();
    return FC_ERR_PROTOCOL;
  }
  catch (const IoError &e)
  {
    g_last_error = e.what();
    return FC_ERR_IO;
  }
  catch (const std::exception &e)
  {
    g_last_error = e.what();
    return FC_ERR_INTERNAL;
  }
  catch (...)
  {
    g_last_error = "unknown error";
    return FC_ERR_INTERNAL;
  }
}

fc_status input_error(const std::string &message)
{
  g_last_error = message;
  return FC_ERR_INPUT;
}

experiment::Family to_family(fc_family family)
{
  return family == FC_FAMILY_SPREAD ? experiment::Family::Spread
                                    : experiment::Family::Mixed;
}

}  // namespace

extern "C" {

FC_API const char *fc_version(void)
{
  return "1.0.0";
}

FC_API const char *fc_last_error(void)
{
  return g_last_error.c_str();
}

FC_API void fc_string_free(char *s)
{
  std::free(s);
}

FC_API fc_status fc_instance_load(const char *path, fc_instance **out)
{
  if (path == nullptr || out == nullptr)
  {
    return input_error("fc_instance_load: null argument");
  }
  return guarded([&] { *out = new fc_instance{io::load_instance(path)}; });
}

FC_API fc_status fc_instance_parse(const char *json_text, fc_instance **out)
{
  if (json_text == nullptr || out == nullptr)
  {
    return input_error("fc_instance_parse: null argument");
  }
  return guarded(
      [&]
      {
        io::json root;
        try
        {
          root = io::json::parse(json_text);
        }
        catch (const io::json::parse_error &e)
        {
          throw InputError(std::string("instance text: ") + e.what());
        }
        *out = new fc_instance{io::instance_from_json(root)};
      });
}

FC_API fc_status fc_instance_save(const fc_instance *instance, const char *path)
{
  if (instance == nullptr || path == nullptr)
  {
    return input_error("fc_instance_save: null argument");
  }
  return guarded([&] { io::save_instance(instance->value, path); });
}

FC_API void fc_instance_free(fc_instance *instance)
{
  delete instance;
}

FC_API fc_status fc_instance_validate(const fc_instance *instance,
                                      char **report_out)
{
  if (instance == nullptr)
  {
    return input_error("fc_instance_validate: null instance");
  }
  ValidationReport report = validate_instance(instance->value);
  if (report_out != nullptr)
  {
    *report_out = dup_string(report.to_string());
  }
  if (!report.ok())
  {
    g_last_error = "invalid instance:\n" + report.to_string();
    return FC_ERR_INPUT;
  }
  return FC_OK;
}

FC_API int fc_instance_num_users(const fc_instance *instance)
{
  if (instance == nullptr)
  {
    return 0;
  }
  return static_cast<int>(instance->value.users.size());
}

FC_API fc_status fc_make_family_instance(uint64_t seed, int n_users,
                                         double omega_f, fc_family family,
                                         fc_instance **out)
{
  if (out == nullptr)
  {
    return input_error("fc_make_family_instance: null output");
  }
  if (n_users <= 0)
  {
    return input_error("fc_make_family_instance: n_users must be positive");
  }
  return guarded(
      [&]
      {
        *out = new fc_instance{experiment::make_family_instance(
            seed, static_cast<std::size_t>(n_users), omega_f,
            to_family(family))};
      });
}

FC_API fc_status fc_run_mca(const fc_instance *instance,
                            const fc_mca_options *options, fc_run **out)
{
  if (instance == nullptr || out == nullptr)
  {
    return input_error("fc_run_mca: null argument");
  }
  McaOptions opts;
  if (options != nullptr)
  {
    opts.epsilon = options->epsilon;
    opts.compat_line11 = options->compat_line11 != 0;
  }
  return guarded(
      [&]
      {
        McaResult result = run_mca(instance->value, opts);
        *out = new fc_run{instance->value, std::move(result.outcome),
                          std::move(result.ledger), std::nullopt};
      });
}

FC_API fc_status fc_run_vcg(const fc_instance *instance,
                            const fc_vcg_options *options, fc_run **out)
{
  if (instance == nullptr || out == nullptr)
  {
    return input_error("fc_run_vcg: null argument");
  }
  VcgOptions opts;
  if (options != nullptr)
  {
    if (options->tolerance > 0.0)
    {
      opts.tolerance = options->tolerance;
    }
    opts.compat_eq6 = options->compat_eq6 != 0;
  }
  return guarded(
      [&]
      {
        *out = new fc_run{instance->value, run_vcg(instance->value, opts),
                          std::nullopt, std::nullopt};
      });
}

FC_API fc_status fc_run_market_clearing(const fc_instance *instance,
                                        fc_run **out)
{
  if (instance == nullptr || out == nullptr)
  {
    return input_error("fc_run_market_clearing: null argument");
  }
  return guarded(
      [&]
      {
        *out = new fc_run{instance->value, run_market_clearing(instance->value),
                          std::nullopt, std::nullopt};
      });
}

FC_API fc_status fc_run_protocol(const fc_instance *instance, double epsilon,
                                 uint64_t seed, fc_run **out)
{
  if (instance == nullptr || out == nullptr)
  {
    return input_error("fc_run_protocol: null argument");
  }
  return guarded(
      [&]
      {
        protocol::ProtocolResult result =
            protocol::run_protocol_mca(instance->value, epsilon, seed);
        *out = new fc_run{instance->value, std::move(result.outcome),
                          std::nullopt, std::move(result.trace)};
      });
}

FC_API void fc_run_free(fc_run *run)
{
  delete run;
}

FC_API fc_status fc_run_outcome_json(const fc_run *run, char **out)
{
  if (run == nullptr || out == nullptr)
  {
    return input_error("fc_run_outcome_json: null argument");
  }
  return guarded(
      [&]
      {
        *out = dup_string(
            io::outcome_to_json(run->outcome, run->instance).dump(2) + "\n");
      });
}

FC_API fc_status fc_run_ledger_csv(const fc_run *run, char **out)
{
  if (run == nullptr || out == nullptr)
  {
    return input_error("fc_run_ledger_csv: null argument");
  }
  if (!run->ledger)
  {
    return input_error("fc_run_ledger_csv: run has no clinch ledger");
  }
  return guarded(
      [&] { *out = dup_string(io::ledger_to_csv(*run->ledger, run->instance)); });
}

FC_API fc_status fc_run_trace_jsonl(const fc_run *run, char **out)
{
  if (run == nullptr || out == nullptr)
  {
    return input_error("fc_run_trace_jsonl: null argument");
  }
  if (!run->trace)
  {
    return input_error("fc_run_trace_jsonl: run has no message trace");
  }
  return guarded([&] { *out = dup_string(run->trace->serialize()); });
}

FC_API fc_status fc_run_privacy_report(const fc_run *run, int *pass,
                                       char **report_out)
{
  if (run == nullptr || pass == nullptr)
  {
    return input_error("fc_run_privacy_report: null argument");
  }
  if (!run->trace)
  {
    return input_error("fc_run_privacy_report: run has no message trace");
  }
  return guarded(
      [&]
      {
        protocol::PrivacyReport report = protocol::assert_privacy(*run->trace);
        *pass = report.pass() ? 1 : 0;
        if (report_out != nullptr)
        {
          *report_out = dup_string(report.to_string());
        }
      });
}

FC_API double fc_run_welfare(const fc_run *run)
{
  return run != nullptr ? run->outcome.welfare : 0.0;
}

FC_API double fc_run_total_reduction(const fc_run *run)
{
  return run != nullptr ? run->outcome.total_reduction : 0.0;
}

FC_API double fc_run_total_payment(const fc_run *run)
{
  if (run == nullptr)
  {
    return 0.0;
  }
  double total = 0.0;
  for (double p : run->outcome.payment)
  {
    total += p;
  }
  return total;
}

FC_API double fc_run_lambda_terminal(const fc_run *run)
{
  return run != nullptr ? run->outcome.lambda_terminal : 0.0;
}

FC_API long fc_run_iterations(const fc_run *run)
{
  return run != nullptr ? run->outcome.iterations : 0;
}

FC_API fc_status fc_run_allocation(const fc_run *run, int user, double *out)
{
  if (run == nullptr || out == nullptr)
  {
    return input_error("fc_run_allocation: null argument");
  }
  if (user < 0 ||
      static_cast<std::size_t>(user) >= run->outcome.allocation.size())
  {
    return input_error("fc_run_allocation: user out of range");
  }
  *out = run->outcome.allocation[static_cast<std::size_t>(user)];
  return FC_OK;
}

FC_API fc_status fc_run_payment(const fc_run *run, int user, double *out)
{
  if (run == nullptr || out == nullptr)
  {
    return input_error("fc_run_payment: null argument");
  }
  if (user < 0 || static_cast<std::size_t>(user) >= run->outcome.payment.size())
  {
    return input_error("fc_run_payment: user out of range");
  }
  *out = run->outcome.payment[static_cast<std::size_t>(user)];
  return FC_OK;
}

FC_API fc_status fc_cheat_sweep(const fc_instance *instance,
                                fc_mechanism mechanism, int cheater,
                                double epsilon, int grid_points, char **csv_out,
                                fc_cheat_summary *summary)
{
  if (instance == nullptr)
  {
    return input_error("fc_cheat_sweep: null instance");
  }
  if (cheater < 0 ||
      static_cast<std::size_t>(cheater) >= instance->value.users.size())
  {
    return input_error("fc_cheat_sweep: cheater index out of range");
  }
  return guarded(
      [&]
      {
        Mechanism mech = Mechanism::Mca;
        if (mechanism == FC_MECH_VCG)
        {
          mech = Mechanism::Vcg;
        }
        else if (mechanism == FC_MECH_MARKET_CLEARING)
        {
          mech = Mechanism::MarketClearing;
        }
        double omega_true =
            instance->value.users[static_cast<std::size_t>(cheater)].omega;
        std::vector<double> grid = default_omega_grid(omega_true, grid_points);
        SweepResult sweep =
            cheater_sweep(instance->value, mech,
                          static_cast<std::size_t>(cheater), grid, epsilon);
        if (csv_out != nullptr)
        {
          *csv_out = dup_string(io::sweep_to_csv(sweep));
        }
        if (summary != nullptr)
        {
          summary->best_omega = sweep.best_omega;
          summary->utility_truthful = sweep.utility_truthful;
          summary->utility_best = sweep.utility_best;
          summary->profit_truthful = sweep.profit_truthful;
          summary->profit_at_best = sweep.profit_best;
        }
      });
}

FC_API fc_status fc_epsilon_sweep(const double *epsilons, int n_epsilons,
                                  uint64_t seed0, int instances, int n_users,
                                  double omega_f, fc_family family,
                                  char **csv_out, double *slope_out)
{
  if (epsilons == nullptr || n_epsilons <= 0)
  {
    return input_error("fc_epsilon_sweep: need at least one epsilon");
  }
  if (instances <= 0 || n_users <= 0)
  {
    return input_error("fc_epsilon_sweep: instances and n_users must be positive");
  }
  return guarded(
      [&]
      {
        std::vector<io::EpsilonRow> rows;
        std::vector<double> xs;
        std::vector<double> ys;
        for (int k = 0; k < n_epsilons; ++k)
        {
          double eps = epsilons[k];
          double loss = experiment::mean_proportional_loss(
              eps, seed0, static_cast<std::size_t>(instances),
              static_cast<std::size_t>(n_users), omega_f, to_family(family));
          io::EpsilonRow row;
          row.epsilon = eps;
          row.mean_proportional_loss = loss;
          row.bound = experiment::mean_proportional_bound(
              eps, seed0, static_cast<std::size_t>(instances),
              static_cast<std::size_t>(n_users), omega_f, to_family(family));
          rows.push_back(row);
          xs.push_back(eps);
          ys.push_back(loss);
        }
        if (csv_out != nullptr)
        {
          *csv_out = dup_string(io::epsilon_rows_to_csv(rows));
        }
        if (slope_out != nullptr)
        {
          *slope_out = experiment::loglog_slope(xs, ys);
        }
      });
}

FC_API fc_status fc_protocol_check(const fc_instance *instance, double epsilon,
                                   uint64_t seed, int *equivalent,
                                   int *privacy_pass, char **report_json)
{
  if (instance == nullptr)
  {
    return input_error("fc_protocol_check: null instance");
  }
  return guarded(
      [&]
      {
        protocol::ProtocolResult distributed =
            protocol::run_protocol_mca(instance->value, epsilon, seed);
        McaResult centralized =
            run_mca(instance->value, McaOptions{epsilon, false});

        const Outcome &d = distributed.outcome;
        const Outcome &c = centralized.outcome;
        bool same = d.allocation == c.allocation && d.payment == c.payment &&
                    d.total_reduction == c.total_reduction &&
                    d.welfare == c.welfare &&
                    d.lambda_terminal == c.lambda_terminal &&
                    d.iterations == c.iterations;

        protocol::PrivacyReport privacy =
            protocol::assert_privacy(distributed.trace);

        if (equivalent != nullptr)
        {
          *equivalent = same ? 1 : 0;
        }
        if (privacy_pass != nullptr)
        {
          *privacy_pass = privacy.pass() ? 1 : 0;
        }
        if (report_json != nullptr)
        {
          io::json report;
          report["equivalent"] = same;
          report["privacy_pass"] = privacy.pass();
          report["iterations"] = d.iterations;
          report["messages"] = distributed.trace.messages.size();
          report["warnings"] = distributed.trace.warnings;
          report["checks"] = io::json::array();
          for (const protocol::PrivacyCheck &check : privacy.checks)
          {
            io::json row;
            row["id"] = check.id;
            row["name"] = check.name;
            row["pass"] = check.pass;
            report["checks"].push_back(std::move(row));
          }
          report["outcome"] = io::outcome_to_json(d, instance->value);
          *report_json = dup_string(report.dump(2) + "\n");
        }
      });
}

FC_API fc_status fc_simulate_day(uint64_t seed, int n_users, int n_events,
                                 double omega_f, double epsilon,
                                 char **report_json)
{
  if (report_json == nullptr)
  {
    return input_error("fc_simulate_day: null output");
  }
  if (n_users <= 0 || n_events <= 0)
  {
    return input_error("fc_simulate_day: n_users and n_events must be positive");
  }
  return guarded(
      [&]
      {
        experiment::DayProfile day = experiment::make_day_profile(
            seed, static_cast<std::size_t>(n_users),
            static_cast<std::size_t>(n_events));

        io::json report;
        report["slots"] = day.slot_baseline.size();
        report["profile"] = day.slot_baseline;
        report["events"] = io::json::array();
        double day_reduction = 0.0;
        double day_payment = 0.0;
        double day_welfare = 0.0;
        double day_profit = 0.0;
        for (int slot : day.event_slots)
        {
          Instance instance = experiment::instance_for_slot(
              day, slot, seed, static_cast<std::size_t>(n_users), omega_f);
          McaResult result = run_mca(instance, McaOptions{epsilon, false});
          double paid = 0.0;
          for (double p : result.outcome.payment)
          {
            paid += p;
          }
          double profit = fsp_profit(result.outcome, instance);
          io::json row;
          row["slot"] = slot;
          row["baseline"] = day.slot_baseline[static_cast<std::size_t>(slot)];
          row["reduction"] = result.outcome.total_reduction;
          row["payment"] = paid;
          row["welfare"] = result.outcome.welfare;
          row["operator_profit"] = profit;
          row["lambda_terminal"] = result.outcome.lambda_terminal;
          report["events"].push_back(std::move(row));
          day_reduction += result.outcome.total_reduction;
          day_payment += paid;
          day_welfare += result.outcome.welfare;
          day_profit += profit;
        }
        report["total_reduction"] = day_reduction;
        report["total_payment"] = day_payment;
        report["total_welfare"] = day_welfare;
        report["total_operator_profit"] = day_profit;
        *report_json = dup_string(report.dump(2) + "\n");
      });
}

FC_API double fc_welfare_loss_bound(double epsilon, double lambda_max, double b)
{
  try
  {
    return welfare_loss_bound(epsilon, lambda_max, b);
  }
  catch (const std::exception &e)
  {
    g_last_error = e.what();
    return -1.0;
  }
}

}  // extern "C"
