/*------------------------------------------------------------------------------
 *
 *   Copyright 2026 The flexclinch authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 *
 *----------------------------------------------------------------------------*/

/* C API of the flexclinch shared library.
 *
 * Conventions:
 *  - every fallible call returns fc_status; FC_OK is 0;
 *  - on failure, fc_last_error() describes the problem (thread-local,
 *    valid until the next failing call on the same thread);
 *  - objects come back through out-parameters as opaque handles and must
 *    be released with the matching *_free;
 *  - strings returned through char** out-parameters are heap-allocated
 *    and must be released with fc_string_free.
 */

#ifndef FLEXCLINCH_H
#define FLEXCLINCH_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct fc_instance fc_instance;
typedef struct fc_run fc_run;

typedef enum fc_status
{
  FC_OK = 0,
  FC_ERR_INPUT = 1,      /* malformed or out-of-domain input */
  FC_ERR_DEGENERATE = 2, /* flat reward curve: no demand schedule */
  FC_ERR_PROTOCOL = 3,   /* distributed simulation stalled */
  FC_ERR_IO = 4,         /* file could not be read or written */
  FC_ERR_INTERNAL = 5    /* invariant violation inside the library */
} fc_status;

typedef enum fc_mechanism
{
  FC_MECH_MCA = 0,
  FC_MECH_VCG = 1,
  FC_MECH_MARKET_CLEARING = 2
} fc_mechanism;

typedef enum fc_family
{
  FC_FAMILY_MIXED = 0, /* comparable discomfort coefficients */
  FC_FAMILY_SPREAD = 1 /* cheap outliers that bind their caps */
} fc_family;

const char *fc_version(void);
const char *fc_last_error(void);
void fc_string_free(char *s);

/* ---- instances ---------------------------------------------------------- */

fc_status fc_instance_load(const char *path, fc_instance **out);
fc_status fc_instance_parse(const char *json_text, fc_instance **out);
fc_status fc_instance_save(const fc_instance *instance, const char *path);
void fc_instance_free(fc_instance *instance);

/* FC_OK when the instance is structurally sound, FC_ERR_INPUT otherwise.
 * When report_out is non-null it receives the full human-readable list of
 * violations (empty string when sound). */
fc_status fc_instance_validate(const fc_instance *instance, char **report_out);

int fc_instance_num_users(const fc_instance *instance);

/* Synthesizes a reproducible benchmark instance. */
fc_status fc_make_family_instance(uint64_t seed, int n_users, double omega_f,
                                  fc_family family, fc_instance **out);

/* ---- mechanism runs ------------------------------------------------------ */

typedef struct fc_mca_options
{
  double epsilon;     /* price decrement per iteration */
  int compat_line11;  /* nonzero: legacy closing-round rationing */
} fc_mca_options;

typedef struct fc_vcg_options
{
  double tolerance;   /* bisection bracket width */
  int compat_eq6;     /* nonzero: legacy pivot-term reward evaluation */
} fc_vcg_options;

fc_status fc_run_mca(const fc_instance *instance,
                     const fc_mca_options *options, fc_run **out);
fc_status fc_run_vcg(const fc_instance *instance,
                     const fc_vcg_options *options, fc_run **out);
fc_status fc_run_market_clearing(const fc_instance *instance, fc_run **out);

/* Distributed auction over the simulated overlay, truthful bidders. */
fc_status fc_run_protocol(const fc_instance *instance, double epsilon,
                          uint64_t seed, fc_run **out);

void fc_run_free(fc_run *run);

fc_status fc_run_outcome_json(const fc_run *run, char **out);
/* Clinch history, FC_ERR_INPUT unless the run was a clinching auction. */
fc_status fc_run_ledger_csv(const fc_run *run, char **out);
/* Message log, FC_ERR_INPUT unless the run was a protocol simulation. */
fc_status fc_run_trace_jsonl(const fc_run *run, char **out);
/* Privacy audit of a protocol run's trace. *pass is 1 or 0. */
fc_status fc_run_privacy_report(const fc_run *run, int *pass, char **report_out);

double fc_run_welfare(const fc_run *run);
double fc_run_total_reduction(const fc_run *run);
double fc_run_total_payment(const fc_run *run);
double fc_run_lambda_terminal(const fc_run *run);
long fc_run_iterations(const fc_run *run);
fc_status fc_run_allocation(const fc_run *run, int user, double *out);
fc_status fc_run_payment(const fc_run *run, int user, double *out);

/* ---- analyses ------------------------------------------------------------ */

typedef struct fc_cheat_summary
{
  double best_omega;       /* reported coefficient maximizing utility */
  double utility_truthful; /* cheater's utility when honest */
  double utility_best;     /* cheater's utility at best_omega */
  double profit_truthful;  /* operator profit when everyone is honest */
  double profit_at_best;   /* operator profit at best_omega */
} fc_cheat_summary;

/* Walks one user's reported coefficient over a log grid centered on the
 * truth. csv_out (optional) receives omega,utility,profit rows. */
fc_status fc_cheat_sweep(const fc_instance *instance, fc_mechanism mechanism,
                         int cheater, double epsilon, int grid_points,
                         char **csv_out, fc_cheat_summary *summary);

/* Mean proportional welfare loss per epsilon over a synthesized family,
 * plus the log-log slope of loss against epsilon. */
fc_status fc_epsilon_sweep(const double *epsilons, int n_epsilons,
                           uint64_t seed0, int instances, int n_users,
                           double omega_f, fc_family family, char **csv_out,
                           double *slope_out);

/* Runs the distributed and the centralized auction on the same instance,
 * demands exact equality, and audits the trace. report_json gets a summary
 * object; *equivalent and *privacy_pass are 1 or 0. */
fc_status fc_protocol_check(const fc_instance *instance, double epsilon,
                            uint64_t seed, int *equivalent, int *privacy_pass,
                            char **report_json);

/* Synthesizes a day of slots, auctions every event slot, reports totals. */
fc_status fc_simulate_day(uint64_t seed, int n_users, int n_events,
                          double omega_f, double epsilon, char **report_json);

double fc_welfare_loss_bound(double epsilon, double lambda_max, double b);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FLEXCLINCH_H */
