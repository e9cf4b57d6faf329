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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flexclinch/agents.hpp"
#include "flexclinch/experiment.hpp"
#include "flexclinch/mechanisms.hpp"
#include "flexclinch/model.hpp"

namespace flexclinch {
namespace protocol {

using json = nlohmann::ordered_json;

// 160-bit overlay address, compared lexicographically. Distance between
// addresses is the bytewise XOR, ordered the same way.
struct NodeId
{
  std::array<std::uint8_t, 20> bytes{};

  std::string hex() const;
  static NodeId from_hex(const std::string &text);

  auto operator<=>(const NodeId &) const = default;
};

// True when `a` is XOR-closer to `key` than `b` is.
bool closer_to(const NodeId &a, const NodeId &b, const NodeId &key);

enum class MessageKind
{
  StoreBid,        // owner -> custodian: this round's offer, value only
  SumUpward,       // chain gather of unattributed (bid, prev, prior) triples
  DemandFromFsp,   // operator -> top node: current price and demand
  BroadcastTotals, // top node -> everyone: aggregate the round needs
  TupleHandoff,    // custodian -> custodian (or -> owner at the end)
  FinalReport,     // owner -> operator: own totals, after the auction ends
};

std::string to_string(MessageKind kind);
MessageKind message_kind_from_string(const std::string &text);

struct ProtocolMessage
{
  long seq = 0;
  MessageKind kind = MessageKind::StoreBid;
  std::string from;  // node hex, or "fsp"
  std::string to;    // node hex, or "fsp"
  long iteration = 0;
  json payload;
};

// Running totals for one participant, held by whichever node currently
// stores that participant's bid; moves with the bid every round.
struct AllocationTuple
{
  Energy total_clinched = 0.0;
  Money total_payment = 0.0;
  Energy prev_bid = 0.0;
};

struct ProtocolTrace
{
  std::vector<ProtocolMessage> messages;
  std::vector<std::string> warnings;

  // One JSON object per line, fields in fixed order.
  std::string serialize() const;
  static ProtocolTrace parse(const std::string &text);
};

struct PrivacyCheck
{
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<long> offending_seq;  // messages that violate the rule
};

struct PrivacyReport
{
  std::vector<PrivacyCheck> checks;

  bool pass() const;
  std::string to_string() const;
};

// Audits a trace against what the operator and the custodians are allowed
// to see:
//  1. before any FinalReport, messages to the operator carry at most
//     {iteration, lambda} - the price clock, never bids or identities;
//  2. StoreBid payloads carry exactly {value} - no identity travels with
//     a stored bid;
//  3. no node stores more than one foreign bid per iteration;
//  4. from the first FinalReport on, messages to the operator are
//     FinalReports with payload keys exactly {user, total_clinched,
//     total_payment}.
PrivacyReport assert_privacy(const ProtocolTrace &trace);

struct ProtocolResult
{
  Outcome outcome;
  ProtocolTrace trace;
};

// Step-level simulator of the distributed auction over a hash-addressed
// overlay. Each round every owner re-stores its bid at a pseudorandom
// custodian, running totals ride along, sums climb the id-ordered chain
// to the highest node, and only that node talks to the operator until the
// final per-user reports. All arithmetic routes through the same scalar
// helpers as the centralized auction, so results match bit for bit.
class OverlaySimulator
{
public:
  OverlaySimulator(const Instance &instance,
                   const std::vector<AgentPolicy> &policies, double epsilon,
                   std::uint64_t seed);

  // Deterministic address assignment for n participants.
  static std::vector<NodeId> assign_node_ids(std::size_t n, std::uint64_t seed);

  // -- single steps, exposed for tests ------------------------------------

  // Picks iteration k's custodian for `owner` (never the owner itself and,
  // when n >= 3, never the previous custodian) and logs the StoreBid.
  NodeId store_bid(std::size_t owner, Energy value, long iteration);

  // Moves owner's running totals to its iteration-k custodian.
  void handoff_tuple(std::size_t owner, long iteration);

  // Chain gather to the highest node; returns the canonical bid total.
  // Throws ProtocolStallError if any bid is missing for the iteration.
  Energy aggregate_sum(long iteration);

  // Hands the top node the operator's price and demand, then either
  // clinches (book still uncovered) or closes it by rationing; custodians
  // update the tuples they hold. Requires aggregate_sum(iteration) first.
  void broadcast_and_clinch(long iteration, Price lambda, Energy demand);

  bool terminal_reached() const { return terminal_reached_; }

  // -- full run ------------------------------------------------------------

  ProtocolResult run();

  const std::vector<NodeId> &node_ids() const { return ids_; }
  NodeId custodian_of(std::size_t owner, long iteration) const;
  const AllocationTuple &tuple_of(std::size_t owner) const;

private:
  struct Slot
  {
    Energy value = 0.0;
    std::size_t custodian = 0;  // index into ids_
  };

  // Custodian assignment for one round: a permutation of the nodes with
  // nobody storing their own bid and, when n >= 3, nobody reusing their
  // previous custodian. Built lazily, once per round.
  const std::vector<std::size_t> &matching_for(long iteration);
  void log(MessageKind kind, const std::string &from, const std::string &to,
           long iteration, json payload);

  const Instance instance_;
  const std::vector<AgentPolicy> policies_;
  double epsilon_;
  std::vector<NodeId> ids_;
  std::vector<std::size_t> by_id_;  // node indices, ascending by id
  std::size_t top_ = 0;  // index of the highest id, speaks to the operator
  std::vector<AllocationTuple> tuples_;
  std::vector<std::optional<Slot>> current_;  // this round's stored bids
  std::vector<std::optional<Slot>> previous_;
  long current_iteration_ = -1;
  std::map<long, std::vector<std::size_t>> matching_;  // owner -> custodian
  experiment::Rng rng_;
  // Last gather, as seen by the top node: one (value, prev, prior) triple
  // per custodian, in ascending node-id order.
  std::vector<std::array<double, 3>> gathered_;
  long gathered_iteration_ = -1;
  bool terminal_reached_ = false;
  Price lambda_terminal_ = 0.0;
  long iterations_ = 0;
  ProtocolTrace trace_;
  long seq_ = 0;
};

// Runs the distributed auction end to end under truthful (or given)
// policies. The outcome must exactly equal run_mca on the same inputs.
ProtocolResult run_protocol_mca(const Instance &instance,
                                const std::vector<AgentPolicy> &policies,
                                double epsilon, std::uint64_t seed);
ProtocolResult run_protocol_mca(const Instance &instance, double epsilon,
                                std::uint64_t seed);

}  // namespace protocol
}  // namespace flexclinch
