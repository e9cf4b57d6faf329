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

#include "flexclinch/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "flexclinch/errors.hpp"
#include "flexclinch/numeric.hpp"

namespace flexclinch {
namespace protocol {

namespace {

using numeric::canonical_sum;
using numeric::clinch_increment;
using numeric::fold_excluding;
using numeric::price_at;
using numeric::ration_factor;
using numeric::ration_increment;

constexpr char kOperatorAddress[] = "fsp";

Energy clamp_to_domain(Energy total, const RewardParams &reward)
{
  if (total < 0.0)
  {
    return 0.0;
  }
  return total < reward.L ? total : reward.L;
}

int hex_digit(char c)
{
  if (c >= '0' && c <= '9')
  {
    return c - '0';
  }
  if (c >= 'a' && c <= 'f')
  {
    return c - 'a' + 10;
  }
  throw InputError("NodeId: invalid hex digit");
}

}  // namespace

std::string NodeId::hex() const
{
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(40);
  for (std::uint8_t b : bytes)
  {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0F]);
  }
  return out;
}

NodeId NodeId::from_hex(const std::string &text)
{
  if (text.size() != 40)
  {
    throw InputError("NodeId: expected 40 hex characters");
  }
  NodeId id;
  for (std::size_t i = 0; i < 20; ++i)
  {
    id.bytes[i] = static_cast<std::uint8_t>((hex_digit(text[2 * i]) << 4) |
                                            hex_digit(text[2 * i + 1]));
  }
  return id;
}

bool closer_to(const NodeId &a, const NodeId &b, const NodeId &key)
{
  for (std::size_t i = 0; i < 20; ++i)
  {
    std::uint8_t da = static_cast<std::uint8_t>(a.bytes[i] ^ key.bytes[i]);
    std::uint8_t db = static_cast<std::uint8_t>(b.bytes[i] ^ key.bytes[i]);
    if (da != db)
    {
      return da < db;
    }
  }
  return false;
}

std::string to_string(MessageKind kind)
{
  switch (kind)
  {
  case MessageKind::StoreBid:
    return "StoreBid";
  case MessageKind::SumUpward:
    return "SumUpward";
  case MessageKind::DemandFromFsp:
    return "DemandFromFsp";
  case MessageKind::BroadcastTotals:
    return "BroadcastTotals";
  case MessageKind::TupleHandoff:
    return "TupleHandoff";
  case MessageKind::FinalReport:
    return "FinalReport";
  }
  throw InternalError("to_string: unknown message kind");
}

MessageKind message_kind_from_string(const std::string &text)
{
  if (text == "StoreBid")
  {
    return MessageKind::StoreBid;
  }
  if (text == "SumUpward")
  {
    return MessageKind::SumUpward;
  }
  if (text == "DemandFromFsp")
  {
    return MessageKind::DemandFromFsp;
  }
  if (text == "BroadcastTotals")
  {
    return MessageKind::BroadcastTotals;
  }
  if (text == "TupleHandoff")
  {
    return MessageKind::TupleHandoff;
  }
  if (text == "FinalReport")
  {
    return MessageKind::FinalReport;
  }
  throw InputError("unknown message kind '" + text + "'");
}

std::string ProtocolTrace::serialize() const
{
  std::ostringstream out;
  for (const std::string &w : warnings)
  {
    json line;
    line["warning"] = w;
    out << line.dump() << "\n";
  }
  for (const ProtocolMessage &m : messages)
  {
    json line;
    line["seq"] = m.seq;
    line["kind"] = to_string(m.kind);
    line["from"] = m.from;
    line["to"] = m.to;
    line["iteration"] = m.iteration;
    line["payload"] = m.payload;
    out << line.dump() << "\n";
  }
  return out.str();
}

ProtocolTrace ProtocolTrace::parse(const std::string &text)
{
  ProtocolTrace trace;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
  {
    if (line.empty())
    {
      continue;
    }
    json obj = json::parse(line, nullptr, true);
    if (obj.contains("warning"))
    {
      trace.warnings.push_back(obj["warning"].get<std::string>());
      continue;
    }
    ProtocolMessage m;
    m.seq = obj.at("seq").get<long>();
    m.kind = message_kind_from_string(obj.at("kind").get<std::string>());
    m.from = obj.at("from").get<std::string>();
    m.to = obj.at("to").get<std::string>();
    m.iteration = obj.at("iteration").get<long>();
    m.payload = obj.at("payload");
    trace.messages.push_back(std::move(m));
  }
  return trace;
}

bool PrivacyReport::pass() const
{
  for (const PrivacyCheck &c : checks)
  {
    if (!c.pass)
    {
      return false;
    }
  }
  return true;
}

std::string PrivacyReport::to_string() const
{
  std::ostringstream out;
  for (const PrivacyCheck &c : checks)
  {
    out << "check " << c.id << " (" << c.name << "): "
        << (c.pass ? "pass" : "FAIL");
    if (!c.pass)
    {
      out << " at seq";
      for (long s : c.offending_seq)
      {
        out << " " << s;
      }
    }
    out << "\n";
  }
  return out.str();
}

PrivacyReport assert_privacy(const ProtocolTrace &trace)
{
  long first_final = -1;
  for (const ProtocolMessage &m : trace.messages)
  {
    if (m.kind == MessageKind::FinalReport)
    {
      first_final = m.seq;
      break;
    }
  }

  auto payload_keys = [](const ProtocolMessage &m)
  {
    std::set<std::string> keys;
    if (m.payload.is_object())
    {
      for (auto it = m.payload.begin(); it != m.payload.end(); ++it)
      {
        keys.insert(it.key());
      }
    }
    return keys;
  };

  PrivacyCheck clock_only{1, "operator-sees-only-the-price-clock", true, {}};
  PrivacyCheck bid_anonymous{2, "stored-bids-carry-no-identity", true, {}};
  PrivacyCheck one_per_node{3, "one-foreign-bid-per-node-per-round", true, {}};
  PrivacyCheck reports_only{4, "operator-endgame-is-reports-only", true, {}};

  std::map<std::pair<long, std::string>, std::vector<long>> foreign_stores;

  for (const ProtocolMessage &m : trace.messages)
  {
    bool before_final = first_final < 0 || m.seq < first_final;

    if (m.to == kOperatorAddress && before_final)
    {
      for (const std::string &key : payload_keys(m))
      {
        if (key != "iteration" && key != "lambda")
        {
          clock_only.pass = false;
          clock_only.offending_seq.push_back(m.seq);
          break;
        }
      }
    }

    if (m.kind == MessageKind::StoreBid)
    {
      if (payload_keys(m) != std::set<std::string>{"value"})
      {
        bid_anonymous.pass = false;
        bid_anonymous.offending_seq.push_back(m.seq);
      }
      if (m.from != m.to)
      {
        foreign_stores[{m.iteration, m.to}].push_back(m.seq);
      }
    }

    if (m.to == kOperatorAddress && !before_final)
    {
      bool ok = m.kind == MessageKind::FinalReport &&
                payload_keys(m) == std::set<std::string>{"user", "total_clinched",
                                                         "total_payment"};
      if (!ok)
      {
        reports_only.pass = false;
        reports_only.offending_seq.push_back(m.seq);
      }
    }
  }

  for (const auto &[key, seqs] : foreign_stores)
  {
    if (seqs.size() > 1)
    {
      one_per_node.pass = false;
      for (long s : seqs)
      {
        one_per_node.offending_seq.push_back(s);
      }
    }
  }

  PrivacyReport report;
  report.checks = {clock_only, bid_anonymous, one_per_node, reports_only};
  return report;
}

OverlaySimulator::OverlaySimulator(const Instance &instance,
                                   const std::vector<AgentPolicy> &policies,
                                   double epsilon, std::uint64_t seed)
    : instance_(instance),
      policies_(policies),
      epsilon_(epsilon),
      rng_(~seed)  // the id stream uses the seed itself; never replay it
{
  require_valid(instance_);
  if (policies_.size() != instance_.users.size())
  {
    throw InputError("overlay: policy count does not match user count");
  }
  if (!(epsilon_ > 0.0))
  {
    throw InputError("overlay: epsilon must be positive");
  }
  if (instance_.reward.flat())
  {
    throw DegenerateDemandError("overlay: flat reward curve");
  }

  std::size_t n = instance_.users.size();
  ids_ = assign_node_ids(n, seed);
  by_id_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    by_id_[i] = i;
  }
  std::sort(by_id_.begin(), by_id_.end(),
            [this](std::size_t x, std::size_t y) { return ids_[x] < ids_[y]; });
  top_ = by_id_.back();

  tuples_.resize(n);
  current_.resize(n);
  previous_.resize(n);

  if (n == 1)
  {
    trace_.warnings.push_back(
        "single participant: bids are stored at their owner, so custodial "
        "storage adds no privacy");
  }
}

std::vector<NodeId> OverlaySimulator::assign_node_ids(std::size_t n,
                                                      std::uint64_t seed)
{
  if (n == 0)
  {
    throw InputError("assign_node_ids: need at least one node");
  }
  experiment::Rng rng(seed);
  std::set<NodeId> seen;
  std::vector<NodeId> ids;
  ids.reserve(n);
  while (ids.size() < n)
  {
    NodeId id;
    for (std::size_t chunk = 0; chunk < 3; ++chunk)
    {
      std::uint64_t word = rng.next_u64();
      for (std::size_t b = 0; b < 8; ++b)
      {
        std::size_t pos = chunk * 8 + b;
        if (pos < 20)
        {
          id.bytes[pos] = static_cast<std::uint8_t>(word >> (56 - 8 * b));
        }
      }
    }
    if (seen.insert(id).second)
    {
      ids.push_back(id);
    }
  }
  return ids;
}

const std::vector<std::size_t> &OverlaySimulator::matching_for(long iteration)
{
  auto found = matching_.find(iteration);
  if (found != matching_.end())
  {
    return found->second;
  }

  std::size_t n = ids_.size();
  std::vector<std::size_t> result(n);

  if (n == 1)
  {
    result[0] = 0;
  }
  else if (n == 2)
  {
    // Only one node other than the owner exists; freshness is waived.
    result[0] = 1;
    result[1] = 0;
  }
  else
  {
    const std::vector<std::size_t> *prev = nullptr;
    auto before = matching_.find(iteration - 1);
    if (before != matching_.end())
    {
      prev = &before->second;
    }

    bool done = false;
    for (int attempt = 0; attempt < 100 && !done; ++attempt)
    {
      std::vector<bool> used(n, false);
      done = true;
      for (std::size_t owner = 0; owner < n; ++owner)
      {
        std::vector<std::size_t> candidates;
        for (std::size_t j = 0; j < n; ++j)
        {
          if (!used[j] && j != owner && (!prev || (*prev)[owner] != j))
          {
            candidates.push_back(j);
          }
        }
        if (candidates.empty())
        {
          done = false;  // greedy dead end; redraw the whole round
          break;
        }
        std::size_t pick = candidates[rng_.below(candidates.size())];
        result[owner] = pick;
        used[pick] = true;
      }
    }
    if (!done)
    {
      throw InternalError("overlay: could not draw a custodian matching");
    }
  }

  auto [it, inserted] = matching_.emplace(iteration, std::move(result));
  (void)inserted;
  return it->second;
}

void OverlaySimulator::log(MessageKind kind, const std::string &from,
                           const std::string &to, long iteration, json payload)
{
  ProtocolMessage m;
  m.seq = seq_++;
  m.kind = kind;
  m.from = from;
  m.to = to;
  m.iteration = iteration;
  m.payload = std::move(payload);
  trace_.messages.push_back(std::move(m));
}

NodeId OverlaySimulator::store_bid(std::size_t owner, Energy value,
                                   long iteration)
{
  if (owner >= ids_.size())
  {
    throw InputError("store_bid: owner out of range");
  }
  if (!(value >= 0.0))
  {
    throw InputError("store_bid: negative bid");
  }
  if (iteration < current_iteration_)
  {
    throw InputError("store_bid: rounds only move forward");
  }
  if (iteration > current_iteration_)
  {
    previous_ = current_;
    std::fill(current_.begin(), current_.end(), std::nullopt);
    current_iteration_ = iteration;
  }

  std::size_t w = matching_for(iteration)[owner];
  current_[owner] = Slot{value, w};
  json payload;
  payload["value"] = value;
  log(MessageKind::StoreBid, ids_[owner].hex(), ids_[w].hex(), iteration,
      std::move(payload));
  return ids_[w];
}

void OverlaySimulator::handoff_tuple(std::size_t owner, long iteration)
{
  if (owner >= ids_.size())
  {
    throw InputError("handoff_tuple: owner out of range");
  }
  if (iteration != current_iteration_ || !current_[owner])
  {
    throw ProtocolStallError("handoff_tuple: bid not stored for this round");
  }
  if (!previous_[owner])
  {
    throw ProtocolStallError("handoff_tuple: no previous round to hand off from");
  }

  tuples_[owner].prev_bid = previous_[owner]->value;
  std::size_t from = previous_[owner]->custodian;
  std::size_t to = current_[owner]->custodian;
  if (from != to)
  {
    json payload;
    payload["total_clinched"] = tuples_[owner].total_clinched;
    payload["total_payment"] = tuples_[owner].total_payment;
    payload["prev_bid"] = tuples_[owner].prev_bid;
    log(MessageKind::TupleHandoff, ids_[from].hex(), ids_[to].hex(), iteration,
        std::move(payload));
  }
}

Energy OverlaySimulator::aggregate_sum(long iteration)
{
  if (iteration != current_iteration_)
  {
    throw ProtocolStallError("aggregate_sum: round mismatch");
  }
  std::size_t n = ids_.size();
  std::vector<std::size_t> owner_at(n, 0);
  for (std::size_t owner = 0; owner < n; ++owner)
  {
    if (!current_[owner])
    {
      throw ProtocolStallError("aggregate_sum: a stored bid is missing");
    }
    owner_at[current_[owner]->custodian] = owner;
  }

  // Each node appends the anonymous triple it stores and passes the pile
  // to the next-higher id; the last node ends up holding all of them.
  gathered_.clear();
  gathered_.reserve(n);
  json entries = json::array();
  for (std::size_t p = 0; p < n; ++p)
  {
    std::size_t node = by_id_[p];
    std::size_t owner = owner_at[node];
    std::array<double, 3> triple = {current_[owner]->value,
                                    tuples_[owner].prev_bid,
                                    tuples_[owner].total_clinched};
    gathered_.push_back(triple);
    entries.push_back(json::array({triple[0], triple[1], triple[2]}));
    if (p + 1 < n)
    {
      json payload;
      payload["entries"] = entries;
      log(MessageKind::SumUpward, ids_[node].hex(), ids_[by_id_[p + 1]].hex(),
          iteration, std::move(payload));
    }
  }
  gathered_iteration_ = iteration;

  std::vector<double> values;
  values.reserve(n);
  for (const auto &t : gathered_)
  {
    values.push_back(t[0]);
  }
  return canonical_sum(values);
}

void OverlaySimulator::broadcast_and_clinch(long iteration, Price lambda,
                                            Energy demand)
{
  if (iteration != current_iteration_ || gathered_iteration_ != iteration)
  {
    throw ProtocolStallError("broadcast_and_clinch: aggregate the round first");
  }
  if (terminal_reached_)
  {
    throw ProtocolStallError("broadcast_and_clinch: auction already closed");
  }

  std::size_t n = ids_.size();
  const RewardParams &reward = instance_.reward;

  json demand_payload;
  demand_payload["lambda"] = lambda;
  demand_payload["demand"] = demand;
  log(MessageKind::DemandFromFsp, kOperatorAddress, ids_[top_].hex(), iteration,
      std::move(demand_payload));

  std::vector<double> values;
  values.reserve(n);
  for (const auto &t : gathered_)
  {
    values.push_back(t[0]);
  }
  Energy supply = canonical_sum(values);

  if (demand >= supply)
  {
    terminal_reached_ = true;
    iterations_ = iteration + 1;

    if (iteration == 0)
    {
      // Opening book already covered: buy it whole at the average reward
      // per unit (only an empty book gets here under a curved reward).
      double unit_price =
          supply > 0.0
              ? reward_total(clamp_to_domain(supply, reward), reward) / supply
              : 0.0;
      lambda_terminal_ = lambda;
      for (std::size_t p = 0; p < n; ++p)
      {
        std::size_t node = by_id_[p];
        json payload;
        payload["terminal"] = true;
        payload["lambda"] = lambda;
        payload["unit_price"] = unit_price;
        log(MessageKind::BroadcastTotals, ids_[top_].hex(), ids_[node].hex(),
            iteration, std::move(payload));
      }
      for (std::size_t owner = 0; owner < n; ++owner)
      {
        Energy increment = current_[owner]->value;
        tuples_[owner].total_clinched += increment;
        tuples_[owner].total_payment += unit_price * increment;
      }
    }
    else
    {
      Price lambda_close = price_at(reward.a, epsilon_, iteration - 1);
      Energy demand_close = desired_reduction(lambda_close, reward);
      std::vector<double> prevs;
      std::vector<double> priors;
      prevs.reserve(n);
      priors.reserve(n);
      for (const auto &t : gathered_)
      {
        prevs.push_back(t[1]);
        priors.push_back(t[2]);
      }
      double factor = ration_factor(demand_close, canonical_sum(priors),
                                    canonical_sum(prevs));
      lambda_terminal_ = lambda_close;
      for (std::size_t p = 0; p < n; ++p)
      {
        std::size_t node = by_id_[p];
        json payload;
        payload["terminal"] = true;
        payload["lambda"] = lambda_close;
        payload["factor"] = factor;
        log(MessageKind::BroadcastTotals, ids_[top_].hex(), ids_[node].hex(),
            iteration, std::move(payload));
      }
      for (std::size_t owner = 0; owner < n; ++owner)
      {
        Energy increment = ration_increment(tuples_[owner].prev_bid,
                                            tuples_[owner].total_clinched,
                                            factor);
        tuples_[owner].total_clinched += increment;
        tuples_[owner].total_payment += lambda_close * increment;
      }
    }
  }
  else
  {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    json sorted_json = json::array();
    for (double v : sorted)
    {
      sorted_json.push_back(v);
    }
    for (std::size_t p = 0; p < n; ++p)
    {
      std::size_t node = by_id_[p];
      json payload;
      payload["terminal"] = false;
      payload["lambda"] = lambda;
      payload["demand"] = demand;
      payload["total"] = supply;
      payload["values"] = sorted_json;
      log(MessageKind::BroadcastTotals, ids_[top_].hex(), ids_[node].hex(),
          iteration, std::move(payload));
    }
    for (std::size_t owner = 0; owner < n; ++owner)
    {
      Energy rivals = fold_excluding(sorted, current_[owner]->value);
      Energy increment =
          clinch_increment(demand, rivals, tuples_[owner].total_clinched);
      tuples_[owner].total_clinched += increment;
      tuples_[owner].total_payment += lambda * increment;
    }
  }

  // Per-round acknowledgment: the operator learns nothing but the clock.
  json ack;
  ack["iteration"] = iteration;
  ack["lambda"] = lambda;
  log(MessageKind::BroadcastTotals, ids_[top_].hex(), kOperatorAddress,
      iteration, std::move(ack));
}

NodeId OverlaySimulator::custodian_of(std::size_t owner, long iteration) const
{
  auto found = matching_.find(iteration);
  if (found == matching_.end())
  {
    throw ProtocolStallError("custodian_of: round not started");
  }
  return ids_[found->second.at(owner)];
}

const AllocationTuple &OverlaySimulator::tuple_of(std::size_t owner) const
{
  return tuples_.at(owner);
}

ProtocolResult OverlaySimulator::run()
{
  const RewardParams &reward = instance_.reward;
  std::size_t n = instance_.users.size();
  long max_rounds = static_cast<long>(std::ceil(reward.a / epsilon_)) + 2;

  long k = 0;
  for (;; ++k)
  {
    if (k > max_rounds)
    {
      throw InternalError("overlay: price grid exhausted without termination");
    }
    Price lambda = price_at(reward.a, epsilon_, k);
    for (std::size_t i = 0; i < n; ++i)
    {
      store_bid(i, respond_at(policies_[i], lambda, k), k);
    }
    if (k >= 1)
    {
      for (std::size_t i = 0; i < n; ++i)
      {
        handoff_tuple(i, k);
      }
    }
    aggregate_sum(k);
    broadcast_and_clinch(k, lambda, desired_reduction(lambda, reward));
    if (terminal_reached_)
    {
      break;
    }
  }

  // The books are closed: custodians return the tuples to their owners,
  // and only now does anyone tell the operator who curtailed what.
  for (std::size_t i = 0; i < n; ++i)
  {
    std::size_t custodian = current_[i]->custodian;
    if (custodian != i)
    {
      json payload;
      payload["total_clinched"] = tuples_[i].total_clinched;
      payload["total_payment"] = tuples_[i].total_payment;
      payload["prev_bid"] = tuples_[i].prev_bid;
      log(MessageKind::TupleHandoff, ids_[custodian].hex(), ids_[i].hex(), k,
          std::move(payload));
    }
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    json payload;
    payload["user"] = instance_.users[i].id;
    payload["total_clinched"] = tuples_[i].total_clinched;
    payload["total_payment"] = tuples_[i].total_payment;
    log(MessageKind::FinalReport, ids_[i].hex(), kOperatorAddress, k,
        std::move(payload));
  }

  std::vector<Energy> allocation(n, 0.0);
  std::vector<Money> payment(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    allocation[i] = tuples_[i].total_clinched;
    payment[i] = tuples_[i].total_payment;
  }

  ProtocolResult result;
  result.outcome = finalize_outcome(Mechanism::Mca, std::move(allocation),
                                    std::move(payment), instance_, policies_,
                                    lambda_terminal_, iterations_);
  result.trace = std::move(trace_);
  return result;
}

ProtocolResult run_protocol_mca(const Instance &instance,
                                const std::vector<AgentPolicy> &policies,
                                double epsilon, std::uint64_t seed)
{
  OverlaySimulator simulator(instance, policies, epsilon, seed);
  return simulator.run();
}

ProtocolResult run_protocol_mca(const Instance &instance, double epsilon,
                                std::uint64_t seed)
{
  return run_protocol_mca(instance, truthful_policies(instance), epsilon, seed);
}

}  // namespace protocol
}  // namespace flexclinch
