#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clustersend/bounds.hpp"
#include "clustersend/certs.hpp"
#include "clustersend/model.hpp"
#include "clustersend/protocols.hpp"

namespace clustersend {

// Byzantine C1 faults signing one alternative value and pushing it across:
// every signer sends a forged certificate for the alternative value to every
// target. Empty means no injection.
struct InjectionPattern {
  std::vector<int> signers;  // must be faulty C1 replicas
  std::vector<int> targets;  // C2 indices
};

// What one faulty replica does. Indices refer to the replica's own slice of
// the plan: drop_sends into its prescribed send list, ignore_inbox into its
// prescribed inter-cluster inbox, both in plan order.
struct ReplicaScript {
  ReplicaId replica;
  std::set<int> drop_sends;
  std::set<int> ignore_inbox;
  bool relay_forged = false;  // Byzantine C2 fault floods forged alt-value certificates locally
};

struct AdversaryTrace {
  // Placement override; when absent the spec's own faulty sets apply.
  std::optional<std::set<int>> faulty1;
  std::optional<std::set<int>> faulty2;
  std::vector<ReplicaScript> scripts;
  InjectionPattern injection;
  bool replay = false;  // re-deliver every sent inter-cluster envelope once more
  Value alt_value;      // forged value; empty picks an engine default distinct from v
};

// Delivery order over pending envelopes: a seed draws uniformly; otherwise
// the decision list picks index decisions[i] % pending (0 = oldest first
// once exhausted). Identical schedules yield byte-identical transcripts.
struct Schedule {
  std::optional<std::uint64_t> seed;
  std::vector<std::uint32_t> decisions;
};

struct RunContext {
  AdversaryTrace trace;
  Schedule schedule;
  long long sig_unit = 1;  // size units per signature
  bool record_log = true;
};

// Inter-cluster columns count prescribed envelopes (a faulty sender's drop
// discards a scheduled envelope, it does not unschedule it). Local relays
// and adversary traffic are metered separately and never mix in.
struct Metrics {
  long long inter_cluster_msgs = 0;
  long long local_msgs = 0;
  long long injected_msgs = 0;
  long long value_bytes = 0;
  long long replica_sigs = 0;
  long long cluster_sigs = 0;
  long long max_envelope_units = 0;
};

// Scheduled-envelope totals implied by a plan; placement-invariant.
Metrics plan_metrics(const ProtocolPlan& plan, long long value_bytes, long long sig_unit);

struct Event {
  std::string kind;  // agree, send, drop, inject, replay, deliver, relay, ignore, reject, receive, confirm
  int from_cluster = 0;
  int from = -1;
  int to = -1;  // C2 index for deliveries, C1 index for confirm
  bool local = false;
  Value value;
  std::string cert;  // rendered certificate, "-" when none
  bool injected = false;
};

struct RunTranscript {
  std::string protocol;
  std::string flavor;
  bool compact = false;
  std::string model;
  std::string signing;
  int n1 = 0, f1 = 0, n2 = 0, f2 = 0;
  int alpha = 0;
  std::set<int> faulty1, faulty2;  // effective placement
  Value value;
  Value alt_value;
  std::vector<std::vector<Value>> received;  // per C2 replica, ascending
  std::vector<bool> confirmed;               // per C1 replica
  bool receipt = false;
  bool agreement = false;
  bool confirmation = false;
  Metrics metrics;
  std::vector<Event> log;        // empty unless RunContext.record_log
  std::vector<int> branching;    // pending-pool size at each delivery pick
};

// Throws ConfigError when the trace oversteps the failure model or scripts a
// non-faulty replica; trace_legal reports instead of throwing.
void check_trace_legal(const SystemSpec& spec, const ProtocolPlan& plan,
                       const AdversaryTrace& trace);
bool trace_legal(const SystemSpec& spec, const ProtocolPlan& plan, const AdversaryTrace& trace,
                 std::string* why = nullptr);

// Executes one deterministic run: agreement installs the value at non-faulty
// C1 replicas, prescribed envelopes are scheduled (the adversary decides
// drops), deliveries trigger local relays, and flags are evaluated against
// the effective placement at quiescence.
RunTranscript run(const SystemSpec& spec, const ProtocolPlan& plan, const Value& v,
                  const RunContext& ctx);
RunTranscript run(const SystemSpec& spec, const ProtocolChoice& choice, const Value& v,
                  const RunContext& ctx);

using Placement = std::pair<std::set<int>, std::set<int>>;

// Every pair of fault sets with |F1| <= f1, |F2| <= f2. Protocols select
// replicas by index, so no symmetry quotient applies; enumeration is full.
std::vector<Placement> enumerate_placements(const SystemSpec& spec);
void for_each_placement(const ClusterView& v1, const ClusterView& v2,
                        const std::function<void(const Placement&)>& fn);

// Per-faulty-replica script options for one placement, composed as a
// cartesian product:
//  - per faulty sender, every drop subset of its prescribed envelopes;
//  - per faulty receiver, every ignore subset of its prescribed inbox;
//  - under Byzantine failures, forged-signer subsets x target subsets, the
//    subsets of faulty receivers that flood forged certificates, and the
//    replay toggle. Option lists start at no-op and end at the extreme.
struct AdversaryBasis {
  Placement placement;
  struct ScriptDim {
    ReplicaId replica;
    std::vector<std::set<int>> options;
  };
  std::vector<ScriptDim> sender_dims;
  std::vector<ScriptDim> receiver_dims;
  std::vector<InjectionPattern> injections;
  std::vector<std::set<int>> forged_relayers;
  std::vector<bool> replay_options;

  std::uint64_t total() const;  // saturating product of dimension sizes
};

AdversaryBasis make_adversary_basis(const SystemSpec& spec, const Placement& placement,
                                    const ProtocolPlan& plan);

// Streams the full product when it fits the budget. Otherwise: the no-op
// script, the extreme script, every single-dimension variation against the
// extreme background, then seeded samples up to the budget. The callback
// returns false to stop. Returns the number of traces emitted.
std::uint64_t for_each_adversary(const AdversaryBasis& basis, std::uint64_t budget,
                                 std::uint64_t sample_seed,
                                 const std::function<bool(const AdversaryTrace&)>& fn);

// The analytically worst script: all drops, all ignores, full injection,
// every faulty receiver flooding forgeries, replay on.
AdversaryTrace extremal_trace(const SystemSpec& spec, const Placement& placement,
                              const ProtocolPlan& plan);

struct CampaignOptions {
  std::uint64_t adversary_budget = 512;
  int extremal_seeds = 50;  // extra seeded schedules on the extreme script per placement
  long long sig_unit = 1;
  Value value = std::string("\x10\x20\x30\x40", 4);
};

struct Counterexample {
  Placement placement;
  AdversaryTrace trace;
  std::uint64_t seed = 0;
  std::string reason;
  RunTranscript transcript;
};

struct CampaignReport {
  std::uint64_t runs = 0;
  bool ok = true;
  std::optional<Counterexample> counterexample;
};

// Exhaustive campaign: every placement x adversary basis (budgeted) x
// derived schedule seeds, checking receipt, agreement and confirmation on
// every run. Stops at the first violation and replays it with a full log.
// Honors CLUSTERSEND_THREADS for placement-level parallelism.
CampaignReport verify_campaign(const SystemSpec& spec, const ProtocolPlan& plan,
                               const CampaignOptions& options);

struct SweepCell {
  SystemSpec spec;
  std::string protocol = "auto";  // or a fixed protocol name
  bool compact = false;
};

struct SweepRow {
  int n1 = 0, f1 = 0, n2 = 0, f2 = 0;
  std::string model, signing, protocol;
  int alpha = 0;
  long long msgs = 0;
  long long value_bytes = 0, replica_sigs = 0, cluster_sigs = 0;
  bool receipt = false, agreement = false, confirmation = false;
  long long max_size_units = 0;
  std::uint64_t runs = 0;
};

struct SweepOptions {
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  int max_enum = 6;  // exhaustive placements at or below this cluster size
  long long sig_unit = 1;
  long long value_bytes = 4;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> skipped;  // per-cell failures, recorded not fatal
  bool all_ok = true;                // every executed cell held its properties
};

// Per cell: resolve the protocol (selection or forced), derive the
// placement-invariant count/size columns from the plan, then probe the
// properties with the extreme adversary (exhaustive placements when cluster
// sizes allow, the spec's own placement otherwise) under the given seeds.
SweepResult sweep(const std::vector<SweepCell>& cells, const SweepOptions& options);

}  // namespace clustersend
