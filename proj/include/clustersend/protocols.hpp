#pragma once

#include <utility>
#include <vector>

#include "clustersend/bounds.hpp"
#include "clustersend/certs.hpp"
#include "clustersend/model.hpp"

namespace clustersend {

enum class PartitionPolicy { AscendingIndex };

// Members split into full parts of size c plus one remainder part of size
// |members| mod c.
struct Partition {
  int c = 0;
  std::vector<std::vector<int>> parts;
  std::vector<int> remainder;
};

Partition c_partition(const std::vector<int>& members, int c,
                      PartitionPolicy policy = PartitionPolicy::AscendingIndex);

// Rank-order pairing of two equal-size ascending index sets.
struct Bijection {
  std::vector<std::pair<int, int>> pairs;  // (source, target)
};

Bijection rank_bijection(const std::vector<int>& sources, const std::vector<int>& targets);

// One prescribed inter-cluster envelope: a C1 sender, a C2 receiver, and
// whether the envelope carries the payload bytes (compact operation sends
// certificate-only envelopes from part of the senders).
struct PrescribedSend {
  int sender = 0;
  int receiver = 0;
  bool carries_value = true;
};

// Test hooks that deliberately weaken a plan, for mutation-sensitivity
// checks. Zero-initialized means the faithful protocol.
struct PlanMutation {
  int s1_size_delta = 0;            // grows/shrinks the sender selection
  int receive_threshold_delta = 0;  // shifts the distinct-signer threshold
};

// A fully determined sending schedule plus the receiver rule, computed from
// redacted cluster views only. Protocols choose the lowest-index replicas
// and pair sets in rank order, so the plan is a pure function of the counts.
struct ProtocolPlan {
  ProtocolKind kind = ProtocolKind::RB_BCS;
  Flavor flavor = Flavor::BCS;
  bool compact = false;
  FailureModel model = FailureModel::Byzantine;
  SigningScheme signing = SigningScheme::ClusterSigning;
  int n1 = 0, f1 = 0, n2 = 0, f2 = 0;
  int alpha = 0;                      // == sends.size()
  int receive_threshold = 1;          // distinct C1 signers a receiver needs (1 under bcs)
  std::vector<PrescribedSend> sends;  // deterministic order
  // Partition structure for the partitioned protocols: per part, the C1
  // senders and the C2 receivers, rank-aligned. Empty otherwise.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> pairings;
  PlanMutation mutation;
};

// Builds the schedule for one protocol, validating its preconditions
// against the redacted views (throws ConfigError when violated):
//  - RB_BCS: (f1+1) x (f2+1) all-pairs, cluster-certified value.
//  - RB_BRS: (2f1+1) x (f2+1) all-pairs, replica-certified; receivers need
//    f1+1 distinct signers.
//  - BS_BCS: bijection over the lowest f1+f2+1 of each cluster.
//  - BS_BRS: bijection over the lowest 2f1+f2+1; `compact` keeps the
//    certificate count but only f1+f2+1 envelopes carry the payload.
//  - SPBS: alpha senders partitioned into n2-size parts, each part paired
//    with receivers by rank; alpha must equal the matching bound.
//  - RPBS: alpha receivers partitioned into n1-size parts; senders repeat.
ProtocolPlan build_plan(ProtocolKind kind, const ClusterView& v1, const ClusterView& v2,
                        FailureModel model, SigningScheme signing, bool compact = false,
                        int alpha = -1, PlanMutation mutation = {});

ProtocolPlan plan_for_choice(const ProtocolChoice& choice, const SystemSpec& spec);

// Single-run entry points; defined with the simulation engine.
struct RunContext;
struct RunTranscript;

RunTranscript rb_bcs(const SystemSpec& spec, const Value& v, const RunContext& ctx);
RunTranscript rb_brs(const SystemSpec& spec, const Value& v, const RunContext& ctx);
RunTranscript bs_bcs(const SystemSpec& spec, const Value& v, const RunContext& ctx);
RunTranscript bs_brs(const SystemSpec& spec, const Value& v, bool compact, const RunContext& ctx);
RunTranscript spbs(const SystemSpec& spec, const Value& v, int alpha, Flavor flavor,
                   const RunContext& ctx);
RunTranscript rpbs(const SystemSpec& spec, const Value& v, int alpha, Flavor flavor,
                   const RunContext& ctx);

}  // namespace clustersend
