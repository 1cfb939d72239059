#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clustersend/model.hpp"

namespace clustersend {

// Worst-case minimum number of inter-cluster messages (kind "sigma") or
// signed inter-cluster messages (kind "tau"), with the quotient/remainder
// decomposition the closed form is built from.
struct BoundReport {
  std::string kind;    // "sigma" | "tau"
  std::string clause;  // "sender-larger" | "receiver-larger"
  long long q = 0;
  long long r = 0;
  long long value = 0;
  bool applicable = true;       // does this clause's size condition hold?
  std::string side_condition;   // tie notes, alternate-clause value
};

// The two clauses of each bound. "1" treats the sending cluster as the
// larger one, "2" the receiving cluster. Formulas are evaluated regardless
// of actual sizes; `applicable` records whether the size condition holds.
BoundReport sigma1(const ClusterView& v1, const ClusterView& v2);
BoundReport sigma2(const ClusterView& v1, const ClusterView& v2);
BoundReport tau1(const ClusterView& v1, const ClusterView& v2);
BoundReport tau2(const ClusterView& v1, const ClusterView& v2);

// System-level bounds. For sigma both clauses hold regardless of which
// cluster is larger (each is a fault-deletion counting game), so the report
// carries whichever value is larger; the size-matching clause wins equal
// values and the side condition notes the other. For tau only the clause
// matching the larger cluster binds: the certificate game is not
// size-symmetric and the cross clause can overshoot achievable plans.
BoundReport sigma(const SystemSpec& spec);
BoundReport tau(const SystemSpec& spec);

enum class ProtocolKind { RB_BCS, RB_BRS, BS_BCS, BS_BRS, SPBS, RPBS };
enum class Flavor { BCS, BRS };

const char* to_string(ProtocolKind k);
const char* to_string(Flavor f);
ProtocolKind protocol_kind_from_string(const std::string& s);

struct ProtocolChoice {
  ProtocolKind protocol = ProtocolKind::RB_BCS;
  Flavor flavor = Flavor::BCS;
  int alpha = 0;  // envelope count for SPBS/RPBS, 0 otherwise
  bool compact_certs = false;
  std::string rationale;
};

// Picks the cheapest protocol whose preconditions the spec satisfies:
// the bijective protocol when both clusters exceed the flavor's fault sum,
// the sender-partitioned one when the receiving cluster is too small, the
// receiver-partitioned one when the sending cluster is too small, and the
// all-pairs fallback otherwise. Signing determines the flavor: replica
// signing under Byzantine failures needs the higher-redundancy variants;
// cluster signing (native or emulated) and crash/omit operation use the
// cheaper ones. Throws ConfigError if validate_system rejects the spec.
ProtocolChoice select_protocol(const SystemSpec& spec);

struct ScheduledMessage {
  int sender = 0;    // index in the sending cluster
  int receiver = 0;  // index in the receiving cluster
};

struct FaultAssignment {
  std::set<int> c1;
  std::set<int> c2;
  std::string method;  // "heuristic" | "exact"
};

// Searches for at most f1 sender faults and f2 receiver faults that touch
// every scheduled message. Tries the top-f2-receivers heuristic first; at
// cluster sizes up to 5 falls back to exact subset enumeration, so a
// nullopt there is definitive. Above that a nullopt is best effort.
std::optional<FaultAssignment> killing_assignment(const std::vector<ScheduledMessage>& schedule,
                                                  const ClusterView& v1, const ClusterView& v2);

struct OracleResult {
  int value = 0;
  bool exceeded_cap = false;  // no schedule within the cap survived
};

// Independent brute-force oracle: the smallest m <= cap such that some
// m-message schedule admits no killing assignment. Searches edge sets over
// the n1 x n2 sender/receiver grid (a duplicated pair never helps survival,
// so sets suffice). Guarded to cluster sizes <= 5; cap 0 means the full grid.
OracleResult min_schedule_size(int n1, int f1, int n2, int f2, int cap = 0);

}  // namespace clustersend
