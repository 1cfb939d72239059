#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "clustersend/model.hpp"

namespace clustersend {

// Opaque payload bytes. The digest carried by certificates is the value
// itself; only its length matters for size accounting.
using Value = std::string;

// Size of one envelope, in abstract units: raw payload bytes plus a
// configurable per-signature unit (default 1) per signature carried.
struct SizeBreakdown {
  long long value_bytes = 0;
  long long replica_sigs = 0;
  long long cluster_sigs = 0;
  long long total(long long sig_unit) const {
    return value_bytes + sig_unit * (replica_sigs + cluster_sigs);
  }
};

struct Certificate {
  enum class Kind { Replica, Cluster, EmulatedCluster };
  Kind kind = Kind::Replica;
  int cluster = 1;            // the cluster the signature speaks for
  Value subject;              // the certified value
  std::vector<int> signers;   // Replica: one index; EmulatedCluster: the bundle; Cluster: empty

  long long replica_sig_count() const { return static_cast<long long>(signers.size()); }
  long long cluster_sig_count() const { return kind == Kind::Cluster ? 1 : 0; }
};

const char* to_string(Certificate::Kind k);

// Run-scoped record of every signature legally produced. A certificate
// verifies only if its signatures are on record, which is what makes
// fabricated certificates (signatures never produced) structurally
// non-forgeable: building a Certificate object by hand does not register
// anything here, so verify() rejects it.
//
// Signing legality:
//  - a non-faulty replica signs only the value its cluster agreed on;
//  - a faulty replica signs other values only under Byzantine failures
//    (crash and omit replicas never forge);
//  - a cluster signature exists only for the agreed value (it needs the
//    cooperation of every non-faulty replica, which the adversary lacks).
// Violations raise IntegrityError: they are simulator bugs, not adversary
// moves.
class CertLedger {
 public:
  // Records the consensus outcome of `cluster`; unlocks signing of `v`.
  void set_agreed(int cluster, const Value& v);

  bool has_agreed(int cluster) const;
  const Value& agreed(int cluster) const;

  Certificate sign_replica(int cluster, int index, const Value& v, bool signer_faulty,
                           FailureModel model);
  Certificate sign_cluster(int cluster, const Value& v);

  // f+1 replica certificates from distinct replicas, standing in for a
  // cluster signature. Signer honesty is enforced per signer.
  Certificate sign_emulated(int cluster, const Value& v, const std::vector<int>& signers,
                            const std::set<int>& faulty, FailureModel model);

  // True iff the certificate speaks for `expected_cluster`, certifies
  // `expected_subject`, and every signature it carries is on record.
  // `cluster_f` is the announced fault bound of the signing cluster; an
  // emulated cluster certificate needs cluster_f+1 distinct recorded signers.
  bool verify(const Certificate& cert, const Value& expected_subject, int expected_cluster,
              int cluster_f) const;

  // Bitmask of replica indices recorded as having signed `v` for `cluster`.
  // Inspection hook for forgery-closure checks.
  std::uint64_t replica_signers_of(int cluster, const Value& v) const;
  std::vector<Value> subjects() const;

 private:
  struct Slot {
    Value subject;
    std::uint64_t replica_signed[3] = {0, 0, 0};  // indexed by cluster 1..2
    bool cluster_signed[3] = {false, false, false};
  };
  std::vector<Slot> slots_;
  Value agreed_[3];
  bool has_agreed_[3] = {false, false, false};

  Slot& slot(const Value& v);
  const Slot* find(const Value& v) const;
};

}  // namespace clustersend
