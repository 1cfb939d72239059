#include "clustersend/certs.hpp"

#include <algorithm>
#include <bit>

namespace clustersend {

const char* to_string(Certificate::Kind k) {
  switch (k) {
    case Certificate::Kind::Replica: return "replica";
    case Certificate::Kind::Cluster: return "cluster";
    case Certificate::Kind::EmulatedCluster: return "emulated-cluster";
  }
  return "?";
}

namespace {
void check_cluster_tag(int cluster) {
  if (cluster != 1 && cluster != 2) throw ConfigError("cluster tag must be 1 or 2");
}
void check_index(int index) {
  if (index < 0 || index >= 64) throw ConfigError("replica index out of ledger range [0,64)");
}
}  // namespace

void CertLedger::set_agreed(int cluster, const Value& v) {
  check_cluster_tag(cluster);
  if (has_agreed_[cluster] && agreed_[cluster] != v)
    throw IntegrityError("cluster already agreed on a different value");
  agreed_[cluster] = v;
  has_agreed_[cluster] = true;
}

bool CertLedger::has_agreed(int cluster) const {
  check_cluster_tag(cluster);
  return has_agreed_[cluster];
}

const Value& CertLedger::agreed(int cluster) const {
  check_cluster_tag(cluster);
  if (!has_agreed_[cluster]) throw IntegrityError("no agreed value recorded for cluster");
  return agreed_[cluster];
}

CertLedger::Slot& CertLedger::slot(const Value& v) {
  for (auto& s : slots_)
    if (s.subject == v) return s;
  slots_.push_back(Slot{v, {0, 0, 0}, {false, false, false}});
  return slots_.back();
}

const CertLedger::Slot* CertLedger::find(const Value& v) const {
  for (const auto& s : slots_)
    if (s.subject == v) return &s;
  return nullptr;
}

Certificate CertLedger::sign_replica(int cluster, int index, const Value& v, bool signer_faulty,
                                     FailureModel model) {
  check_cluster_tag(cluster);
  check_index(index);
  bool is_agreed = has_agreed_[cluster] && agreed_[cluster] == v;
  if (!is_agreed) {
    if (!signer_faulty)
      throw IntegrityError("non-faulty replica asked to sign a value its cluster did not agree on");
    if (model != FailureModel::Byzantine)
      throw IntegrityError("crash/omit replicas never sign values their cluster did not agree on");
  }
  slot(v).replica_signed[cluster] |= (std::uint64_t{1} << index);
  return Certificate{Certificate::Kind::Replica, cluster, v, {index}};
}

Certificate CertLedger::sign_cluster(int cluster, const Value& v) {
  check_cluster_tag(cluster);
  if (!has_agreed_[cluster] || agreed_[cluster] != v)
    throw IntegrityError(
        "cluster signature requires the cooperation of every non-faulty replica, which only the "
        "agreed value has");
  slot(v).cluster_signed[cluster] = true;
  return Certificate{Certificate::Kind::Cluster, cluster, v, {}};
}

Certificate CertLedger::sign_emulated(int cluster, const Value& v, const std::vector<int>& signers,
                                      const std::set<int>& faulty, FailureModel model) {
  if (signers.empty()) throw ConfigError("emulated cluster certificate needs at least one signer");
  std::vector<int> distinct = signers;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != signers.size())
    throw ConfigError("emulated cluster certificate signers must be distinct");
  for (int idx : distinct) sign_replica(cluster, idx, v, faulty.count(idx) != 0, model);
  return Certificate{Certificate::Kind::EmulatedCluster, cluster, v, distinct};
}

bool CertLedger::verify(const Certificate& cert, const Value& expected_subject,
                        int expected_cluster, int cluster_f) const {
  if (cert.cluster != expected_cluster) return false;
  if (cert.subject != expected_subject) return false;
  const Slot* s = find(cert.subject);
  if (s == nullptr) return false;
  switch (cert.kind) {
    case Certificate::Kind::Cluster:
      return cert.signers.empty() && s->cluster_signed[cert.cluster];
    case Certificate::Kind::Replica: {
      if (cert.signers.size() != 1) return false;
      int idx = cert.signers[0];
      if (idx < 0 || idx >= 64) return false;
      return (s->replica_signed[cert.cluster] >> idx) & 1;
    }
    case Certificate::Kind::EmulatedCluster: {
      std::uint64_t seen = 0;
      for (int idx : cert.signers) {
        if (idx < 0 || idx >= 64) return false;
        if (((s->replica_signed[cert.cluster] >> idx) & 1) == 0) return false;
        seen |= (std::uint64_t{1} << idx);
      }
      // f+1 distinct signers emulate the cluster signature.
      return static_cast<int>(std::popcount(seen)) >= cluster_f + 1;
    }
  }
  return false;
}

std::uint64_t CertLedger::replica_signers_of(int cluster, const Value& v) const {
  check_cluster_tag(cluster);
  const Slot* s = find(v);
  return s == nullptr ? 0 : s->replica_signed[cluster];
}

std::vector<Value> CertLedger::subjects() const {
  std::vector<Value> out;
  out.reserve(slots_.size());
  for (const auto& s : slots_) out.push_back(s.subject);
  return out;
}

}  // namespace clustersend
