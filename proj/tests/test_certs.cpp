#include <set>
#include <string>
#include <vector>

#include "clustersend/certs.hpp"
#include "doctest.h"

using namespace clustersend;

namespace {
const Value kV = "payload";
const Value kAlt = "other";
}  // namespace

TEST_CASE("agreement bookkeeping") {
  CertLedger ledger;
  CHECK_FALSE(ledger.has_agreed(1));
  ledger.set_agreed(1, kV);
  CHECK(ledger.has_agreed(1));
  CHECK(ledger.agreed(1) == kV);
  ledger.set_agreed(1, kV);  // idempotent
  CHECK_THROWS_AS(ledger.set_agreed(1, kAlt), IntegrityError);
  CHECK_FALSE(ledger.has_agreed(2));
}

TEST_CASE("size accounting sums signatures at the configured unit") {
  SizeBreakdown b{4, 3, 1};
  CHECK(b.total(1) == 8);
  CHECK(b.total(16) == 4 + 16 * 4);
  CHECK(SizeBreakdown{4, 0, 0}.total(99) == 4);
}

TEST_CASE("replica signing legality") {
  CertLedger ledger;
  ledger.set_agreed(1, kV);

  auto cert = ledger.sign_replica(1, 3, kV, false, FailureModel::Crash);
  CHECK(cert.kind == Certificate::Kind::Replica);
  CHECK(cert.signers == std::vector<int>{3});
  CHECK(ledger.verify(cert, kV, 1, 2));

  // Non-faulty replicas only ever sign the agreed value.
  CHECK_THROWS_AS(ledger.sign_replica(1, 2, kAlt, false, FailureModel::Byzantine), IntegrityError);
  // Crash and omit faults never forge either.
  CHECK_THROWS_AS(ledger.sign_replica(1, 0, kAlt, true, FailureModel::Crash), IntegrityError);
  CHECK_THROWS_AS(ledger.sign_replica(1, 0, kAlt, true, FailureModel::Omit), IntegrityError);
  // A Byzantine fault can sign anything, and the forged signature is real.
  auto forged = ledger.sign_replica(1, 0, kAlt, true, FailureModel::Byzantine);
  CHECK(ledger.verify(forged, kAlt, 1, 2));
  CHECK_FALSE(ledger.verify(forged, kV, 1, 2));
}

TEST_CASE("cluster signing requires agreement") {
  CertLedger ledger;
  CHECK_THROWS_AS(ledger.sign_cluster(1, kV), IntegrityError);
  ledger.set_agreed(1, kV);
  auto cert = ledger.sign_cluster(1, kV);
  CHECK(cert.kind == Certificate::Kind::Cluster);
  CHECK(cert.signers.empty());
  CHECK(cert.cluster_sig_count() == 1);
  CHECK(ledger.verify(cert, kV, 1, 2));
  CHECK_THROWS_AS(ledger.sign_cluster(1, kAlt), IntegrityError);
}

TEST_CASE("emulated cluster certificates") {
  CertLedger ledger;
  ledger.set_agreed(1, kV);
  const int f = 2;

  CHECK_THROWS_AS(ledger.sign_emulated(1, kV, {}, {}, FailureModel::Byzantine), ConfigError);
  CHECK_THROWS_AS(ledger.sign_emulated(1, kV, {1, 1, 2}, {}, FailureModel::Byzantine), ConfigError);

  // Verification needs f+1 distinct recorded signers.
  for (int j = 1; j <= f + 2; ++j) {
    CertLedger fresh;
    fresh.set_agreed(1, kV);
    std::vector<int> signers;
    for (int i = 0; i < j; ++i) signers.push_back(i);
    auto cert = fresh.sign_emulated(1, kV, signers, {}, FailureModel::Byzantine);
    CHECK(cert.kind == Certificate::Kind::EmulatedCluster);
    CHECK(cert.replica_sig_count() == j);
    CHECK(fresh.verify(cert, kV, 1, f) == (j >= f + 1));
  }

  // Per-signer honesty is enforced inside the bundle.
  CHECK_THROWS_AS(ledger.sign_emulated(1, kAlt, {0, 1, 2}, {0}, FailureModel::Byzantine),
                  IntegrityError);
}

TEST_CASE("fabricated certificates never verify") {
  CertLedger ledger;
  ledger.set_agreed(1, kV);
  ledger.sign_replica(1, 1, kV, false, FailureModel::Byzantine);

  Certificate fake_replica{Certificate::Kind::Replica, 1, kAlt, {0}};
  CHECK_FALSE(ledger.verify(fake_replica, kAlt, 1, 1));

  Certificate fake_cluster{Certificate::Kind::Cluster, 1, kV, {}};
  CHECK_FALSE(ledger.verify(fake_cluster, kV, 1, 1));  // never cluster-signed

  Certificate fake_bundle{Certificate::Kind::EmulatedCluster, 1, kV, {1, 2}};
  CHECK_FALSE(ledger.verify(fake_bundle, kV, 1, 1));  // replica 2 never signed

  // Duplicate signer entries never count twice toward the threshold.
  Certificate padded{Certificate::Kind::EmulatedCluster, 1, kV, {1, 1}};
  CHECK_FALSE(ledger.verify(padded, kV, 1, 1));
}

TEST_CASE("verification is scoped to cluster and subject") {
  CertLedger ledger;
  ledger.set_agreed(1, kV);
  ledger.set_agreed(2, kV);
  auto cert = ledger.sign_replica(1, 4, kV, false, FailureModel::Crash);
  CHECK(ledger.verify(cert, kV, 1, 1));
  CHECK_FALSE(ledger.verify(cert, kAlt, 1, 1));  // subject mismatch
  Certificate moved = cert;
  moved.cluster = 2;
  CHECK_FALSE(ledger.verify(moved, kV, 2, 1));  // cluster 2 never signed
}

TEST_CASE("signer masks expose exactly the recorded signatures") {
  CertLedger ledger;
  ledger.set_agreed(1, kV);
  CHECK(ledger.replica_signers_of(1, kV) == 0);
  ledger.sign_replica(1, 0, kV, false, FailureModel::Crash);
  ledger.sign_replica(1, 5, kV, false, FailureModel::Crash);
  ledger.sign_replica(1, 5, kV, false, FailureModel::Crash);  // re-signing is idempotent
  CHECK(ledger.replica_signers_of(1, kV) == ((1ull << 0) | (1ull << 5)));
  CHECK(ledger.replica_signers_of(1, kAlt) == 0);
  CHECK(ledger.replica_signers_of(2, kV) == 0);

  CHECK(ledger.subjects() == std::vector<Value>{kV});
  ledger.set_agreed(2, kAlt);
  ledger.sign_replica(2, 1, kAlt, false, FailureModel::Crash);
  auto subs = ledger.subjects();
  CHECK(subs.size() == 2);
}

TEST_CASE("replica indices are bounded by the mask width") {
  CertLedger ledger;
  ledger.set_agreed(1, kV);
  CHECK_THROWS_AS(ledger.sign_replica(1, 64, kV, false, FailureModel::Crash), ConfigError);
  CHECK_THROWS_AS(ledger.sign_replica(1, -1, kV, false, FailureModel::Crash), ConfigError);
}
