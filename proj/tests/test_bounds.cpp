#include <string>
#include <vector>

#include "clustersend/bounds.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace clustersend;
using testutil::spec_at;
using testutil::spec_lowest;

namespace {
ClusterView view(int n, int f) { return ClusterView{n, f}; }
}  // namespace

TEST_CASE("sigma clause decompositions") {
  auto b = sigma1(view(3, 1), view(3, 1));
  CHECK(b.kind == "sigma");
  CHECK(b.clause == "sender-larger");
  CHECK(b.q == 1);
  CHECK(b.r == 0);
  CHECK(b.value == 3);
  CHECK(b.applicable);

  b = sigma1(view(7, 2), view(7, 2));
  CHECK(b.q == 0);
  CHECK(b.r == 3);
  CHECK(b.value == 5);

  b = sigma1(view(13, 4), view(4, 1));
  CHECK(b.q == 1);
  CHECK(b.r == 2);
  CHECK(b.value == 7);

  b = sigma2(view(4, 1), view(13, 4));
  CHECK(b.clause == "receiver-larger");
  CHECK(b.q == 1);
  CHECK(b.r == 2);
  CHECK(b.value == 7);
  CHECK(b.applicable);

  // Fault-free clusters need exactly one message.
  CHECK(sigma1(view(5, 0), view(5, 0)).value == 1);
  CHECK(sigma2(view(5, 0), view(5, 0)).value == 1);

  // The inapplicable direction is still evaluated, just flagged.
  CHECK_FALSE(sigma2(view(13, 4), view(4, 1)).applicable);
}

TEST_CASE("tau clause decompositions") {
  auto b = tau1(view(17, 4), view(5, 1));
  CHECK(b.kind == "tau");
  CHECK(b.q == 2);
  CHECK(b.r == 1);
  CHECK(b.value == 12);

  b = tau2(view(5, 1), view(9, 2));
  CHECK(b.q == 1);
  CHECK(b.r == 0);
  CHECK(b.value == 5);

  b = tau2(view(7, 2), view(16, 4));
  CHECK(b.q == 1);
  CHECK(b.r == 2);
  CHECK(b.value == 13);

  CHECK(tau1(view(9, 0), view(5, 0)).value == 1);
  // The receiver-larger clause has no meaning once nf1 - f1 hits zero.
  CHECK_THROWS_AS(tau2(view(4, 2), view(9, 1)), ConfigError);
}

TEST_CASE("sigma and tau pick the larger cluster's clause") {
  auto s = sigma(spec_at(13, {0, 1, 2, 3}, 4, {0}, FailureModel::Byzantine,
                         SigningScheme::ClusterSigning));
  CHECK(s.clause == "sender-larger");
  CHECK(s.value == 7);

  s = sigma(spec_at(4, {0}, 13, {0, 1, 2, 3}, FailureModel::Byzantine,
                    SigningScheme::ClusterSigning));
  CHECK(s.clause == "receiver-larger");
  CHECK(s.value == 7);

  auto t = tau(spec_lowest(17, 4, 5, 1, FailureModel::Byzantine, SigningScheme::ReplicaSigning));
  CHECK(t.clause == "sender-larger");
  CHECK(t.value == 12);

  t = tau(spec_lowest(5, 1, 9, 2, FailureModel::Byzantine, SigningScheme::ReplicaSigning));
  CHECK(t.clause == "receiver-larger");
  CHECK(t.value == 5);
}

TEST_CASE("the binding sigma clause can come from the smaller cluster") {
  // With nearly all receivers faulty, every receiver needs f1+1 distinct
  // senders, which the sender-larger clause counts (2 senders x 4 receivers
  // here) while the size-matching clause only reaches 6. Both deletion
  // games apply at any sizes, so sigma must carry the larger value.
  auto s = sigma(spec_at(3, {0}, 4, {0, 1, 2}, FailureModel::Crash, SigningScheme::None));
  CHECK(s.value == 8);
  CHECK(s.clause == "sender-larger");
  CHECK(s.side_condition.find("receiver-larger clause gives 6") != std::string::npos);
  CHECK(min_schedule_size(3, 1, 4, 3).value == 8);

  // The max of the two clauses is still only a lower bound: one sender
  // fault may not silence more than one of the five receivers, which costs
  // seven envelopes while both clauses stop at six.
  auto wide = sigma(spec_at(3, {0}, 5, {0, 1, 2}, FailureModel::Crash, SigningScheme::None));
  CHECK(wide.value == 6);
  CHECK(min_schedule_size(3, 1, 5, 3).value == 7);

  // tau keeps the size-matching clause: the certificate game has no such
  // symmetry, and the cross clause would claim 15 where 11 envelopes are
  // known to work.
  auto t = tau(spec_lowest(8, 3, 7, 2, FailureModel::Byzantine, SigningScheme::ReplicaSigning));
  CHECK(t.value == 11);
  CHECK(t.clause == "sender-larger");
  CHECK(tau2(ClusterView{8, 3}, ClusterView{7, 2}).value == 15);
}

TEST_CASE("equal-size clusters take the larger clause value") {
  // The two clauses can disagree on ties; both are valid lower bounds, so
  // the report must carry the larger one and note the other.
  auto s = sigma(spec_at(4, {0, 1, 2}, 4, {0}, FailureModel::Byzantine,
                         SigningScheme::ClusterSigning));
  CHECK(s.value == 8);
  CHECK(s.clause == "receiver-larger");
  CHECK(s.side_condition.find("6") != std::string::npos);

  // Tie where the receiver-larger clause is undefined: fall back to the
  // sender-larger clause and say why.
  auto t = tau(spec_at(4, {0, 1}, 4, {0}, FailureModel::Byzantine,
               SigningScheme::ReplicaSigning));
  CHECK(t.clause == "sender-larger");
  CHECK(t.value == 7);
  CHECK(t.side_condition.find("n1 > 2*f1") != std::string::npos);

  // Strictly larger receiving cluster with the clause undefined is an error.
  CHECK_THROWS_AS(tau(spec_at(4, {0, 1}, 5, {0}, FailureModel::Byzantine,
                              SigningScheme::ReplicaSigning)),
                  ConfigError);
}

TEST_CASE("equal-size clusters collapse to the fault-sum forms") {
  for (int n = 2; n <= 12; ++n) {
    for (int f1 = 0; 2 * f1 < n; ++f1) {
      for (int f2 = 0; f1 + f2 + 1 <= n && f2 < n; ++f2) {
        auto spec = spec_lowest(n, f1, n, f2, FailureModel::Byzantine,
                                SigningScheme::ClusterSigning);
        CAPTURE(n);
        CAPTURE(f1);
        CAPTURE(f2);
        CHECK(sigma(spec).value == f1 + f2 + 1);
        if (2 * f1 + f2 + 1 <= n) CHECK(tau(spec).value == 2 * f1 + f2 + 1);
      }
    }
  }
}

TEST_CASE("bounds are monotone in the fault counts") {
  for (int n1 : {4, 6, 9}) {
    for (int n2 : {4, 6, 9}) {
      long long prev = 0;
      for (int f1 = 0; 2 * f1 < n1; ++f1) {
        auto spec = spec_lowest(n1, f1, n2, 1, FailureModel::Byzantine,
                                SigningScheme::ClusterSigning);
        auto v = sigma(spec).value;
        CHECK(v >= prev);
        prev = v;
      }
      prev = 0;
      for (int f2 = 0; f2 < n2; ++f2) {
        auto spec = spec_lowest(n1, 1, n2, f2, FailureModel::Byzantine,
                                SigningScheme::ClusterSigning);
        auto v = sigma(spec).value;
        CHECK(v >= prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("protocol names round-trip") {
  for (auto k : {ProtocolKind::RB_BCS, ProtocolKind::RB_BRS, ProtocolKind::BS_BCS,
                 ProtocolKind::BS_BRS, ProtocolKind::SPBS, ProtocolKind::RPBS})
    CHECK(protocol_kind_from_string(to_string(k)) == k);
  CHECK(std::string(to_string(ProtocolKind::BS_BRS)) == "bs-brs");
  CHECK(std::string(to_string(Flavor::BCS)) == "bcs");
  CHECK(std::string(to_string(Flavor::BRS)) == "brs");
  CHECK_THROWS_AS(protocol_kind_from_string("bs"), ConfigError);
}

TEST_CASE("protocol selection per regime") {
  auto pick = [](int n1, int f1, int n2, int f2, FailureModel m, SigningScheme s) {
    return select_protocol(spec_lowest(n1, f1, n2, f2, m, s));
  };

  auto c = pick(8, 3, 7, 2, FailureModel::Byzantine, SigningScheme::ClusterSigning);
  CHECK(c.protocol == ProtocolKind::BS_BCS);
  CHECK(c.flavor == Flavor::BCS);
  CHECK(c.alpha == 0);

  c = pick(13, 4, 4, 1, FailureModel::Byzantine, SigningScheme::ClusterSigning);
  CHECK(c.protocol == ProtocolKind::SPBS);
  CHECK(c.alpha == 7);

  c = pick(4, 1, 13, 4, FailureModel::Byzantine, SigningScheme::EmulatedClusterSigning);
  CHECK(c.protocol == ProtocolKind::RPBS);
  CHECK(c.flavor == Flavor::BCS);
  CHECK(c.alpha == 7);

  c = pick(5, 1, 9, 2, FailureModel::Byzantine, SigningScheme::ReplicaSigning);
  CHECK(c.protocol == ProtocolKind::BS_BRS);
  CHECK(c.flavor == Flavor::BRS);

  c = pick(17, 4, 5, 1, FailureModel::Byzantine, SigningScheme::ReplicaSigning);
  CHECK(c.protocol == ProtocolKind::SPBS);
  CHECK(c.alpha == 12);

  c = pick(4, 1, 9, 3, FailureModel::Byzantine, SigningScheme::ReplicaSigning);
  CHECK(c.protocol == ProtocolKind::RPBS);
  CHECK(c.alpha == 8);

  // Too small for any partitioned variant: all-pairs fallback.
  c = pick(3, 1, 2, 1, FailureModel::Byzantine, SigningScheme::ClusterSigning);
  CHECK(c.protocol == ProtocolKind::RB_BCS);

  c = pick(3, 1, 2, 1, FailureModel::Byzantine, SigningScheme::ReplicaSigning);
  CHECK(c.protocol == ProtocolKind::RB_BRS);

  // Crash operation always takes the cheaper flavor.
  c = pick(5, 1, 5, 1, FailureModel::Crash, SigningScheme::None);
  CHECK(c.protocol == ProtocolKind::BS_BCS);
  CHECK(c.flavor == Flavor::BCS);

  CHECK_FALSE(pick(8, 3, 7, 2, FailureModel::Byzantine, SigningScheme::ClusterSigning)
                  .rationale.empty());

  CHECK_THROWS_WITH_AS(
      (void)select_protocol(spec_lowest(4, 2, 4, 1, FailureModel::Byzantine,
                                        SigningScheme::ClusterSigning)),
      doctest::Contains("c1.n>2f"), ConfigError);
}

TEST_CASE("killing assignments cover what they claim") {
  auto v3 = view(3, 1);

  // The full bijection survives one sender and one receiver fault.
  std::vector<ScheduledMessage> bij{{0, 0}, {1, 1}, {2, 2}};
  CHECK_FALSE(killing_assignment(bij, v3, v3).has_value());

  // Two disjoint pairs die to one fault on each side.
  std::vector<ScheduledMessage> two{{0, 0}, {1, 1}};
  auto hit = killing_assignment(two, v3, v3);
  REQUIRE(hit.has_value());
  CHECK(hit->c1.size() <= 1);
  CHECK(hit->c2.size() <= 1);

  // Empty schedules die vacuously.
  auto empty = killing_assignment({}, v3, v3);
  REQUIRE(empty.has_value());
  CHECK(empty->c1.empty());
  CHECK(empty->c2.empty());

  // Every 2-message schedule on the 3x3 grid is killable, and any returned
  // assignment really covers every message within the fault budget.
  for (int a = 0; a < 9; ++a) {
    for (int b = a + 1; b < 9; ++b) {
      std::vector<ScheduledMessage> sched{{a / 3, a % 3}, {b / 3, b % 3}};
      auto kill = killing_assignment(sched, v3, v3);
      CAPTURE(a);
      CAPTURE(b);
      REQUIRE(kill.has_value());
      CHECK(kill->c1.size() <= 1);
      CHECK(kill->c2.size() <= 1);
      CHECK((kill->method == "heuristic" || kill->method == "exact"));
      for (const auto& m : sched)
        CHECK((kill->c1.count(m.sender) || kill->c2.count(m.receiver)));
    }
  }
}

TEST_CASE("schedule-size oracle agrees with the closed form") {
  auto r = min_schedule_size(3, 1, 3, 1);
  CHECK(r.value == 3);
  CHECK_FALSE(r.exceeded_cap);

  r = min_schedule_size(2, 0, 2, 0);
  CHECK(r.value == 1);
  CHECK_FALSE(r.exceeded_cap);

  r = min_schedule_size(4, 1, 2, 1);
  CHECK(r.value == 4);
  CHECK_FALSE(r.exceeded_cap);

  r = min_schedule_size(5, 2, 5, 2);
  CHECK(r.value == 5);
  CHECK_FALSE(r.exceeded_cap);

  // Caps below the answer report exhaustion instead of a value.
  r = min_schedule_size(3, 1, 3, 1, 2);
  CHECK(r.exceeded_cap);

  CHECK_THROWS_AS(min_schedule_size(6, 1, 3, 1), ConfigError);
  CHECK_THROWS_AS(min_schedule_size(3, 3, 3, 1), ConfigError);
}
