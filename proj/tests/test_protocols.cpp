#include <utility>
#include <vector>

#include "clustersend/protocols.hpp"
#include "clustersend/sim.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace clustersend;
using testutil::spec_at;
using testutil::spec_lowest;

namespace {
ClusterView view(int n, int f) { return ClusterView{n, f}; }

std::vector<std::pair<int, int>> edges(const ProtocolPlan& plan) {
  std::vector<std::pair<int, int>> out;
  for (const auto& s : plan.sends) out.emplace_back(s.sender, s.receiver);
  return out;
}
}  // namespace

TEST_CASE("c_partition splits into full parts plus remainder") {
  std::vector<int> members;
  for (int i = 0; i < 11; ++i) members.push_back(i);
  auto part = c_partition(members, 4);
  REQUIRE(part.parts.size() == 2);
  CHECK(part.parts[0] == std::vector<int>{0, 1, 2, 3});
  CHECK(part.parts[1] == std::vector<int>{4, 5, 6, 7});
  CHECK(part.remainder == std::vector<int>{8, 9, 10});

  auto exact = c_partition({3, 1, 2, 0}, 2);
  REQUIRE(exact.parts.size() == 2);
  CHECK(exact.parts[0] == std::vector<int>{0, 1});  // ascending-index policy
  CHECK(exact.remainder.empty());

  CHECK_THROWS_AS(c_partition(members, 0), ConfigError);
  CHECK_THROWS_AS(c_partition({1, 1}, 1), ConfigError);
}

TEST_CASE("rank_bijection pairs by rank") {
  auto b = rank_bijection({2, 5, 7}, {1, 3, 9});
  CHECK(b.pairs == std::vector<std::pair<int, int>>{{2, 1}, {5, 3}, {7, 9}});
  CHECK_THROWS_AS(rank_bijection({1, 2}, {1}), ConfigError);
}

TEST_CASE("all-pairs plans") {
  auto plan = build_plan(ProtocolKind::RB_BCS, view(5, 2), view(4, 1), FailureModel::Byzantine,
                         SigningScheme::ClusterSigning);
  CHECK(plan.alpha == 6);
  CHECK(plan.receive_threshold == 1);
  CHECK(plan.flavor == Flavor::BCS);
  CHECK(edges(plan) ==
        std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}});
  for (const auto& s : plan.sends) CHECK(s.carries_value);

  auto brs = build_plan(ProtocolKind::RB_BRS, view(5, 2), view(4, 1), FailureModel::Byzantine,
                        SigningScheme::ReplicaSigning);
  CHECK(brs.sends.size() == 10);  // (2*2+1) senders x 2 receivers
  CHECK(brs.receive_threshold == 3);
}

TEST_CASE("bijective plans") {
  auto plan = build_plan(ProtocolKind::BS_BCS, view(8, 3), view(7, 2), FailureModel::Byzantine,
                         SigningScheme::ClusterSigning);
  CHECK(plan.sends.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(plan.sends[i].sender == i);
    CHECK(plan.sends[i].receiver == i);
  }

  auto brs = build_plan(ProtocolKind::BS_BRS, view(5, 1), view(5, 1), FailureModel::Byzantine,
                        SigningScheme::ReplicaSigning);
  CHECK(brs.sends.size() == 4);
  CHECK(brs.receive_threshold == 2);

  // Compact operation: full certificate redundancy, payload on a prefix.
  auto compact = build_plan(ProtocolKind::BS_BRS, view(9, 2), view(9, 2), FailureModel::Byzantine,
                            SigningScheme::ReplicaSigning, true);
  CHECK(compact.sends.size() == 7);
  int carrying = 0;
  for (const auto& s : compact.sends) carrying += s.carries_value ? 1 : 0;
  CHECK(carrying == 5);
  for (int i = 0; i < 5; ++i) CHECK(compact.sends[i].carries_value);

  CHECK_THROWS_AS(build_plan(ProtocolKind::BS_BCS, view(3, 1), view(2, 1),
                             FailureModel::Byzantine, SigningScheme::ClusterSigning),
                  ConfigError);
  // Compact certificate-only envelopes exist just for the extra-signer plan.
  CHECK_THROWS_AS(build_plan(ProtocolKind::BS_BCS, view(8, 3), view(7, 2),
                             FailureModel::Byzantine, SigningScheme::ClusterSigning, true),
                  ConfigError);
}

TEST_CASE("sender-partitioned plans") {
  auto plan = build_plan(ProtocolKind::SPBS, view(13, 4), view(4, 1), FailureModel::Byzantine,
                         SigningScheme::ClusterSigning, false, 7);
  CHECK(plan.alpha == 7);
  REQUIRE(plan.pairings.size() == 2);
  CHECK(plan.pairings[0].first == std::vector<int>{0, 1, 2, 3});
  CHECK(plan.pairings[1].first == std::vector<int>{4, 5, 6});
  CHECK(plan.pairings[1].second == std::vector<int>{0, 1, 2});
  CHECK(edges(plan) == std::vector<std::pair<int, int>>{
                           {0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 0}, {5, 1}, {6, 2}});

  // alpha is cross-checked against the bound, not trusted.
  CHECK_THROWS_AS(build_plan(ProtocolKind::SPBS, view(13, 4), view(4, 1),
                             FailureModel::Byzantine, SigningScheme::ClusterSigning, false, 8),
                  ConfigError);
  // A sending cluster smaller than the bound cannot host the partition.
  CHECK_THROWS_AS(build_plan(ProtocolKind::SPBS, view(3, 1), view(2, 1),
                             FailureModel::Byzantine, SigningScheme::ClusterSigning),
                  ConfigError);

  auto brs = build_plan(ProtocolKind::SPBS, view(17, 4), view(5, 1), FailureModel::Byzantine,
                        SigningScheme::ReplicaSigning);
  CHECK(brs.alpha == 12);
  CHECK(brs.flavor == Flavor::BRS);
  CHECK(brs.receive_threshold == 5);
}

TEST_CASE("receiver-partitioned plans") {
  auto plan = build_plan(ProtocolKind::RPBS, view(4, 1), view(13, 4), FailureModel::Byzantine,
                         SigningScheme::ClusterSigning, false, 7);
  CHECK(plan.alpha == 7);
  CHECK(edges(plan) == std::vector<std::pair<int, int>>{
                           {0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 4}, {1, 5}, {2, 6}});

  auto brs = build_plan(ProtocolKind::RPBS, view(4, 1), view(11, 3), FailureModel::Byzantine,
                        SigningScheme::ReplicaSigning);
  CHECK(brs.alpha == 8);

  CHECK_THROWS_AS(build_plan(ProtocolKind::RPBS, view(4, 1), view(13, 4),
                             FailureModel::Byzantine, SigningScheme::ClusterSigning, false, 9),
                  ConfigError);
}

TEST_CASE("flavor is forced by model and signing") {
  // Replica signing under Byzantine failures needs the distinct-signer rule.
  auto plan = build_plan(ProtocolKind::RB_BRS, view(3, 1), view(3, 1), FailureModel::Byzantine,
                         SigningScheme::ReplicaSigning);
  CHECK(plan.flavor == Flavor::BRS);
  CHECK_THROWS_AS(build_plan(ProtocolKind::RB_BRS, view(3, 1), view(3, 1),
                             FailureModel::Byzantine, SigningScheme::ClusterSigning),
                  ConfigError);
  CHECK_THROWS_AS(build_plan(ProtocolKind::BS_BCS, view(5, 1), view(5, 1),
                             FailureModel::Byzantine, SigningScheme::ReplicaSigning),
                  ConfigError);
  // Outside Byzantine operation nothing forges, so the cheap flavor is fine
  // under any scheme, including no signatures at all.
  auto crash = build_plan(ProtocolKind::BS_BCS, view(5, 1), view(5, 1), FailureModel::Crash,
                          SigningScheme::None);
  CHECK(crash.flavor == Flavor::BCS);
  CHECK(crash.receive_threshold == 1);
}

TEST_CASE("consensus precondition is checked on the sending cluster") {
  CHECK_THROWS_AS(build_plan(ProtocolKind::RB_BCS, view(4, 2), view(4, 1),
                             FailureModel::Byzantine, SigningScheme::ClusterSigning),
                  ConfigError);
}

TEST_CASE("mutations bend the plan the way the knob says") {
  auto shrunk = build_plan(ProtocolKind::BS_BCS, view(8, 3), view(7, 2),
                           FailureModel::Byzantine, SigningScheme::ClusterSigning, false, -1,
                           PlanMutation{-1, 0});
  CHECK(shrunk.sends.size() == 5);

  auto lax = build_plan(ProtocolKind::RB_BRS, view(5, 2), view(4, 1), FailureModel::Byzantine,
                        SigningScheme::ReplicaSigning, false, -1, PlanMutation{0, -1});
  CHECK(lax.receive_threshold == 2);

  // The distinct-signer threshold only exists under brs; bcs ignores the knob.
  auto bcs = build_plan(ProtocolKind::RB_BCS, view(3, 1), view(3, 1), FailureModel::Byzantine,
                        SigningScheme::ClusterSigning, false, -1, PlanMutation{0, -1});
  CHECK(bcs.receive_threshold == 1);
  CHECK_THROWS_AS(build_plan(ProtocolKind::RB_BRS, view(3, 1), view(3, 1),
                             FailureModel::Byzantine, SigningScheme::ReplicaSigning, false, -1,
                             PlanMutation{0, -3}),
                  ConfigError);  // threshold would drop below 1
}

TEST_CASE("plan_for_choice reproduces the selected protocol") {
  auto spec = spec_lowest(13, 4, 4, 1, FailureModel::Byzantine, SigningScheme::ClusterSigning);
  auto choice = select_protocol(spec);
  auto plan = plan_for_choice(choice, spec);
  CHECK(plan.kind == choice.protocol);
  CHECK(plan.alpha == choice.alpha);
  CHECK(plan.sends.size() == 7);
}

TEST_CASE("single-run wrappers execute their protocol") {
  RunContext ctx;
  auto spec = spec_at(8, {0, 2, 3}, 7, {0, 2}, FailureModel::Byzantine,
                      SigningScheme::ClusterSigning);
  auto t = bs_bcs(spec, "payload", ctx);
  CHECK(t.protocol == "bs-bcs");
  CHECK(t.metrics.inter_cluster_msgs == 6);
  CHECK(t.receipt);
  CHECK(t.agreement);
  CHECK(t.confirmation);

  auto small = spec_lowest(3, 1, 2, 1, FailureModel::Byzantine, SigningScheme::ReplicaSigning);
  auto r = rb_brs(small, "payload", ctx);
  CHECK(r.protocol == "rb-brs");
  CHECK(r.metrics.inter_cluster_msgs == 6);
  CHECK(r.receipt);

  auto sp = spbs(spec_lowest(13, 4, 4, 1, FailureModel::Byzantine, SigningScheme::ClusterSigning),
                 "payload", 7, Flavor::BCS, ctx);
  CHECK(sp.protocol == "spbs");
  CHECK(sp.receipt);
  CHECK_THROWS_AS(spbs(spec_lowest(13, 4, 4, 1, FailureModel::Byzantine,
                                   SigningScheme::ClusterSigning),
                       "payload", 7, Flavor::BRS, ctx),
                  ConfigError);  // flavor contradicts the signing scheme
}
