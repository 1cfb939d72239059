#include "clustersend/protocols.hpp"

#include <algorithm>

#include "clustersend/sim.hpp"

namespace clustersend {

Partition c_partition(const std::vector<int>& members, int c, PartitionPolicy policy) {
  (void)policy;  // ascending-index fill is the only policy
  if (c < 1) throw ConfigError("part size must be at least 1");
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() != members.size()) throw ConfigError("partition members must be distinct");

  Partition part;
  part.c = c;
  const int q = static_cast<int>(sorted.size()) / c;
  for (int k = 0; k < q; ++k)
    part.parts.emplace_back(sorted.begin() + k * c, sorted.begin() + (k + 1) * c);
  part.remainder.assign(sorted.begin() + q * c, sorted.end());
  return part;
}

Bijection rank_bijection(const std::vector<int>& sources, const std::vector<int>& targets) {
  if (sources.size() != targets.size())
    throw ConfigError("bijection requires equal-size source and target sets");
  Bijection b;
  b.pairs.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) b.pairs.emplace_back(sources[i], targets[i]);
  return b;
}

namespace {

void check_common(const ClusterView& v1, const ClusterView& v2) {
  if (v1.n < 1 || v2.n < 1) throw ConfigError("clusters must be non-empty");
  if (v1.f < 0 || v2.f < 0) throw ConfigError("fault counts must be non-negative");
  if (v1.nf() < 1 || v2.nf() < 1) throw ConfigError("each cluster needs a non-faulty replica");
  if (v1.n <= 2 * v1.f)
    throw ConfigError("sending cluster cannot reach consensus (needs n1 > 2*f1)");
}

Flavor flavor_of(ProtocolKind kind, SigningScheme signing, FailureModel model) {
  const bool brs_kind = kind == ProtocolKind::RB_BRS || kind == ProtocolKind::BS_BRS;
  const bool partitioned = kind == ProtocolKind::SPBS || kind == ProtocolKind::RPBS;
  if (brs_kind || (partitioned && signing == SigningScheme::ReplicaSigning)) {
    if (signing != SigningScheme::ReplicaSigning)
      throw ConfigError("distinct-signer protocols require replica signing");
    return Flavor::BRS;
  }
  // Cluster-certified operation: needs a cluster certificate, or a failure
  // model under which nobody forges and certificates can be omitted.
  if (signing == SigningScheme::ClusterSigning || signing == SigningScheme::EmulatedClusterSigning)
    return Flavor::BCS;
  if (model != FailureModel::Byzantine) return Flavor::BCS;
  throw ConfigError("cluster-certified protocols need cluster signing (native or emulated) under "
                    "Byzantine failures");
}

}  // namespace

ProtocolPlan build_plan(ProtocolKind kind, const ClusterView& v1, const ClusterView& v2,
                        FailureModel model, SigningScheme signing, bool compact, int alpha,
                        PlanMutation mutation) {
  check_common(v1, v2);
  if (compact && kind != ProtocolKind::BS_BRS)
    throw ConfigError("compact certificates only apply to the bijective distinct-signer protocol");

  ProtocolPlan plan;
  plan.kind = kind;
  plan.flavor = flavor_of(kind, signing, model);
  plan.compact = compact;
  plan.model = model;
  plan.signing = signing;
  plan.n1 = v1.n;
  plan.f1 = v1.f;
  plan.n2 = v2.n;
  plan.f2 = v2.f;
  plan.mutation = mutation;
  plan.receive_threshold =
      plan.flavor == Flavor::BRS ? v1.f + 1 + mutation.receive_threshold_delta : 1;
  if (plan.receive_threshold < 1) throw ConfigError("receive threshold must be at least 1");

  switch (kind) {
    case ProtocolKind::RB_BCS:
    case ProtocolKind::RB_BRS: {
      const int s1 = (plan.flavor == Flavor::BRS ? 2 * v1.f + 1 : v1.f + 1) + mutation.s1_size_delta;
      const int s2 = v2.f + 1;
      if (s1 < 1 || s1 > v1.n) throw ConfigError("sender set size out of range");
      if (s2 > v2.n) throw ConfigError("receiver set size out of range");
      for (int s = 0; s < s1; ++s)
        for (int r = 0; r < s2; ++r) plan.sends.push_back({s, r, true});
      break;
    }
    case ProtocolKind::BS_BCS:
    case ProtocolKind::BS_BRS: {
      const int base = kind == ProtocolKind::BS_BRS ? 2 * v1.f + v2.f + 1 : v1.f + v2.f + 1;
      const int size = base + mutation.s1_size_delta;
      const int value_bearing = v1.f + v2.f + 1;
      if (size < 1) throw ConfigError("bijection size out of range");
      if (size > v1.n || size > v2.n)
        throw ConfigError("bijective sending needs both clusters larger than the fault sum");
      for (int i = 0; i < size; ++i)
        plan.sends.push_back({i, i, !compact || i < value_bearing});
      break;
    }
    case ProtocolKind::SPBS: {
      BoundReport bound = plan.flavor == Flavor::BRS ? tau1(v1, v2) : sigma1(v1, v2);
      const int expected = static_cast<int>(bound.value);
      if (alpha >= 0 && alpha != expected)
        throw ConfigError("alpha=" + std::to_string(alpha) + " does not match the bound (" +
                          std::to_string(expected) + ")");
      if (expected > v1.n)
        throw ConfigError("sender partition needs alpha <= n1 (alpha=" + std::to_string(expected) +
                          ", n1=" + std::to_string(v1.n) + ")");
      std::vector<int> chosen(expected);
      for (int i = 0; i < expected; ++i) chosen[i] = i;
      Partition part = c_partition(chosen, v2.n);
      auto all_parts = part.parts;
      if (!part.remainder.empty()) all_parts.push_back(part.remainder);
      for (const auto& p : all_parts) {
        std::vector<int> targets(p.size());
        for (std::size_t t = 0; t < p.size(); ++t) targets[t] = static_cast<int>(t);
        for (std::size_t t = 0; t < p.size(); ++t)
          plan.sends.push_back({p[t], targets[t], true});
        plan.pairings.emplace_back(p, targets);
      }
      break;
    }
    case ProtocolKind::RPBS: {
      BoundReport bound = plan.flavor == Flavor::BRS ? tau2(v1, v2) : sigma2(v1, v2);
      const int expected = static_cast<int>(bound.value);
      if (alpha >= 0 && alpha != expected)
        throw ConfigError("alpha=" + std::to_string(alpha) + " does not match the bound (" +
                          std::to_string(expected) + ")");
      if (expected > v2.n)
        throw ConfigError("receiver partition needs alpha <= n2 (alpha=" + std::to_string(expected) +
                          ", n2=" + std::to_string(v2.n) + ")");
      std::vector<int> chosen(expected);
      for (int i = 0; i < expected; ++i) chosen[i] = i;
      Partition part = c_partition(chosen, v1.n);
      auto all_parts = part.parts;
      if (!part.remainder.empty()) all_parts.push_back(part.remainder);
      for (const auto& p : all_parts) {
        std::vector<int> sources(p.size());
        for (std::size_t t = 0; t < p.size(); ++t) sources[t] = static_cast<int>(t);
        // The same low-index senders serve every part, re-sending the value.
        for (std::size_t t = 0; t < p.size(); ++t)
          plan.sends.push_back({sources[t], p[t], true});
        plan.pairings.emplace_back(sources, p);
      }
      break;
    }
  }
  plan.alpha = static_cast<int>(plan.sends.size());
  return plan;
}

ProtocolPlan plan_for_choice(const ProtocolChoice& choice, const SystemSpec& spec) {
  const int alpha =
      (choice.protocol == ProtocolKind::SPBS || choice.protocol == ProtocolKind::RPBS)
          ? choice.alpha
          : -1;
  return build_plan(choice.protocol, spec.view1(), spec.view2(), spec.failure_model, spec.signing,
                    choice.compact_certs, alpha);
}

RunTranscript rb_bcs(const SystemSpec& spec, const Value& v, const RunContext& ctx) {
  return run(spec,
             build_plan(ProtocolKind::RB_BCS, spec.view1(), spec.view2(), spec.failure_model,
                        spec.signing),
             v, ctx);
}

RunTranscript rb_brs(const SystemSpec& spec, const Value& v, const RunContext& ctx) {
  return run(spec,
             build_plan(ProtocolKind::RB_BRS, spec.view1(), spec.view2(), spec.failure_model,
                        spec.signing),
             v, ctx);
}

RunTranscript bs_bcs(const SystemSpec& spec, const Value& v, const RunContext& ctx) {
  return run(spec,
             build_plan(ProtocolKind::BS_BCS, spec.view1(), spec.view2(), spec.failure_model,
                        spec.signing),
             v, ctx);
}

RunTranscript bs_brs(const SystemSpec& spec, const Value& v, bool compact, const RunContext& ctx) {
  return run(spec,
             build_plan(ProtocolKind::BS_BRS, spec.view1(), spec.view2(), spec.failure_model,
                        spec.signing, compact),
             v, ctx);
}

RunTranscript spbs(const SystemSpec& spec, const Value& v, int alpha, Flavor flavor,
                   const RunContext& ctx) {
  ProtocolPlan plan = build_plan(ProtocolKind::SPBS, spec.view1(), spec.view2(),
                                 spec.failure_model, spec.signing, false, alpha);
  if (plan.flavor != flavor)
    throw ConfigError("requested flavor does not match the signing scheme");
  return run(spec, plan, v, ctx);
}

RunTranscript rpbs(const SystemSpec& spec, const Value& v, int alpha, Flavor flavor,
                   const RunContext& ctx) {
  ProtocolPlan plan = build_plan(ProtocolKind::RPBS, spec.view1(), spec.view2(),
                                 spec.failure_model, spec.signing, false, alpha);
  if (plan.flavor != flavor)
    throw ConfigError("requested flavor does not match the signing scheme");
  return run(spec, plan, v, ctx);
}

}  // namespace clustersend
