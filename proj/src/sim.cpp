#include "clustersend/sim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

namespace clustersend {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::set<int> mask_to_set(std::uint64_t mask) {
  std::set<int> out;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) out.insert(i);
  return out;
}

// Ascending-mask subset lists; index 0 is empty, the last index is the full set.
std::vector<std::set<int>> all_subsets(int k) {
  if (k < 0 || k > 20) throw ConfigError("subset dimension too large to enumerate");
  std::vector<std::set<int>> out;
  out.reserve(std::size_t(1) << k);
  for (std::uint64_t m = 0; m < (std::uint64_t(1) << k); ++m) out.push_back(mask_to_set(m));
  return out;
}

std::vector<std::set<int>> subsets_of_members(const std::set<int>& members) {
  std::vector<int> v(members.begin(), members.end());
  if (v.size() > 20) throw ConfigError("subset dimension too large to enumerate");
  std::vector<std::set<int>> out;
  out.reserve(std::size_t(1) << v.size());
  for (std::uint64_t m = 0; m < (std::uint64_t(1) << v.size()); ++m) {
    std::set<int> s;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (m & (std::uint64_t(1) << i)) s.insert(v[i]);
    out.push_back(std::move(s));
  }
  return out;
}

// Expected certificate shape for a plan; certless plans return nullopt.
std::optional<Certificate::Kind> expected_cert_kind(const ProtocolPlan& plan) {
  if (plan.flavor == Flavor::BRS) return Certificate::Kind::Replica;
  if (plan.signing == SigningScheme::ClusterSigning) return Certificate::Kind::Cluster;
  if (plan.signing == SigningScheme::EmulatedClusterSigning)
    return Certificate::Kind::EmulatedCluster;
  return std::nullopt;
}

long long replica_sigs_per_envelope(const ProtocolPlan& plan) {
  if (plan.flavor == Flavor::BRS) return 1;
  if (plan.signing == SigningScheme::EmulatedClusterSigning) return plan.f1 + 1;
  return 0;
}

long long cluster_sigs_per_envelope(const ProtocolPlan& plan) {
  return plan.flavor == Flavor::BCS && plan.signing == SigningScheme::ClusterSigning ? 1 : 0;
}

// Per-sender prescribed send counts and per-receiver inbox sizes, in plan order.
struct PlanIndex {
  std::vector<int> sends_of_sender;        // size n1
  std::vector<int> inbox_of_receiver;      // size n2
  std::vector<int> send_pos_for_sender;    // per plan.sends entry, position in its sender's list
  std::vector<int> inbox_pos_for_receiver; // per plan.sends entry, position in its receiver's inbox
};

PlanIndex index_plan(const ProtocolPlan& plan) {
  PlanIndex ix;
  ix.sends_of_sender.assign(plan.n1, 0);
  ix.inbox_of_receiver.assign(plan.n2, 0);
  ix.send_pos_for_sender.reserve(plan.sends.size());
  ix.inbox_pos_for_receiver.reserve(plan.sends.size());
  for (const auto& s : plan.sends) {
    ix.send_pos_for_sender.push_back(ix.sends_of_sender[s.sender]++);
    ix.inbox_pos_for_receiver.push_back(ix.inbox_of_receiver[s.receiver]++);
  }
  return ix;
}

struct Env {
  bool local = false;
  int from_cluster = 1;
  int from = -1;
  int to = -1;
  int val = 0;  // 0 = agreed value, 1 = alternative
  bool has_value = true;
  int cert = -1;  // index into the run's certificate pool
  bool injected = false;
  int prescribed = -1;  // index into plan.sends, -1 for adversary traffic
};

std::string render_cert(const std::vector<Certificate>& pool, int id) {
  if (id < 0) return "-";
  const Certificate& c = pool[std::size_t(id)];
  std::ostringstream os;
  switch (c.kind) {
    case Certificate::Kind::Replica: os << "replica(" << c.cluster << ":" << c.signers[0] << ")"; break;
    case Certificate::Kind::Cluster: os << "cluster(" << c.cluster << ")"; break;
    case Certificate::Kind::EmulatedCluster: {
      os << "emulated(" << c.cluster << ":{";
      for (std::size_t i = 0; i < c.signers.size(); ++i) os << (i ? "," : "") << c.signers[i];
      os << "})";
      break;
    }
  }
  return os.str();
}

int env_count_threads() {
  const char* raw = std::getenv("CLUSTERSEND_THREADS");
  if (!raw) return 1;
  int v = std::atoi(raw);
  return std::clamp(v, 1, 64);
}

}  // namespace

Metrics plan_metrics(const ProtocolPlan& plan, long long value_bytes, long long sig_unit) {
  Metrics m;
  const long long rs = replica_sigs_per_envelope(plan);
  const long long cs = cluster_sigs_per_envelope(plan);
  for (const auto& s : plan.sends) {
    ++m.inter_cluster_msgs;
    const long long vb = s.carries_value ? value_bytes : 0;
    m.value_bytes += vb;
    m.replica_sigs += rs;
    m.cluster_sigs += cs;
    m.max_envelope_units = std::max(m.max_envelope_units, vb + (rs + cs) * sig_unit);
  }
  return m;
}

bool trace_legal(const SystemSpec& spec, const ProtocolPlan& plan, const AdversaryTrace& trace,
                 std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const bool byz = spec.failure_model == FailureModel::Byzantine;

  auto check_override = [&](const std::optional<std::set<int>>& o, const ClusterSpec& c,
                            const char* name) -> std::optional<std::string> {
    if (!o) return std::nullopt;
    if (int(o->size()) > c.f())
      return std::string(name) + " placement exceeds the announced fault bound";
    for (int i : *o)
      if (i < 0 || i >= c.n) return std::string(name) + " placement index out of range";
    return std::nullopt;
  };
  if (auto e = check_override(trace.faulty1, spec.c1, "c1")) return fail(*e);
  if (auto e = check_override(trace.faulty2, spec.c2, "c2")) return fail(*e);

  const std::set<int>& f1set = trace.faulty1 ? *trace.faulty1 : spec.c1.faulty;
  const std::set<int>& f2set = trace.faulty2 ? *trace.faulty2 : spec.c2.faulty;
  const PlanIndex ix = index_plan(plan);

  std::set<std::pair<int, int>> seen;
  for (const auto& s : trace.scripts) {
    if (s.replica.cluster != 1 && s.replica.cluster != 2) return fail("script cluster must be 1 or 2");
    const int n = s.replica.cluster == 1 ? spec.c1.n : spec.c2.n;
    if (s.replica.index < 0 || s.replica.index >= n) return fail("script replica index out of range");
    if (!seen.insert({s.replica.cluster, s.replica.index}).second)
      return fail("duplicate script for one replica");
    const std::set<int>& fset = s.replica.cluster == 1 ? f1set : f2set;
    if (!fset.count(s.replica.index)) return fail("script targets a non-faulty replica");
    if (s.replica.cluster == 1) {
      if (!s.ignore_inbox.empty()) return fail("sender-side scripts cannot ignore an inbox");
      if (s.relay_forged) return fail("sender-side scripts cannot relay forgeries");
      for (int d : s.drop_sends)
        if (d < 0 || d >= ix.sends_of_sender[s.replica.index])
          return fail("drop index outside the replica's prescribed sends");
    } else {
      if (!s.drop_sends.empty()) return fail("receiver-side scripts cannot drop sends");
      for (int d : s.ignore_inbox)
        if (d < 0 || d >= ix.inbox_of_receiver[s.replica.index])
          return fail("ignore index outside the replica's prescribed inbox");
      if (s.relay_forged && !byz) return fail("forgery relaying requires byzantine failures");
    }
  }

  if (!trace.injection.signers.empty() || !trace.injection.targets.empty()) {
    if (!byz) return fail("value injection requires byzantine failures");
    for (int s : trace.injection.signers)
      if (!f1set.count(s)) return fail("injection signer must be a faulty c1 replica");
    for (int t : trace.injection.targets)
      if (t < 0 || t >= spec.c2.n) return fail("injection target out of range");
  }
  if (trace.replay && !byz) return fail("replay requires byzantine failures");
  return true;
}

void check_trace_legal(const SystemSpec& spec, const ProtocolPlan& plan,
                       const AdversaryTrace& trace) {
  std::string why;
  if (!trace_legal(spec, plan, trace, &why)) throw ConfigError("illegal adversary trace: " + why);
}

RunTranscript run(const SystemSpec& spec, const ProtocolPlan& plan, const Value& v,
                  const RunContext& ctx) {
  if (plan.n1 != spec.c1.n || plan.f1 != spec.c1.f() || plan.n2 != spec.c2.n ||
      plan.f2 != spec.c2.f())
    throw ConfigError("plan was built for a different system");
  {
    const auto violations = validate_system(spec);
    if (!violations.empty()) throw ConfigError("invalid system: " + violations.front().code);
  }
  check_trace_legal(spec, plan, ctx.trace);

  const std::set<int>& f1set = ctx.trace.faulty1 ? *ctx.trace.faulty1 : spec.c1.faulty;
  const std::set<int>& f2set = ctx.trace.faulty2 ? *ctx.trace.faulty2 : spec.c2.faulty;
  Value alt = ctx.trace.alt_value;
  if (alt.empty()) alt = v + std::string(1, '\x01');
  if (alt == v) throw ConfigError("alternative value must differ from the sent value");

  RunTranscript out;
  out.protocol = to_string(plan.kind);
  out.flavor = plan.flavor == Flavor::BRS ? "brs" : "bcs";
  out.compact = plan.compact;
  out.model = to_string(spec.failure_model);
  out.signing = to_string(plan.signing);
  out.n1 = plan.n1;
  out.f1 = plan.f1;
  out.n2 = plan.n2;
  out.f2 = plan.f2;
  out.alpha = plan.alpha;
  out.faulty1 = f1set;
  out.faulty2 = f2set;
  out.value = v;
  out.alt_value = alt;
  out.received.assign(std::size_t(plan.n2), {});
  out.confirmed.assign(std::size_t(plan.n1), false);
  out.metrics = plan_metrics(plan, (long long)v.size(), ctx.sig_unit);

  const PlanIndex ix = index_plan(plan);
  const auto kind_wanted = expected_cert_kind(plan);

  CertLedger ledger;
  ledger.set_agreed(1, v);
  std::vector<Certificate> pool;
  const Value* vals[2] = {&v, &alt};
  auto is_f1 = [&](int i) { return f1set.count(i) != 0; };
  auto is_f2 = [&](int i) { return f2set.count(i) != 0; };

  std::vector<const ReplicaScript*> script1(std::size_t(plan.n1), nullptr);
  std::vector<const ReplicaScript*> script2(std::size_t(plan.n2), nullptr);
  for (const auto& s : ctx.trace.scripts)
    (s.replica.cluster == 1 ? script1[std::size_t(s.replica.index)]
                            : script2[std::size_t(s.replica.index)]) = &s;

  std::vector<Event> log;
  auto record = [&](Event e) {
    if (ctx.record_log) log.push_back(std::move(e));
  };
  auto record_agree = [&] {
    if (!ctx.record_log) return;
    Event e;
    e.kind = "agree";
    e.from_cluster = 1;
    e.value = v;
    e.cert = "-";
    log.push_back(std::move(e));
  };
  record_agree();

  // Certificates attached to prescribed envelopes.
  std::vector<int> sender_cert(std::size_t(plan.n1), -1);
  int shared_cert = -1;
  auto sender_cert_id = [&](int s) {
    if (sender_cert[std::size_t(s)] < 0) {
      pool.push_back(ledger.sign_replica(1, s, v, is_f1(s), spec.failure_model));
      sender_cert[std::size_t(s)] = int(pool.size()) - 1;
    }
    return sender_cert[std::size_t(s)];
  };
  auto shared_cert_id = [&]() {
    if (shared_cert < 0) {
      if (plan.signing == SigningScheme::ClusterSigning) {
        pool.push_back(ledger.sign_cluster(1, v));
      } else {
        std::vector<int> signers;
        for (int i = 0; i < plan.n1 && int(signers.size()) < plan.f1 + 1; ++i)
          if (!is_f1(i)) signers.push_back(i);
        pool.push_back(ledger.sign_emulated(1, v, signers, f1set, spec.failure_model));
      }
      shared_cert = int(pool.size()) - 1;
    }
    return shared_cert;
  };

  std::vector<Env> pending;
  pending.reserve(plan.sends.size() * 2 + 8);

  // Prescribed sends; a scripted drop discards the envelope but it stays counted.
  for (std::size_t i = 0; i < plan.sends.size(); ++i) {
    const PrescribedSend& ps = plan.sends[i];
    const ReplicaScript* sc = script1[std::size_t(ps.sender)];
    const bool dropped = sc && sc->drop_sends.count(ix.send_pos_for_sender[i]);
    Env e;
    e.from = ps.sender;
    e.to = ps.receiver;
    e.val = 0;
    e.has_value = ps.carries_value;
    e.prescribed = int(i);
    if (!kind_wanted) {
      e.cert = -1;
    } else if (*kind_wanted == Certificate::Kind::Replica) {
      e.cert = dropped ? -1 : sender_cert_id(ps.sender);
    } else {
      e.cert = shared_cert_id();
    }
    Event ev;
    ev.kind = dropped ? "drop" : "send";
    ev.from_cluster = 1;
    ev.from = ps.sender;
    ev.to = ps.receiver;
    if (ps.carries_value) ev.value = v;
    ev.cert = dropped ? "-" : render_cert(pool, e.cert);
    record(std::move(ev));
    if (!dropped) pending.push_back(e);
  }

  // Injection: every forged signer pushes the alternative value to every target.
  if (!ctx.trace.injection.signers.empty() && !ctx.trace.injection.targets.empty()) {
    int forged_shared = -1;
    if (kind_wanted && *kind_wanted == Certificate::Kind::EmulatedCluster) {
      std::vector<int> signers(ctx.trace.injection.signers.begin(),
                               ctx.trace.injection.signers.end());
      std::sort(signers.begin(), signers.end());
      signers.erase(std::unique(signers.begin(), signers.end()), signers.end());
      pool.push_back(ledger.sign_emulated(1, alt, signers, f1set, spec.failure_model));
      forged_shared = int(pool.size()) - 1;
    } else if (kind_wanted && *kind_wanted == Certificate::Kind::Cluster) {
      // A cluster signature for a non-agreed value cannot be minted; the
      // adversary fabricates an unbacked certificate instead.
      Certificate fake;
      fake.kind = Certificate::Kind::Cluster;
      fake.cluster = 1;
      fake.subject = alt;
      pool.push_back(fake);
      forged_shared = int(pool.size()) - 1;
    }
    std::vector<int> forged_by(std::size_t(plan.n1), -1);
    for (int s : ctx.trace.injection.signers) {
      for (int t : ctx.trace.injection.targets) {
        Env e;
        e.from = s;
        e.to = t;
        e.val = 1;
        e.injected = true;
        if (!kind_wanted) {
          e.cert = -1;
        } else if (*kind_wanted == Certificate::Kind::Replica) {
          if (forged_by[std::size_t(s)] < 0) {
            pool.push_back(ledger.sign_replica(1, s, alt, true, spec.failure_model));
            forged_by[std::size_t(s)] = int(pool.size()) - 1;
          }
          e.cert = forged_by[std::size_t(s)];
        } else {
          e.cert = forged_shared;
        }
        ++out.metrics.injected_msgs;
        Event ev;
        ev.kind = "inject";
        ev.from_cluster = 1;
        ev.from = s;
        ev.to = t;
        ev.value = alt;
        ev.cert = render_cert(pool, e.cert);
        ev.injected = true;
        record(std::move(ev));
        pending.push_back(e);
      }
    }
  }

  // Replay duplicates every inter-cluster envelope sent so far.
  if (ctx.trace.replay) {
    const std::size_t base = pending.size();
    for (std::size_t i = 0; i < base; ++i) {
      Env e = pending[i];
      e.injected = true;
      ++out.metrics.injected_msgs;
      Event ev;
      ev.kind = "replay";
      ev.from_cluster = e.from_cluster;
      ev.from = e.from;
      ev.to = e.to;
      if (e.has_value) ev.value = *vals[std::size_t(e.val)];
      ev.cert = render_cert(pool, e.cert);
      ev.injected = true;
      record(std::move(ev));
      pending.push_back(e);
    }
  }

  // Byzantine receivers flooding forged certificates into their own cluster.
  for (int r = 0; r < plan.n2; ++r) {
    const ReplicaScript* sc = script2[std::size_t(r)];
    if (!sc || !sc->relay_forged) continue;
    int cert_id = -1;
    if (kind_wanted) {
      if (*kind_wanted == Certificate::Kind::Replica && !ctx.trace.injection.signers.empty()) {
        const int s = ctx.trace.injection.signers.front();
        pool.push_back(ledger.sign_replica(1, s, alt, true, spec.failure_model));
        cert_id = int(pool.size()) - 1;
      } else {
        // Fabricated from whole cloth; verification has nothing recorded.
        Certificate fake;
        fake.kind = *kind_wanted;
        fake.cluster = 1;
        fake.subject = alt;
        if (*kind_wanted != Certificate::Kind::Cluster)
          fake.signers = ctx.trace.injection.signers.empty()
                             ? std::vector<int>{f1set.empty() ? 0 : *f1set.begin()}
                             : std::vector<int>(ctx.trace.injection.signers.begin(),
                                                ctx.trace.injection.signers.end());
        pool.push_back(fake);
        cert_id = int(pool.size()) - 1;
      }
    }
    for (int t = 0; t < plan.n2; ++t) {
      Env e;
      e.local = true;
      e.from_cluster = 2;
      e.from = r;
      e.to = t;
      e.val = 1;
      e.cert = cert_id;
      e.injected = true;
      ++out.metrics.injected_msgs;
      pending.push_back(e);
    }
    Event ev;
    ev.kind = "relay";
    ev.from_cluster = 2;
    ev.from = r;
    ev.to = -1;
    ev.local = true;
    ev.value = alt;
    ev.cert = render_cert(pool, cert_id);
    ev.injected = true;
    record(std::move(ev));
  }

  // Receiver state: relayed-signer masks for dedup, tallied signer masks,
  // whether value bytes arrived, and which values were marked received.
  std::vector<std::array<std::uint64_t, 2>> relayed(std::size_t(plan.n2), {0, 0});
  std::vector<std::array<std::uint64_t, 2>> tally(std::size_t(plan.n2), {0, 0});
  std::vector<std::array<bool, 2>> known(std::size_t(plan.n2), {false, false});
  std::vector<std::array<bool, 2>> got(std::size_t(plan.n2), {false, false});

  auto cert_valid = [&](const Env& e) {
    if (!kind_wanted) return e.cert < 0;
    if (e.cert < 0) return false;
    const Certificate& c = pool[std::size_t(e.cert)];
    if (c.kind != *kind_wanted) return false;
    return ledger.verify(c, *vals[std::size_t(e.val)], 1, plan.f1);
  };
  auto signer_key = [&](const Env& e) {
    if (kind_wanted && *kind_wanted == Certificate::Kind::Replica)
      return pool[std::size_t(e.cert)].signers[0];
    return 0;
  };
  auto mark_received = [&](int r, int val) {
    if (got[std::size_t(r)][std::size_t(val)]) return;
    got[std::size_t(r)][std::size_t(val)] = true;
    Event ev;
    ev.kind = "receive";
    ev.from_cluster = 2;
    ev.to = r;
    ev.value = *vals[std::size_t(val)];
    ev.cert = "-";
    record(std::move(ev));
  };
  auto process_local = [&](int r, const Env& e) {
    if (!cert_valid(e)) {
      Event ev;
      ev.kind = "reject";
      ev.from_cluster = 2;
      ev.from = e.from;
      ev.to = r;
      ev.local = true;
      ev.value = *vals[std::size_t(e.val)];
      ev.cert = render_cert(pool, e.cert);
      ev.injected = e.injected;
      record(std::move(ev));
      return;
    }
    if (plan.flavor == Flavor::BCS) {
      if (e.has_value) mark_received(r, e.val);
      return;
    }
    auto& t = tally[std::size_t(r)][std::size_t(e.val)];
    t |= std::uint64_t(1) << signer_key(e);
    if (e.has_value) known[std::size_t(r)][std::size_t(e.val)] = true;
    if (std::popcount(t) >= plan.receive_threshold && known[std::size_t(r)][std::size_t(e.val)])
      mark_received(r, e.val);
  };
  auto relay_honest = [&](int r, const Env& e) {
    const std::uint64_t bit = std::uint64_t(1) << signer_key(e);
    auto& m = relayed[std::size_t(r)][std::size_t(e.val)];
    if (m & bit) return;  // already broadcast this certificate
    m |= bit;
    for (int t = 0; t < plan.n2; ++t) {
      Env le = e;
      le.local = true;
      le.from_cluster = 2;
      le.from = r;
      le.to = t;
      le.injected = false;
      le.prescribed = -1;
      pending.push_back(le);
    }
    out.metrics.local_msgs += plan.n2;
    Event ev;
    ev.kind = "relay";
    ev.from_cluster = 2;
    ev.from = r;
    ev.to = -1;
    ev.local = true;
    if (e.has_value) ev.value = *vals[std::size_t(e.val)];
    ev.cert = render_cert(pool, e.cert);
    record(std::move(ev));
  };
  auto deliver = [&](const Env& e) {
    Event ev;
    ev.kind = "deliver";
    ev.from_cluster = e.from_cluster;
    ev.from = e.from;
    ev.to = e.to;
    ev.local = e.local;
    if (e.has_value) ev.value = *vals[std::size_t(e.val)];
    ev.cert = render_cert(pool, e.cert);
    ev.injected = e.injected;
    record(std::move(ev));
    const int r = e.to;
    if (e.local) {
      if (!is_f2(r)) process_local(r, e);
      return;
    }
    if (!is_f2(r)) {
      if (cert_valid(e)) {
        relay_honest(r, e);
      } else {
        Event rej;
        rej.kind = "reject";
        rej.from_cluster = 2;
        rej.from = e.from;
        rej.to = r;
        rej.value = *vals[std::size_t(e.val)];
        rej.cert = render_cert(pool, e.cert);
        rej.injected = e.injected;
        record(std::move(rej));
      }
      return;
    }
    // Faulty receivers follow the protocol except where scripted, and never
    // act on adversary traffic (forwarding it is the flood script's job).
    const ReplicaScript* sc = script2[std::size_t(r)];
    const bool ignored = e.prescribed < 0 ||
                         (sc && sc->ignore_inbox.count(ix.inbox_pos_for_receiver[e.prescribed]));
    if (ignored) {
      Event ig;
      ig.kind = "ignore";
      ig.from_cluster = 2;
      ig.to = r;
      ig.cert = render_cert(pool, e.cert);
      ig.injected = e.injected;
      record(std::move(ig));
      return;
    }
    if (cert_valid(e)) relay_honest(r, e);
  };

  std::optional<std::mt19937_64> rng;
  if (ctx.schedule.seed) rng.emplace(*ctx.schedule.seed);
  std::size_t decision_at = 0;
  while (!pending.empty()) {
    const std::size_t k = pending.size();
    out.branching.push_back(int(k));
    std::size_t pick = 0;
    if (rng) {
      pick = std::size_t((*rng)() % k);
    } else if (decision_at < ctx.schedule.decisions.size()) {
      pick = std::size_t(ctx.schedule.decisions[decision_at++] % k);
    }
    Env e = pending[pick];
    pending.erase(pending.begin() + std::ptrdiff_t(pick));
    deliver(e);
  }

  for (int i = 0; i < plan.n1; ++i) {
    if (is_f1(i)) continue;
    out.confirmed[std::size_t(i)] = true;
    Event ev;
    ev.kind = "confirm";
    ev.from_cluster = 1;
    ev.to = i;
    ev.value = v;
    ev.cert = "-";
    record(std::move(ev));
  }

  for (int r = 0; r < plan.n2; ++r) {
    if (got[std::size_t(r)][0]) out.received[std::size_t(r)].push_back(v);
    if (got[std::size_t(r)][1]) out.received[std::size_t(r)].push_back(alt);
  }
  bool receipt = true, agreement = true, confirmed_all = true;
  for (int r = 0; r < plan.n2; ++r) {
    if (is_f2(r)) continue;
    receipt = receipt && got[std::size_t(r)][0];
    agreement = agreement && !got[std::size_t(r)][1];
  }
  for (int i = 0; i < plan.n1; ++i)
    if (!is_f1(i)) confirmed_all = confirmed_all && out.confirmed[std::size_t(i)];
  out.receipt = receipt;
  out.agreement = agreement;
  out.confirmation = confirmed_all && receipt;
  out.log = std::move(log);
  return out;
}

RunTranscript run(const SystemSpec& spec, const ProtocolChoice& choice, const Value& v,
                  const RunContext& ctx) {
  return run(spec, plan_for_choice(choice, spec), v, ctx);
}

void for_each_placement(const ClusterView& v1, const ClusterView& v2,
                        const std::function<void(const Placement&)>& fn) {
  if (v1.n > 20 || v2.n > 20) throw ConfigError("cluster too large to enumerate placements");
  auto sets_of = [](int n, int f) {
    std::vector<std::set<int>> out;
    for (int size = 0; size <= f; ++size) {
      if (size == 0) {
        out.push_back({});
        continue;
      }
      // Gosper's hack walks all size-subsets in ascending mask order.
      std::uint64_t m = (std::uint64_t(1) << size) - 1;
      const std::uint64_t limit = std::uint64_t(1) << n;
      while (m < limit) {
        out.push_back(mask_to_set(m));
        const std::uint64_t c = m & (~m + 1);
        const std::uint64_t r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
      }
    }
    return out;
  };
  const auto a = sets_of(v1.n, v1.f), b = sets_of(v2.n, v2.f);
  for (const auto& fa : a)
    for (const auto& fb : b) fn({fa, fb});
}

std::vector<Placement> enumerate_placements(const SystemSpec& spec) {
  std::vector<Placement> out;
  for_each_placement(spec.view1(), spec.view2(), [&](const Placement& p) { out.push_back(p); });
  return out;
}

std::uint64_t AdversaryBasis::total() const {
  auto mul = [](std::uint64_t a, std::uint64_t b) {
    if (b != 0 && a > UINT64_MAX / b) return UINT64_MAX;
    return a * b;
  };
  std::uint64_t t = 1;
  for (const auto& d : sender_dims) t = mul(t, d.options.size());
  for (const auto& d : receiver_dims) t = mul(t, d.options.size());
  t = mul(t, injections.size());
  t = mul(t, forged_relayers.size());
  t = mul(t, replay_options.size());
  return t;
}

AdversaryBasis make_adversary_basis(const SystemSpec& spec, const Placement& placement,
                                    const ProtocolPlan& plan) {
  AdversaryBasis b;
  b.placement = placement;
  const PlanIndex ix = index_plan(plan);
  const bool byz = spec.failure_model == FailureModel::Byzantine;

  for (int s : placement.first) {
    const int k = ix.sends_of_sender[std::size_t(s)];
    if (k == 0) continue;
    b.sender_dims.push_back({ReplicaId{1, s}, all_subsets(k)});
  }
  for (int r : placement.second) {
    const int k = ix.inbox_of_receiver[std::size_t(r)];
    if (k == 0) continue;
    b.receiver_dims.push_back({ReplicaId{2, r}, all_subsets(k)});
  }
  if (byz && !placement.first.empty()) {
    const auto signer_sets = subsets_of_members(placement.first);
    const auto target_sets = all_subsets(plan.n2);
    for (const auto& ss : signer_sets)
      for (const auto& ts : target_sets) {
        InjectionPattern p;
        p.signers.assign(ss.begin(), ss.end());
        p.targets.assign(ts.begin(), ts.end());
        b.injections.push_back(std::move(p));
      }
  } else {
    b.injections.push_back({});
  }
  b.forged_relayers = byz ? subsets_of_members(placement.second) : std::vector<std::set<int>>{{}};
  b.replay_options = byz ? std::vector<bool>{false, true} : std::vector<bool>{false};
  return b;
}

namespace {

AdversaryTrace trace_from_indices(const AdversaryBasis& b, const std::vector<std::size_t>& idx) {
  AdversaryTrace t;
  t.faulty1 = b.placement.first;
  t.faulty2 = b.placement.second;
  std::size_t at = 0;
  std::vector<ReplicaScript> scripts;
  for (const auto& d : b.sender_dims) {
    const auto& opt = d.options[idx[at++]];
    if (!opt.empty()) {
      ReplicaScript s;
      s.replica = d.replica;
      s.drop_sends = opt;
      scripts.push_back(std::move(s));
    }
  }
  for (const auto& d : b.receiver_dims) {
    const auto& opt = d.options[idx[at++]];
    ReplicaScript s;
    s.replica = d.replica;
    s.ignore_inbox = opt;
    scripts.push_back(std::move(s));
  }
  t.injection = b.injections[idx[at++]];
  const auto& flood = b.forged_relayers[idx[at++]];
  for (int r : flood) {
    bool found = false;
    for (auto& s : scripts)
      if (s.replica.cluster == 2 && s.replica.index == r) {
        s.relay_forged = true;
        found = true;
        break;
      }
    if (!found) {
      ReplicaScript s;
      s.replica = ReplicaId{2, r};
      s.relay_forged = true;
      scripts.push_back(std::move(s));
    }
  }
  t.replay = b.replay_options[idx[at++]];
  // Receiver scripts with nothing to do are dropped for tidiness.
  for (auto it = scripts.begin(); it != scripts.end();) {
    if (it->replica.cluster == 2 && it->ignore_inbox.empty() && !it->relay_forged)
      it = scripts.erase(it);
    else
      ++it;
  }
  t.scripts = std::move(scripts);
  return t;
}

std::vector<std::size_t> dim_sizes(const AdversaryBasis& b) {
  std::vector<std::size_t> s;
  for (const auto& d : b.sender_dims) s.push_back(d.options.size());
  for (const auto& d : b.receiver_dims) s.push_back(d.options.size());
  s.push_back(b.injections.size());
  s.push_back(b.forged_relayers.size());
  s.push_back(b.replay_options.size());
  return s;
}

}  // namespace

std::uint64_t for_each_adversary(const AdversaryBasis& basis, std::uint64_t budget,
                                 std::uint64_t sample_seed,
                                 const std::function<bool(const AdversaryTrace&)>& fn) {
  const auto sizes = dim_sizes(basis);
  const std::size_t nd = sizes.size();
  std::uint64_t count = 0;
  auto emit = [&](const std::vector<std::size_t>& idx) {
    ++count;
    return fn(trace_from_indices(basis, idx));
  };

  if (basis.total() <= budget) {
    std::vector<std::size_t> idx(nd, 0);
    for (;;) {
      if (!emit(idx)) return count;
      std::size_t d = nd;
      while (d > 0) {
        --d;
        if (++idx[d] < sizes[d]) break;
        idx[d] = 0;
        if (d == 0) return count;
      }
      if (d == 0 && idx[0] == 0) return count;
    }
  }

  // Over budget: no-op, extreme, single-dimension sweeps against the extreme
  // background, then seeded samples.
  std::vector<std::size_t> noop(nd, 0), extreme(nd);
  for (std::size_t d = 0; d < nd; ++d) extreme[d] = sizes[d] - 1;
  if (!emit(noop) || count >= budget) return count;
  if (!emit(extreme) || count >= budget) return count;
  for (std::size_t d = 0; d < nd && count < budget; ++d) {
    std::vector<std::size_t> picks;
    if (sizes[d] <= 64) {
      for (std::size_t j = 0; j + 1 < sizes[d]; ++j) picks.push_back(j);
    } else {
      for (std::size_t i = 0; i < 64; ++i) {
        const std::size_t j = i * (sizes[d] - 1) / 63;
        if (j + 1 < sizes[d] && (picks.empty() || picks.back() != j)) picks.push_back(j);
      }
    }
    for (std::size_t j : picks) {
      std::vector<std::size_t> idx = extreme;
      idx[d] = j;
      if (!emit(idx)) return count;
      if (count >= budget) return count;
    }
  }
  std::mt19937_64 rng(sample_seed);
  std::vector<std::size_t> idx(nd);
  while (count < budget) {
    for (std::size_t d = 0; d < nd; ++d) idx[d] = std::size_t(rng() % sizes[d]);
    if (!emit(idx)) return count;
  }
  return count;
}

AdversaryTrace extremal_trace(const SystemSpec& spec, const Placement& placement,
                              const ProtocolPlan& plan) {
  const AdversaryBasis b = make_adversary_basis(spec, placement, plan);
  const auto sizes = dim_sizes(b);
  std::vector<std::size_t> idx(sizes.size());
  for (std::size_t d = 0; d < sizes.size(); ++d) idx[d] = sizes[d] - 1;
  return trace_from_indices(b, idx);
}

namespace {

struct PlacementOutcome {
  std::uint64_t runs = 0;
  std::optional<Counterexample> ce;
};

std::string first_violation(const RunTranscript& t) {
  if (!t.receipt) return "receipt violated";
  if (!t.agreement) return "agreement violated";
  if (!t.confirmation) return "confirmation violated";
  return {};
}

PlacementOutcome campaign_placement(const SystemSpec& spec, const ProtocolPlan& plan,
                                    const CampaignOptions& options, const Placement& placement,
                                    std::size_t pi) {
  PlacementOutcome out;
  const AdversaryBasis basis = make_adversary_basis(spec, placement, plan);
  std::uint64_t adv_i = 0;
  auto probe = [&](const AdversaryTrace& trace, std::uint64_t seed) {
    RunContext ctx;
    ctx.trace = trace;
    ctx.schedule.seed = seed;
    ctx.sig_unit = options.sig_unit;
    ctx.record_log = false;
    RunTranscript t = run(spec, plan, options.value, ctx);
    ++out.runs;
    const std::string why = first_violation(t);
    if (why.empty()) return true;
    ctx.record_log = true;
    Counterexample ce;
    ce.placement = placement;
    ce.trace = trace;
    ce.seed = seed;
    ce.reason = why;
    ce.transcript = run(spec, plan, options.value, ctx);
    out.ce = std::move(ce);
    return false;
  };
  for_each_adversary(basis, options.adversary_budget, splitmix64(pi ^ 0x5ca1ab1eULL),
                     [&](const AdversaryTrace& trace) {
                       return probe(trace, splitmix64(pi * 0x100000001b3ULL + adv_i++));
                     });
  if (out.ce) return out;
  const AdversaryTrace extreme = extremal_trace(spec, placement, plan);
  for (int s = 1; s <= options.extremal_seeds; ++s) {
    if (!probe(extreme, splitmix64(0xfeedULL + pi * 131ULL + std::uint64_t(s)))) break;
  }
  return out;
}

}  // namespace

CampaignReport verify_campaign(const SystemSpec& spec, const ProtocolPlan& plan,
                               const CampaignOptions& options) {
  CampaignReport report;
  const std::vector<Placement> placements = enumerate_placements(spec);
  const int threads = env_count_threads();

  if (threads <= 1) {
    for (std::size_t pi = 0; pi < placements.size(); ++pi) {
      PlacementOutcome o = campaign_placement(spec, plan, options, placements[pi], pi);
      report.runs += o.runs;
      if (o.ce) {
        report.ok = false;
        report.counterexample = std::move(o.ce);
        return report;
      }
    }
    return report;
  }

  // Block-parallel over placements; the lowest-index violation in the first
  // violating block wins, which keeps the report deterministic.
  for (std::size_t base = 0; base < placements.size(); base += std::size_t(threads)) {
    const std::size_t end = std::min(placements.size(), base + std::size_t(threads));
    std::vector<PlacementOutcome> outcomes(end - base);
    std::vector<std::thread> pool;
    for (std::size_t pi = base; pi < end; ++pi)
      pool.emplace_back([&, pi] {
        outcomes[pi - base] = campaign_placement(spec, plan, options, placements[pi], pi);
      });
    for (auto& th : pool) th.join();
    for (auto& o : outcomes) report.runs += o.runs;
    for (auto& o : outcomes)
      if (o.ce) {
        report.ok = false;
        report.counterexample = std::move(o.ce);
        return report;
      }
  }
  return report;
}

SweepResult sweep(const std::vector<SweepCell>& cells, const SweepOptions& options) {
  SweepResult res;
  for (const auto& cell : cells) {
    const SystemSpec& spec = cell.spec;
    std::ostringstream label;
    label << "n1=" << spec.c1.n << " f1=" << spec.c1.f() << " n2=" << spec.c2.n
          << " f2=" << spec.c2.f() << " model=" << to_string(spec.failure_model)
          << " signing=" << to_string(spec.signing) << " protocol=" << cell.protocol;
    const auto violations = validate_system(spec);
    if (!violations.empty()) {
      res.skipped.push_back(label.str() + ": " + violations.front().code);
      continue;
    }
    try {
      ProtocolPlan plan = [&] {
        if (cell.protocol == "auto") {
          ProtocolChoice choice = select_protocol(spec);
          choice.compact_certs = cell.compact && choice.protocol == ProtocolKind::BS_BRS;
          return plan_for_choice(choice, spec);
        }
        const ProtocolKind kind = protocol_kind_from_string(cell.protocol);
        return build_plan(kind, spec.view1(), spec.view2(), spec.failure_model, spec.signing,
                          cell.compact && kind == ProtocolKind::BS_BRS);
      }();
      const Metrics m = plan_metrics(plan, options.value_bytes, options.sig_unit);

      std::vector<Placement> placements;
      if (std::max(spec.c1.n, spec.c2.n) <= options.max_enum)
        placements = enumerate_placements(spec);
      else
        placements.push_back({spec.c1.faulty, spec.c2.faulty});

      const Value v(std::size_t(std::max<long long>(options.value_bytes, 1)), '\x42');
      bool receipt = true, agreement = true, confirmation = true;
      std::uint64_t runs = 0;
      for (const auto& p : placements) {
        const AdversaryTrace extreme = extremal_trace(spec, p, plan);
        for (std::uint64_t seed : options.seeds) {
          RunContext ctx;
          ctx.trace = extreme;
          ctx.schedule.seed = seed;
          ctx.sig_unit = options.sig_unit;
          ctx.record_log = false;
          const RunTranscript t = run(spec, plan, v, ctx);
          ++runs;
          receipt = receipt && t.receipt;
          agreement = agreement && t.agreement;
          confirmation = confirmation && t.confirmation;
        }
      }

      SweepRow row;
      row.n1 = spec.c1.n;
      row.f1 = spec.c1.f();
      row.n2 = spec.c2.n;
      row.f2 = spec.c2.f();
      row.model = to_string(spec.failure_model);
      row.signing = to_string(plan.signing);
      row.protocol = to_string(plan.kind);
      row.alpha = plan.alpha;
      row.msgs = m.inter_cluster_msgs;
      row.value_bytes = m.value_bytes;
      row.replica_sigs = m.replica_sigs;
      row.cluster_sigs = m.cluster_sigs;
      row.receipt = receipt;
      row.agreement = agreement;
      row.confirmation = confirmation;
      row.max_size_units = m.max_envelope_units;
      row.runs = runs;
      res.rows.push_back(std::move(row));
      res.all_ok = res.all_ok && receipt && agreement && confirmation;
    } catch (const ConfigError& e) {
      res.skipped.push_back(label.str() + ": " + e.what());
    }
  }
  return res;
}

}  // namespace clustersend
