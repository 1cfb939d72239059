#include "clustersend/json_io.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace clustersend {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

void expect_keys(const ordered_json& j, const std::string& path,
                 std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(path, "expected an object");
  for (const auto& item : j.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return item.key() == k; }))
      bad(path, "unknown key '" + item.key() + "'");
  }
}

long long get_integer(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<long long>();
}

bool get_bool(const ordered_json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, "expected a boolean");
  return j.get<bool>();
}

std::string get_string(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

std::set<int> get_int_set(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of integers");
  std::set<int> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.insert(int(get_integer(j[i], path + "[" + std::to_string(i) + "]")));
  return out;
}

std::vector<int> get_int_vector(const ordered_json& j, const std::string& path) {
  const auto s = get_int_set(j, path);
  return {s.begin(), s.end()};
}

ClusterSpec parse_cluster(const ordered_json& j, const std::string& path) {
  expect_keys(j, path, {"n", "faulty", "f"});
  if (!j.contains("n")) bad(path, "missing 'n'");
  ClusterSpec c;
  c.n = int(get_integer(j.at("n"), path + ".n"));
  const bool has_list = j.contains("faulty"), has_count = j.contains("f");
  if (has_list == has_count) bad(path, "exactly one of 'faulty' or 'f' is required");
  if (has_list) {
    c.faulty = get_int_set(j.at("faulty"), path + ".faulty");
  } else {
    const long long f = get_integer(j.at("f"), path + ".f");
    if (f < 0 || f > c.n) bad(path + ".f", "fault count out of range");
    for (int i = 0; i < int(f); ++i) c.faulty.insert(i);
  }
  return c;
}

SystemSpec parse_system(const ordered_json& j, const std::string& path) {
  expect_keys(j, path, {"c1", "c2", "model", "signing"});
  for (const char* k : {"c1", "c2", "model", "signing"})
    if (!j.contains(k)) bad(path, std::string("missing '") + k + "'");
  SystemSpec s;
  s.c1 = parse_cluster(j.at("c1"), path + ".c1");
  s.c2 = parse_cluster(j.at("c2"), path + ".c2");
  s.failure_model = failure_model_from_string(get_string(j.at("model"), path + ".model"));
  s.signing = signing_scheme_from_string(get_string(j.at("signing"), path + ".signing"));
  return s;
}

ReplicaScript parse_script(const ordered_json& j, const std::string& path) {
  expect_keys(j, path, {"cluster", "replica", "drop_sends", "ignore_inbox", "relay_forged"});
  if (!j.contains("cluster") || !j.contains("replica"))
    bad(path, "scripts need 'cluster' and 'replica'");
  ReplicaScript s;
  s.replica.cluster = int(get_integer(j.at("cluster"), path + ".cluster"));
  s.replica.index = int(get_integer(j.at("replica"), path + ".replica"));
  if (j.contains("drop_sends")) s.drop_sends = get_int_set(j.at("drop_sends"), path + ".drop_sends");
  if (j.contains("ignore_inbox"))
    s.ignore_inbox = get_int_set(j.at("ignore_inbox"), path + ".ignore_inbox");
  if (j.contains("relay_forged"))
    s.relay_forged = get_bool(j.at("relay_forged"), path + ".relay_forged");
  return s;
}

AdversaryTrace parse_adversary(const ordered_json& j, const std::string& path) {
  expect_keys(j, path,
              {"faulty1", "faulty2", "scripts", "injection", "replay", "alt_value"});
  AdversaryTrace t;
  if (j.contains("faulty1") && !j.at("faulty1").is_null())
    t.faulty1 = get_int_set(j.at("faulty1"), path + ".faulty1");
  if (j.contains("faulty2") && !j.at("faulty2").is_null())
    t.faulty2 = get_int_set(j.at("faulty2"), path + ".faulty2");
  if (j.contains("scripts")) {
    const auto& arr = j.at("scripts");
    if (!arr.is_array()) bad(path + ".scripts", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      t.scripts.push_back(parse_script(arr[i], path + ".scripts[" + std::to_string(i) + "]"));
  }
  if (j.contains("injection")) {
    const auto& inj = j.at("injection");
    expect_keys(inj, path + ".injection", {"signers", "targets"});
    if (inj.contains("signers"))
      t.injection.signers = get_int_vector(inj.at("signers"), path + ".injection.signers");
    if (inj.contains("targets"))
      t.injection.targets = get_int_vector(inj.at("targets"), path + ".injection.targets");
  }
  if (j.contains("replay")) t.replay = get_bool(j.at("replay"), path + ".replay");
  if (j.contains("alt_value"))
    t.alt_value = value_from_hex(get_string(j.at("alt_value"), path + ".alt_value"));
  return t;
}

ordered_json set_to_json(const std::set<int>& s) { return ordered_json(std::vector<int>(s.begin(), s.end())); }

ordered_json adversary_to_json(const AdversaryTrace& t) {
  ordered_json j = ordered_json::object();
  j["faulty1"] = t.faulty1 ? set_to_json(*t.faulty1) : ordered_json(nullptr);
  j["faulty2"] = t.faulty2 ? set_to_json(*t.faulty2) : ordered_json(nullptr);
  ordered_json scripts = ordered_json::array();
  for (const auto& s : t.scripts) {
    ordered_json js = ordered_json::object();
    js["cluster"] = s.replica.cluster;
    js["replica"] = s.replica.index;
    js["drop_sends"] = set_to_json(s.drop_sends);
    js["ignore_inbox"] = set_to_json(s.ignore_inbox);
    js["relay_forged"] = s.relay_forged;
    scripts.push_back(std::move(js));
  }
  j["scripts"] = std::move(scripts);
  ordered_json inj = ordered_json::object();
  inj["signers"] = t.injection.signers;
  inj["targets"] = t.injection.targets;
  j["injection"] = std::move(inj);
  j["replay"] = t.replay;
  j["alt_value"] = value_to_hex(t.alt_value);
  return j;
}

ordered_json bound_report_to_json(const BoundReport& r) {
  ordered_json j = ordered_json::object();
  j["kind"] = r.kind;
  j["clause"] = r.clause;
  j["q"] = r.q;
  j["r"] = r.r;
  j["value"] = r.value;
  j["applicable"] = r.applicable;
  j["side_condition"] = r.side_condition.empty() ? ordered_json(nullptr)
                                                 : ordered_json(r.side_condition);
  return j;
}

std::string dump(const ordered_json& j, int indent) {
  return indent < 0 ? j.dump() : j.dump(indent);
}

}  // namespace

std::string value_to_hex(const Value& v) {
  static const char* digits = "0123456789abcdef";
  std::string out = "0x";
  for (unsigned char c : v) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  return out;
}

Value value_from_hex(const std::string& text) {
  std::string s = text;
  if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) s = s.substr(2);
  if (s.size() % 2 != 0) throw ConfigError("hex value needs an even digit count: " + text);
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ConfigError("bad hex digit in value: " + text);
  };
  Value out;
  out.reserve(s.size() / 2);
  for (std::size_t i = 0; i < s.size(); i += 2)
    out.push_back(char((nibble(s[i]) << 4) | nibble(s[i + 1])));
  return out;
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid json: ") + e.what());
  }
  expect_keys(j, "$",
              {"system", "protocol", "compact", "value", "seed", "decisions", "sig_unit",
               "adversary"});
  if (!j.contains("system")) bad("$", "missing 'system'");
  ScenarioConfig cfg;
  cfg.spec = parse_system(j.at("system"), "$.system");
  if (j.contains("protocol")) cfg.protocol = get_string(j.at("protocol"), "$.protocol");
  if (j.contains("compact")) cfg.compact = get_bool(j.at("compact"), "$.compact");
  if (j.contains("value")) cfg.value = value_from_hex(get_string(j.at("value"), "$.value"));
  if (j.contains("seed") && !j.at("seed").is_null())
    cfg.seed = std::uint64_t(get_integer(j.at("seed"), "$.seed"));
  if (j.contains("decisions")) {
    const auto& arr = j.at("decisions");
    if (!arr.is_array()) bad("$.decisions", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      cfg.decisions.push_back(
          std::uint32_t(get_integer(arr[i], "$.decisions[" + std::to_string(i) + "]")));
  }
  if (j.contains("sig_unit")) {
    cfg.sig_unit = get_integer(j.at("sig_unit"), "$.sig_unit");
    if (cfg.sig_unit < 0) bad("$.sig_unit", "must be non-negative");
  }
  if (j.contains("adversary") && !j.at("adversary").is_null())
    cfg.trace = parse_adversary(j.at("adversary"), "$.adversary");
  return cfg;
}

std::string scenario_to_json_text(const ScenarioConfig& cfg, int indent) {
  ordered_json j = ordered_json::object();
  ordered_json sys = ordered_json::object();
  ordered_json c1 = ordered_json::object(), c2 = ordered_json::object();
  c1["n"] = cfg.spec.c1.n;
  c1["faulty"] = set_to_json(cfg.spec.c1.faulty);
  c2["n"] = cfg.spec.c2.n;
  c2["faulty"] = set_to_json(cfg.spec.c2.faulty);
  sys["c1"] = std::move(c1);
  sys["c2"] = std::move(c2);
  sys["model"] = to_string(cfg.spec.failure_model);
  sys["signing"] = to_string(cfg.spec.signing);
  j["system"] = std::move(sys);
  j["protocol"] = cfg.protocol;
  j["compact"] = cfg.compact;
  j["value"] = value_to_hex(cfg.value);
  j["seed"] = cfg.seed ? ordered_json(*cfg.seed) : ordered_json(nullptr);
  j["decisions"] = cfg.decisions;
  j["sig_unit"] = cfg.sig_unit;
  j["adversary"] = cfg.trace ? adversary_to_json(*cfg.trace) : ordered_json(nullptr);
  return dump(j, indent);
}

std::string transcript_to_json_text(const RunTranscript& t, int indent) {
  ordered_json j = ordered_json::object();
  j["protocol"] = t.protocol;
  j["flavor"] = t.flavor;
  j["compact"] = t.compact;
  j["model"] = t.model;
  j["signing"] = t.signing;
  j["n1"] = t.n1;
  j["f1"] = t.f1;
  j["n2"] = t.n2;
  j["f2"] = t.f2;
  j["alpha"] = t.alpha;
  j["faulty1"] = set_to_json(t.faulty1);
  j["faulty2"] = set_to_json(t.faulty2);
  j["value"] = value_to_hex(t.value);
  j["alt_value"] = value_to_hex(t.alt_value);
  j["receipt"] = t.receipt;
  j["agreement"] = t.agreement;
  j["confirmation"] = t.confirmation;
  ordered_json received = ordered_json::array();
  for (const auto& vals : t.received) {
    ordered_json row = ordered_json::array();
    for (const auto& v : vals) row.push_back(value_to_hex(v));
    received.push_back(std::move(row));
  }
  j["received"] = std::move(received);
  j["confirmed"] = t.confirmed;
  ordered_json m = ordered_json::object();
  m["msgs"] = t.metrics.inter_cluster_msgs;
  m["local_msgs"] = t.metrics.local_msgs;
  m["injected_msgs"] = t.metrics.injected_msgs;
  m["value_bytes"] = t.metrics.value_bytes;
  m["replica_sigs"] = t.metrics.replica_sigs;
  m["cluster_sigs"] = t.metrics.cluster_sigs;
  m["max_envelope_units"] = t.metrics.max_envelope_units;
  j["metrics"] = std::move(m);
  j["branching"] = t.branching;
  ordered_json log = ordered_json::array();
  for (const auto& e : t.log) {
    ordered_json je = ordered_json::object();
    je["kind"] = e.kind;
    je["cluster"] = e.from_cluster;
    je["from"] = e.from;
    je["to"] = e.to;
    je["local"] = e.local;
    je["value"] = value_to_hex(e.value);
    je["cert"] = e.cert;
    je["injected"] = e.injected;
    log.push_back(std::move(je));
  }
  j["log"] = std::move(log);
  return dump(j, indent);
}

std::string trace_to_json_text(const AdversaryTrace& trace, int indent) {
  return dump(adversary_to_json(trace), indent);
}

std::string bounds_to_json_text(const SystemSpec& spec, int indent) {
  ordered_json j = ordered_json::object();
  j["n1"] = spec.c1.n;
  j["f1"] = spec.c1.f();
  j["n2"] = spec.c2.n;
  j["f2"] = spec.c2.f();
  j["model"] = to_string(spec.failure_model);
  j["signing"] = to_string(spec.signing);
  j["sigma"] = bound_report_to_json(sigma(spec));
  j["tau"] = bound_report_to_json(tau(spec));
  ordered_json sel;
  try {
    const ProtocolChoice c = select_protocol(spec);
    sel = ordered_json::object();
    sel["protocol"] = to_string(c.protocol);
    sel["flavor"] = c.flavor == Flavor::BRS ? "brs" : "bcs";
    sel["alpha"] = c.alpha;
    sel["compact"] = c.compact_certs;
    sel["rationale"] = c.rationale;
  } catch (const ConfigError& e) {
    sel = ordered_json::object();
    sel["error"] = e.what();
  }
  j["selected"] = std::move(sel);
  return dump(j, indent);
}

std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "n1,f1,n2,f2,model,signing,protocol,alpha,msgs,value_bytes,replica_sigs,cluster_sigs,"
        "receipt,agreement,confirmation\n";
  for (const auto& r : rows) {
    os << r.n1 << ',' << r.f1 << ',' << r.n2 << ',' << r.f2 << ',' << r.model << ',' << r.signing
       << ',' << r.protocol << ',' << r.alpha << ',' << r.msgs << ',' << r.value_bytes << ','
       << r.replica_sigs << ',' << r.cluster_sigs << ',' << (r.receipt ? "true" : "false") << ','
       << (r.agreement ? "true" : "false") << ',' << (r.confirmation ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string sweep_rows_to_jsonl(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    ordered_json j = ordered_json::object();
    j["n1"] = r.n1;
    j["f1"] = r.f1;
    j["n2"] = r.n2;
    j["f2"] = r.f2;
    j["model"] = r.model;
    j["signing"] = r.signing;
    j["protocol"] = r.protocol;
    j["alpha"] = r.alpha;
    j["msgs"] = r.msgs;
    j["value_bytes"] = r.value_bytes;
    j["replica_sigs"] = r.replica_sigs;
    j["cluster_sigs"] = r.cluster_sigs;
    j["receipt"] = r.receipt;
    j["agreement"] = r.agreement;
    j["confirmation"] = r.confirmation;
    j["max_size_units"] = r.max_size_units;
    j["runs"] = r.runs;
    os << j.dump() << '\n';
  }
  return os.str();
}

}  // namespace clustersend
