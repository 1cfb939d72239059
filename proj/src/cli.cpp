#include "clustersend/cli.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace clustersend::cli {

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path);
  os << text;
}

int parse_int_token(const std::string& tok) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad integer '" + tok + "'");
  }
  if (used != tok.size()) throw ConfigError("bad integer '" + tok + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  if (text.empty()) throw ConfigError("empty list");
  std::set<int> out;
  for (const std::string& tok : split(text, ',')) {
    if (tok.empty()) throw ConfigError("empty entry in list '" + text + "'");
    const auto dots = tok.find("..");
    if (dots == std::string::npos) {
      out.insert(parse_int_token(tok));
      continue;
    }
    const int lo = parse_int_token(tok.substr(0, dots));
    const int hi = parse_int_token(tok.substr(dots + 2));
    if (lo > hi) throw ConfigError("empty range '" + tok + "'");
    for (int v = lo; v <= hi; ++v) out.insert(v);
  }
  return {out.begin(), out.end()};
}

PlanMutation parse_mutation(const std::string& text) {
  PlanMutation m;
  if (text.empty()) return m;
  for (const std::string& tok : split(text, ',')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("bad mutation '" + tok + "' (want key=delta)");
    const std::string key = tok.substr(0, eq);
    const int delta = parse_int_token(tok.substr(eq + 1));
    if (key == "s1")
      m.s1_size_delta += delta;
    else if (key == "threshold")
      m.receive_threshold_delta += delta;
    else
      throw ConfigError("unknown mutation key '" + key + "' (want s1 or threshold)");
  }
  return m;
}

ProtocolPlan plan_from_scenario(const ScenarioConfig& cfg, const PlanMutation& mutation) {
  const SystemSpec& spec = cfg.spec;
  if (cfg.protocol == "auto") {
    const ProtocolChoice choice = select_protocol(spec);
    return build_plan(choice.protocol, spec.view1(), spec.view2(), spec.failure_model,
                      spec.signing, cfg.compact, choice.alpha, mutation);
  }
  const ProtocolKind kind = protocol_kind_from_string(cfg.protocol);
  return build_plan(kind, spec.view1(), spec.view2(), spec.failure_model, spec.signing,
                    cfg.compact, -1, mutation);
}

int cmd_bounds(const ScenarioConfig& cfg, const std::string& out_path, std::ostream& out) {
  const std::string text = bounds_to_json_text(cfg.spec, 2);
  if (!out_path.empty())
    write_file(out_path, text + "\n");
  else
    out << text << "\n";
  return 0;
}

int cmd_run(const RunArgs& args, std::ostream& out) {
  const ScenarioConfig& cfg = args.cfg;
  const ProtocolPlan plan = plan_from_scenario(cfg, args.mutation);
  RunContext ctx;
  if (cfg.trace) ctx.trace = *cfg.trace;
  ctx.schedule.seed = cfg.seed;
  ctx.schedule.decisions = cfg.decisions;
  ctx.sig_unit = cfg.sig_unit;
  ctx.record_log = true;
  const RunTranscript t = run(cfg.spec, plan, cfg.value, ctx);
  if (!args.out_path.empty()) write_file(args.out_path, transcript_to_json_text(t, 2) + "\n");
  out << "msgs=" << t.metrics.inter_cluster_msgs << " receipt=" << (t.receipt ? "true" : "false")
      << " agreement=" << (t.agreement ? "true" : "false")
      << " confirmation=" << (t.confirmation ? "true" : "false") << "\n";
  return t.receipt && t.agreement && t.confirmation ? 0 : 1;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  const ScenarioConfig& cfg = args.cfg;
  if (cfg.spec.c1.n > args.max_enum || cfg.spec.c2.n > args.max_enum)
    throw ConfigError("cluster size exceeds --max-enum " + std::to_string(args.max_enum) +
                      "; exhaustive verification would not terminate in reasonable time");
  const ProtocolPlan plan = plan_from_scenario(cfg, args.mutation);
  CampaignOptions options;
  options.adversary_budget = args.budget;
  options.extremal_seeds = args.extremal_seeds;
  options.sig_unit = cfg.sig_unit;
  options.value = cfg.value;
  const CampaignReport report = verify_campaign(cfg.spec, plan, options);
  out << "runs=" << report.runs << " ok=" << (report.ok ? "true" : "false") << "\n";
  if (report.counterexample) {
    const Counterexample& ce = *report.counterexample;
    out << "reason=" << ce.reason << " seed=" << ce.seed << "\n";
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["reason"] = ce.reason;
    j["seed"] = ce.seed;
    j["trace"] = nlohmann::ordered_json::parse(trace_to_json_text(ce.trace));
    j["transcript"] = nlohmann::ordered_json::parse(transcript_to_json_text(ce.transcript));
    if (!args.out_path.empty())
      write_file(args.out_path, j.dump(2) + "\n");
    else
      out << j.dump() << "\n";
  }
  return report.ok ? 0 : 1;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& diag) {
  const SweepResult res = sweep(args.cells, args.options);
  std::string text;
  if (args.format == "csv")
    text = sweep_rows_to_csv(res.rows);
  else if (args.format == "jsonl")
    text = sweep_rows_to_jsonl(res.rows);
  else
    throw ConfigError("unknown format '" + args.format + "' (want csv or jsonl)");
  if (!args.out_path.empty())
    write_file(args.out_path, text);
  else
    out << text;
  for (const auto& s : res.skipped) diag << "skipped: " << s << "\n";
  diag << "cells=" << res.rows.size() << " skipped=" << res.skipped.size()
       << " ok=" << (res.all_ok ? "true" : "false") << "\n";
  return res.all_ok ? 0 : 1;
}

std::vector<SweepCell> make_grid_cells(const std::vector<int>& n1s, const std::vector<int>& f1s,
                                       const std::vector<int>& n2s, const std::vector<int>& f2s,
                                       const std::vector<FailureModel>& models,
                                       const std::vector<SigningScheme>& signings,
                                       const std::string& protocol, bool compact) {
  std::vector<SweepCell> cells;
  auto lowest = [](int n, int f) {
    ClusterSpec c;
    c.n = n;
    for (int i = 0; i < f; ++i) c.faulty.insert(i);
    return c;
  };
  for (int n1 : n1s)
    for (int f1 : f1s)
      for (int n2 : n2s)
        for (int f2 : f2s)
          for (FailureModel m : models)
            for (SigningScheme s : signings) {
              if (f1 < 0 || f2 < 0 || f1 > n1 || f2 > n2) continue;
              SweepCell cell;
              cell.spec.c1 = lowest(n1, f1);
              cell.spec.c2 = lowest(n2, f2);
              cell.spec.failure_model = m;
              cell.spec.signing = s;
              cell.protocol = protocol;
              cell.compact = compact;
              if (!validate_system(cell.spec).empty()) continue;
              cells.push_back(std::move(cell));
            }
  return cells;
}

}  // namespace clustersend::cli
