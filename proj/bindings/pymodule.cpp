#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clustersend/bounds.hpp"
#include "clustersend/cli.hpp"
#include "clustersend/json_io.hpp"
#include "clustersend/model.hpp"
#include "clustersend/sim.hpp"

namespace py = pybind11;
using namespace clustersend;

namespace {

SystemSpec make_spec(int n1, int f1, int n2, int f2, const std::string& model,
                     const std::string& signing) {
  SystemSpec s;
  s.c1.n = n1;
  for (int i = 0; i < f1; ++i) s.c1.faulty.insert(i);
  s.c2.n = n2;
  for (int i = 0; i < f2; ++i) s.c2.faulty.insert(i);
  s.failure_model = failure_model_from_string(model);
  s.signing = signing_scheme_from_string(signing);
  return s;
}

py::dict report_to_dict(const BoundReport& r) {
  py::dict d;
  d["kind"] = r.kind;
  d["clause"] = r.clause;
  d["q"] = r.q;
  d["r"] = r.r;
  d["value"] = r.value;
  d["applicable"] = r.applicable;
  d["side_condition"] = r.side_condition;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "fault-tolerant cluster-to-cluster sending: bounds, selection, simulation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IntegrityError>(m, "IntegrityError", PyExc_RuntimeError);

  m.def(
      "sigma",
      [](int n1, int f1, int n2, int f2) {
        return sigma(make_spec(n1, f1, n2, f2, "byzantine", "cluster")).value;
      },
      py::arg("n1"), py::arg("f1"), py::arg("n2"), py::arg("f2"),
      "minimal inter-cluster envelopes when cluster signing is available");
  m.def(
      "tau",
      [](int n1, int f1, int n2, int f2) {
        return tau(make_spec(n1, f1, n2, f2, "byzantine", "replica")).value;
      },
      py::arg("n1"), py::arg("f1"), py::arg("n2"), py::arg("f2"),
      "minimal inter-cluster envelopes when only replicas sign");
  m.def(
      "sigma_report",
      [](int n1, int f1, int n2, int f2) {
        return report_to_dict(sigma(make_spec(n1, f1, n2, f2, "byzantine", "cluster")));
      },
      py::arg("n1"), py::arg("f1"), py::arg("n2"), py::arg("f2"));
  m.def(
      "tau_report",
      [](int n1, int f1, int n2, int f2) {
        return report_to_dict(tau(make_spec(n1, f1, n2, f2, "byzantine", "replica")));
      },
      py::arg("n1"), py::arg("f1"), py::arg("n2"), py::arg("f2"));

  m.def("guarded_term", &guarded_term, py::arg("i"), py::arg("j"),
        "i when j is positive, otherwise 0");

  m.def(
      "validate",
      [](int n1, int f1, int n2, int f2, const std::string& model, const std::string& signing) {
        std::vector<std::string> codes;
        for (const auto& v : validate_system(make_spec(n1, f1, n2, f2, model, signing)))
          codes.push_back(v.code);
        return codes;
      },
      py::arg("n1"), py::arg("f1"), py::arg("n2"), py::arg("f2"),
      py::arg("model") = "byzantine", py::arg("signing") = "replica",
      "violation codes; empty means the system is runnable");

  m.def(
      "select_protocol",
      [](int n1, int f1, int n2, int f2, const std::string& model, const std::string& signing) {
        const ProtocolChoice c =
            select_protocol(make_spec(n1, f1, n2, f2, model, signing));
        py::dict d;
        d["protocol"] = std::string(to_string(c.protocol));
        d["flavor"] = c.flavor == Flavor::BRS ? "brs" : "bcs";
        d["alpha"] = c.alpha;
        d["compact"] = c.compact_certs;
        d["rationale"] = c.rationale;
        return d;
      },
      py::arg("n1"), py::arg("f1"), py::arg("n2"), py::arg("f2"),
      py::arg("model") = "byzantine", py::arg("signing") = "replica");

  m.def(
      "min_schedule_size",
      [](int n1, int f1, int n2, int f2, int cap) {
        const OracleResult r = min_schedule_size(n1, f1, n2, f2, cap);
        return py::make_tuple(r.value, r.exceeded_cap);
      },
      py::arg("n1"), py::arg("f1"), py::arg("n2"), py::arg("f2"), py::arg("cap") = 0,
      "(smallest schedule no fault placement silences, hit_cap); cap 0 means n1*n2");

  m.def("bounds_json", [](const std::string& scenario) {
    return bounds_to_json_text(scenario_from_json_text(scenario).spec, -1);
  });
  m.def(
      "run_scenario",
      [](const std::string& scenario) {
        const ScenarioConfig cfg = scenario_from_json_text(scenario);
        const ProtocolPlan plan = cli::plan_from_scenario(cfg, PlanMutation{});
        RunContext ctx;
        if (cfg.trace) ctx.trace = *cfg.trace;
        ctx.schedule.seed = cfg.seed;
        ctx.schedule.decisions = cfg.decisions;
        ctx.sig_unit = cfg.sig_unit;
        return transcript_to_json_text(run(cfg.spec, plan, cfg.value, ctx), -1);
      },
      py::arg("scenario"), "execute one run; returns the transcript as json text");
  m.def(
      "verify_scenario",
      [](const std::string& scenario, std::uint64_t budget, int seeds, int max_enum) {
        const ScenarioConfig cfg = scenario_from_json_text(scenario);
        if (cfg.spec.c1.n > max_enum || cfg.spec.c2.n > max_enum)
          throw ConfigError("cluster size exceeds max_enum");
        const ProtocolPlan plan = cli::plan_from_scenario(cfg, PlanMutation{});
        CampaignOptions options;
        options.adversary_budget = budget;
        options.extremal_seeds = seeds;
        options.sig_unit = cfg.sig_unit;
        options.value = cfg.value;
        const CampaignReport rep = verify_campaign(cfg.spec, plan, options);
        py::dict d;
        d["runs"] = rep.runs;
        d["ok"] = rep.ok;
        if (rep.counterexample) {
          d["reason"] = rep.counterexample->reason;
          d["trace"] = trace_to_json_text(rep.counterexample->trace, -1);
        }
        return d;
      },
      py::arg("scenario"), py::arg("budget") = 512, py::arg("seeds") = 10,
      py::arg("max_enum") = 6);
}
