#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clustersend/bounds.hpp"
#include "clustersend/model.hpp"
#include "clustersend/sim.hpp"

namespace clustersend {

// One runnable scenario as read from a config file. Parsing is strict:
// unknown keys are errors, reported with their path.
struct ScenarioConfig {
  SystemSpec spec;
  std::string protocol = "auto";
  bool compact = false;
  Value value = std::string("\x10\x20\x30\x40", 4);
  std::optional<AdversaryTrace> trace;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint32_t> decisions;
  long long sig_unit = 1;
};

// Values travel hex-encoded ("0x..", lowercase, even digit count).
std::string value_to_hex(const Value& v);
Value value_from_hex(const std::string& text);

ScenarioConfig scenario_from_json_text(const std::string& text);
// Canonical form: every field present, faulty sets as explicit arrays.
// Emitting a parsed config and re-parsing is byte-stable.
std::string scenario_to_json_text(const ScenarioConfig& cfg, int indent = 2);

std::string transcript_to_json_text(const RunTranscript& t, int indent = -1);
std::string trace_to_json_text(const AdversaryTrace& trace, int indent = -1);

// Lower bounds and protocol selection for one system, as a single document.
std::string bounds_to_json_text(const SystemSpec& spec, int indent = 2);

// Fixed column set; header first.
std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows);
// One object per line, the CSV columns plus run metadata.
std::string sweep_rows_to_jsonl(const std::vector<SweepRow>& rows);

}  // namespace clustersend
