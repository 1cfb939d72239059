#include "clustersend/model.hpp"

namespace clustersend {

const char* to_string(FailureModel m) {
  switch (m) {
    case FailureModel::Crash: return "crash";
    case FailureModel::Omit: return "omit";
    case FailureModel::Byzantine: return "byzantine";
  }
  return "?";
}

const char* to_string(SigningScheme s) {
  switch (s) {
    case SigningScheme::None: return "none";
    case SigningScheme::ReplicaSigning: return "replica";
    case SigningScheme::ClusterSigning: return "cluster";
    case SigningScheme::EmulatedClusterSigning: return "emulated-cluster";
  }
  return "?";
}

FailureModel failure_model_from_string(const std::string& s) {
  if (s == "crash") return FailureModel::Crash;
  if (s == "omit") return FailureModel::Omit;
  if (s == "byzantine") return FailureModel::Byzantine;
  throw ConfigError("unknown failure model: " + s);
}

SigningScheme signing_scheme_from_string(const std::string& s) {
  if (s == "none") return SigningScheme::None;
  if (s == "replica") return SigningScheme::ReplicaSigning;
  if (s == "cluster") return SigningScheme::ClusterSigning;
  if (s == "emulated-cluster") return SigningScheme::EmulatedClusterSigning;
  throw ConfigError("unknown signing scheme: " + s);
}

bool model_at_most(FailureModel weaker, FailureModel stronger) {
  return static_cast<int>(weaker) <= static_cast<int>(stronger);
}

std::vector<int> ClusterSpec::nonfaulty() const {
  std::vector<int> out;
  out.reserve(nf());
  for (int i = 0; i < n; ++i)
    if (!is_faulty(i)) out.push_back(i);
  return out;
}

namespace {

void check_cluster(const ClusterSpec& c, const char* tag, std::vector<Violation>& out) {
  if (c.n < 1)
    out.push_back({std::string(tag) + ".n>=1", std::string(tag) + " must have at least one replica"});
  for (int idx : c.faulty) {
    if (idx < 0 || idx >= c.n) {
      out.push_back({std::string(tag) + ".faulty-range",
                     std::string(tag) + " faulty index " + std::to_string(idx) + " out of range [0," +
                         std::to_string(c.n) + ")"});
      break;
    }
  }
  if (c.nf() < 1)
    out.push_back({std::string(tag) + ".nf>=1",
                   std::string(tag) + " has no non-faulty replica (n=" + std::to_string(c.n) +
                       ", f=" + std::to_string(c.f()) + ")"});
}

}  // namespace

std::vector<Violation> validate_system(const SystemSpec& spec) {
  std::vector<Violation> out;
  check_cluster(spec.c1, "c1", out);
  check_cluster(spec.c2, "c2", out);
  if (spec.c1.n <= 2 * spec.c1.f())
    out.push_back({"c1.n>2f", "sending cluster cannot reach consensus (n1=" + std::to_string(spec.c1.n) +
                                  " <= 2*f1=" + std::to_string(2 * spec.c1.f()) + ")"});
  if (spec.signing == SigningScheme::None && spec.failure_model == FailureModel::Byzantine)
    out.push_back({"signing.none-requires-crash-or-omit",
                   "unsigned operation is only sound when no replica forges (crash or omit failures)"});
  return out;
}

long long guarded_term(long long i, long long j) {
  if (i < 0 || j < 0) throw ConfigError("guarded_term arguments must be non-negative");
  return j > 0 ? i : 0;
}

}  // namespace clustersend
