#pragma once

#include <compare>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace clustersend {

// Raised when an input (spec, config, protocol parameter) is malformed or
// violates a precondition.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a non-faulty replica would have to deviate from its script.
// Hitting this means a simulator bug, never a legal adversary.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FailureModel { Crash, Omit, Byzantine };
enum class SigningScheme { None, ReplicaSigning, ClusterSigning, EmulatedClusterSigning };

const char* to_string(FailureModel m);
const char* to_string(SigningScheme s);
FailureModel failure_model_from_string(const std::string& s);
SigningScheme signing_scheme_from_string(const std::string& s);

// Adversary power ordering: every crash behavior is an omit behavior, every
// omit behavior is a Byzantine behavior.
bool model_at_most(FailureModel weaker, FailureModel stronger);

struct ReplicaId {
  int cluster = 1;  // 1 = sending cluster, 2 = receiving cluster
  int index = 0;    // dense 0..n-1 within the cluster
  auto operator<=>(const ReplicaId&) const = default;
};

// One cluster: its size and which replica indices are faulty.
struct ClusterSpec {
  int n = 0;
  std::set<int> faulty;

  int f() const { return static_cast<int>(faulty.size()); }
  int nf() const { return n - f(); }
  bool is_faulty(int index) const { return faulty.count(index) != 0; }

  // Ascending list of non-faulty indices.
  std::vector<int> nonfaulty() const;
};

// What protocol code is allowed to see: counts only, never identities.
struct ClusterView {
  int n = 0;
  int f = 0;
  int nf() const { return n - f; }
};

struct SystemSpec {
  ClusterSpec c1;  // sending cluster
  ClusterSpec c2;  // receiving cluster
  FailureModel failure_model = FailureModel::Byzantine;
  SigningScheme signing = SigningScheme::ClusterSigning;

  ClusterView view1() const { return {c1.n, c1.f()}; }
  ClusterView view2() const { return {c2.n, c2.f()}; }
};

struct Violation {
  std::string code;     // stable machine-readable id, e.g. "c1.n>2f"
  std::string message;  // human-readable detail
};

// Checks structural well-formedness: each cluster keeps at least one
// non-faulty replica, the sending cluster can reach consensus (n1 > 2*f1),
// faulty indices are in range, and unsigned operation is only allowed under
// crash or omit failures. Returns every violation found; empty means valid.
std::vector<Violation> validate_system(const SystemSpec& spec);

// i if j > 0, else 0. Both arguments must be non-negative.
long long guarded_term(long long i, long long j);

}  // namespace clustersend
