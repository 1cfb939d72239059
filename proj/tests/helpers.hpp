#pragma once

#include <set>
#include <string>

#include "clustersend/model.hpp"

namespace testutil {

// Spec with explicit fault placements.
inline clustersend::SystemSpec spec_at(int n1, std::set<int> faulty1, int n2, std::set<int> faulty2,
                                       clustersend::FailureModel model,
                                       clustersend::SigningScheme signing) {
  clustersend::SystemSpec s;
  s.c1 = {n1, std::move(faulty1)};
  s.c2 = {n2, std::move(faulty2)};
  s.failure_model = model;
  s.signing = signing;
  return s;
}

// Spec with the f lowest indices faulty in each cluster.
inline clustersend::SystemSpec spec_lowest(int n1, int f1, int n2, int f2,
                                           clustersend::FailureModel model,
                                           clustersend::SigningScheme signing) {
  std::set<int> a, b;
  for (int i = 0; i < f1; ++i) a.insert(i);
  for (int i = 0; i < f2; ++i) b.insert(i);
  return spec_at(n1, std::move(a), n2, std::move(b), model, signing);
}

inline bool has_code(const std::vector<clustersend::Violation>& vs, const std::string& code) {
  for (const auto& v : vs)
    if (v.code == code) return true;
  return false;
}

}  // namespace testutil
