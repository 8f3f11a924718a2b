#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace qpb {

struct Check {
  std::string name;
  bool passed = false;
  double residual = 0.0;  // worst numeric defect observed, 0 for structural checks
  std::string detail;     // empty unless there is something to say
};

struct Report {
  std::string subject;
  std::vector<Check> checks;

  bool ok() const {
    for (auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  void add(std::string name, bool passed, double residual = 0.0, std::string detail = {}) {
    checks.push_back({std::move(name), passed, residual, std::move(detail)});
  }
  void merge(const Report& sub) {
    for (auto& c : sub.checks) {
      Check copy = c;
      copy.name = sub.subject.empty() ? c.name : sub.subject + "." + c.name;
      checks.push_back(std::move(copy));
    }
  }

  std::string to_text() const;
  nlohmann::json to_json() const;
};

}  // namespace qpb
