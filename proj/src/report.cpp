#include "qpb/report.hpp"

#include <cstdio>
#include <sstream>

namespace qpb {

std::string Report::to_text() const {
  std::ostringstream os;
  if (!subject.empty()) os << subject << "\n";
  for (auto& c : checks) {
    os << (c.passed ? "  pass  " : "  FAIL  ") << c.name;
    if (c.residual != 0.0) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.3g", c.residual);
      os << "  (residual " << buf << ")";
    }
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  os << (ok() ? "OK" : "FAILED") << "\n";
  return os.str();
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["subject"] = subject;
  j["ok"] = ok();
  j["checks"] = nlohmann::json::array();
  for (auto& c : checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["passed"] = c.passed;
    cj["residual"] = c.residual;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    j["checks"].push_back(cj);
  }
  return j;
}

}  // namespace qpb
