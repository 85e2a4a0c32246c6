#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

namespace fvw::io {

/// One tolerance comparison: passes when measured <= tolerance (NaN never passes).
struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

class CheckList {
 public:
  bool expect_le(const std::string& name, double measured, double tolerance) {
    const bool ok = std::isfinite(measured) && measured <= tolerance;
    checks_.push_back({name, measured, tolerance, ok});
    return ok;
  }

  /// Keeps only the worst value per name, so long time series add one entry per invariant.
  void track_max(const std::string& name, double measured, double tolerance) {
    auto it = std::find_if(checks_.begin(), checks_.end(), [&](const Check& c) { return c.name == name; });
    if (it == checks_.end()) {
      expect_le(name, measured, tolerance);
      return;
    }
    if (!std::isfinite(measured) || measured > it->measured) it->measured = measured;
    it->pass = std::isfinite(it->measured) && it->measured <= it->tolerance;
  }

  bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
  }
  const std::vector<Check>& items() const { return checks_; }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks_)
      if (c.name == name) return &c;
    return nullptr;
  }

  nlohmann::ordered_json to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks_) {
      nlohmann::ordered_json j;
      j["name"] = c.name;
      j["measured"] = std::isfinite(c.measured) ? nlohmann::ordered_json(c.measured) : nlohmann::ordered_json("nan");
      j["tolerance"] = c.tolerance;
      j["pass"] = c.pass;
      arr.push_back(j);
    }
    return arr;
  }

 private:
  std::vector<Check> checks_;
};

}  // namespace fvw::io
