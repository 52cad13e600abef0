#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace mallows {

/// Named verdict of one statistical or structural check.
struct TestReport {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::uint64_t sample_size = 0;
  std::uint64_t seed = 0;
  std::uint64_t runtime_ms = 0;
};

inline nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["params"] = r.params;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["pass"] = r.pass;
  j["sample_size"] = r.sample_size;
  j["seed"] = r.seed;
  j["runtime_ms"] = r.runtime_ms;
  return j;
}

/// Report for "statistic <= threshold" checks.
inline TestReport upper_bound_report(std::string name, double statistic, double threshold,
                                     std::uint64_t sample_size, std::uint64_t seed) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.pass = statistic <= threshold;
  r.sample_size = sample_size;
  r.seed = seed;
  r.params["semantics"] = "statistic <= threshold";
  return r;
}

}  // namespace mallows
