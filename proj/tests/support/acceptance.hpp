#pragma once

#include <string>
#include <vector>

#include "wbr/params.hpp"
#include "wbr/sim.hpp"

namespace wbr::acceptance {

struct CriterionResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double runtime_s = 0.0;
};

struct RunReport {
  std::vector<CriterionResult> results;
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
};

/// Fixed order the criteria run and report in.
std::vector<std::string> criterion_names();

/// Executes every criterion at its pinned tolerance. Criteria never throw
/// out of this call; an exception inside one becomes a failed entry.
/// Independent scenario runs may execute concurrently when parallel is set;
/// the report order stays fixed.
RunReport run_acceptance(const RobotParams& p, const ControllerGains& g, bool parallel = true);

/// One formatted pass/fail line per criterion.
std::string format_report(const RunReport& report);

/// Scenario-level verdict used by the simulate command.
struct ScenarioVerdict {
  bool pass = false;
  bool fell = false;
  std::string detail;
};
ScenarioVerdict judge_scenario(const std::string& name, const TrajectoryLog& log);

}  // namespace wbr::acceptance
