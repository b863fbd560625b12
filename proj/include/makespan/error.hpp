#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace makespan {

enum class Errc {
  invalid_parameters,
  degenerate_support,
  empty_network,
  cycle_detected,
  multiple_sources,
  multiple_sinks,
  disconnected_node,
  duplicate_activity_id,
  unknown_node,
  infeasible_params,
  malformed_file,
  reduction_stuck,
  missing_three_point_parameters,
  outcome_limit_exceeded,
  non_discrete_activity,
  rank_deficient_design,
  zero_variance_input,
  division_by_zero,
  malformed_row,
  duplicate_project_id,
  insufficient_data,
  non_positive_bandwidth,
  unknown_subcommand,
  invalid_flag,
  io_error,
};

// Stable kebab-case names; these appear in the CLI's error JSON.
constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_parameters: return "invalid-parameters";
    case Errc::degenerate_support: return "degenerate-support";
    case Errc::empty_network: return "empty-network";
    case Errc::cycle_detected: return "cycle-detected";
    case Errc::multiple_sources: return "multiple-sources";
    case Errc::multiple_sinks: return "multiple-sinks";
    case Errc::disconnected_node: return "disconnected-node";
    case Errc::duplicate_activity_id: return "duplicate-activity-id";
    case Errc::unknown_node: return "unknown-node";
    case Errc::infeasible_params: return "infeasible-params";
    case Errc::malformed_file: return "malformed-file";
    case Errc::reduction_stuck: return "reduction-stuck";
    case Errc::missing_three_point_parameters: return "missing-three-point-parameters";
    case Errc::outcome_limit_exceeded: return "outcome-limit-exceeded";
    case Errc::non_discrete_activity: return "non-discrete-activity";
    case Errc::rank_deficient_design: return "rank-deficient-design";
    case Errc::zero_variance_input: return "zero-variance-input";
    case Errc::division_by_zero: return "division-by-zero";
    case Errc::malformed_row: return "malformed-row";
    case Errc::duplicate_project_id: return "duplicate-project-id";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::non_positive_bandwidth: return "non-positive-bandwidth";
    case Errc::unknown_subcommand: return "unknown-subcommand";
    case Errc::invalid_flag: return "invalid-flag";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace makespan
