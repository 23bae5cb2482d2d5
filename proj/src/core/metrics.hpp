#pragma once

#include "core/gesture.hpp"
#include "core/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vgrasp {

// Agreement between an executed approach and its reference gesture
// function. r2 follows the convention of normalizing by the variance of the
// reference values at the sampled distances, so 1.0 means the execution
// reproduces the reference exactly.
struct AnthropomorphismReport {
  std::array<double, kNumDofs> r2{};
  std::array<double, kNumDofs> rmse_deg{};
  double r2_mean = 0.0;
  double rmse_mean_deg = 0.0;
};

struct TrialRecord {
  std::string intended;
  std::string estimated;
  bool grasp_success = false;
  double duration_s = 0.0;
  std::optional<double> spacing_m;
};

struct DurationStats {
  double mean_s = 0.0;
  double std_s = 0.0;  // sample standard deviation (n - 1), 0 for n = 1
};

// Requires at least two samples and a reference that varies at the sampled
// distances on every DOF (ZeroReferenceVariance otherwise).
AnthropomorphismReport anthropomorphism(const std::vector<GestureSample>& actual,
                                        const GestureFunction& reference);

// Percentage of trials whose estimated target matches the intended one.
double intent_accuracy(const std::vector<TrialRecord>& trials);

// Percentage of successful grasps; a trial with a wrong intent estimate
// counts as a failure even if the grasp itself closed.
double grasp_success_rate(const std::vector<TrialRecord>& trials);

DurationStats duration_stats(const std::vector<TrialRecord>& trials);

// Two-decimal "mean±std" rendering, e.g. "3.07±0.41".
std::string format_mean_std(double mean, double std_dev);

}  // namespace vgrasp
