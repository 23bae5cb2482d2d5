#include "core/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace vgrasp {

AnthropomorphismReport anthropomorphism(const std::vector<GestureSample>& actual,
                                        const GestureFunction& reference) {
  if (actual.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "need at least 2 samples");
  }
  const double n = static_cast<double>(actual.size());

  AnthropomorphismReport report;
  for (int j = 0; j < kNumDofs; ++j) {
    double ref_mean = 0.0;
    for (const GestureSample& s : actual) {
      ref_mean += eval_gesture_dof(reference, j, s.distance);
    }
    ref_mean /= n;

    double ss_res = 0.0;
    double ss_ref = 0.0;
    for (const GestureSample& s : actual) {
      const double ref = eval_gesture_dof(reference, j, s.distance);
      const double res = s.angles[j] - ref;
      ss_res += res * res;
      ss_ref += (ref - ref_mean) * (ref - ref_mean);
    }
    if (ss_ref <= 0.0) {
      throw Error(ErrorCode::kZeroReferenceVariance,
                  std::string("reference is constant on DOF ") + kDofKeys[j]);
    }
    report.r2[j] = 1.0 - ss_res / ss_ref;
    report.rmse_deg[j] = std::sqrt(ss_res / n);
    report.r2_mean += report.r2[j];
    report.rmse_mean_deg += report.rmse_deg[j];
  }
  report.r2_mean /= kNumDofs;
  report.rmse_mean_deg /= kNumDofs;
  return report;
}

double intent_accuracy(const std::vector<TrialRecord>& trials) {
  if (trials.empty()) {
    throw Error(ErrorCode::kEmptyTrials, "no trials");
  }
  size_t correct = 0;
  for (const TrialRecord& t : trials) {
    if (t.estimated == t.intended) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(trials.size());
}

double grasp_success_rate(const std::vector<TrialRecord>& trials) {
  if (trials.empty()) {
    throw Error(ErrorCode::kEmptyTrials, "no trials");
  }
  size_t successes = 0;
  for (const TrialRecord& t : trials) {
    if (t.grasp_success && t.estimated == t.intended) ++successes;
  }
  return 100.0 * static_cast<double>(successes) / static_cast<double>(trials.size());
}

DurationStats duration_stats(const std::vector<TrialRecord>& trials) {
  if (trials.empty()) {
    throw Error(ErrorCode::kEmptyTrials, "no trials");
  }
  DurationStats stats;
  for (const TrialRecord& t : trials) stats.mean_s += t.duration_s;
  stats.mean_s /= static_cast<double>(trials.size());
  if (trials.size() > 1) {
    double ss = 0.0;
    for (const TrialRecord& t : trials) {
      ss += (t.duration_s - stats.mean_s) * (t.duration_s - stats.mean_s);
    }
    stats.std_s = std::sqrt(ss / static_cast<double>(trials.size() - 1));
  }
  return stats;
}

std::string format_mean_std(double mean, double std_dev) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f±%.2f", mean, std_dev);
  return buf;
}

}  // namespace vgrasp
