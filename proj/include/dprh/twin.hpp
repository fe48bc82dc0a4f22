#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dprh/mle.hpp"

namespace dprh {

// One registry row: onset-or-censoring ages with appendectomy indicators
// (c = 1 means the subject underwent appendectomy, i.e. the onset age was
// observed).
struct TwinRecord {
  int pair_id = 0;
  int zygosity = 0;
  std::string sex;
  double t1 = 0.0;
  int c1 = 0;
  double t2 = 0.0;
  int c2 = 0;
};

struct TwinLoadResult {
  std::vector<TwinRecord> records;
  int total_rows = 0;
  int filtered_out = 0;           // rows outside the requested category
  int excluded_simultaneous = 0;  // t1 == t2 rows, discarded
};

// CSV columns: pair_id,zygosity,sex,age1,status1,age2,status2 (header
// required).  Malformed rows are reported together with their line numbers;
// an empty result is an error.
TwinLoadResult load_twin_csv(const std::string& path,
                             std::optional<int> category = std::nullopt);

// Risk-free-time transform (Y1, Y2) = (b - T1, b - T2) with d_j = c_j: an
// observed appendectomy age gives an observed risk-free time, an
// appendectomy-free subject is left-censored in Y.
std::vector<CensoredPair> to_censored_pairs(std::span<const TwinRecord> records,
                                            double b);

struct TwinOptions {
  double b = 80.0;
  FitOptions fit{.starts = 7};
  // Optional explicit initial values for (theta, theta_prime, eta...); when
  // absent a data-scaled default per family is used.
  std::optional<std::vector<double>> init;
};

// Tied-parameter fit (theta1 = theta2 = theta, theta1' = theta2' = theta')
// of the transformed records under the given baseline family.
FitResult analyze(std::span<const TwinRecord> records, BaselineFamily family,
                  const TwinOptions& opts = {});

// Data-scaled initial values for a tied-parameter fit.
std::vector<double> default_twin_init(std::span<const TwinRecord> records,
                                      BaselineFamily family, double b);

struct PairProbability {
  TwinRecord record;
  int predicted_twin = 0;  // the later-onset twin, whose event is predicted
  double y_pred = 0.0;
  double y_cond = 0.0;
  double probability = 0.0;
  // The conditioning coordinate (the earlier onset age) is itself a
  // censoring age; the conditioning convention is ambiguous there.
  bool ambiguous_conditioning = false;
};

// P[Y_pred <= y_pred | Y_cond = y_cond], conditioning on the coordinate
// with the smaller onset age.
PairProbability potential_appendectomy_prob(const DprhParams& fitted,
                                            const TwinRecord& record, double b);
std::vector<PairProbability> pair_probabilities(
    const DprhParams& fitted, std::span<const TwinRecord> records, double b);

struct ValidationSummary {
  int pairs = 0;
  int consistent = 0;
  int ambiguous = 0;
  double threshold = 0.5;
  double fraction = 0.0;
};

// Consistency of the computed probabilities with the observed statuses: a
// not-yet-operated predicted twin is consistent when the probability is at
// least the threshold, an already-operated one when it is below it.
ValidationSummary summarize_validation(std::span<const PairProbability> probs,
                                       double threshold = 0.5);
ValidationSummary validation_report(const DprhParams& fitted,
                                    std::span<const TwinRecord> records,
                                    double b, double threshold = 0.5);

}  // namespace dprh
