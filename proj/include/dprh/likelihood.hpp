#pragma once

#include <array>
#include <span>

#include "dprh/model.hpp"

namespace dprh {

// One observation: t_j = max(Y_j, C_j), with d_j = 1 when Y_j itself was
// observed (Y_j >= C_j) and d_j = 0 when the value is left-censored at t_j.
struct CensoredPair {
  double t1;
  bool d1;
  double t2;
  bool d2;
};

// Index-set id in 1..8.
//   1/2: both observed, t1 > t2 / t1 < t2;
//   3/4: one observed and exceeding the other's censoring value;
//   5/6: one observed but below the other's censoring value;
//   7/8: both censored, ordered by the censoring values.
// A fully observed tie t1 == t2 is a null set and is rejected; ties among
// censoring values go deterministically to the lower set id.
int classify(const CensoredPair& pair);
std::array<int, 8> set_counts(std::span<const CensoredPair> data);

struct CompleteMle {
  double theta1;
  double theta2;
  double theta1_prime;
  double theta2_prime;
};

// Closed-form complete-data MLE with the baseline's eta held fixed.  Every
// pair must be fully observed and both orderings must occur (m1, m2 >= 1).
CompleteMle complete_mle_closed_form(std::span<const CensoredPair> data,
                                     const Baseline& baseline);

// Complete-data log-likelihood in the grouped-sum form (used as the
// independent route against the censored evaluation).
double complete_log_likelihood(const DprhParams& params,
                               std::span<const CensoredPair> data);

// Contribution log f_{jk} of one pair given its index set.
double log_pair_contribution(const DprhParams& params,
                             const CensoredPair& pair);

// Left-censored log-likelihood: sum of log f_{jk} over the eight index
// sets, accumulated pairwise for deterministic results.  Returns -inf when
// a contribution is nonpositive or parameters are invalid for the data,
// signalling a bad point to the optimizer instead of crashing.
double censored_log_likelihood(const DprhParams& params,
                               std::span<const CensoredPair> data);

}  // namespace dprh
