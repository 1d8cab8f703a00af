#pragma once

#include <vector>

namespace progeq {

struct MeanSe {
  double mean = 0;
  double se = 0;
  long long n = 0;
};

MeanSe mean_and_se(const std::vector<double>& xs);

// Goodness of fit of observed counts against expected probabilities
// (chi-square p-value; zero-probability cells must have zero counts).
double chi2_gof_p(const std::vector<long long>& observed,
                  const std::vector<double>& expected_probs);

// Two-sample chi-square homogeneity test on category counts.
double chi2_two_sample_p(const std::vector<long long>& a,
                         const std::vector<long long>& b);

// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
double ks_two_sample_p(std::vector<double> a, std::vector<double> b);

}  // namespace progeq
