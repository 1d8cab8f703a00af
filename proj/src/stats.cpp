#include "progeq/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace progeq {

MeanSe mean_and_se(const std::vector<double>& xs) {
  MeanSe r;
  r.n = static_cast<long long>(xs.size());
  if (r.n == 0) return r;
  double sum = 0, sumsq = 0;
  for (double x : xs) {
    sum += x;
    sumsq += x * x;
  }
  r.mean = sum / r.n;
  double var = std::max(0.0, sumsq / r.n - r.mean * r.mean);
  r.se = std::sqrt(var / r.n);
  return r;
}

static double chi2_p(double stat, int dof) {
  if (dof <= 0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double chi2_gof_p(const std::vector<long long>& observed,
                  const std::vector<double>& expected_probs) {
  if (observed.size() != expected_probs.size())
    throw std::invalid_argument("chi2_gof_p: size mismatch");
  long long total = 0;
  for (long long o : observed) total += o;
  if (total == 0) return 1.0;
  double stat = 0;
  int dof = -1;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double e = expected_probs[k] * total;
    if (e <= 0) {
      if (observed[k] != 0) return 0.0;
      continue;
    }
    const double d = observed[k] - e;
    stat += d * d / e;
    ++dof;
  }
  return chi2_p(stat, dof);
}

double chi2_two_sample_p(const std::vector<long long>& a,
                         const std::vector<long long>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("chi2_two_sample_p: size mismatch");
  double na = 0, nb = 0;
  for (long long x : a) na += x;
  for (long long x : b) nb += x;
  if (na == 0 || nb == 0) return 1.0;
  double stat = 0;
  int dof = -1;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double row = static_cast<double>(a[k] + b[k]);
    if (row == 0) continue;
    const double ea = row * na / (na + nb);
    const double eb = row * nb / (na + nb);
    stat += (a[k] - ea) * (a[k] - ea) / ea + (b[k] - eb) * (b[k] - eb) / eb;
    ++dof;
  }
  return chi2_p(stat, dof);
}

double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(ia / na - ib / nb));
  }
  // Asymptotic Kolmogorov distribution tail.
  const double en = std::sqrt(na * nb / (na + nb));
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  double p = 0;
  double sign = 1;
  for (int j = 1; j <= 100; ++j) {
    p += sign * 2 * std::exp(-2.0 * lambda * lambda * j * j);
    sign = -sign;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace progeq
