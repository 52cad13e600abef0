#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mallows/distributions.hpp"
#include "mallows/report.hpp"
#include "mallows/rng.hpp"

namespace mallows {

/// Compensated summation.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const noexcept { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Integer counters over outcomes. Merging is plain addition, so per-thread
/// accumulators can be combined in any order.
template <class Key>
class EmpiricalDist {
 public:
  void add(const Key& key, std::uint64_t count = 1) {
    counts_[key] += count;
    total_ += count;
  }

  void merge(const EmpiricalDist& other) {
    for (const auto& [key, count] : other.counts_) counts_[key] += count;
    total_ += other.total_;
  }

  std::uint64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  const std::map<Key, std::uint64_t>& counts() const noexcept { return counts_; }

  std::uint64_t count(const Key& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }

  double frequency(const Key& key) const {
    return total_ == 0 ? 0.0 : static_cast<double>(count(key)) / static_cast<double>(total_);
  }

 private:
  std::map<Key, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Exact (possibly truncated) reference law, listed in a natural outcome
/// order. Mass missing from the list forms an overflow bin.
template <class Key>
using ReferenceLaw = std::vector<std::pair<Key, double>>;

/// GeomVariant pmf listed from the bottom of the support up to cumulative
/// mass `coverage`.
ReferenceLaw<std::int64_t> geometric_reference(GeomVariant v, double p, double coverage = 0.9999);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

/// Core Pearson test on pre-binned data. Bins are merged in the given order
/// until each carries expected count >= `min_expected`; a short remainder is
/// folded into the last retained bin. Throws std::invalid_argument when a
/// reference with more than one outcome collapses into a single bin.
ChiSquareResult chi_square_binned(const std::vector<double>& probabilities,
                                  const std::vector<std::uint64_t>& observed,
                                  double min_expected = 5.0);

template <class Key>
ChiSquareResult chi_square_gof(const EmpiricalDist<Key>& e, const ReferenceLaw<Key>& reference) {
  if (e.empty()) throw std::invalid_argument("chi-square on an empty sample");
  std::vector<double> probs;
  std::vector<std::uint64_t> observed;
  probs.reserve(reference.size() + 1);
  observed.reserve(reference.size() + 1);
  KahanSum listed;
  std::uint64_t listed_count = 0;
  for (const auto& [key, p] : reference) {
    probs.push_back(p);
    const std::uint64_t c = e.count(key);
    observed.push_back(c);
    listed.add(p);
    listed_count += c;
  }
  const double overflow = std::max(0.0, 1.0 - listed.value());
  const std::uint64_t overflow_count = e.total() - listed_count;
  if (overflow > 0.0 || overflow_count > 0) {
    probs.push_back(overflow);
    observed.push_back(overflow_count);
  }
  return chi_square_binned(probs, observed);
}

/// Upper critical value of the chi-square law with `dof` degrees of freedom.
double chi_square_critical(int dof, double alpha);

/// Report for a chi-square test: statistic is the chi-square value, threshold
/// the critical value at `alpha`; df and p-value go into params.
TestReport chi_square_report(std::string name, const ChiSquareResult& r, double alpha,
                             std::uint64_t sample_size, std::uint64_t seed);

/// Half the L1 distance between the normalized counts.
template <class Key>
double tv_distance(const EmpiricalDist<Key>& a, const EmpiricalDist<Key>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("total variation of an empty distribution");
  KahanSum sum;
  const double na = static_cast<double>(a.total());
  const double nb = static_cast<double>(b.total());
  auto ia = a.counts().begin();
  auto ib = b.counts().begin();
  while (ia != a.counts().end() || ib != b.counts().end()) {
    if (ib == b.counts().end() || (ia != a.counts().end() && ia->first < ib->first)) {
      sum.add(static_cast<double>(ia->second) / na);
      ++ia;
    } else if (ia == a.counts().end() || ib->first < ia->first) {
      sum.add(static_cast<double>(ib->second) / nb);
      ++ib;
    } else {
      sum.add(std::abs(static_cast<double>(ia->second) / na - static_cast<double>(ib->second) / nb));
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum.value();
}

/// Total variation between an empirical law and an exact reference; outcomes
/// outside the reference and its missing mass are compared as one overflow bin.
template <class Key>
double tv_distance(const EmpiricalDist<Key>& e, const ReferenceLaw<Key>& reference) {
  if (e.empty()) throw std::invalid_argument("total variation of an empty distribution");
  const double n = static_cast<double>(e.total());
  KahanSum sum;
  KahanSum listed;
  std::uint64_t listed_count = 0;
  for (const auto& [key, p] : reference) {
    const std::uint64_t c = e.count(key);
    sum.add(std::abs(static_cast<double>(c) / n - p));
    listed.add(p);
    listed_count += c;
  }
  const double overflow = std::max(0.0, 1.0 - listed.value());
  sum.add(std::abs(static_cast<double>(e.total() - listed_count) / n - overflow));
  return 0.5 * sum.value();
}

/// Exact reference `law` restricted to its most likely outcomes, keeping
/// outcomes in decreasing probability until cumulative mass >= coverage.
template <class Key>
ReferenceLaw<Key> truncate_by_mass(ReferenceLaw<Key> law, double coverage) {
  std::stable_sort(law.begin(), law.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  KahanSum cum;
  std::size_t keep = 0;
  while (keep < law.size() && cum.value() < coverage) cum.add(law[keep++].second);
  law.resize(keep);
  return law;
}

/// Bonferroni-adjusted per-test level.
inline double bonferroni(double family_alpha, std::size_t tests) {
  return tests == 0 ? family_alpha : family_alpha / static_cast<double>(tests);
}

inline constexpr double kDefaultAlpha = 0.001;
inline constexpr double kTailCoverage = 0.9999;

/// Lemma-style size-biased pick: `slots` iid sizes from `pi` (pi[l-1] is the
/// probability of size l), a uniform element of their union, and the sizes of
/// the hit slot and the `follow` slots after it (cyclically). Returns the
/// empirical joint law of those `follow + 1` sizes.
EmpiricalDist<std::vector<std::int64_t>> simulate_size_biased_pick(const std::vector<double>& pi,
                                                                   int follow, int slots,
                                                                   std::uint64_t trials,
                                                                   std::uint64_t seed,
                                                                   unsigned threads = 1);

/// Limit law l0 pi_l0 / mu * prod pi_li over the truncated support of `pi`.
ReferenceLaw<std::vector<std::int64_t>> size_biased_limit_law(const std::vector<double>& pi,
                                                              int follow);

/// Chi-square test of `simulate_size_biased_pick` against `size_biased_limit_law`.
TestReport size_biased_pick_law(const std::vector<double>& pi, int follow, int slots,
                                std::uint64_t trials, std::uint64_t seed, double alpha = kDefaultAlpha,
                                unsigned threads = 1);

}  // namespace mallows
