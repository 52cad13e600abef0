#include "mallows/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "mallows/parallel.hpp"

namespace mallows {

ReferenceLaw<std::int64_t> geometric_reference(GeomVariant v, double p, double coverage) {
  ReferenceLaw<std::int64_t> out;
  KahanSum cum;
  for (auto k = support_min(v); cum.value() < coverage; ++k) {
    const double m = pmf(v, p, k);
    out.emplace_back(k, m);
    cum.add(m);
    if (k > 100000000) throw std::runtime_error("geometric_reference: coverage not reached");
  }
  return out;
}

ChiSquareResult chi_square_binned(const std::vector<double>& probabilities, const std::vector<std::uint64_t>& observed,
                                  double min_expected) {
  if (probabilities.size() != observed.size()) throw std::invalid_argument("chi-square: size mismatch");
  std::uint64_t total = 0;
  for (auto c : observed) total += c;
  if (total == 0) throw std::invalid_argument("chi-square on an empty sample");
  const double n = static_cast<double>(total);

  ChiSquareResult res;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0 && observed[i] > 0) {
      // Observations where the reference puts no mass.
      res.statistic = std::numeric_limits<double>::infinity();
      res.dof = std::max<int>(1, static_cast<int>(probabilities.size()) - 1);
      res.p_value = 0.0;
      res.bins = probabilities.size();
      return res;
    }
  }

  std::vector<double> exp_bins;
  std::vector<double> obs_bins;
  double pe = 0.0, po = 0.0;
  std::size_t positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] > 0.0) ++positive;
    pe += probabilities[i] * n;
    po += static_cast<double>(observed[i]);
    if (pe >= min_expected) {
      exp_bins.push_back(pe);
      obs_bins.push_back(po);
      pe = po = 0.0;
    }
  }
  if (pe > 0.0 || po > 0.0) {
    if (exp_bins.empty()) {
      exp_bins.push_back(pe);
      obs_bins.push_back(po);
    } else {
      exp_bins.back() += pe;
      obs_bins.back() += po;
    }
  }
  if (exp_bins.size() < 2 && positive > 1) {
    throw std::invalid_argument("chi-square: all mass merged into one bin; sample too small");
  }

  KahanSum stat;
  for (std::size_t i = 0; i < exp_bins.size(); ++i) {
    const double d = obs_bins[i] - exp_bins[i];
    stat.add(d * d / exp_bins[i]);
  }
  res.statistic = stat.value();
  res.bins = exp_bins.size();
  res.dof = static_cast<int>(exp_bins.size()) - 1;
  if (res.dof <= 0) {
    res.p_value = 1.0;
  } else {
    boost::math::chi_squared law(res.dof);
    res.p_value = boost::math::cdf(boost::math::complement(law, res.statistic));
  }
  return res;
}

double chi_square_critical(int dof, double alpha) {
  if (dof <= 0) return 0.0;
  boost::math::chi_squared law(dof);
  return boost::math::quantile(boost::math::complement(law, alpha));
}

TestReport chi_square_report(std::string name, const ChiSquareResult& r, double alpha, std::uint64_t sample_size,
                             std::uint64_t seed) {
  TestReport rep;
  rep.name = std::move(name);
  rep.statistic = r.statistic;
  rep.threshold = chi_square_critical(r.dof, alpha);
  rep.pass = r.statistic <= rep.threshold;
  rep.sample_size = sample_size;
  rep.seed = seed;
  rep.params["dof"] = r.dof;
  rep.params["p_value"] = r.p_value;
  rep.params["alpha"] = alpha;
  rep.params["bins"] = r.bins;
  rep.params["semantics"] = "chi-square statistic <= critical value at alpha";
  return rep;
}

namespace {

std::vector<double> cumulative(const std::vector<double>& pi) {
  if (pi.empty()) throw std::invalid_argument("empty pmf");
  std::vector<double> cum(pi.size());
  KahanSum s;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] < 0.0) throw std::invalid_argument("negative probability");
    s.add(pi[i]);
    cum[i] = s.value();
  }
  if (std::abs(cum.back() - 1.0) > 1e-9) throw std::invalid_argument("pmf must sum to 1");
  cum.back() = 1.0;
  return cum;
}

}  // namespace

EmpiricalDist<std::vector<std::int64_t>> simulate_size_biased_pick(const std::vector<double>& pi, int follow,
                                                                   int slots, std::uint64_t trials,
                                                                   std::uint64_t seed, unsigned threads) {
  if (follow < 0 || slots < follow + 1) throw std::invalid_argument("size_biased_pick: need slots > follow >= 0");
  const auto cum = cumulative(pi);
  struct Acc {
    EmpiricalDist<std::vector<std::int64_t>> dist;
    void merge(const Acc& o) { dist.merge(o.dist); }
  };
  auto acc = run_trials<Acc>(trials, threads, seed, [&](Rng& rng, std::uint64_t, Acc& a) {
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(slots));
    std::uint64_t total = 0;
    for (auto& s : sizes) {
      const double u = rng.uniform01();
      s = static_cast<std::int64_t>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin()) + 1;
      total += static_cast<std::uint64_t>(s);
    }
    // Uniform element of the union; by exchangeability of the slots,
    // conditioning on slot 0 is the same as re-indexing from the hit slot.
    auto u = rng.below(total);
    std::size_t hit = 0;
    while (u >= static_cast<std::uint64_t>(sizes[hit])) u -= static_cast<std::uint64_t>(sizes[hit++]);
    std::vector<std::int64_t> key;
    for (int i = 0; i <= follow; ++i) key.push_back(sizes[(hit + static_cast<std::size_t>(i)) % sizes.size()]);
    a.dist.add(key);
  });
  return std::move(acc.dist);
}

ReferenceLaw<std::vector<std::int64_t>> size_biased_limit_law(const std::vector<double>& pi, int follow) {
  if (follow < 0) throw std::invalid_argument("size_biased_limit_law: follow >= 0");
  cumulative(pi);
  KahanSum mu;
  for (std::size_t l = 0; l < pi.size(); ++l) mu.add(static_cast<double>(l + 1) * pi[l]);
  ReferenceLaw<std::vector<std::int64_t>> law;
  for (std::size_t l = 0; l < pi.size(); ++l) {
    if (pi[l] > 0.0) law.push_back({{static_cast<std::int64_t>(l + 1)}, static_cast<double>(l + 1) * pi[l] / mu.value()});
  }
  for (int i = 0; i < follow; ++i) {
    ReferenceLaw<std::vector<std::int64_t>> next;
    for (const auto& [key, p] : law) {
      for (std::size_t l = 0; l < pi.size(); ++l) {
        if (pi[l] <= 0.0) continue;
        auto k2 = key;
        k2.push_back(static_cast<std::int64_t>(l + 1));
        next.emplace_back(std::move(k2), p * pi[l]);
      }
    }
    law = std::move(next);
  }
  return law;
}

TestReport size_biased_pick_law(const std::vector<double>& pi, int follow, int slots, std::uint64_t trials,
                                std::uint64_t seed, double alpha, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  const auto e = simulate_size_biased_pick(pi, follow, slots, trials, seed, threads);
  const auto law = size_biased_limit_law(pi, follow);
  auto rep = chi_square_report("size_biased_pick", chi_square_gof(e, law), alpha, trials, seed);
  rep.params["follow"] = follow;
  rep.params["slots"] = slots;
  rep.params["support"] = pi.size();
  rep.runtime_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
  return rep;
}

}  // namespace mallows
