#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mallows/report.hpp"
#include "mallows/stats.hpp"

namespace mallows {

/// Overrides for the verification suites. Unset fields fall back to each
/// suite's defaults; a set q or n narrows a grid to that single value.
struct VerifyConfig {
  std::optional<double> q;
  std::optional<std::int64_t> n;
  std::optional<int> radius;
  std::optional<int> depth;
  std::optional<std::uint64_t> trials;
  std::optional<std::int64_t> window;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double alpha = kDefaultAlpha;  // family level, Bonferroni-split inside a suite
};

/// Seed of one check, derived from the master seed and a tag.
std::uint64_t derive_seed(std::uint64_t master, const std::string& tag);

// Sampler permutation law vs enumeration. Defaults: n in 2..5,
// q in {0.2, 0.5, 0.8}, 2e5 draws.
std::vector<TestReport> verify_oracle(const VerifyConfig& c);

// Spine subtree sizes of the redwood limit. Per-slot chi-square of the direct
// sampler (radius 2, q = 0.5, 1e5 draws), plus TV of the two-sided window
// construction's joint size law against the exact product law over 80x as
// many draws (threshold 0.02).
std::vector<TestReport> verify_imt(const VerifyConfig& c);

// Census of one n = 1e5 tree vs the redwood ball law (1e5 trials), TV <= 0.02
// for q in {0.3, 0.5, 0.8}, r in {1, 2}.
std::vector<TestReport> verify_local(const VerifyConfig& c);

// Root ball law at n = 1e4 vs the infinite tree, r = 2, q = 0.5, 1e4 trials,
// TV <= 0.02.
std::vector<TestReport> verify_rooted(const VerifyConfig& c);

// Correspondence distortion at q = 0.5 over 20 trees: median at n = 1e5 at
// most 0.05 and below the n = 1e3 median; exactly 0 at q = 0.
std::vector<TestReport> verify_ghp(const VerifyConfig& c);

// Subtree-size deviation at depth 3, q = 0.5, n = 1e5: at most 0.01 in at
// least 19 of 20 trees.
std::vector<TestReport> verify_ssc(const VerifyConfig& c);

// Phi_n invariance at q = 0.5, window 1, n in {1, 3, 10}, 1e5 trials, plus
// the perturbed-null power check at n = 3.
std::vector<TestReport> verify_phi(const VerifyConfig& c);

// Record and free-space rates at n = 1e5 for q in {0.3, 0.5, 0.8}, and
// E_n <= F_n for n <= 1e3 along 100 streams.
std::vector<TestReport> verify_records(const VerifyConfig& c);

// Exact structural invariants; every report counts violations.
std::vector<TestReport> verify_invariants(const VerifyConfig& c);

/// Suite names in the order `all` runs them.
const std::vector<std::string>& verify_suites();

/// Dispatch by name; "all" runs every suite. Throws std::invalid_argument for
/// an unknown name.
std::vector<TestReport> verify(const std::string& suite, const VerifyConfig& c);

}  // namespace mallows
