#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mallows/distributions.hpp"
#include "mallows/rng.hpp"

namespace mallows {

/// Finite window of a permutation: values[i] is the image of offset + i.
/// Finite permutations use offset 1; two-sided windows start at lo <= 0.
struct PermWindow {
  std::int64_t offset = 1;
  std::vector<std::int64_t> values;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }
  std::int64_t lo() const noexcept { return offset; }
  std::int64_t hi() const noexcept { return offset + static_cast<std::int64_t>(values.size()) - 1; }
  std::int64_t at(std::int64_t index) const { return values.at(static_cast<std::size_t>(index - offset)); }

  static PermWindow finite(std::vector<std::int64_t> v) { return PermWindow{1, std::move(v)}; }
  bool operator==(const PermWindow&) const = default;
};

/// Number of pairs i < j with w(i) > w(j). O(n log n).
std::uint64_t inversions(const PermWindow& w);

/// Re-rank distinct integers to 1..n preserving relative order.
std::vector<std::int64_t> rerank(const std::vector<std::int64_t>& xs);

/// Normalizing constants of the Mallows law on S_n.
double mallows_z_product(int n, double q);      // prod_k (1 + q + ... + q^(k-1))
double mallows_z_enumerate(int n, double q);    // sum over S_n of q^Inv
inline constexpr int kExactPmfMaxN = 12;

/// q^Inv(w) / Z_{n,q}. Throws std::invalid_argument if w is not a
/// permutation of 1..n or n exceeds kExactPmfMaxN.
double exact_pmf(int n, double q, const PermWindow& w);

/// One-sided Mallows stream from the infinite Bernoulli model.
///
/// I_i is the r-th smallest column not used by I_1..I_{i-1} with
/// r ~ GeomOne(1-q), which is the law of the first success when scanning the
/// unused columns of row i. The stream grows lazily; prefixes give the nested
/// family of finite Mallows permutations.
class OneSidedStream {
 public:
  OneSidedStream(double q, Rng rng);

  double q() const noexcept { return q_; }
  std::size_t length() const noexcept { return draws_.size(); }
  const std::vector<std::int64_t>& prefix() const noexcept { return draws_; }

  void extend_to(std::size_t n);
  /// I_i for i >= 1, extending as needed.
  std::int64_t at(std::size_t i);

  /// Largest column used so far.
  std::int64_t max_column() const noexcept { return max_; }
  /// Smallest column not used so far.
  std::int64_t min_unused() const noexcept { return holes_.empty() ? max_ + 1 : holes_.front(); }
  /// Columns below max_column() not used so far, increasing.
  const std::vector<std::int64_t>& holes() const noexcept { return holes_; }
  /// Index i with I_i = column, extending until it appears (throws past `cap`).
  std::size_t position_of(std::int64_t column, std::size_t cap = kDefaultCap);

  static constexpr std::size_t kDefaultCap = std::size_t{1} << 26;

  /// Stream with prescribed draws; further draws come from `rng`.
  static OneSidedStream from_prefix(double q, const std::vector<std::int64_t>& prefix, Rng rng = Rng{0});

 private:
  void push(std::int64_t column);
  void draw_one();

  double q_;
  Rng rng_;
  std::vector<std::int64_t> draws_;
  std::vector<std::int64_t> holes_;
  std::vector<std::size_t> position_;  // position_[c] = i with I_i = c, 0 if unused
  std::int64_t max_ = 0;
};

OneSidedStream sample_one_sided(double q, Rng& rng);

/// Re-ranking of I_1..I_n.
PermWindow finite_from_stream(OneSidedStream& s, std::size_t n);

/// Records and the standard record representation.
struct RecordRepresentation {
  std::vector<std::int64_t> indices;  // increasing
  std::vector<std::int64_t> values;   // values at those indices, increasing
  /// Slot of r_0, the last record with value <= 0; -1 when every record
  /// value is positive (virtual boundary before the first record).
  std::int64_t zero_slot = -1;
  /// False when the window may have clipped records on its left.
  bool complete = true;

  std::size_t count() const noexcept { return indices.size(); }
  /// Slot in `indices` holding r_k.
  std::int64_t slot(std::int64_t k) const noexcept { return zero_slot + k; }
};

RecordRepresentation records(const PermWindow& w);

/// max(I_1..I_n) - n.
std::int64_t free_spaces(OneSidedStream& s, std::size_t n);

/// Number of spine blocks k = 0..R_n-1 whose left subtree in bst(sigma_n)
/// differs from the one in bst(sigma_inf).
///
/// The left subtree of spine node 1^k holds the columns strictly between
/// consecutive record values rec_k < rec_{k+1} (rec_0 = 0). Every column is
/// eventually used, so the block is final exactly when all of its columns
/// are among I_1..I_n.
std::int64_t incomplete_left_subtrees(OneSidedStream& s, std::size_t n);

/// E_1..E_n along one stream, in O(n + max) total.
std::vector<std::int64_t> incomplete_left_subtrees_profile(OneSidedStream& s, std::size_t n);

/// Triplet (sigma+, sigma-, Lambda) of the two-sided construction.
class TwoSidedTriplet {
 public:
  TwoSidedTriplet(OneSidedStream plus, OneSidedStream minus, PartitionSample partition);

  OneSidedStream& plus() noexcept { return plus_; }
  OneSidedStream& minus() noexcept { return minus_; }
  const PartitionSample& partition() const noexcept { return partition_; }
  const std::vector<std::int64_t>& lambda() const noexcept { return lambda_; }

  /// Lambda_i, zero past the last part.
  std::int64_t lambda_at(std::int64_t i) const;
  /// l_i = i - Lambda_i, i >= 1.
  std::int64_t ell(std::int64_t i) const;
  /// k_j for j <= 0: the complement of {l_i} in decreasing order.
  std::int64_t k(std::int64_t j) const;

  struct Slot {
    bool positive;    // x = l_i (true) or x = k_i (false)
    std::int64_t i;
  };
  Slot locate(std::int64_t x) const;

  /// Value of the two-sided permutation at x.
  std::int64_t value(std::int64_t x);

 private:
  OneSidedStream plus_;
  OneSidedStream minus_;
  PartitionSample partition_;
  std::vector<std::int64_t> lambda_;
  std::vector<std::int64_t> gaps_;  // k_0, k_{-1}, ... inside (l_1, L], decreasing
};

TwoSidedTriplet sample_triplet(double q, Rng& rng, double epsilon = kDefaultPartitionEpsilon);

/// Window of the two-sided permutation on [lo, hi].
PermWindow assemble_two_sided(TwoSidedTriplet& t, std::int64_t lo, std::int64_t hi);

/// Anti-records rho_1 < rho_2 < ... of sigma-: rho_1 is the position of 1 and
/// rho_{i+1} the position of the minimum of sigma- after rho_i.
std::vector<std::size_t> anti_records(OneSidedStream& s, std::size_t count);

/// First `count` record indices of the one-sided stream.
std::vector<std::size_t> stream_records(OneSidedStream& s, std::size_t count);

/// SRR of the two-sided permutation read off the triplet, with `depth`
/// records on each side: r_{1-depth}, ..., r_0, r_1, ..., r_depth.
RecordRepresentation srr_from_triplet(TwoSidedTriplet& t, std::size_t depth);

/// sum_{k=2}^{n} (1-q)/(1-q^k).
double expected_records(std::int64_t n, double q);
/// sum_{k=1}^{n} q^k/(1-q^k).
double expected_free_spaces(std::int64_t n, double q);

/// Window serialization: one `index value` line per entry.
std::string format_window(const PermWindow& w);
PermWindow parse_window(const std::string& text);

}  // namespace mallows
