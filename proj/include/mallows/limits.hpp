#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mallows/report.hpp"
#include "mallows/rng.hpp"
#include "mallows/stats.hpp"
#include "mallows/trees.hpp"

namespace mallows {

/// Unordered rooted tree given by child lists; vertex 0 is the root.
struct RootedTree {
  std::vector<std::vector<std::int32_t>> children;
  std::size_t size() const noexcept { return children.size(); }
};

/// Canonical code of an unordered rooted tree: preorder child counts as
/// bytes '0' + count, children ordered by their own codes. Injective on
/// isomorphism classes; a single vertex is "0".
struct BallSignature {
  std::string code;
  auto operator<=>(const BallSignature&) const = default;
  std::string hex() const;
  static BallSignature from_hex(const std::string& hex);
};

BallSignature signature(const RootedTree& t);

/// Radius-r ball around v in a binary tree, rooted at v. Nodes listed in
/// `open_ends` have a neighbor outside the realized tree (an unrealized
/// spine node); expanding one of them throws std::out_of_range.
RootedTree ball(const BinaryTree& t, NodeId v, int r, const std::vector<NodeId>& open_ends = {});

/// Ball in a redwood around spine node 1^k (word empty) or an off-spine node
/// 1^k 0 w given as (k, word starting with '0').
RootedTree ball(const RedwoodTree& t, std::int64_t k, const std::string& word, int r);

struct CensusResult {
  int radius = 0;
  EmpiricalDist<BallSignature> counts;
  std::uint64_t sample_size() const noexcept { return counts.total(); }
  std::map<BallSignature, double> frequencies() const;
};

/// Ball signatures of every vertex.
CensusResult census(const BinaryTree& t, int r);

/// Law of B_r(o) in the redwood limit: o uniform on the root spine node and
/// its left subtree, trees drawn by sample_redwood_direct on |k| <= r.
CensusResult redwood_ball_law(double q, int r, std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

/// Law of B_r(root). n = 0 means the one-sided infinite tree: its stream is
/// extended until the top r levels are final (throws past `cap` draws).
CensusResult rooted_ball_law(double q, int r, std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                             unsigned threads = 1, std::size_t cap = std::size_t{1} << 24);

/// Top r levels of the one-sided infinite Mallows tree of `s`.
BinaryTree infinite_top_levels(OneSidedStream& s, int r, std::size_t cap = std::size_t{1} << 24);

/// Vertex order of the GHP correspondence: spine blocks in order, each block
/// being the spine node followed by its left subtree breadth-first.
std::vector<NodeId> spine_block_order(const BinaryTree& t);

/// Lowest common ancestor queries by binary lifting.
class LcaIndex {
 public:
  explicit LcaIndex(const BinaryTree& t);
  std::int64_t depth(NodeId v) const { return depth_[static_cast<std::size_t>(v)]; }
  NodeId lca(NodeId a, NodeId b) const;
  std::int64_t distance(NodeId a, NodeId b) const { return depth(a) + depth(b) - 2 * depth(lca(a, b)); }

 private:
  std::vector<std::int64_t> depth_;
  std::vector<std::vector<NodeId>> up_;
};

inline constexpr std::uint64_t kDefaultPairBudget = 1000000;

/// max |d(x_i, x_j) / ((1-q) n) - |i - j| / n| over vertex pairs in the
/// spine-block order; exact when n^2 <= pair_budget, else over pair_budget
/// uniform pairs.
double ghp_distortion(const BinaryTree& t, double q, std::uint64_t pair_budget, Rng& rng);

/// tau(v) = |T cap vT| / |T| for every word of length <= depth (absent words
/// map to 0).
std::map<std::string, double> subtree_sizes(const BinaryTree& t, int depth);

/// max over words of length <= depth of |tau(v) - psi(v)|, psi the indicator
/// of the right spine 1^k.
double ssc_deviation(const BinaryTree& t, int depth);

/// Two-sided window of integers, entries[i] at index offset + i.
struct SpacedSequence {
  std::int64_t offset = 0;
  std::vector<std::int64_t> entries;

  std::int64_t lo() const noexcept { return offset; }
  std::int64_t hi() const noexcept { return offset + static_cast<std::int64_t>(entries.size()) - 1; }
  std::int64_t at(std::int64_t i) const;
  bool operator==(const SpacedSequence&) const = default;
};

/// s_n = min{i >= 0 : g_0 + ... + g_i > n}.
std::int64_t phi_shift(const SpacedSequence& g, std::int64_t n);

/// Re-rooting rearrangement Phi_n. With s = s_n:
///   phi_i = g_{s+i}                  i >= 1 or i <= -s-2
///   phi_0 = g_0 + ... + g_s - n
///   phi_{-1} = n + 1 - (g_0 + ... + g_{s-1})
///   phi_i = g_{s+i+1}                -s <= i <= -2
///   phi_{-s-1} = g_0 + g_{-1} - 1
/// and for s = 0 the two middle cases merge into phi_{-1} = n + g_{-1}.
/// The input must cover [-s-2, s+1]; the output covers [lo - s, hi - s].
SpacedSequence apply_phi(const SpacedSequence& g, std::int64_t n);

/// Empirical law of Phi_n(G) on indices [-window, window] for iid
/// GeomOne(1-q) entries, compared in total variation with the exact product
/// law of G (truncated at joint mass 0.999, the missing mass added to the
/// statistic). `perturb_minus_one`, when positive, replaces the law of G_{-1}
/// by GeomOne(perturb_minus_one) in both the model and the reference.
TestReport phi_invariance_test(double q, std::int64_t n, std::int64_t window, std::uint64_t trials,
                               std::uint64_t seed, double threshold = 0.02, double perturb_minus_one = 0.0,
                               unsigned threads = 1);

}  // namespace mallows
