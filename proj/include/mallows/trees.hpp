#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mallows/permutations.hpp"
#include "mallows/rng.hpp"

namespace mallows {

using NodeId = std::int32_t;
inline constexpr NodeId kNone = -1;

struct TreeNode {
  NodeId parent = kNone;
  NodeId left = kNone;
  NodeId right = kNone;
  std::optional<std::int64_t> label;
};

/// Binary tree stored as a node arena.
class BinaryTree {
 public:
  NodeId root() const noexcept { return root_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const TreeNode& node(NodeId v) const { return nodes_.at(static_cast<std::size_t>(v)); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  NodeId add_root(std::optional<std::int64_t> label = std::nullopt);
  /// Adds a child on side `right` of `parent`; the slot must be free.
  NodeId add_child(NodeId parent, bool right, std::optional<std::int64_t> label = std::nullopt);
  /// Raw arena access for builders that fill links directly.
  std::vector<TreeNode>& arena() noexcept { return nodes_; }
  void set_root(NodeId r) noexcept { root_ = r; }

  /// Address of v as a {0,1}-word (0 = left).
  std::string word(NodeId v) const;
  /// Node at `word`, or kNone.
  NodeId find(const std::string& word) const;
  std::int64_t depth(NodeId v) const;
  /// Nodes in preorder.
  std::vector<NodeId> preorder() const;
  /// Labels in symmetric order.
  std::vector<std::int64_t> inorder_labels() const;
  /// Inclusive descendant count for every node id.
  std::vector<std::int64_t> subtree_sizes() const;

 private:
  std::vector<TreeNode> nodes_;
  NodeId root_ = kNone;
};

/// Same shape (and same labels when `labels` is set).
bool same_tree(const BinaryTree& a, const BinaryTree& b, bool labels = true);

/// BST of the sequence: first element at the root, smaller values to the
/// left, larger to the right. Built as a Cartesian tree (value order, heap on
/// position) in O(n log n) without recursion; node id = position.
BinaryTree build_bst(const std::vector<std::int64_t>& values);
inline BinaryTree build_bst(const PermWindow& w) { return build_bst(w.values); }

/// Same tree by sequential leaf insertion, O(n * height).
BinaryTree build_bst_insertion(const std::vector<std::int64_t>& values);

/// Nodes at depth <= max_depth of the BST of `values`, by truncated
/// insertion in O(n * max_depth).
BinaryTree bst_top_levels(const std::vector<std::int64_t>& values, int max_depth);

struct SpineDecomposition {
  std::vector<std::int64_t> sizes;  // left subtree sizes along the rightmost path
  std::int64_t record_count = 0;
};

SpineDecomposition spine_decompose(const BinaryTree& t);

/// Swap left and right everywhere; labels are negated.
BinaryTree mirror(const BinaryTree& t);

/// Replace every label x by a + b x.
BinaryTree relabel(const BinaryTree& t, std::int64_t a, std::int64_t b);

/// Parenthesized format: `(left)label(right)`, `·` for the empty tree.
std::string serialize(const BinaryTree& t);
BinaryTree parse_tree(const std::string& text);

/// Serialized shape with labels dropped.
std::string shape_key(const BinaryTree& t);

inline constexpr const char* kEmptyTreeGlyph = "·";

/// Left subtrees hanging off a bi-infinite spine, realized for k_min..k_max.
struct RedwoodTree {
  std::int64_t k_min = 0;
  std::int64_t k_max = -1;
  std::map<std::int64_t, BinaryTree> left_subtrees;
  std::optional<std::pair<std::int64_t, std::int64_t>> stabilized_range;

  std::int64_t subtree_size(std::int64_t k) const { return static_cast<std::int64_t>(left_subtrees.at(k).size()); }
};

/// Redwood flattened into one BinaryTree: spine k_min is the root and the
/// spine runs down the right path. spine[k - k_min] is the node of 1^k.
struct FlatRedwood {
  BinaryTree tree;
  std::vector<NodeId> spine;
  std::int64_t k_min = 0;
};

FlatRedwood flatten(const RedwoodTree& r);

class InsufficientWindow : public std::runtime_error {
 public:
  enum class Side { Left, Right, Both };
  InsufficientWindow(Side side, const std::string& what) : std::runtime_error(what), side_(side) {}
  Side side() const noexcept { return side_; }

 private:
  Side side_;
};

std::string to_string(InsufficientWindow::Side s);

/// Redwood tree of a two-sided window on spine indices |k| <= radius.
///
/// Spine node 1^k stands for record r_{k+1} of the standard record
/// representation; its left subtree is the BST of the values strictly between
/// sigma(r_k) and sigma(r_{k+1}), which all lie to the right of r_{k+1}.
/// Requires r_{-radius}..r_{radius+1} in the window with at least one record
/// before r_{-radius}; otherwise throws InsufficientWindow. The range is
/// certified when every value in [sigma(r_{-radius}), sigma(r_{radius+1})]
/// occurs in the window.
RedwoodTree build_redwood(const PermWindow& w, std::int64_t radius);

/// Redwood of the two-sided permutation of `t`, doubling the window from
/// `initial_half_width` until build_redwood certifies [-radius, radius].
RedwoodTree redwood_from_triplet(TwoSidedTriplet& t, std::int64_t radius,
                                 std::int64_t initial_half_width = 16,
                                 std::int64_t max_half_width = std::int64_t{1} << 22);

/// Independent Mallows trees on |k| <= radius: sizes GeomZero(1-q) for
/// k != 0 and SizeBiased(1-q) for k = 0.
RedwoodTree sample_redwood_direct(double q, std::int64_t radius, Rng& rng);

/// Mallows(q) permutation of size n, from a fresh one-sided stream.
std::vector<std::int64_t> sample_mallows(std::size_t n, double q, Rng& rng);

/// BST of a Mallows(q) permutation of size n. For q > 1 the tree is the
/// mirror of a Mallows(1/q) tree, relabeled to 1..n.
BinaryTree sample_mallows_tree(std::size_t n, double q, Rng& rng);

}  // namespace mallows
