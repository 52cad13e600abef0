#include "mallows/trees.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace mallows {

NodeId BinaryTree::add_root(std::optional<std::int64_t> label) {
  if (root_ != kNone) throw std::logic_error("tree already has a root");
  nodes_.push_back(TreeNode{kNone, kNone, kNone, label});
  root_ = static_cast<NodeId>(nodes_.size() - 1);
  return root_;
}

NodeId BinaryTree::add_child(NodeId parent, bool right, std::optional<std::int64_t> label) {
  auto& slot = right ? nodes_.at(static_cast<std::size_t>(parent)).right
                     : nodes_.at(static_cast<std::size_t>(parent)).left;
  if (slot != kNone) throw std::logic_error("child slot already occupied");
  const auto id = static_cast<NodeId>(nodes_.size());
  slot = id;
  nodes_.push_back(TreeNode{parent, kNone, kNone, label});
  return id;
}

std::string BinaryTree::word(NodeId v) const {
  std::string w;
  while (node(v).parent != kNone) {
    const auto p = node(v).parent;
    w.push_back(node(p).right == v ? '1' : '0');
    v = p;
  }
  std::reverse(w.begin(), w.end());
  return w;
}

NodeId BinaryTree::find(const std::string& word) const {
  NodeId v = root_;
  for (char c : word) {
    if (v == kNone) return kNone;
    v = c == '1' ? node(v).right : node(v).left;
  }
  return v;
}

std::int64_t BinaryTree::depth(NodeId v) const {
  std::int64_t d = 0;
  while (node(v).parent != kNone) {
    v = node(v).parent;
    ++d;
  }
  return d;
}

std::vector<NodeId> BinaryTree::preorder() const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  std::vector<NodeId> stack;
  if (root_ != kNone) stack.push_back(root_);
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    out.push_back(v);
    if (node(v).right != kNone) stack.push_back(node(v).right);
    if (node(v).left != kNone) stack.push_back(node(v).left);
  }
  return out;
}

std::vector<std::int64_t> BinaryTree::inorder_labels() const {
  std::vector<std::int64_t> out;
  std::vector<NodeId> stack;
  NodeId v = root_;
  while (v != kNone || !stack.empty()) {
    while (v != kNone) {
      stack.push_back(v);
      v = node(v).left;
    }
    v = stack.back();
    stack.pop_back();
    if (!node(v).label) throw std::logic_error("inorder_labels on an unlabeled node");
    out.push_back(*node(v).label);
    v = node(v).right;
  }
  return out;
}

std::vector<std::int64_t> BinaryTree::subtree_sizes() const {
  std::vector<std::int64_t> sizes(nodes_.size(), 1);
  const auto order = preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto p = node(*it).parent;
    if (p != kNone) sizes[static_cast<std::size_t>(p)] += sizes[static_cast<std::size_t>(*it)];
  }
  return sizes;
}

bool same_tree(const BinaryTree& a, const BinaryTree& b, bool labels) {
  if (a.size() != b.size()) return false;
  if ((a.root() == kNone) != (b.root() == kNone)) return false;
  if (a.root() == kNone) return true;
  std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    const auto [u, v] = stack.back();
    stack.pop_back();
    const auto& x = a.node(u);
    const auto& y = b.node(v);
    if (labels && x.label != y.label) return false;
    if ((x.left == kNone) != (y.left == kNone) || (x.right == kNone) != (y.right == kNone)) return false;
    if (x.left != kNone) stack.emplace_back(x.left, y.left);
    if (x.right != kNone) stack.emplace_back(x.right, y.right);
  }
  return true;
}

BinaryTree build_bst(const std::vector<std::int64_t>& values) {
  BinaryTree t;
  const auto n = values.size();
  if (n == 0) return t;
  auto& nodes = t.arena();
  nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i].label = values[i];

  std::vector<NodeId> by_value(n);
  std::iota(by_value.begin(), by_value.end(), NodeId{0});
  std::sort(by_value.begin(), by_value.end(), [&](NodeId a, NodeId b) {
    return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
  });

  // Sweep values upward keeping the right path of the tree built so far;
  // a node with an earlier position becomes an ancestor.
  std::vector<NodeId> path;
  path.reserve(64);
  for (const auto x : by_value) {
    NodeId last = kNone;
    while (!path.empty() && path.back() > x) {
      last = path.back();
      path.pop_back();
    }
    nodes[static_cast<std::size_t>(x)].left = last;
    if (last != kNone) nodes[static_cast<std::size_t>(last)].parent = x;
    if (!path.empty()) {
      nodes[static_cast<std::size_t>(path.back())].right = x;
      nodes[static_cast<std::size_t>(x)].parent = path.back();
    }
    path.push_back(x);
  }
  t.set_root(path.front());
  return t;
}

BinaryTree build_bst_insertion(const std::vector<std::int64_t>& values) {
  BinaryTree t;
  for (const auto x : values) {
    if (t.empty()) {
      t.add_root(x);
      continue;
    }
    NodeId v = t.root();
    for (;;) {
      const auto label = *t.node(v).label;
      if (x == label) throw std::invalid_argument("build_bst_insertion: repeated value");
      const bool right = x > label;
      const auto next = right ? t.node(v).right : t.node(v).left;
      if (next == kNone) {
        t.add_child(v, right, x);
        break;
      }
      v = next;
    }
  }
  return t;
}

BinaryTree bst_top_levels(const std::vector<std::int64_t>& values, int max_depth) {
  BinaryTree t;
  for (const auto x : values) {
    if (t.empty()) {
      t.add_root(x);
      continue;
    }
    NodeId v = t.root();
    for (int d = 1; d <= max_depth; ++d) {
      const auto label = *t.node(v).label;
      const bool right = x > label;
      const auto next = right ? t.node(v).right : t.node(v).left;
      if (next == kNone) {
        t.add_child(v, right, x);
        break;
      }
      v = next;
    }
  }
  return t;
}

SpineDecomposition spine_decompose(const BinaryTree& t) {
  SpineDecomposition out;
  if (t.empty()) return out;
  const auto sizes = t.subtree_sizes();
  for (NodeId v = t.root(); v != kNone; v = t.node(v).right) {
    const auto l = t.node(v).left;
    out.sizes.push_back(l == kNone ? 0 : sizes[static_cast<std::size_t>(l)]);
  }
  out.record_count = static_cast<std::int64_t>(out.sizes.size());
  return out;
}

BinaryTree mirror(const BinaryTree& t) {
  BinaryTree m = t;
  for (auto& n : m.arena()) {
    std::swap(n.left, n.right);
    if (n.label) n.label = -*n.label;
  }
  return m;
}

BinaryTree relabel(const BinaryTree& t, std::int64_t a, std::int64_t b) {
  BinaryTree m = t;
  for (auto& n : m.arena()) {
    if (n.label) n.label = a + b * *n.label;
  }
  return m;
}

std::string serialize(const BinaryTree& t) {
  if (t.empty()) return kEmptyTreeGlyph;
  std::string out;
  // kind 0: whole subtree at v (kNone is the empty tree); kind 1: ")label(";
  // kind 2: ")".
  struct Item {
    NodeId v;
    int kind;
  };
  std::vector<Item> stack{{t.root(), 0}};
  while (!stack.empty()) {
    const auto [v, kind] = stack.back();
    stack.pop_back();
    if (kind == 2) {
      out += ')';
    } else if (kind == 1) {
      out += ')';
      if (t.node(v).label) out += std::to_string(*t.node(v).label);
      out += '(';
    } else if (v == kNone) {
      out += kEmptyTreeGlyph;
    } else {
      out += '(';
      stack.push_back({kNone, 2});
      stack.push_back({t.node(v).right, 0});
      stack.push_back({v, 1});
      stack.push_back({t.node(v).left, 0});
    }
  }
  return out;
}

std::string shape_key(const BinaryTree& t) {
  BinaryTree bare = t;
  for (auto& n : bare.arena()) n.label.reset();
  return serialize(bare);
}

BinaryTree parse_tree(const std::string& text) {
  BinaryTree t;
  const std::string glyph = kEmptyTreeGlyph;
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("parse_tree: " + what + " at offset " + std::to_string(pos));
  };
  auto expect = [&](char c) {
    if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  };
  struct Frame {
    NodeId v;
    int stage;
  };
  std::vector<Frame> stack;
  // Reads the start of a subtree; returns true when a node was opened.
  auto start = [&](NodeId parent, bool right) {
    if (text.compare(pos, glyph.size(), glyph) == 0) {
      pos += glyph.size();
      return false;
    }
    expect('(');
    const auto v = parent == kNone ? t.add_root() : t.add_child(parent, right);
    stack.push_back({v, 0});
    return true;
  };

  start(kNone, false);
  while (!stack.empty()) {
    const auto idx = stack.size() - 1;
    const auto v = stack[idx].v;
    switch (stack[idx].stage) {
      case 0:
        stack[idx].stage = 1;
        start(v, false);
        break;
      case 1: {
        expect(')');
        const auto begin = pos;
        if (pos < text.size() && text[pos] == '-') ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        if (pos > begin) {
          const auto s = text.substr(begin, pos - begin);
          if (s == "-") fail("bad label");
          t.arena()[static_cast<std::size_t>(v)].label = std::stoll(s);
        }
        expect('(');
        stack[idx].stage = 2;
        start(v, true);
        break;
      }
      default:
        expect(')');
        stack.pop_back();
        break;
    }
  }
  while (pos < text.size() && (text[pos] == '\n' || text[pos] == '\r' || text[pos] == ' ')) ++pos;
  if (pos != text.size()) fail("trailing characters");
  return t;
}

FlatRedwood flatten(const RedwoodTree& r) {
  FlatRedwood f;
  f.k_min = r.k_min;
  NodeId prev = kNone;
  for (auto k = r.k_min; k <= r.k_max; ++k) {
    const auto s = prev == kNone ? f.tree.add_root() : f.tree.add_child(prev, true);
    f.spine.push_back(s);
    prev = s;
    const auto& sub = r.left_subtrees.at(k);
    if (sub.empty()) continue;
    // Copy `sub` below s, left side.
    std::vector<std::pair<NodeId, NodeId>> stack{{sub.root(), kNone}};
    while (!stack.empty()) {
      const auto [u, parent] = stack.back();
      stack.pop_back();
      NodeId copy = kNone;
      if (parent == kNone) {
        copy = f.tree.add_child(s, false, sub.node(u).label);
      } else {
        const bool right = sub.node(sub.node(u).parent).right == u;
        copy = f.tree.add_child(parent, right, sub.node(u).label);
      }
      if (sub.node(u).right != kNone) stack.emplace_back(sub.node(u).right, copy);
      if (sub.node(u).left != kNone) stack.emplace_back(sub.node(u).left, copy);
    }
  }
  return f;
}

std::string to_string(InsufficientWindow::Side s) {
  switch (s) {
    case InsufficientWindow::Side::Left: return "left";
    case InsufficientWindow::Side::Right: return "right";
    case InsufficientWindow::Side::Both: return "both";
  }
  return "?";
}

RedwoodTree build_redwood(const PermWindow& w, std::int64_t radius) {
  if (radius < 0) throw std::invalid_argument("radius must be non-negative");
  const auto rr = records(w);
  const auto z = rr.zero_slot;
  const auto count = static_cast<std::int64_t>(rr.count());
  const bool left_ok = z - radius >= 1;
  const bool right_ok = z + radius + 1 < count;
  if (!left_ok || !right_ok) {
    const auto side = !left_ok && !right_ok ? InsufficientWindow::Side::Both
                      : !left_ok            ? InsufficientWindow::Side::Left
                                            : InsufficientWindow::Side::Right;
    throw InsufficientWindow(side, "window [" + std::to_string(w.lo()) + ", " + std::to_string(w.hi()) +
                                       "] lacks records for radius " + std::to_string(radius) +
                                       (side == InsufficientWindow::Side::Both ? " on both sides"
                                                                               : " on the " + to_string(side) + " side"));
  }

  RedwoodTree r;
  r.k_min = -radius;
  r.k_max = radius;
  for (auto k = -radius; k <= radius; ++k) {
    const auto low = rr.values[static_cast<std::size_t>(z + k)];
    const auto high = rr.values[static_cast<std::size_t>(z + k + 1)];
    const auto start = static_cast<std::size_t>(rr.indices[static_cast<std::size_t>(z + k + 1)] - w.offset) + 1;
    std::vector<std::int64_t> seg;
    for (std::size_t i = start; i < w.values.size(); ++i) {
      const auto v = w.values[i];
      if (v > low && v < high) seg.push_back(v);
    }
    r.left_subtrees.emplace(k, build_bst(seg));
  }

  const auto vlo = rr.values[static_cast<std::size_t>(z - radius)];
  const auto vhi = rr.values[static_cast<std::size_t>(z + radius + 1)];
  std::int64_t present = 0;
  for (const auto v : w.values) present += (v >= vlo && v <= vhi) ? 1 : 0;
  if (present == vhi - vlo + 1) r.stabilized_range = std::make_pair(-radius, radius);
  return r;
}

RedwoodTree redwood_from_triplet(TwoSidedTriplet& t, std::int64_t radius, std::int64_t initial_half_width,
                                 std::int64_t max_half_width) {
  for (auto h = std::max<std::int64_t>(1, initial_half_width); h <= max_half_width; h *= 2) {
    try {
      auto r = build_redwood(assemble_two_sided(t, -h, h), radius);
      if (r.stabilized_range) return r;
    } catch (const InsufficientWindow&) {
    }
  }
  throw std::runtime_error("redwood_from_triplet: no certified window up to half-width " +
                           std::to_string(max_half_width));
}

std::vector<std::int64_t> sample_mallows(std::size_t n, double q, Rng& rng) {
  OneSidedStream s(q, rng.split());
  return finite_from_stream(s, n).values;
}

RedwoodTree sample_redwood_direct(double q, std::int64_t radius, Rng& rng) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("q must lie in [0, 1)");
  if (radius < 0) throw std::invalid_argument("radius must be non-negative");
  RedwoodTree r;
  r.k_min = -radius;
  r.k_max = radius;
  for (auto k = -radius; k <= radius; ++k) {
    const auto v = k == 0 ? GeomVariant::SizeBiased : GeomVariant::GeomZero;
    const auto size = sample(v, 1.0 - q, rng);
    r.left_subtrees.emplace(k, build_bst(sample_mallows(static_cast<std::size_t>(size), q, rng)));
  }
  r.stabilized_range = std::make_pair(-radius, radius);
  return r;
}

BinaryTree sample_mallows_tree(std::size_t n, double q, Rng& rng) {
  if (q > 1.0) {
    const auto t = build_bst(sample_mallows(n, 1.0 / q, rng));
    return relabel(mirror(t), static_cast<std::int64_t>(n) + 1, 1);
  }
  if (q == 1.0) throw std::domain_error("q = 1 is not supported");
  return build_bst(sample_mallows(n, q, rng));
}

}  // namespace mallows
