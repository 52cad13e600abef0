#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mallows/oracle.hpp"
#include "mallows/stats.hpp"
#include "mallows/trees.hpp"

using namespace mallows;

namespace {

// Literal recursive construction: root x_1, left = bst(x_-), right = bst(x_+).
void bst_recursive(const std::vector<std::int64_t>& x, const std::string& prefix,
                   std::map<std::string, std::int64_t>& out) {
  if (x.empty()) return;
  out[prefix] = x.front();
  std::vector<std::int64_t> lo, hi;
  for (std::size_t i = 1; i < x.size(); ++i) (x[i] < x.front() ? lo : hi).push_back(x[i]);
  bst_recursive(lo, prefix + "0", out);
  bst_recursive(hi, prefix + "1", out);
}

std::map<std::string, std::int64_t> labeled_words(const BinaryTree& t) {
  std::map<std::string, std::int64_t> out;
  for (std::size_t v = 0; v < t.size(); ++v) out[t.word(static_cast<NodeId>(v))] = *t.node(static_cast<NodeId>(v)).label;
  return out;
}

std::set<std::string> words(const BinaryTree& t) {
  std::set<std::string> out;
  for (std::size_t v = 0; v < t.size(); ++v) out.insert(t.word(static_cast<NodeId>(v)));
  return out;
}

std::vector<std::int64_t> random_distinct(Rng& rng, std::size_t n) {
  std::vector<std::int64_t> v(n);
  std::iota(v.begin(), v.end(), std::int64_t{-static_cast<std::int64_t>(n) / 2});
  for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  return v;
}

BinaryTree random_tree(Rng& rng) { return build_bst(random_distinct(rng, rng.below(60))); }

}  // namespace

TEST_CASE("traced BST example") {
  const auto t = build_bst(PermWindow::finite({4, 2, 5, 1, 6, 3}));
  const std::map<std::string, std::int64_t> expected{{"", 4}, {"0", 2}, {"00", 1}, {"01", 3}, {"1", 5}, {"11", 6}};
  CHECK(labeled_words(t) == expected);
  CHECK(t.root() == 0);
  const auto sd = spine_decompose(t);
  CHECK(sd.record_count == 3);
  CHECK(sd.sizes == std::vector<std::int64_t>{3, 0, 0});
  CHECK(serialize(t) == "(((·)1(·))2((·)3(·)))4((·)5((·)6(·)))");
}

TEST_CASE("trivial BSTs") {
  const auto path = build_bst(PermWindow::finite({1, 2, 3}));
  CHECK(words(path) == std::set<std::string>{"", "1", "11"});
  CHECK(spine_decompose(path).sizes == std::vector<std::int64_t>{0, 0, 0});
  const auto empty = build_bst(PermWindow::finite({}));
  CHECK(empty.empty());
  CHECK(serialize(empty) == "·");
  CHECK(parse_tree("·").empty());
}

TEST_CASE("three constructions agree") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_distinct(rng, rng.below(80));
    const auto a = build_bst(x);
    const auto b = build_bst_insertion(x);
    REQUIRE(same_tree(a, b));
    std::map<std::string, std::int64_t> rec;
    bst_recursive(x, "", rec);
    REQUIRE(labeled_words(a) == rec);
    REQUIRE(a.size() == x.size());
    auto sorted = x;
    std::sort(sorted.begin(), sorted.end());
    if (!x.empty()) REQUIRE(a.inorder_labels() == sorted);
    REQUIRE(spine_decompose(a).record_count == static_cast<std::int64_t>(records(PermWindow::finite(x)).count()));
  }
}

TEST_CASE("deep trees do not recurse") {
  std::vector<std::int64_t> x(300000);
  std::iota(x.begin(), x.end(), std::int64_t{1});
  const auto t = build_bst(x);
  CHECK(spine_decompose(t).record_count == 300000);
  const auto text = serialize(t);
  CHECK(same_tree(parse_tree(text), t));
}

TEST_CASE("spine decomposition sums to the tree size") {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto tree = build_bst(sample_mallows(rng.below(500) + 1, 0.7, rng));
    const auto sd = spine_decompose(tree);
    std::int64_t total = 0;
    for (auto s : sd.sizes) total += 1 + s;
    REQUIRE(total == static_cast<std::int64_t>(tree.size()));
  }
}

TEST_CASE("top levels match the full tree") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto x = sample_mallows(rng.below(300) + 1, 0.5, rng);
    const auto full = labeled_words(build_bst(x));
    std::map<std::string, std::int64_t> top;
    for (const auto& [w, l] : full) {
      if (w.size() <= 3) top[w] = l;
    }
    REQUIRE(labeled_words(bst_top_levels(x, 3)) == top);
  }
}

TEST_CASE("serialization round trip") {
  Rng rng(4);
  for (int t = 0; t < 300; ++t) {
    const auto tree = random_tree(rng);
    REQUIRE(same_tree(parse_tree(serialize(tree)), tree));
    REQUIRE(same_tree(parse_tree(shape_key(tree)), tree, false));
  }
  CHECK_THROWS_AS(parse_tree("(·)4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_tree("(·)4(·))"), std::invalid_argument);
  CHECK(shape_key(parse_tree("((·)2(·))7(·)")) == "((·)(·))(·)");
}

TEST_CASE("monotone coupling") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    OneSidedStream st(0.6, Rng::child(5, s));
    st.extend_to(300);
    std::set<std::string> prev;
    for (std::size_t n = 1; n <= 300; ++n) {
      const std::vector<std::int64_t> head(st.prefix().begin(), st.prefix().begin() + static_cast<std::ptrdiff_t>(n));
      const auto cur = words(build_bst(head));
      REQUIRE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      REQUIRE(cur.size() == n);
      prev = cur;
    }
  }
}

TEST_CASE("mirror") {
  Rng rng(6);
  for (int t = 0; t < 1000; ++t) {
    const auto tree = random_tree(rng);
    REQUIRE(same_tree(mirror(mirror(tree)), tree));
    const auto m = mirror(tree);
    if (!m.empty()) {
      const auto lab = m.inorder_labels();
      REQUIRE(std::is_sorted(lab.begin(), lab.end()));
    }
  }
  const auto path = build_bst(PermWindow::finite({1, 2, 3, 4}));
  CHECK(words(mirror(path)) == std::set<std::string>{"", "0", "00", "000"});
}

TEST_CASE("mirrored q = 0.5 trees follow the q = 2 shape law") {
  const auto law2 = oracle_enumerate(4, 2.0);
  ReferenceLaw<std::string> ref(law2.shapes.begin(), law2.shapes.end());
  EmpiricalDist<std::string> e;
  for (std::uint64_t t = 0; t < 100000; ++t) {
    Rng rng = Rng::child(7, t);
    e.add(shape_key(mirror(build_bst(sample_mallows(4, 0.5, rng)))));
  }
  CHECK(chi_square_gof(e, ref).p_value > 0.001);
  // The q > 1 sampler goes through the same symmetry and labels 1..n.
  EmpiricalDist<std::string> f;
  for (std::uint64_t t = 0; t < 100000; ++t) {
    Rng rng = Rng::child(8, t);
    const auto tree = sample_mallows_tree(4, 2.0, rng);
    REQUIRE(tree.inorder_labels() == std::vector<std::int64_t>{1, 2, 3, 4});
    f.add(shape_key(tree));
  }
  CHECK(chi_square_gof(f, ref).p_value > 0.001);
}

TEST_CASE("redwood of the identity is a bare spine") {
  PermWindow w;
  w.offset = -5;
  for (std::int64_t x = -5; x <= 5; ++x) w.values.push_back(x);
  const auto r = build_redwood(w, 2);
  CHECK(r.k_min == -2);
  CHECK(r.k_max == 2);
  for (std::int64_t k = -2; k <= 2; ++k) CHECK(r.left_subtrees.at(k).empty());
  REQUIRE(r.stabilized_range.has_value());
  CHECK(*r.stabilized_range == std::make_pair<std::int64_t, std::int64_t>(-2, 2));
}

TEST_CASE("identity extension of a finite permutation") {
  const std::vector<std::int64_t> sigma{4, 2, 5, 1, 6, 3};
  PermWindow w;
  w.offset = -8;
  for (std::int64_t x = -8; x <= 14; ++x) w.values.push_back(x >= 1 && x <= 6 ? sigma[static_cast<std::size_t>(x - 1)] : x);
  const auto r = build_redwood(w, 3);
  const auto tree = build_bst(sigma);
  const auto sd = spine_decompose(tree);
  // k >= 0 reproduces the left subtrees of the finite BST, k < 0 is bare.
  for (std::int64_t k = 0; k < 3; ++k) {
    const auto spine_node = tree.find(std::string(static_cast<std::size_t>(k), '1'));
    const auto l = tree.node(spine_node).left;
    const auto& sub = r.left_subtrees.at(k);
    CHECK(static_cast<std::int64_t>(sub.size()) == sd.sizes[static_cast<std::size_t>(k)]);
    if (l != kNone) {
      CHECK(sub.size() == 3);
      CHECK(labeled_words(sub) == std::map<std::string, std::int64_t>{{"", 2}, {"0", 1}, {"1", 3}});
    }
  }
  for (std::int64_t k = -3; k < 0; ++k) CHECK(r.left_subtrees.at(k).empty());
  CHECK(r.stabilized_range.has_value());
}

TEST_CASE("insufficient windows are reported by side") {
  PermWindow w;
  w.offset = -1;
  for (std::int64_t x = -1; x <= 10; ++x) w.values.push_back(x);
  try {
    build_redwood(w, 2);
    FAIL("expected InsufficientWindow");
  } catch (const InsufficientWindow& e) {
    CHECK(e.side() == InsufficientWindow::Side::Left);
  }
  PermWindow v;
  v.offset = -10;
  for (std::int64_t x = -10; x <= 1; ++x) v.values.push_back(x);
  try {
    build_redwood(v, 2);
    FAIL("expected InsufficientWindow");
  } catch (const InsufficientWindow& e) {
    CHECK(e.side() == InsufficientWindow::Side::Right);
  }
  try {
    build_redwood(PermWindow{0, {0, 1}}, 3);
    FAIL("expected InsufficientWindow");
  } catch (const InsufficientWindow& e) {
    CHECK(e.side() == InsufficientWindow::Side::Both);
  }
}

TEST_CASE("certified redwood content is stable under window doubling") {
  int certified = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(10000 + s);
    auto t = sample_triplet(0.5, rng);
    for (std::int64_t h = 8; h <= 64; h *= 2) {
      RedwoodTree r;
      try {
        r = build_redwood(assemble_two_sided(t, -h, h), 2);
      } catch (const InsufficientWindow&) {
        continue;
      }
      if (!r.stabilized_range) continue;
      ++certified;
      const auto big = build_redwood(assemble_two_sided(t, -2 * h, 2 * h), 2);
      REQUIRE(big.stabilized_range.has_value());
      for (std::int64_t k = -2; k <= 2; ++k) REQUIRE(same_tree(r.left_subtrees.at(k), big.left_subtrees.at(k)));
    }
  }
  CHECK(certified > 100);
}

TEST_CASE("shift equals the zero slot plus one") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(20000 + s);
    auto t = sample_triplet(0.5, rng);
    const auto w = assemble_two_sided(t, -200, 200);
    const auto rr = records(w);
    std::int64_t nonpositive = 0;
    for (auto v : rr.values) nonpositive += v <= 0 ? 1 : 0;
    REQUIRE(nonpositive == rr.zero_slot + 1);
    // The root's left subtree holds R_1 - R_0 - 1 values.
    const auto r = redwood_from_triplet(t, 1);
    const auto srr = srr_from_triplet(t, 2);
    REQUIRE(r.subtree_size(0) == srr.values[2] - srr.values[1] - 1);
  }
}

TEST_CASE("direct redwood sampler") {
  Rng rng(30);
  for (int t = 0; t < 100; ++t) {
    const auto r = sample_redwood_direct(0.0, 3, rng);
    for (std::int64_t k = -3; k <= 3; ++k) REQUIRE(r.left_subtrees.at(k).empty());
  }
  EmpiricalDist<std::int64_t> y0, y1;
  for (std::uint64_t t = 0; t < 100000; ++t) {
    Rng g = Rng::child(36, t);
    const auto r = sample_redwood_direct(0.5, 1, g);
    y0.add(r.subtree_size(0));
    y1.add(r.subtree_size(1));
  }
  CHECK(chi_square_gof(y1, geometric_reference(GeomVariant::GeomZero, 0.5)).p_value > 0.01);
  CHECK(chi_square_gof(y0, geometric_reference(GeomVariant::SizeBiased, 0.5)).p_value > 0.01);
}

TEST_CASE("two-sided redwood sizes follow the limit marginals") {
  EmpiricalDist<std::int64_t> y0, y2;
  for (std::uint64_t t = 0; t < 20000; ++t) {
    Rng g = Rng::child(32, t);
    auto trip = sample_triplet(0.5, g);
    const auto r = redwood_from_triplet(trip, 2);
    y0.add(r.subtree_size(0));
    y2.add(r.subtree_size(-2));
  }
  CHECK(chi_square_gof(y0, geometric_reference(GeomVariant::SizeBiased, 0.5)).p_value > 0.001);
  CHECK(chi_square_gof(y2, geometric_reference(GeomVariant::GeomZero, 0.5)).p_value > 0.001);
}

TEST_CASE("flatten keeps every subtree") {
  Rng rng(40);
  const auto r = sample_redwood_direct(0.6, 2, rng);
  const auto f = flatten(r);
  std::size_t total = 5;
  for (const auto& [k, t] : r.left_subtrees) total += t.size();
  CHECK(f.tree.size() == total);
  CHECK(f.spine.size() == 5);
  for (std::int64_t k = -2; k <= 2; ++k) {
    const auto l = f.tree.node(f.spine[static_cast<std::size_t>(k + 2)]).left;
    const auto& sub = r.left_subtrees.at(k);
    CHECK((l == kNone) == sub.empty());
  }
}
