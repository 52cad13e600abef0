#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>

#include "mallows/limits.hpp"
#include "mallows/oracle.hpp"

using namespace mallows;

namespace {

RootedTree from_parents(const std::vector<int>& parent) {
  RootedTree t;
  t.children.resize(parent.size());
  for (std::size_t v = 1; v < parent.size(); ++v) t.children[static_cast<std::size_t>(parent[v])].push_back(static_cast<std::int32_t>(v));
  return t;
}

// Parenthesised AHU code, recursive, children sorted as strings.
std::string ahu(const RootedTree& t, std::int32_t v = 0) {
  std::vector<std::string> parts;
  for (auto c : t.children[static_cast<std::size_t>(v)]) parts.push_back(ahu(t, c));
  std::sort(parts.begin(), parts.end());
  std::string s = "(";
  for (const auto& p : parts) s += p;
  return s + ")";
}

// Same tree with vertex labels permuted (root stays 0) and child lists shuffled.
RootedTree scramble(const RootedTree& t, Rng& rng) {
  const std::size_t n = t.size();
  std::vector<std::int32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n - 1; i > 1; --i) std::swap(perm[i], perm[1 + rng.below(i)]);
  RootedTree out;
  out.children.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto kids = t.children[v];
    for (std::size_t i = kids.size(); i > 1; --i) std::swap(kids[i - 1], kids[rng.below(i)]);
    for (auto c : kids) out.children[static_cast<std::size_t>(perm[v])].push_back(perm[static_cast<std::size_t>(c)]);
  }
  return out;
}

RootedTree rooted_path(int len) {
  std::vector<int> parent(static_cast<std::size_t>(len));
  for (int i = 1; i < len; ++i) parent[static_cast<std::size_t>(i)] = i - 1;
  return from_parents(parent);
}

BinaryTree right_path(std::int64_t n) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), std::int64_t{1});
  return build_bst(v);
}

SpacedSequence seq(std::int64_t offset, std::vector<std::int64_t> e) { return SpacedSequence{offset, std::move(e)}; }

}  // namespace

TEST_CASE("ball examples") {
  const auto path = right_path(3);
  CHECK(signature(ball(path, 1, 0)) == signature(rooted_path(1)));
  CHECK(signature(ball(path, 1, 0)).code.size() == 1);
  CHECK(signature(ball(path, 1, 1)) == signature(from_parents({0, 0, 0})));
  CHECK(signature(ball(path, 0, 1)) == signature(rooted_path(2)));
  CHECK(signature(ball(path, 0, 5)) == signature(rooted_path(3)));
  CHECK(signature(from_parents({0, 0, 0})) != signature(rooted_path(3)));
  CHECK_THROWS_AS(ball(path, 3, 1), std::out_of_range);
  CHECK_THROWS_AS(ball(path, -1, 1), std::out_of_range);
}

TEST_CASE("ball size is at most 3 * 2^r") {
  Rng rng(4);
  for (double q : {0.0, 0.5, 0.9}) {
    const auto t = sample_mallows_tree(400, q, rng);
    for (int r = 0; r <= 5; ++r) {
      for (std::size_t v = 0; v < t.size(); ++v) {
        REQUIRE(ball(t, static_cast<NodeId>(v), r).size() <= (std::size_t{3} << r));
      }
    }
  }
}

TEST_CASE("signature invariant under relabelling and child shuffles") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(30));
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (int v = 1; v < n; ++v) parent[static_cast<std::size_t>(v)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
    const auto t = from_parents(parent);
    REQUIRE(signature(scramble(t, rng)) == signature(t));
  }
}

TEST_CASE("signature is injective on rooted trees with at most 7 vertices") {
  // Every rooted tree arises from some parent array with parent[v] < v.
  const std::vector<std::size_t> classes = {1, 1, 2, 4, 9, 20, 48};
  for (int n = 1; n <= 7; ++n) {
    std::map<std::string, std::string> by_ahu;
    std::map<std::string, std::string> by_sig;
    std::vector<int> parent(static_cast<std::size_t>(n), 0);
    std::function<void(int)> rec = [&](int v) {
      if (v == n) {
        const auto t = from_parents(parent);
        const auto a = ahu(t);
        const auto s = signature(t).code;
        auto [ia, fresh_a] = by_ahu.emplace(a, s);
        auto [is, fresh_s] = by_sig.emplace(s, a);
        REQUIRE(ia->second == s);
        REQUIRE(is->second == a);
        REQUIRE(fresh_a == fresh_s);
        return;
      }
      for (int p = 0; p < v; ++p) {
        parent[static_cast<std::size_t>(v)] = p;
        rec(v + 1);
      }
    };
    rec(1);
    CHECK(by_ahu.size() == classes[static_cast<std::size_t>(n - 1)]);
    CHECK(by_sig.size() == by_ahu.size());
  }
}

TEST_CASE("signature hex round trip") {
  const auto s = signature(from_parents({0, 0, 0, 1}));
  CHECK(BallSignature::from_hex(s.hex()) == s);
  CHECK_THROWS_AS(BallSignature::from_hex("abc"), std::invalid_argument);
  CHECK_THROWS_AS(BallSignature::from_hex("zz"), std::invalid_argument);
}

TEST_CASE("census of a path") {
  for (std::int64_t n : {3, 10, 100}) {
    const auto c = census(right_path(n), 1);
    const auto f = c.frequencies();
    REQUIRE(f.size() == 2);
    CHECK(c.sample_size() == static_cast<std::uint64_t>(n));
    CHECK(f.at(signature(rooted_path(2))) == doctest::Approx(2.0 / static_cast<double>(n)));
    CHECK(f.at(signature(from_parents({0, 0, 0}))) == doctest::Approx(static_cast<double>(n - 2) / static_cast<double>(n)));
  }
  const auto c0 = census(right_path(50), 0);
  CHECK(c0.frequencies().size() == 1);
  CHECK(c0.frequencies().begin()->second == 1.0);
}

TEST_CASE("census frequencies sum to one and keep the vertex count") {
  Rng rng(8);
  for (int r = 0; r <= 3; ++r) {
    const auto t = sample_mallows_tree(2000, 0.6, rng);
    const auto c = census(t, r);
    CHECK(c.sample_size() == t.size());
    KahanSum s;
    for (const auto& [sig, f] : c.frequencies()) s.add(f);
    CHECK(std::abs(s.value() - 1.0) < 1e-12);
  }
}

TEST_CASE("redwood ball law degenerate cases") {
  const auto c = redwood_ball_law(0.0, 1, 200, 1);
  REQUIRE(c.frequencies().size() == 1);
  CHECK(c.frequencies().begin()->first == signature(from_parents({0, 0, 0})));
  const auto c0 = redwood_ball_law(0.7, 0, 200, 1);
  REQUIRE(c0.frequencies().size() == 1);
  CHECK(c0.frequencies().begin()->first == signature(rooted_path(1)));
}

TEST_CASE("redwood ball refuses to expand past the realized spine") {
  Rng rng(2);
  const auto red = sample_redwood_direct(0.5, 1, rng);
  CHECK_NOTHROW(ball(red, 0, "", 1));
  CHECK_THROWS_AS(ball(red, 0, "", 2), std::out_of_range);
  CHECK_THROWS_AS(ball(red, 2, "", 0), std::out_of_range);
  CHECK_THROWS_AS(ball(red, 0, "1", 0), std::invalid_argument);
}

TEST_CASE("rooted ball law degenerate cases") {
  for (std::uint64_t n : {std::uint64_t{0}, std::uint64_t{10}}) {
    const auto c = rooted_ball_law(0.0, 2, n, 100, 3);
    REQUIRE(c.frequencies().size() == 1);
    CHECK(c.frequencies().begin()->first == signature(rooted_path(3)));
    const auto c0 = rooted_ball_law(0.5, 0, n, 100, 3);
    REQUIRE(c0.frequencies().size() == 1);
    CHECK(c0.frequencies().begin()->first == signature(rooted_path(1)));
  }
}

TEST_CASE("infinite top levels match a long finite prefix") {
  // The top r levels of bst(sigma_N) stop changing once N is large enough.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    OneSidedStream s(0.6, rng);
    const auto top = infinite_top_levels(s, 3);
    s.extend_to(s.length() + 200);
    const auto full = bst_top_levels(s.prefix(), 3);
    REQUIRE(same_tree(top, full, true));
  }
}

TEST_CASE("exact census law matches sampled balls at n = 5") {
  const auto laws = oracle_enumerate(5, 0.5);
  for (int r : {1, 2}) {
    const auto ref = exact_census_law(laws, r);
    KahanSum mass;
    for (const auto& [sig, p] : ref) mass.add(p);
    CHECK(std::abs(mass.value() - 1.0) < 1e-12);
    EmpiricalDist<BallSignature> e;
    for (std::uint64_t t = 0; t < 50000; ++t) {
      Rng rng = Rng::child(77 + static_cast<std::uint64_t>(r), t);
      const auto tree = sample_mallows_tree(5, 0.5, rng);
      e.add(signature(ball(tree, static_cast<NodeId>(rng.below(5)), r)));
    }
    const auto res = chi_square_gof(e, ref);
    INFO("r=", r, " p=", res.p_value);
    CHECK(res.p_value > bonferroni(0.001, 2));
  }
}

TEST_CASE("ghp distortion examples") {
  Rng rng(1);
  CHECK(ghp_distortion(right_path(1), 0.5, kDefaultPairBudget, rng) == 0.0);
  CHECK(ghp_distortion(right_path(500), 0.0, kDefaultPairBudget, rng) == 0.0);
  CHECK(ghp_distortion(right_path(5000), 0.0, 1000, rng) == 0.0);
  const auto t = sample_mallows_tree(3000, 0.5, rng);
  const double d = ghp_distortion(t, 0.5, kDefaultPairBudget, rng);
  CHECK(d > 0.0);
  CHECK(d < 1.0);
}

TEST_CASE("lca distances agree with a parent walk") {
  Rng rng(6);
  const auto t = sample_mallows_tree(300, 0.7, rng);
  const LcaIndex idx(t);
  auto ancestors = [&](NodeId v) {
    std::vector<NodeId> out;
    for (; v != kNone; v = t.node(v).parent) out.push_back(v);
    return out;
  };
  for (int i = 0; i < 2000; ++i) {
    const auto a = static_cast<NodeId>(rng.below(t.size()));
    const auto b = static_cast<NodeId>(rng.below(t.size()));
    const auto pa = ancestors(a);
    const auto pb = ancestors(b);
    const std::set<NodeId> sa(pa.begin(), pa.end());
    std::int64_t db = 0;
    NodeId meet = kNone;
    for (auto v : pb) {
      if (sa.count(v)) { meet = v; break; }
      ++db;
    }
    const auto da = static_cast<std::int64_t>(std::find(pa.begin(), pa.end(), meet) - pa.begin());
    REQUIRE(idx.lca(a, b) == meet);
    REQUIRE(idx.distance(a, b) == da + db);
  }
}

TEST_CASE("spine block order is a permutation starting at the root") {
  Rng rng(9);
  const auto t = sample_mallows_tree(1000, 0.5, rng);
  auto order = spine_block_order(t);
  CHECK(order.front() == t.root());
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i) REQUIRE(order[i] == static_cast<NodeId>(i));
}

TEST_CASE("subtree sizes of a path") {
  const auto tau = subtree_sizes(right_path(4), 3);
  CHECK(tau.at("") == 1.0);
  CHECK(tau.at("1") == 0.75);
  CHECK(tau.at("0") == 0.0);
  CHECK(tau.at("111") == 0.25);
  CHECK(ssc_deviation(right_path(1000), 3) == doctest::Approx(0.003).epsilon(1e-12));
  CHECK(ssc_deviation(right_path(1), 0) == 0.0);
}

TEST_CASE("subtree size deficit is 1/n at occupied words") {
  Rng rng(12);
  for (double q : {0.3, 0.8}) {
    const auto t = sample_mallows_tree(997, q, rng);
    const int depth = 6;
    const auto tau = subtree_sizes(t, depth);
    const double inv_n = 1.0 / static_cast<double>(t.size());
    CHECK(tau.at("") == 1.0);
    CHECK(tau.at("0") + tau.at("1") == doctest::Approx(1.0 - inv_n).epsilon(1e-12));
    for (const auto& [w, x] : tau) {
      if (static_cast<int>(w.size()) == depth) continue;
      const double deficit = x - tau.at(w + "0") - tau.at(w + "1");
      const double expected = t.find(w) != kNone ? inv_n : 0.0;
      REQUIRE(std::abs(deficit - expected) < 1e-12);
    }
  }
}

TEST_CASE("phi at n = 0 is the identity") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    SpacedSequence g{-6, {}};
    for (int j = 0; j < 13; ++j) g.entries.push_back(1 + static_cast<std::int64_t>(rng.below(4)));
    CHECK(phi_shift(g, 0) == 0);
    CHECK(apply_phi(g, 0) == g);
  }
}

TEST_CASE("phi hand example") {
  // g_{-3..3} = 4, 3, 2, 1, 2, 5, 6
  const auto g = seq(-3, {4, 3, 2, 1, 2, 5, 6});
  CHECK(phi_shift(g, 1) == 1);
  const auto phi = apply_phi(g, 1);
  CHECK(phi.at(-3) == 3);
  CHECK(phi.at(-2) == 2);
  CHECK(phi.at(-1) == 1);
  CHECK(phi.at(0) == 2);
  CHECK(phi.at(1) == 5);
  CHECK(phi.at(2) == 6);
}

TEST_CASE("phi window sum and positivity") {
  Rng rng(14);
  for (int i = 0; i < 1000; ++i) {
    SpacedSequence g{-40, {}};
    for (int j = 0; j < 81; ++j) g.entries.push_back(1 + static_cast<std::int64_t>(rng.below(5)));
    const auto n = static_cast<std::int64_t>(rng.below(20));
    const auto s = phi_shift(g, n);
    const auto phi = apply_phi(g, n);
    std::int64_t lhs = 0, rhs = 0;
    for (std::int64_t k = -s - 1; k <= 0; ++k) lhs += phi.at(k);
    for (std::int64_t k = -1; k <= s; ++k) rhs += g.at(k);
    REQUIRE(lhs == rhs);
    for (auto x : phi.entries) REQUIRE(x >= 1);
  }
}

TEST_CASE("phi rejects short windows and bad entries") {
  CHECK_THROWS_AS(apply_phi(seq(-1, {1, 1, 1}), 5), std::out_of_range);
  CHECK_THROWS_AS(apply_phi(seq(0, {1, 1, 1}), 0), std::out_of_range);
  CHECK_THROWS_AS(apply_phi(seq(-3, {1, 0, 1, 1, 1, 1, 1}), 0), std::invalid_argument);
  CHECK_THROWS_AS(apply_phi(seq(-3, {1, 1, 1, 1, 1, 1, 1}), -1), std::invalid_argument);
}

TEST_CASE("phi invariance report") {
  const auto r0 = phi_invariance_test(0.5, 0, 1, 20000, 5, 0.05);
  CHECK(r0.params.at("tv_paired").get<double>() == 0.0);
  CHECK(r0.pass);
  const auto r = phi_invariance_test(0.5, 3, 1, 20000, 5, 0.05);
  CHECK(r.pass);
  const auto bad = phi_invariance_test(0.5, 3, 1, 20000, 5, 0.05, 0.3);
  CHECK(bad.statistic > 0.05);
  CHECK_FALSE(bad.pass);
}
