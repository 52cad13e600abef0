#include "mallows/limits.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mallows/parallel.hpp"

namespace mallows {

std::string BallSignature::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(code.size() * 2);
  for (unsigned char c : code) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

BallSignature BallSignature::from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex signature");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bad hex digit");
  };
  BallSignature s;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    s.code.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  }
  return s;
}

BallSignature signature(const RootedTree& t) {
  if (t.size() == 0) throw std::invalid_argument("signature of an empty tree");
  // Children always carry larger ids than their parent in trees built here,
  // but do not rely on it: order vertices by BFS first.
  std::vector<std::int32_t> order{0};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (auto c : t.children[static_cast<std::size_t>(order[i])]) order.push_back(c);
  }
  if (order.size() != t.size()) throw std::invalid_argument("signature: not a tree rooted at 0");
  std::vector<std::string> code(t.size());
  std::vector<std::string> kids;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& ch = t.children[static_cast<std::size_t>(*it)];
    if (ch.size() > 255 - '0') throw std::invalid_argument("signature: degree too large");
    kids.clear();
    for (auto c : ch) kids.push_back(std::move(code[static_cast<std::size_t>(c)]));
    std::sort(kids.begin(), kids.end());
    auto& s = code[static_cast<std::size_t>(*it)];
    s.push_back(static_cast<char>(static_cast<unsigned char>('0' + ch.size())));
    for (auto& k : kids) s += k;
  }
  return BallSignature{std::move(code[0])};
}

RootedTree ball(const BinaryTree& t, NodeId v, int r, const std::vector<NodeId>& open_ends) {
  if (v < 0 || static_cast<std::size_t>(v) >= t.size()) throw std::out_of_range("ball: vertex not in tree");
  if (r < 0) throw std::invalid_argument("ball: negative radius");
  RootedTree out;
  struct Entry {
    NodeId node;
    NodeId from;
    int dist;
  };
  std::vector<Entry> queue{{v, kNone, 0}};
  out.children.emplace_back();
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const auto [u, from, d] = queue[i];
    if (d == r) continue;
    if (std::find(open_ends.begin(), open_ends.end(), u) != open_ends.end()) {
      throw std::out_of_range("ball: radius reaches beyond the realized spine");
    }
    const auto& n = t.node(u);
    for (const auto w : {n.parent, n.left, n.right}) {
      if (w == kNone || w == from) continue;
      out.children[i].push_back(static_cast<std::int32_t>(queue.size()));
      queue.push_back({w, u, d + 1});
      out.children.emplace_back();
    }
  }
  return out;
}

RootedTree ball(const RedwoodTree& t, std::int64_t k, const std::string& word, int r) {
  if (k < t.k_min || k > t.k_max) throw std::out_of_range("ball: spine index outside the realized range");
  if (!word.empty() && word.front() != '0') throw std::invalid_argument("ball: off-spine words start with 0");
  const auto flat = flatten(t);
  NodeId v = flat.spine[static_cast<std::size_t>(k - t.k_min)];
  for (char c : word) {
    v = c == '1' ? flat.tree.node(v).right : flat.tree.node(v).left;
    if (v == kNone) throw std::out_of_range("ball: address not in tree");
  }
  return ball(flat.tree, v, r, {flat.spine.front(), flat.spine.back()});
}

std::map<BallSignature, double> CensusResult::frequencies() const {
  std::map<BallSignature, double> out;
  for (const auto& [sig, c] : counts.counts()) out[sig] = static_cast<double>(c) / static_cast<double>(counts.total());
  return out;
}

CensusResult census(const BinaryTree& t, int r) {
  CensusResult out;
  out.radius = r;
  for (std::size_t v = 0; v < t.size(); ++v) out.counts.add(signature(ball(t, static_cast<NodeId>(v), r)));
  return out;
}

namespace {

struct CensusAcc {
  EmpiricalDist<BallSignature> dist;
  void merge(const CensusAcc& o) { dist.merge(o.dist); }
};

}  // namespace

CensusResult redwood_ball_law(double q, int r, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  if (r < 0) throw std::invalid_argument("negative radius");
  auto acc = run_trials<CensusAcc>(trials, threads, seed, [&](Rng& rng, std::uint64_t, CensusAcc& a) {
    const auto red = sample_redwood_direct(q, r, rng);
    const auto& y0 = red.left_subtrees.at(0);
    const auto pick = rng.below(y0.size() + 1);
    const auto word = pick == 0 ? std::string{} : "0" + y0.word(static_cast<NodeId>(pick - 1));
    a.dist.add(signature(ball(red, 0, word, r)));
  });
  CensusResult out;
  out.radius = r;
  out.counts = std::move(acc.dist);
  return out;
}

BinaryTree infinite_top_levels(OneSidedStream& s, int r, std::size_t cap) {
  const auto rec = stream_records(s, static_cast<std::size_t>(r) + 1);
  const auto last = s.at(rec.back());
  while (s.min_unused() <= last) {
    if (s.length() >= cap) throw std::runtime_error("infinite_top_levels: stabilization cap exceeded");
    s.extend_to(s.length() + 1);
  }
  return bst_top_levels(s.prefix(), r);
}

CensusResult rooted_ball_law(double q, int r, std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                             unsigned threads, std::size_t cap) {
  if (r < 0) throw std::invalid_argument("negative radius");
  auto acc = run_trials<CensusAcc>(trials, threads, seed, [&](Rng& rng, std::uint64_t, CensusAcc& a) {
    OneSidedStream s(q, rng.split());
    BinaryTree top;
    if (n == 0) {
      top = infinite_top_levels(s, r, cap);
    } else {
      s.extend_to(n);
      top = bst_top_levels(s.prefix(), r);
    }
    a.dist.add(signature(ball(top, top.root(), r)));
  });
  CensusResult out;
  out.radius = r;
  out.counts = std::move(acc.dist);
  return out;
}

std::vector<NodeId> spine_block_order(const BinaryTree& t) {
  std::vector<NodeId> order;
  order.reserve(t.size());
  for (NodeId s = t.root(); s != kNone; s = t.node(s).right) {
    order.push_back(s);
    const auto l = t.node(s).left;
    if (l == kNone) continue;
    const auto start = order.size();
    order.push_back(l);
    for (std::size_t i = start; i < order.size(); ++i) {
      const auto& n = t.node(order[i]);
      if (n.left != kNone) order.push_back(n.left);
      if (n.right != kNone) order.push_back(n.right);
    }
  }
  return order;
}

LcaIndex::LcaIndex(const BinaryTree& t) : depth_(t.size(), 0) {
  const auto n = t.size();
  int levels = 1;
  while ((std::size_t{1} << levels) < n) ++levels;
  up_.assign(static_cast<std::size_t>(levels), std::vector<NodeId>(n, kNone));
  for (const auto v : t.preorder()) {
    const auto p = t.node(v).parent;
    up_[0][static_cast<std::size_t>(v)] = p == kNone ? v : p;
    if (p != kNone) depth_[static_cast<std::size_t>(v)] = depth_[static_cast<std::size_t>(p)] + 1;
  }
  for (std::size_t j = 1; j < up_.size(); ++j) {
    for (std::size_t v = 0; v < n; ++v) up_[j][v] = up_[j - 1][static_cast<std::size_t>(up_[j - 1][v])];
  }
}

NodeId LcaIndex::lca(NodeId a, NodeId b) const {
  if (depth(a) < depth(b)) std::swap(a, b);
  auto diff = depth(a) - depth(b);
  for (std::size_t j = 0; diff > 0; ++j, diff >>= 1) {
    if (diff & 1) a = up_[j][static_cast<std::size_t>(a)];
  }
  if (a == b) return a;
  for (std::size_t j = up_.size(); j-- > 0;) {
    const auto x = up_[j][static_cast<std::size_t>(a)];
    const auto y = up_[j][static_cast<std::size_t>(b)];
    if (x != y) {
      a = x;
      b = y;
    }
  }
  return up_[0][static_cast<std::size_t>(a)];
}

double ghp_distortion(const BinaryTree& t, double q, std::uint64_t pair_budget, Rng& rng) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("q must lie in [0, 1)");
  const auto n = t.size();
  if (n < 2) return 0.0;
  const auto order = spine_block_order(t);
  const LcaIndex lca(t);
  const double scale = (1.0 - q) * static_cast<double>(n);
  double worst = 0.0;
  auto visit = [&](std::size_t i, std::size_t j) {
    const auto d = static_cast<double>(lca.distance(order[i], order[j]));
    const auto gap = static_cast<double>(i > j ? i - j : j - i);
    worst = std::max(worst, std::abs(d - (1.0 - q) * gap) / scale);
  };
  const auto nn = static_cast<std::uint64_t>(n);
  if (nn <= pair_budget / nn) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) visit(i, j);
    }
  } else {
    for (std::uint64_t p = 0; p < pair_budget; ++p) visit(rng.below(nn), rng.below(nn));
  }
  return worst;
}

std::map<std::string, double> subtree_sizes(const BinaryTree& t, int depth) {
  if (t.empty()) throw std::invalid_argument("subtree_sizes of an empty tree");
  if (depth < 0) throw std::invalid_argument("negative depth");
  const auto sizes = t.subtree_sizes();
  const auto n = static_cast<double>(t.size());
  std::map<std::string, double> out;
  // Breadth-first over all words, tracking the node (or kNone).
  std::vector<std::pair<std::string, NodeId>> level{{"", t.root()}};
  for (int d = 0; d <= depth; ++d) {
    std::vector<std::pair<std::string, NodeId>> next;
    for (const auto& [w, v] : level) {
      out[w] = v == kNone ? 0.0 : static_cast<double>(sizes[static_cast<std::size_t>(v)]) / n;
      if (d == depth) continue;
      next.emplace_back(w + "0", v == kNone ? kNone : t.node(v).left);
      next.emplace_back(w + "1", v == kNone ? kNone : t.node(v).right);
    }
    level = std::move(next);
  }
  return out;
}

double ssc_deviation(const BinaryTree& t, int depth) {
  double worst = 0.0;
  for (const auto& [w, tau] : subtree_sizes(t, depth)) {
    const double psi = w.find('0') == std::string::npos ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(tau - psi));
  }
  return worst;
}

std::int64_t SpacedSequence::at(std::int64_t i) const {
  if (i < lo() || i > hi()) {
    throw std::out_of_range("index " + std::to_string(i) + " outside window [" + std::to_string(lo()) + ", " +
                            std::to_string(hi()) + "]");
  }
  return entries[static_cast<std::size_t>(i - offset)];
}

std::int64_t phi_shift(const SpacedSequence& g, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("phi: n must be non-negative");
  std::int64_t sum = 0;
  for (std::int64_t i = 0;; ++i) {
    if (i > g.hi()) throw std::out_of_range("phi: window too short to locate the shift");
    sum += g.at(i);
    if (sum > n) return i;
  }
}

SpacedSequence apply_phi(const SpacedSequence& g, std::int64_t n) {
  for (auto x : g.entries) {
    if (x < 1) throw std::invalid_argument("phi: entries must be >= 1");
  }
  const auto s = phi_shift(g, n);
  if (g.lo() > -s - 2 || g.hi() < s + 1) {
    throw std::out_of_range("phi: window must cover [" + std::to_string(-s - 2) + ", " + std::to_string(s + 1) + "]");
  }
  std::int64_t head = 0;  // g_0 + ... + g_{s-1}
  for (std::int64_t i = 0; i < s; ++i) head += g.at(i);

  SpacedSequence out;
  out.offset = g.lo() - s;
  out.entries.resize(g.entries.size());
  for (auto i = out.lo(); i <= out.hi(); ++i) {
    std::int64_t v = 0;
    if (i >= 1 || i <= -s - 2) {
      v = g.at(s + i);
    } else if (i == 0) {
      v = head + g.at(s) - n;
    } else if (s == 0) {  // i == -1
      v = n + g.at(-1);
    } else if (i == -1) {
      v = n + 1 - head;
    } else if (i == -s - 1) {
      v = g.at(0) + g.at(-1) - 1;
    } else {
      v = g.at(s + i + 1);
    }
    out.entries[static_cast<std::size_t>(i - out.offset)] = v;
  }
  return out;
}

namespace {

struct PhiAcc {
  EmpiricalDist<std::vector<std::int64_t>> before;
  EmpiricalDist<std::vector<std::int64_t>> after;
  void merge(const PhiAcc& o) {
    before.merge(o.before);
    after.merge(o.after);
  }
};

}  // namespace

TestReport phi_invariance_test(double q, std::int64_t n, std::int64_t window, std::uint64_t trials,
                               std::uint64_t seed, double threshold, double perturb_minus_one, unsigned threads) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("phi_invariance_test: q must lie in (0, 1)");
  if (n < 0 || window < 0) throw std::invalid_argument("phi_invariance_test: negative n or window");
  const auto start = std::chrono::steady_clock::now();
  const double p = 1.0 - q;
  auto law_at = [&](std::int64_t i) { return (perturb_minus_one > 0.0 && i == -1) ? perturb_minus_one : p; };
  const auto half = n + window + 3;

  auto acc = run_trials<PhiAcc>(trials, threads, seed, [&](Rng& rng, std::uint64_t, PhiAcc& a) {
    SpacedSequence g;
    g.offset = -half;
    g.entries.resize(static_cast<std::size_t>(2 * half + 1));
    for (auto i = -half; i <= half; ++i) {
      g.entries[static_cast<std::size_t>(i + half)] = sample(GeomVariant::GeomOne, law_at(i), rng);
    }
    const auto phi = apply_phi(g, n);
    std::vector<std::int64_t> x, y;
    for (auto i = -window; i <= window; ++i) {
      x.push_back(g.at(i));
      y.push_back(phi.at(i));
    }
    a.before.add(x);
    a.after.add(y);
  });

  // Exact product law of (G_i)_{|i| <= window}.
  const auto dims = static_cast<std::size_t>(2 * window + 1);
  const double per_coord = std::pow(0.999, 1.0 / static_cast<double>(dims)) - 1e-6;
  std::vector<ReferenceLaw<std::int64_t>> marg;
  for (auto i = -window; i <= window; ++i) {
    marg.push_back(geometric_reference(GeomVariant::GeomOne, law_at(i), std::max(0.9999, per_coord)));
  }
  ReferenceLaw<std::vector<std::int64_t>> joint{{{}, 1.0}};
  for (const auto& m : marg) {
    ReferenceLaw<std::vector<std::int64_t>> next;
    next.reserve(joint.size() * m.size());
    for (const auto& [key, pk] : joint) {
      for (const auto& [v, pv] : m) {
        auto k2 = key;
        k2.push_back(v);
        next.emplace_back(std::move(k2), pk * pv);
      }
    }
    joint = std::move(next);
  }
  joint = truncate_by_mass(std::move(joint), 0.999);
  KahanSum kept;
  for (const auto& kv : joint) kept.add(kv.second);
  const double missing = std::max(0.0, 1.0 - kept.value());

  TestReport r;
  r.name = perturb_minus_one > 0.0 ? "phi_invariance_perturbed" : "phi_invariance";
  r.statistic = tv_distance(acc.after, joint) + missing;
  r.threshold = threshold;
  r.pass = r.statistic < threshold;
  r.sample_size = trials;
  r.seed = seed;
  r.params["q"] = q;
  r.params["n"] = n;
  r.params["window"] = window;
  r.params["reference_cells"] = joint.size();
  r.params["truncated_mass"] = missing;
  r.params["tv_paired"] = tv_distance(acc.before, acc.after);
  if (perturb_minus_one > 0.0) r.params["perturb_minus_one"] = perturb_minus_one;
  r.params["semantics"] = "statistic < threshold";
  r.runtime_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
  return r;
}

}  // namespace mallows
