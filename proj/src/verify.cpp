#include "mallows/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "mallows/distributions.hpp"
#include "mallows/limits.hpp"
#include "mallows/oracle.hpp"
#include "mallows/parallel.hpp"
#include "mallows/permutations.hpp"
#include "mallows/trees.hpp"

namespace mallows {

std::uint64_t derive_seed(std::uint64_t master, const std::string& tag) {
  // FNV-1a, stable across platforms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix64(mix64(master) ^ h);
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ms(Clock::time_point start) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count());
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

template <class T>
std::vector<T> grid(const std::optional<T>& override, std::vector<T> defaults) {
  return override ? std::vector<T>{*override} : defaults;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

TestReport count_report(std::string name, std::uint64_t violations, std::uint64_t cases, std::uint64_t seed) {
  auto r = upper_bound_report(std::move(name), static_cast<double>(violations), 0.0, cases, seed);
  r.params["semantics"] = "violations == 0";
  return r;
}

std::vector<std::int64_t> shuffled(Rng& rng, std::size_t n) {
  std::vector<std::int64_t> v(n);
  std::iota(v.begin(), v.end(), std::int64_t{1});
  for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  return v;
}

std::set<std::string> words(const BinaryTree& t) {
  std::set<std::string> out;
  for (std::size_t v = 0; v < t.size(); ++v) out.insert(t.word(static_cast<NodeId>(v)));
  return out;
}

}  // namespace

std::vector<TestReport> verify_oracle(const VerifyConfig& c) {
  const auto ns = grid<std::int64_t>(c.n, {2, 3, 4, 5});
  const auto qs = grid<double>(c.q, {0.2, 0.5, 0.8});
  const auto trials = c.trials.value_or(200000);
  const double alpha = bonferroni(c.alpha, ns.size() * qs.size());
  std::vector<TestReport> out;
  for (auto n : ns) {
    if (n < 1 || n > kOracleMaxN) throw std::invalid_argument("verify oracle: n must lie in [1, 7]");
    for (double q : qs) {
      const auto start = Clock::now();
      const auto seed = derive_seed(c.seed, "oracle/" + std::to_string(n) + "/" + fmt(q));
      const auto laws = oracle_enumerate(static_cast<int>(n), q);
      const auto e = run_trials<EmpiricalDist<std::vector<std::int64_t>>>(
          trials, c.threads, seed, [&](Rng& rng, std::uint64_t, auto& acc) {
            acc.add(sample_mallows(static_cast<std::size_t>(n), q, rng));
          });
      auto r = chi_square_report("oracle", chi_square_gof(e, laws.permutations), alpha, trials, seed);
      r.params["n"] = n;
      r.params["q"] = q;
      r.runtime_ms = elapsed_ms(start);
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<TestReport> verify_imt(const VerifyConfig& c) {
  const double q = c.q.value_or(0.5);
  const int radius = c.radius.value_or(2);
  const auto trials = c.trials.value_or(100000);
  const auto joint_trials = 80 * trials;
  const double p = 1.0 - q;
  const auto slots = static_cast<std::size_t>(2 * radius + 1);
  std::vector<TestReport> out;

  // Per-slot marginals of the direct sampler.
  {
    const auto start = Clock::now();
    const auto seed = derive_seed(c.seed, "imt/direct");
    struct Acc {
      std::vector<EmpiricalDist<std::int64_t>> sizes;
      void merge(const Acc& o) {
        if (sizes.empty()) sizes.resize(o.sizes.size());
        for (std::size_t i = 0; i < o.sizes.size(); ++i) sizes[i].merge(o.sizes[i]);
      }
    };
    auto acc = run_trials<Acc>(trials, c.threads, seed, [&](Rng& rng, std::uint64_t, Acc& a) {
      if (a.sizes.empty()) a.sizes.resize(slots);
      const auto red = sample_redwood_direct(q, radius, rng);
      for (int k = -radius; k <= radius; ++k) a.sizes[static_cast<std::size_t>(k + radius)].add(red.subtree_size(k));
    });
    const double alpha = bonferroni(c.alpha, slots);
    const auto ms = elapsed_ms(start);
    for (int k = -radius; k <= radius; ++k) {
      const auto v = k == 0 ? GeomVariant::SizeBiased : GeomVariant::GeomZero;
      auto r = chi_square_report("imt_slot_size",
                                 chi_square_gof(acc.sizes[static_cast<std::size_t>(k + radius)], geometric_reference(v, p)),
                                 alpha, trials, seed);
      r.params["q"] = q;
      r.params["k"] = k;
      r.params["law"] = to_string(v);
      r.runtime_ms = ms;
      out.push_back(std::move(r));
    }
  }

  // Joint law of the window construction vs the exact product law.
  {
    const auto start = Clock::now();
    const auto seed = derive_seed(c.seed, "imt/two-sided");
    const auto e = run_trials<EmpiricalDist<std::vector<std::int64_t>>>(
        joint_trials, c.threads, seed, [&](Rng& rng, std::uint64_t, auto& acc) {
          auto t = sample_triplet(q, rng);
          const auto red = redwood_from_triplet(t, radius);
          std::vector<std::int64_t> key(slots);
          for (int k = -radius; k <= radius; ++k) key[static_cast<std::size_t>(k + radius)] = red.subtree_size(k);
          acc.add(key);
        });
    // Reference restricted to observed tuples; the rest counts as overflow,
    // which makes the distance exact.
    ReferenceLaw<std::vector<std::int64_t>> ref;
    for (const auto& [key, cnt] : e.counts()) {
      double pr = 1.0;
      for (int k = -radius; k <= radius; ++k) {
        pr *= pmf(k == 0 ? GeomVariant::SizeBiased : GeomVariant::GeomZero, p, key[static_cast<std::size_t>(k + radius)]);
      }
      ref.emplace_back(key, pr);
    }
    auto r = upper_bound_report("imt_joint_tv", tv_distance(e, ref), 0.02, joint_trials, seed);
    r.params["q"] = q;
    r.params["radius"] = radius;
    r.params["cells"] = e.counts().size();
    r.runtime_ms = elapsed_ms(start);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TestReport> verify_local(const VerifyConfig& c) {
  const auto qs = grid<double>(c.q, {0.3, 0.5, 0.8});
  const auto rs = grid<int>(c.radius, {1, 2});
  const auto n = c.n.value_or(100000);
  const auto trials = c.trials.value_or(100000);
  std::vector<TestReport> out;
  for (double q : qs) {
    const auto tree_seed = derive_seed(c.seed, "local/tree/" + fmt(q));
    Rng rng(tree_seed);
    const auto tree = sample_mallows_tree(static_cast<std::size_t>(n), q, rng);
    for (int r : rs) {
      const auto start = Clock::now();
      const auto seed = derive_seed(c.seed, "local/law/" + fmt(q) + "/" + std::to_string(r));
      const auto cen = census(tree, r);
      const auto law = redwood_ball_law(q, r, trials, seed, c.threads);
      auto rep = upper_bound_report("local_tv", tv_distance(cen.counts, law.counts), 0.02, trials, seed);
      rep.params["q"] = q;
      rep.params["radius"] = r;
      rep.params["n"] = n;
      rep.params["tree_seed"] = tree_seed;
      rep.params["census_types"] = cen.counts.counts().size();
      rep.params["limit_types"] = law.counts.counts().size();
      rep.runtime_ms = elapsed_ms(start);
      out.push_back(std::move(rep));
    }
  }
  return out;
}

std::vector<TestReport> verify_rooted(const VerifyConfig& c) {
  const double q = c.q.value_or(0.5);
  const int r = c.radius.value_or(2);
  const auto n = c.n.value_or(10000);
  const auto trials = c.trials.value_or(10000);
  const auto start = Clock::now();
  const auto seed = derive_seed(c.seed, "rooted/finite");
  const auto finite = rooted_ball_law(q, r, static_cast<std::uint64_t>(n), trials, seed, c.threads);
  const auto infinite = rooted_ball_law(q, r, 0, trials, derive_seed(c.seed, "rooted/infinite"), c.threads);
  auto rep = upper_bound_report("rooted_tv", tv_distance(finite.counts, infinite.counts), 0.02, trials, seed);
  rep.params["q"] = q;
  rep.params["radius"] = r;
  rep.params["n"] = n;
  rep.params["types"] = finite.counts.counts().size();
  rep.runtime_ms = elapsed_ms(start);
  return {rep};
}

std::vector<TestReport> verify_ghp(const VerifyConfig& c) {
  const double q = c.q.value_or(0.5);
  const auto n = c.n.value_or(100000);
  const auto small = std::max<std::int64_t>(2, n / 100);
  const auto trials = c.trials.value_or(20);
  std::vector<TestReport> out;

  auto medians = [&](std::int64_t size, const std::string& tag, std::uint64_t& seed) {
    seed = derive_seed(c.seed, tag);
    std::vector<double> d;
    for (std::uint64_t t = 0; t < trials; ++t) {
      Rng rng = Rng::child(seed, t);
      const auto tree = sample_mallows_tree(static_cast<std::size_t>(size), q, rng);
      d.push_back(ghp_distortion(tree, q, kDefaultPairBudget, rng));
    }
    return median(d);
  };

  const auto start = Clock::now();
  std::uint64_t seed_big = 0, seed_small = 0;
  const double big = medians(n, "ghp/large", seed_big);
  const double sm = medians(small, "ghp/small", seed_small);
  const auto ms = elapsed_ms(start);

  auto a = upper_bound_report("ghp_median", big, 0.05, trials, seed_big);
  a.params["q"] = q;
  a.params["n"] = n;
  a.params["pair_budget"] = kDefaultPairBudget;
  a.runtime_ms = ms;
  out.push_back(std::move(a));

  TestReport b;
  b.name = "ghp_trend";
  b.statistic = big - sm;
  b.threshold = 0.0;
  b.pass = b.statistic < 0.0;
  b.sample_size = trials;
  b.seed = seed_small;
  b.params["q"] = q;
  b.params["n_large"] = n;
  b.params["n_small"] = small;
  b.params["median_large"] = big;
  b.params["median_small"] = sm;
  b.params["semantics"] = "median(large) - median(small) < 0";
  b.runtime_ms = ms;
  out.push_back(std::move(b));

  const auto start0 = Clock::now();
  const auto seed0 = derive_seed(c.seed, "ghp/q0");
  Rng rng(seed0);
  const auto path = sample_mallows_tree(static_cast<std::size_t>(n), 0.0, rng);
  auto z = upper_bound_report("ghp_q0", ghp_distortion(path, 0.0, kDefaultPairBudget, rng), 0.0, 1, seed0);
  z.params["n"] = n;
  z.params["semantics"] = "statistic == 0";
  z.runtime_ms = elapsed_ms(start0);
  out.push_back(std::move(z));
  return out;
}

std::vector<TestReport> verify_ssc(const VerifyConfig& c) {
  const double q = c.q.value_or(0.5);
  const auto n = c.n.value_or(100000);
  const int depth = c.depth.value_or(3);
  const auto trials = c.trials.value_or(20);
  const double tol = 0.01;
  // 19 of 20 trials, scaled.
  const auto allowed = trials / 20;
  const auto start = Clock::now();
  const auto seed = derive_seed(c.seed, "ssc");
  std::vector<double> dev;
  std::uint64_t over = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::child(seed, t);
    dev.push_back(ssc_deviation(sample_mallows_tree(static_cast<std::size_t>(n), q, rng), depth));
    over += dev.back() > tol ? 1 : 0;
  }
  auto r = upper_bound_report("ssc_deviation", static_cast<double>(over), static_cast<double>(allowed), trials, seed);
  r.params["q"] = q;
  r.params["n"] = n;
  r.params["depth"] = depth;
  r.params["tolerance"] = tol;
  r.params["max_deviation"] = *std::max_element(dev.begin(), dev.end());
  r.params["median_deviation"] = median(dev);
  r.params["semantics"] = "trials above tolerance <= threshold";
  r.runtime_ms = elapsed_ms(start);
  return {r};
}

std::vector<TestReport> verify_phi(const VerifyConfig& c) {
  const double q = c.q.value_or(0.5);
  const auto ns = grid<std::int64_t>(c.n, {1, 3, 10});
  const auto window = c.window.value_or(1);
  const auto trials = c.trials.value_or(100000);
  std::vector<TestReport> out;
  for (auto n : ns) {
    out.push_back(phi_invariance_test(q, n, window, trials, derive_seed(c.seed, "phi/" + std::to_string(n)), 0.02,
                                      0.0, c.threads));
  }
  // Power: G_{-1} ~ GeomOne(0.3) breaks invariance and must be detected.
  const auto n_power = c.n.value_or(3);
  auto bad = phi_invariance_test(q, n_power, window, trials, derive_seed(c.seed, "phi/perturbed"), 0.05, 0.3,
                                 c.threads);
  bad.name = "phi_power";
  bad.pass = bad.statistic > bad.threshold;
  bad.params["semantics"] = "perturbed statistic > threshold";
  out.push_back(std::move(bad));
  return out;
}

std::vector<TestReport> verify_records(const VerifyConfig& c) {
  const auto qs = grid<double>(c.q, {0.3, 0.5, 0.8});
  const auto n = c.n.value_or(100000);
  std::vector<TestReport> out;
  for (double q : qs) {
    const auto start = Clock::now();
    const auto seed = derive_seed(c.seed, "records/" + fmt(q));
    OneSidedStream s(q, Rng(seed));
    s.extend_to(static_cast<std::size_t>(n));
    const std::vector<std::int64_t> head(s.prefix().begin(), s.prefix().begin() + n);
    const auto rn = static_cast<std::int64_t>(records(PermWindow::finite(head)).count());
    const auto fn = free_spaces(s, static_cast<std::size_t>(n));
    const auto ms = elapsed_ms(start);
    auto a = upper_bound_report("records_rate", std::abs(static_cast<double>(rn) / static_cast<double>(n) - (1.0 - q)), 0.01, 1, seed);
    a.params["q"] = q;
    a.params["n"] = n;
    a.params["records"] = rn;
    a.runtime_ms = ms;
    out.push_back(std::move(a));
    auto b = upper_bound_report("free_space_rate", static_cast<double>(fn) / static_cast<double>(n), 0.005, 1, seed);
    b.params["q"] = q;
    b.params["n"] = n;
    b.params["free_spaces"] = fn;
    b.runtime_ms = ms;
    out.push_back(std::move(b));
  }

  const double q = c.q.value_or(0.5);
  const auto streams = c.trials.value_or(100);
  const std::size_t horizon = 1000;
  const auto start = Clock::now();
  const auto seed = derive_seed(c.seed, "records/bound");
  std::uint64_t violations = 0;
  for (std::uint64_t t = 0; t < streams; ++t) {
    OneSidedStream s(q, Rng::child(seed, t));
    const auto e = incomplete_left_subtrees_profile(s, horizon);
    std::int64_t mx = 0;
    for (std::size_t m = 1; m <= horizon; ++m) {
      mx = std::max(mx, s.at(m));
      violations += e[m - 1] > mx - static_cast<std::int64_t>(m) ? 1 : 0;
    }
  }
  auto r = count_report("incomplete_subtree_bound", violations, streams * horizon, seed);
  r.params["q"] = q;
  r.params["horizon"] = horizon;
  r.params["streams"] = streams;
  r.runtime_ms = elapsed_ms(start);
  out.push_back(std::move(r));
  return out;
}

namespace {

// Recursive pivot split, written out as a word -> label map.
void bst_reference(const std::vector<std::int64_t>& x, const std::string& prefix,
                   std::map<std::string, std::int64_t>& out) {
  if (x.empty()) return;
  out[prefix] = x.front();
  std::vector<std::int64_t> lo, hi;
  for (std::size_t i = 1; i < x.size(); ++i) (x[i] < x.front() ? lo : hi).push_back(x[i]);
  bst_reference(lo, prefix + "0", out);
  bst_reference(hi, prefix + "1", out);
}

std::map<std::string, std::int64_t> labeled_words(const BinaryTree& t) {
  std::map<std::string, std::int64_t> out;
  for (std::size_t v = 0; v < t.size(); ++v) out[t.word(static_cast<NodeId>(v))] = *t.node(static_cast<NodeId>(v)).label;
  return out;
}

// Number of vertices of bst(sigma_inf) in spine blocks 0..R_n-1 that are
// missing from bst(sigma_n), and the number of blocks affected.
std::pair<std::int64_t, std::int64_t> literal_free(OneSidedStream& s, std::size_t n) {
  s.extend_to(n);
  const std::vector<std::int64_t> head(s.prefix().begin(), s.prefix().begin() + static_cast<std::ptrdiff_t>(n));
  const auto m = *std::max_element(head.begin(), head.end());
  std::size_t big = n;
  for (std::int64_t col = 1; col <= m; ++col) big = std::max(big, s.position_of(col));
  const std::vector<std::int64_t> full(s.prefix().begin(), s.prefix().begin() + static_cast<std::ptrdiff_t>(big));
  const auto blocks = static_cast<std::int64_t>(records(PermWindow::finite(head)).count());
  auto per_block = [&](const BinaryTree& t) {
    std::map<std::int64_t, std::set<std::string>> out;
    for (const auto& w : words(t)) {
      const auto k = w.find('0');
      if (k != std::string::npos && static_cast<std::int64_t>(k) < blocks) out[static_cast<std::int64_t>(k)].insert(w);
    }
    return out;
  };
  auto a = per_block(build_bst(head));
  auto b = per_block(build_bst(full));
  std::int64_t diff = 0, affected = 0;
  for (std::int64_t k = 0; k < blocks; ++k) {
    std::int64_t extra = 0;
    for (const auto& w : b[k]) extra += a[k].count(w) ? 0 : 1;
    diff += extra;
    affected += extra > 0 ? 1 : 0;
  }
  return {diff, affected};
}

RootedTree random_rooted(Rng& rng, std::size_t n) {
  RootedTree t;
  t.children.resize(n);
  for (std::size_t v = 1; v < n; ++v) t.children[rng.below(v)].push_back(static_cast<std::int32_t>(v));
  return t;
}

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
    for (auto ch : kids) out.children[static_cast<std::size_t>(perm[v])].push_back(perm[static_cast<std::size_t>(ch)]);
  }
  return out;
}

std::string ahu(const RootedTree& t, std::int32_t v = 0) {
  std::vector<std::string> parts;
  for (auto ch : t.children[static_cast<std::size_t>(v)]) parts.push_back(ahu(t, ch));
  std::sort(parts.begin(), parts.end());
  std::string s = "(";
  for (const auto& p : parts) s += p;
  return s + ")";
}

}  // namespace

std::vector<TestReport> verify_invariants(const VerifyConfig& c) {
  std::vector<TestReport> out;
  auto check = [&](const std::string& name, auto body) {
    const auto start = Clock::now();
    const auto seed = derive_seed(c.seed, "invariants/" + name);
    std::uint64_t cases = 0, bad = 0;
    body(seed, cases, bad);
    auto r = count_report("invariant_" + name, bad, cases, seed);
    r.runtime_ms = elapsed_ms(start);
    out.push_back(std::move(r));
  };

  check("bst_constructions", [](std::uint64_t seed, std::uint64_t& cases, std::uint64_t& bad) {
    Rng rng(seed);
    for (int i = 0; i < 1000; ++i, ++cases) {
      const auto x = shuffled(rng, rng.below(80));
      std::map<std::string, std::int64_t> ref;
      bst_reference(x, "", ref);
      const auto a = build_bst(x);
      const auto b = build_bst_insertion(x);
      bad += (labeled_words(a) != ref || !same_tree(a, b)) ? 1 : 0;
    }
  });

  check("monotone_coupling", [](std::uint64_t seed, std::uint64_t& cases, std::uint64_t& bad) {
    for (std::uint64_t t = 0; t < 20; ++t) {
      OneSidedStream s(0.6, Rng::child(seed, t));
      s.extend_to(300);
      std::set<std::string> prev;
      for (std::size_t n = 1; n <= 300; ++n, ++cases) {
        const std::vector<std::int64_t> head(s.prefix().begin(), s.prefix().begin() + static_cast<std::ptrdiff_t>(n));
        auto cur = words(build_bst(head));
        bad += std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()) ? 0 : 1;
        prev = std::move(cur);
      }
    }
  });

  check("free_space_definitions", [](std::uint64_t seed, std::uint64_t& cases, std::uint64_t& bad) {
    for (std::uint64_t t = 0; t < 20; ++t) {
      OneSidedStream s(0.5, Rng::child(seed, t));
      const auto e = incomplete_left_subtrees_profile(s, 300);
      for (std::size_t n = 1; n <= 300; n += (n < 40 ? 1 : 13), ++cases) {
        const auto [diff, affected] = literal_free(s, n);
        bad += (diff != free_spaces(s, n) || affected != e[n - 1]) ? 1 : 0;
      }
    }
  });

  check("srr_cross_validation", [](std::uint64_t seed, std::uint64_t& cases, std::uint64_t& bad) {
    const std::size_t depth = 6;
    for (std::uint64_t t = 0; t < 100; ++t, ++cases) {
      Rng rng = Rng::child(seed, t);
      auto tr = sample_triplet(0.5, rng);
      const auto srr = srr_from_triplet(tr, depth);
      const auto w = assemble_two_sided(tr, -400, 400);
      const auto rr = records(w);
      std::vector<std::int64_t> inside;
      for (auto i : rr.indices) {
        if (i >= srr.indices.front() && i <= srr.indices.back()) inside.push_back(i);
      }
      bool ok = inside == srr.indices && srr.values[depth - 1] <= 0 && srr.values[depth] > 0;
      for (std::size_t i = 0; ok && i < srr.count(); ++i) ok = w.at(srr.indices[i]) == srr.values[i];
      bad += ok ? 0 : 1;
    }
  });

  check("window_doubling", [](std::uint64_t seed, std::uint64_t& cases, std::uint64_t& bad) {
    for (std::uint64_t t = 0; t < 100; ++t) {
      Rng rng = Rng::child(seed, t);
      auto tr = sample_triplet(0.5, rng);
      for (std::int64_t h = 8; h <= 64; h *= 2) {
        RedwoodTree r;
        try {
          r = build_redwood(assemble_two_sided(tr, -h, h), 2);
        } catch (const InsufficientWindow&) {
          continue;
        }
        if (!r.stabilized_range) continue;
        ++cases;
        const auto big = build_redwood(assemble_two_sided(tr, -2 * h, 2 * h), 2);
        bool ok = big.stabilized_range.has_value();
        for (std::int64_t k = -2; ok && k <= 2; ++k) ok = same_tree(r.left_subtrees.at(k), big.left_subtrees.at(k));
        bad += ok ? 0 : 1;
      }
    }
  });

  check("signature_invariance", [](std::uint64_t seed, std::uint64_t& cases, std::uint64_t& bad) {
    Rng rng(seed);
    for (int i = 0; i < 1000; ++i, ++cases) {
      const auto t = random_rooted(rng, 1 + rng.below(40));
      bad += signature(scramble(t, rng)) == signature(t) ? 0 : 1;
    }
  });

  check("signature_injectivity", [](std::uint64_t, std::uint64_t& cases, std::uint64_t& bad) {
    const std::size_t classes[] = {1, 1, 2, 4, 9, 20, 48};
    for (int n = 1; n <= 7; ++n) {
      std::map<std::string, std::string> by_ahu, by_sig;
      std::vector<int> parent(static_cast<std::size_t>(n), 0);
      std::function<void(int)> rec = [&](int v) {
        if (v == n) {
          RootedTree t;
          t.children.resize(static_cast<std::size_t>(n));
          for (int u = 1; u < n; ++u) t.children[static_cast<std::size_t>(parent[static_cast<std::size_t>(u)])].push_back(u);
          const auto a = ahu(t);
          const auto s = signature(t).code;
          ++cases;
          bad += (by_ahu.emplace(a, s).first->second != s || by_sig.emplace(s, a).first->second != a) ? 1 : 0;
          return;
        }
        for (int p = 0; p < v; ++p) {
          parent[static_cast<std::size_t>(v)] = p;
          rec(v + 1);
        }
      };
      rec(1);
      bad += by_ahu.size() == classes[n - 1] ? 0 : 1;
    }
  });

  check("mirror_involution", [](std::uint64_t seed, std::uint64_t& cases, std::uint64_t& bad) {
    Rng rng(seed);
    for (int i = 0; i < 1000; ++i, ++cases) {
      const auto t = build_bst(shuffled(rng, rng.below(80)));
      const auto m = mirror(t);
      const auto lab = m.inorder_labels();
      bad += (same_tree(mirror(m), t) && std::is_sorted(lab.begin(), lab.end())) ? 0 : 1;
    }
  });

  check("phi_identity", [](std::uint64_t seed, std::uint64_t& cases, std::uint64_t& bad) {
    Rng rng(seed);
    for (int i = 0; i < 1000; ++i, ++cases) {
      SpacedSequence g{-6, {}};
      for (int j = 0; j < 13; ++j) g.entries.push_back(sample(GeomVariant::GeomOne, 0.5, rng));
      bad += apply_phi(g, 0) == g ? 0 : 1;
    }
  });

  check("phi_window_sum", [](std::uint64_t seed, std::uint64_t& cases, std::uint64_t& bad) {
    Rng rng(seed);
    for (int i = 0; i < 1000; ++i, ++cases) {
      SpacedSequence g{-40, {}};
      for (int j = 0; j < 81; ++j) g.entries.push_back(1 + static_cast<std::int64_t>(rng.below(5)));
      const auto n = static_cast<std::int64_t>(rng.below(20));
      const auto s = phi_shift(g, n);
      const auto phi = apply_phi(g, n);
      std::int64_t lhs = 0, rhs = 0;
      for (std::int64_t k = -s - 1; k <= 0; ++k) lhs += phi.at(k);
      for (std::int64_t k = -1; k <= s; ++k) rhs += g.at(k);
      const bool positive = std::all_of(phi.entries.begin(), phi.entries.end(), [](auto x) { return x >= 1; });
      bad += (lhs == rhs && positive) ? 0 : 1;
    }
  });
  return out;
}

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names = {"oracle", "records", "invariants", "imt", "local",
                                                 "rooted", "ghp",     "ssc",        "phi"};
  return names;
}

std::vector<TestReport> verify(const std::string& suite, const VerifyConfig& c) {
  static const std::map<std::string, std::function<std::vector<TestReport>(const VerifyConfig&)>> table = {
      {"oracle", verify_oracle}, {"records", verify_records}, {"invariants", verify_invariants},
      {"imt", verify_imt},       {"local", verify_local},     {"rooted", verify_rooted},
      {"ghp", verify_ghp},       {"ssc", verify_ssc},         {"phi", verify_phi}};
  if (suite == "all") {
    std::vector<TestReport> out;
    for (const auto& name : verify_suites()) {
      auto part = table.at(name)(c);
      out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
  }
  const auto it = table.find(suite);
  if (it == table.end()) throw std::invalid_argument("unknown verify suite: " + suite);
  return it->second(c);
}

}  // namespace mallows
