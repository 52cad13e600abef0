#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mallows/limits.hpp"
#include "mallows/permutations.hpp"
#include "mallows/trees.hpp"
#include "mallows/verify.hpp"

using namespace mallows;
using nlohmann::json;

namespace {

struct Options {
  std::optional<double> q;
  std::optional<std::int64_t> n;
  std::optional<int> radius;
  std::optional<int> depth;
  std::optional<std::uint64_t> trials;
  std::optional<std::int64_t> window;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string format = "json";
  std::string out;
  std::string suite;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_flags(CLI::App* app, Options& o) {
  app->add_option("--q", o.q, "Mallows parameter");
  app->add_option("--n", o.n, "size")->check(CLI::NonNegativeNumber);
  app->add_option("--radius", o.radius, "ball or spine radius")->check(CLI::NonNegativeNumber);
  app->add_option("--depth", o.depth, "subtree-size depth")->check(CLI::NonNegativeNumber);
  app->add_option("--trials", o.trials, "Monte Carlo trials");
  app->add_option("--window", o.window, "two-sided window half-width")->check(CLI::NonNegativeNumber);
  app->add_option("--seed", o.seed, "master seed (default: $MALLOWS_SEED, else 0)");
  app->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", o.out, "output path (default: stdout)");
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("MALLOWS_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("MALLOWS_SEED is not a non-negative integer");
  }
  return 0;
}

double plain_q(const Options& o) {
  const double q = o.q.value_or(0.5);
  if (!(q >= 0.0 && q < 1.0)) throw UsageError("--q must lie in [0, 1) for this subcommand");
  return q;
}

void require_json(const Options& o, const char* what) {
  if (o.format != "json") throw UsageError(std::string(what) + " output is structured; use --format json");
}

int sample_perm(const Options& o, std::ostream& os) {
  const double q = plain_q(o);
  const auto seed = resolve_seed(o);
  Rng rng(seed);
  PermWindow w;
  if (o.n && o.window) throw UsageError("sample-perm takes either --n (finite) or --window (two-sided), not both");
  if (o.window) {
    auto t = sample_triplet(q, rng);
    w = assemble_two_sided(t, -*o.window, *o.window);
  } else {
    if (!o.n) throw UsageError("sample-perm needs --n or --window");
    w = PermWindow::finite(sample_mallows(static_cast<std::size_t>(*o.n), q, rng));
  }
  if (o.format == "csv") {
    os << "index,value\n";
    for (std::size_t i = 0; i < w.size(); ++i) os << w.offset + static_cast<std::int64_t>(i) << ',' << w.values[i] << '\n';
    return 0;
  }
  json j;
  j["q"] = q;
  j["seed"] = seed;
  j["offset"] = w.offset;
  j["values"] = w.values;
  os << j.dump() << '\n';
  return 0;
}

BinaryTree finite_tree(const Options& o, double q, Rng& rng) {
  // q > 1 goes through the mirror inside sample_mallows_tree.
  if (!(q >= 0.0) || q == 1.0) throw UsageError("--q must be non-negative and different from 1");
  return sample_mallows_tree(static_cast<std::size_t>(*o.n), q, rng);
}

int build_tree(const Options& o, std::ostream& os) {
  require_json(o, "build-tree");
  const auto seed = resolve_seed(o);
  Rng rng(seed);
  json j;
  j["seed"] = seed;
  if (o.n) {
    const double q = o.q.value_or(0.5);
    j["q"] = q;
    j["n"] = *o.n;
    j["tree"] = serialize(finite_tree(o, q, rng));
  } else {
    // Redwood limit around the root spine node.
    const double q = plain_q(o);
    const int radius = o.radius.value_or(2);
    auto t = sample_triplet(q, rng);
    RedwoodTree red;
    if (o.window) {
      try {
        red = build_redwood(assemble_two_sided(t, -*o.window, *o.window), radius);
      } catch (const InsufficientWindow& e) {
        throw UsageError(std::string(e.what()) + "; increase --window or omit it to grow the window automatically");
      }
      if (!red.stabilized_range) throw UsageError("window too small to certify the subtrees; increase --window");
    } else {
      red = redwood_from_triplet(t, radius);
    }
    j["q"] = q;
    j["radius"] = radius;
    j["k_min"] = red.k_min;
    j["k_max"] = red.k_max;
    json subs = json::object();
    for (const auto& [k, sub] : red.left_subtrees) subs[std::to_string(k)] = serialize(sub);
    j["left_subtrees"] = subs;
  }
  os << j.dump() << '\n';
  return 0;
}

int run_census(const Options& o, std::ostream& os) {
  if (!o.n) throw UsageError("census needs --n");
  if (*o.n < 1) throw UsageError("census needs --n >= 1");
  const auto seed = resolve_seed(o);
  Rng rng(seed);
  const double q = o.q.value_or(0.5);
  const int r = o.radius.value_or(1);
  const auto c = census(finite_tree(o, q, rng), r);
  if (o.format == "csv") {
    os << "signature,count,frequency\n";
    for (const auto& [sig, cnt] : c.counts.counts()) {
      os << sig.hex() << ',' << cnt << ',' << json(static_cast<double>(cnt) / static_cast<double>(c.sample_size())).dump()
         << '\n';
    }
    return 0;
  }
  json sigs = json::object();
  for (const auto& [sig, cnt] : c.counts.counts()) {
    sigs[sig.hex()] = {{"count", cnt}, {"frequency", static_cast<double>(cnt) / static_cast<double>(c.sample_size())}};
  }
  json j;
  j["q"] = q;
  j["n"] = *o.n;
  j["radius"] = r;
  j["seed"] = seed;
  j["sample_size"] = c.sample_size();
  j["signatures"] = sigs;
  os << j.dump() << '\n';
  return 0;
}

int run_verify(const Options& o, std::ostream& os) {
  require_json(o, "verify");
  VerifyConfig c;
  if (o.q) c.q = plain_q(o);
  c.n = o.n;
  c.radius = o.radius;
  c.depth = o.depth;
  c.trials = o.trials;
  c.window = o.window;
  c.seed = resolve_seed(o);
  c.threads = o.threads;
  const auto suites = o.suite == "all" ? verify_suites() : std::vector<std::string>{o.suite};
  bool all_pass = true;
  for (const auto& s : suites) {
    const auto start = std::chrono::steady_clock::now();
    for (auto& r : verify(s, c)) {
      all_pass = all_pass && r.pass;
      std::cerr << r.name << ": " << (r.pass ? "pass" : "FAIL") << " (" << r.runtime_ms << " ms)\n";
      // Timings vary between runs; keep the stream byte-stable in serial mode.
      if (o.threads == 1) r.runtime_ms = 0;
      os << to_json(r).dump() << '\n';
      os.flush();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    std::cerr << "suite " << s << " finished in " << ms.count() << " ms\n";
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mallows permutations, Mallows trees and their limits"};
  app.require_subcommand(1);
  Options o;
  auto* perm = app.add_subcommand("sample-perm", "emit a Mallows permutation window");
  auto* tree = app.add_subcommand("build-tree", "emit a serialized Mallows or redwood tree");
  auto* cen = app.add_subcommand("census", "ball census of one Mallows tree");
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  for (auto* s : {perm, tree, cen, ver}) add_flags(s, o);
  std::vector<std::string> names = verify_suites();
  names.push_back("all");
  ver->add_option("suite", o.suite, "suite name")->required()->check(CLI::IsMember(names));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    std::ofstream file;
    if (!o.out.empty()) {
      file.open(o.out);
      if (!file) throw UsageError("cannot open --out path " + o.out);
    }
    std::ostream& os = o.out.empty() ? std::cout : file;
    if (*perm) return sample_perm(o, os);
    if (*tree) return build_tree(o, os);
    if (*cen) return run_census(o, os);
    return run_verify(o, os);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
