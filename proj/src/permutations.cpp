#include "mallows/permutations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace mallows {
namespace {

void check_q(double q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("q must lie in [0, 1), got " + std::to_string(q));
}

bool is_permutation_of_1_to_n(const std::vector<std::int64_t>& v) {
  std::vector<char> seen(v.size() + 1, 0);
  for (auto x : v) {
    if (x < 1 || x > static_cast<std::int64_t>(v.size()) || seen[static_cast<std::size_t>(x)]) return false;
    seen[static_cast<std::size_t>(x)] = 1;
  }
  return true;
}

}  // namespace

std::vector<std::int64_t> rerank(const std::vector<std::int64_t>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<std::int64_t> out(xs.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r > 0 && xs[order[r]] == xs[order[r - 1]]) throw std::invalid_argument("rerank: values not distinct");
    out[order[r]] = static_cast<std::int64_t>(r + 1);
  }
  return out;
}

std::uint64_t inversions(const PermWindow& w) {
  const auto ranks = rerank(w.values);
  // Fenwick tree over ranks; scan right to left counting smaller values seen.
  std::vector<std::uint64_t> bit(ranks.size() + 1, 0);
  std::uint64_t total = 0;
  for (auto it = ranks.rbegin(); it != ranks.rend(); ++it) {
    for (auto i = *it - 1; i > 0; i -= i & -i) total += bit[static_cast<std::size_t>(i)];
    for (auto i = *it; i <= static_cast<std::int64_t>(ranks.size()); i += i & -i) ++bit[static_cast<std::size_t>(i)];
  }
  return total;
}

double mallows_z_product(int n, double q) {
  if (n < 0) throw std::invalid_argument("negative size");
  double z = 1.0;
  for (int k = 1; k <= n; ++k) {
    double f = 0.0;
    double p = 1.0;
    for (int j = 0; j < k; ++j, p *= q) f += p;
    z *= f;
  }
  return z;
}

double mallows_z_enumerate(int n, double q) {
  if (n < 0) throw std::invalid_argument("negative size");
  if (n > 10) throw std::invalid_argument("enumeration guard: n <= 10");
  std::vector<std::int64_t> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), std::int64_t{1});
  double z = 0.0;
  do {
    z += std::pow(q, static_cast<double>(inversions(PermWindow::finite(v))));
  } while (std::next_permutation(v.begin(), v.end()));
  return z;
}

double exact_pmf(int n, double q, const PermWindow& w) {
  if (n < 0 || n > kExactPmfMaxN) throw std::invalid_argument("exact_pmf size guard: n <= 12");
  if (!(q >= 0.0)) throw std::domain_error("q must be non-negative");
  if (static_cast<int>(w.size()) != n || !is_permutation_of_1_to_n(w.values)) {
    throw std::invalid_argument("exact_pmf: window is not a permutation of 1..n");
  }
  return std::pow(q, static_cast<double>(inversions(w))) / mallows_z_product(n, q);
}

// ---------------------------------------------------------------------------

OneSidedStream::OneSidedStream(double q, Rng rng) : q_(q), rng_(rng) {
  check_q(q);
  position_.push_back(0);
}

OneSidedStream OneSidedStream::from_prefix(double q, const std::vector<std::int64_t>& prefix, Rng rng) {
  OneSidedStream s(q, rng);
  for (auto c : prefix) {
    if (c < 1) throw std::invalid_argument("stream columns start at 1");
    s.push(c);
  }
  return s;
}

void OneSidedStream::push(std::int64_t c) {
  if (c > max_) {
    for (std::int64_t h = max_ + 1; h < c; ++h) holes_.push_back(h);
    max_ = c;
    position_.resize(static_cast<std::size_t>(c) + 1, 0);
  } else {
    auto it = std::lower_bound(holes_.begin(), holes_.end(), c);
    if (it == holes_.end() || *it != c) throw std::invalid_argument("column " + std::to_string(c) + " already used");
    holes_.erase(it);
  }
  draws_.push_back(c);
  position_[static_cast<std::size_t>(c)] = draws_.size();
}

void OneSidedStream::draw_one() {
  const std::int64_t r = sample(GeomVariant::GeomOne, 1.0 - q_, rng_);
  const auto free_below = static_cast<std::int64_t>(holes_.size());
  if (r <= free_below) {
    push(holes_[static_cast<std::size_t>(r - 1)]);
  } else {
    push(max_ + (r - free_below));
  }
}

void OneSidedStream::extend_to(std::size_t n) {
  if (n > draws_.capacity()) draws_.reserve(std::max(n, 2 * draws_.capacity()));
  while (draws_.size() < n) draw_one();
}

std::int64_t OneSidedStream::at(std::size_t i) {
  if (i == 0) throw std::out_of_range("stream indices start at 1");
  extend_to(i);
  return draws_[i - 1];
}

std::size_t OneSidedStream::position_of(std::int64_t column, std::size_t cap) {
  if (column < 1) throw std::invalid_argument("stream columns start at 1");
  while (column > max_ || position_[static_cast<std::size_t>(column)] == 0) {
    if (draws_.size() >= cap) throw std::runtime_error("stream extension cap exceeded");
    draw_one();
  }
  return position_[static_cast<std::size_t>(column)];
}

OneSidedStream sample_one_sided(double q, Rng& rng) { return OneSidedStream(q, rng.split()); }

PermWindow finite_from_stream(OneSidedStream& s, std::size_t n) {
  s.extend_to(n);
  std::vector<std::int64_t> head(s.prefix().begin(), s.prefix().begin() + static_cast<std::ptrdiff_t>(n));
  return PermWindow::finite(rerank(head));
}

RecordRepresentation records(const PermWindow& w) {
  RecordRepresentation out;
  out.complete = w.offset >= 1;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const auto v = w.values[i];
    if (out.values.empty() || v > out.values.back()) {
      out.indices.push_back(w.offset + static_cast<std::int64_t>(i));
      out.values.push_back(v);
      if (v <= 0) out.zero_slot = static_cast<std::int64_t>(out.values.size()) - 1;
    }
  }
  return out;
}

std::int64_t free_spaces(OneSidedStream& s, std::size_t n) {
  s.extend_to(n);
  const auto& p = s.prefix();
  const auto m = n == 0 ? 0 : *std::max_element(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
  return m - static_cast<std::int64_t>(n);
}

std::vector<std::int64_t> incomplete_left_subtrees_profile(OneSidedStream& s, std::size_t n) {
  s.extend_to(n);
  std::vector<std::int64_t> out;
  out.reserve(n);
  std::vector<std::int64_t> rec;  // record values so far
  std::set<std::int64_t> holes;   // unused columns below the running max
  std::int64_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = s.prefix()[i];
    if (c > m) {
      for (std::int64_t h = m + 1; h < c; ++h) holes.insert(h);
      m = c;
      rec.push_back(c);
    } else {
      holes.erase(c);
    }
    // Block k covers (rec_k, rec_{k+1}); a hole h lies in block
    // #{record values < h}. Count distinct blocks.
    std::int64_t e = 0;
    std::size_t last = static_cast<std::size_t>(-1);
    for (auto h : holes) {
      const auto b = static_cast<std::size_t>(std::lower_bound(rec.begin(), rec.end(), h) - rec.begin());
      if (b != last) {
        ++e;
        last = b;
      }
    }
    out.push_back(e);
  }
  return out;
}

std::int64_t incomplete_left_subtrees(OneSidedStream& s, std::size_t n) {
  if (n == 0) return 0;
  return incomplete_left_subtrees_profile(s, n).back();
}

// ---------------------------------------------------------------------------

TwoSidedTriplet::TwoSidedTriplet(OneSidedStream plus, OneSidedStream minus, PartitionSample partition)
    : plus_(std::move(plus)), minus_(std::move(minus)), partition_(std::move(partition)) {
  lambda_ = partition_.parts();
  const auto len = static_cast<std::int64_t>(lambda_.size());
  if (len > 0) {
    std::vector<std::int64_t> ells(lambda_.size());
    for (std::int64_t i = 1; i <= len; ++i) ells[static_cast<std::size_t>(i - 1)] = ell(i);
    std::size_t j = ells.size();
    for (std::int64_t x = len; x >= ells.front(); --x) {
      if (j > 0 && ells[j - 1] == x) {
        --j;
      } else {
        gaps_.push_back(x);
      }
    }
  }
}

std::int64_t TwoSidedTriplet::lambda_at(std::int64_t i) const {
  if (i < 1) throw std::out_of_range("Lambda is indexed from 1");
  return i <= static_cast<std::int64_t>(lambda_.size()) ? lambda_[static_cast<std::size_t>(i - 1)] : 0;
}

std::int64_t TwoSidedTriplet::ell(std::int64_t i) const { return i - lambda_at(i); }

std::int64_t TwoSidedTriplet::k(std::int64_t j) const {
  if (j > 0) throw std::out_of_range("k is indexed by j <= 0");
  const auto m = -j;
  const auto g = static_cast<std::int64_t>(gaps_.size());
  if (m < g) return gaps_[static_cast<std::size_t>(m)];
  return ell(1) - 1 - (m - g);
}

TwoSidedTriplet::Slot TwoSidedTriplet::locate(std::int64_t x) const {
  const auto len = static_cast<std::int64_t>(lambda_.size());
  const auto first = ell(1);
  if (x > len && x >= first) return {true, x};
  if (x < first) {
    return {false, -(static_cast<std::int64_t>(gaps_.size()) + (first - 1 - x))};
  }
  // first <= x <= len: either some l_i with i <= len or one of the gaps.
  std::int64_t lo = 1, hi = len;
  while (lo <= hi) {
    const auto mid = lo + (hi - lo) / 2;
    const auto v = ell(mid);
    if (v == x) return {true, mid};
    if (v < x) lo = mid + 1; else hi = mid - 1;
  }
  auto it = std::lower_bound(gaps_.begin(), gaps_.end(), x, std::greater<>());
  return {false, -static_cast<std::int64_t>(it - gaps_.begin())};
}

std::int64_t TwoSidedTriplet::value(std::int64_t x) {
  const auto s = locate(x);
  if (s.positive) return plus_.at(static_cast<std::size_t>(s.i));
  return 1 - minus_.at(static_cast<std::size_t>(1 - s.i));
}

TwoSidedTriplet sample_triplet(double q, Rng& rng, double epsilon) {
  check_q(q);
  auto plus = OneSidedStream(q, rng.split());
  auto minus = OneSidedStream(q, rng.split());
  auto part = sample_partition(q, epsilon, rng);
  return TwoSidedTriplet(std::move(plus), std::move(minus), std::move(part));
}

PermWindow assemble_two_sided(TwoSidedTriplet& t, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("empty window");
  PermWindow w;
  w.offset = lo;
  w.values.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (auto x = lo; x <= hi; ++x) w.values.push_back(t.value(x));
  return w;
}

std::vector<std::size_t> stream_records(OneSidedStream& s, std::size_t count) {
  std::vector<std::size_t> out;
  std::int64_t m = 0;
  for (std::size_t i = 1; out.size() < count; ++i) {
    if (i > OneSidedStream::kDefaultCap) throw std::runtime_error("stream extension cap exceeded");
    const auto v = s.at(i);
    if (v > m) {
      m = v;
      out.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> anti_records(OneSidedStream& s, std::size_t count) {
  std::vector<std::size_t> rho;
  if (count == 0) return rho;
  rho.push_back(s.position_of(1));
  std::int64_t v = 1;
  while (rho.size() < count) {
    // All values below sigma(rho_i) sit before rho_i, so the minimum after
    // rho_i is the first larger value placed after it.
    do {
      ++v;
    } while (s.position_of(v) <= rho.back());
    rho.push_back(s.position_of(v));
  }
  return rho;
}

RecordRepresentation srr_from_triplet(TwoSidedTriplet& t, std::size_t depth) {
  if (depth == 0) throw std::invalid_argument("srr_from_triplet: depth must be >= 1");
  const auto first = t.ell(1);

  std::vector<std::size_t> rho;
  std::size_t m = 0;
  for (std::size_t want = depth + 4;; want *= 2) {
    rho = anti_records(t.minus(), want);
    bool found = false;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (t.k(1 - static_cast<std::int64_t>(rho[i])) < first) {
        m = i;
        found = true;
        break;
      }
    }
    if (found && m + depth <= rho.size()) break;
  }

  RecordRepresentation out;
  for (std::size_t i = m + depth; i-- > m;) {
    out.indices.push_back(t.k(1 - static_cast<std::int64_t>(rho[i])));
    out.values.push_back(1 - t.minus().at(rho[i]));
  }
  out.zero_slot = static_cast<std::int64_t>(depth) - 1;
  for (auto r : stream_records(t.plus(), depth)) {
    out.indices.push_back(t.ell(static_cast<std::int64_t>(r)));
    out.values.push_back(t.plus().at(r));
  }
  out.complete = true;
  return out;
}

double expected_records(std::int64_t n, double q) {
  if (n < 1) throw std::invalid_argument("expected_records: n >= 1");
  check_q(q);
  double s = 0.0;
  for (std::int64_t k = 2; k <= n; ++k) s += (1.0 - q) / -std::expm1(static_cast<double>(k) * std::log(q));
  return s;
}

double expected_free_spaces(std::int64_t n, double q) {
  if (n < 1) throw std::invalid_argument("expected_free_spaces: n >= 1");
  check_q(q);
  if (q == 0.0) return 0.0;
  double s = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    const double qk = std::pow(q, static_cast<double>(k));
    if (qk < 1e-300) break;
    s += qk / (1.0 - qk);
  }
  return s;
}

std::string format_window(const PermWindow& w) {
  std::string out;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    out += std::to_string(w.offset + static_cast<std::int64_t>(i));
    out += ' ';
    out += std::to_string(w.values[i]);
    out += '\n';
  }
  return out;
}

PermWindow parse_window(const std::string& text) {
  std::istringstream in(text);
  PermWindow w;
  std::int64_t idx = 0, val = 0;
  bool first = true;
  while (in >> idx >> val) {
    if (first) {
      w.offset = idx;
      first = false;
    } else if (idx != w.hi() + 1) {
      throw std::invalid_argument("window indices must be consecutive");
    }
    w.values.push_back(val);
  }
  if (!in.eof()) throw std::invalid_argument("malformed window line");
  return w;
}

}  // namespace mallows
