#include "mallows/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mallows {

ExactLaws oracle_enumerate(int n, double q) {
  if (n < 0 || n > kOracleMaxN) throw std::invalid_argument("oracle_enumerate: n must lie in [0, 7]");
  if (!(q >= 0.0)) throw std::domain_error("oracle_enumerate: q must be non-negative");
  ExactLaws out;
  out.n = n;
  out.q = q;
  out.z_product = mallows_z_product(n, q);

  std::vector<std::int64_t> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), std::int64_t{1});
  std::vector<double> weights;
  KahanSum z;
  do {
    const double w = std::pow(q, static_cast<double>(inversions(PermWindow::finite(v))));
    out.permutations.emplace_back(v, w);
    z.add(w);
  } while (std::next_permutation(v.begin(), v.end()));
  out.z_sum = z.value();

  std::map<std::string, KahanSum> shapes;
  for (auto& [perm, w] : out.permutations) {
    w /= out.z_sum;
    if (w > 0.0) shapes[shape_key(build_bst(perm))].add(w);
  }
  for (const auto& [k, s] : shapes) out.shapes[k] = s.value();
  return out;
}

ReferenceLaw<BallSignature> exact_census_law(const ExactLaws& laws, int r) {
  if (laws.n == 0) return {};
  std::map<BallSignature, KahanSum> acc;
  for (const auto& [key, p] : laws.shapes) {
    const auto c = census(parse_tree(key), r);
    for (const auto& [sig, cnt] : c.counts.counts()) {
      acc[sig].add(p * static_cast<double>(cnt) / static_cast<double>(c.counts.total()));
    }
  }
  ReferenceLaw<BallSignature> out;
  for (const auto& [sig, s] : acc) out.emplace_back(sig, s.value());
  return out;
}

}  // namespace mallows
