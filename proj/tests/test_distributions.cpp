#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mallows/distributions.hpp"
#include "mallows/stats.hpp"

using namespace mallows;

namespace {

// Independent pmf oracle: Bernoulli-trial counting, written out longhand.
double pmf_oracle(GeomVariant v, double p, std::int64_t k) {
  double fail_pow = 1.0;
  for (std::int64_t i = 0; i < k; ++i) fail_pow *= (1.0 - p);
  switch (v) {
    case GeomVariant::GeomZero: return fail_pow * p;
    case GeomVariant::GeomOne: return fail_pow / (1.0 - p) * p;
    case GeomVariant::SizeBiased: return static_cast<double>(k + 1) * fail_pow * p * p;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("pmf examples") {
  CHECK(pmf(GeomVariant::GeomZero, 0.5, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pmf(GeomVariant::SizeBiased, 0.5, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(pmf(GeomVariant::GeomOne, 1.0, 1) == 1.0);
  CHECK(pmf(GeomVariant::GeomOne, 1.0, 2) == 0.0);
}

TEST_CASE("pmf domain errors") {
  CHECK_THROWS_AS(pmf(GeomVariant::GeomZero, 0.0, 0), std::domain_error);
  CHECK_THROWS_AS(pmf(GeomVariant::GeomZero, 1.5, 0), std::domain_error);
  CHECK_THROWS_AS(pmf(GeomVariant::GeomZero, 0.5, -1), std::domain_error);
  CHECK_THROWS_AS(pmf(GeomVariant::GeomOne, 0.5, 0), std::domain_error);
  Rng rng(1);
  CHECK_THROWS_AS(sample(GeomVariant::SizeBiased, -0.1, rng), std::domain_error);
}

TEST_CASE("pmf matches longhand oracle") {
  for (auto v : {GeomVariant::GeomZero, GeomVariant::GeomOne, GeomVariant::SizeBiased}) {
    for (double p : {0.1, 0.5, 0.9}) {
      for (std::int64_t k = support_min(v); k < 40; ++k) {
        CHECK(pmf(v, p, k) == doctest::Approx(pmf_oracle(v, p, k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("partial sums reach the closed-form tail at K = 200") {
  for (auto v : {GeomVariant::GeomZero, GeomVariant::GeomOne, GeomVariant::SizeBiased}) {
    for (double p : {0.1, 0.5, 0.9}) {
      KahanSum s;
      for (std::int64_t k = support_min(v); k <= 200; ++k) s.add(pmf(v, p, k));
      CHECK(s.value() + tail(v, p, 200) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(s.value() >= 1.0 - tail(v, p, 200) - 1e-12);
    }
  }
}

TEST_CASE("size-biased law is the convolution of two GeomZero laws") {
  for (double p : {0.1, 0.5, 0.9}) {
    for (std::int64_t k = 0; k <= 50; ++k) {
      double conv = 0.0;
      for (std::int64_t g = 0; g <= k; ++g) conv += pmf(GeomVariant::GeomZero, p, g) * pmf(GeomVariant::GeomZero, p, k - g);
      const double direct = pmf(GeomVariant::SizeBiased, p, k);
      CHECK(std::abs(conv - direct) <= 1e-12 * direct);
    }
  }
}

TEST_CASE("degenerate p = 1 draws") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample(GeomVariant::GeomZero, 1.0, rng) == 0);
    CHECK(sample(GeomVariant::GeomOne, 1.0, rng) == 1);
    CHECK(sample(GeomVariant::SizeBiased, 1.0, rng) == 0);
  }
}

TEST_CASE("GeomZero(0.5) sample mean") {
  Rng rng(11);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s += static_cast<double>(sample(GeomVariant::GeomZero, 0.5, rng));
  CHECK(std::abs(s / n - 1.0) < 0.05);
}

TEST_CASE("sampler agrees with pmf (chi-square)") {
  // Bonferroni over the nine (variant, p) cells.
  const double alpha = bonferroni(0.001, 9);
  std::uint64_t seed = 100;
  for (auto v : {GeomVariant::GeomZero, GeomVariant::GeomOne, GeomVariant::SizeBiased}) {
    for (double p : {0.1, 0.5, 0.9}) {
      Rng rng(++seed);
      EmpiricalDist<std::int64_t> e;
      for (int i = 0; i < 100000; ++i) e.add(sample(v, p, rng));
      const auto res = chi_square_gof(e, geometric_reference(v, p));
      INFO(to_string(v), " p=", p, " stat=", res.statistic, " p-value=", res.p_value);
      CHECK(res.p_value > alpha);
    }
  }
}

TEST_CASE("SizeBiased(0.5) draws fit the Geom+Geom convolution") {
  ReferenceLaw<std::int64_t> conv;
  KahanSum cum;
  for (std::int64_t k = 0; cum.value() < 0.9999; ++k) {
    double c = 0.0;
    for (std::int64_t g = 0; g <= k; ++g) c += pmf(GeomVariant::GeomZero, 0.5, g) * pmf(GeomVariant::GeomZero, 0.5, k - g);
    conv.emplace_back(k, c);
    cum.add(c);
  }
  Rng rng(5);
  EmpiricalDist<std::int64_t> e;
  for (int i = 0; i < 100000; ++i) e.add(sample(GeomVariant::SizeBiased, 0.5, rng));
  CHECK(chi_square_gof(e, conv).p_value > 0.01);
}

TEST_CASE("partition truncation index") {
  CHECK(partition_truncation_index(0.0, 1e-12) == 0);
  for (double q : {0.2, 0.5, 0.8}) {
    const auto i = partition_truncation_index(q, 1e-12);
    CHECK(std::pow(q, static_cast<double>(i + 1)) / (1.0 - q) < 1e-12);
    CHECK(std::pow(q, static_cast<double>(i)) / (1.0 - q) >= 1e-12);
  }
  CHECK_THROWS_AS(partition_truncation_index(1.0, 1e-12), std::domain_error);
  CHECK_THROWS_AS(partition_truncation_index(0.5, 0.0), std::domain_error);
}

TEST_CASE("partition at q = 0 is empty") {
  Rng rng(1);
  const auto s = sample_partition(0.0, 1e-12, rng);
  CHECK(s.part_count() == 0);
  CHECK(s.parts().empty());
}

TEST_CASE("partition statistics at q = 0.5") {
  Rng rng(17);
  const int n = 100000;
  double m1 = 0.0;
  int empty = 0;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_partition(0.5, 1e-12, rng);
    CHECK(s.truncation_epsilon == 1e-12);
    m1 += static_cast<double>(s.multiplicities.at(0));
    empty += s.part_count() == 0 ? 1 : 0;
    const auto parts = s.parts();
    for (std::size_t j = 1; j < parts.size(); ++j) REQUIRE(parts[j - 1] >= parts[j]);
    std::int64_t w = 0;
    for (auto x : parts) w += x;
    REQUIRE(w == s.weight());
  }
  // E M_1 = q / (1 - q) = 1.
  CHECK(std::abs(m1 / n - 1.0) < 0.05);
  // P(empty) = prod_k (1 - q^k), evaluated independently here.
  double prod = 1.0;
  for (int k = 1; k < 200; ++k) prod *= 1.0 - std::pow(0.5, k);
  CHECK(prod == doctest::Approx(0.288788).epsilon(1e-5));
  CHECK(std::abs(static_cast<double>(empty) / n - prod) < 0.01);
}
