#include "mallows/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mallows {
namespace {

void check_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::domain_error("geometric parameter must lie in (0, 1], got " + std::to_string(p));
  }
}

std::int64_t geom_zero(double p, Rng& rng) {
  if (p == 1.0) return 0;
  const double x = std::floor(std::log(rng.uniform01()) / std::log1p(-p));
  if (x >= static_cast<double>(std::numeric_limits<std::int64_t>::max())) {
    throw std::overflow_error("geometric draw exceeds int64 range");
  }
  return static_cast<std::int64_t>(x);
}

}  // namespace

std::string_view to_string(GeomVariant v) {
  switch (v) {
    case GeomVariant::GeomZero: return "Geom";
    case GeomVariant::GeomOne: return "pGeom";
    case GeomVariant::SizeBiased: return "SBGeom";
  }
  return "?";
}

std::int64_t support_min(GeomVariant v) { return v == GeomVariant::GeomOne ? 1 : 0; }

double pmf(GeomVariant v, double p, std::int64_t k) {
  check_p(p);
  if (k < support_min(v)) {
    throw std::domain_error("value " + std::to_string(k) + " outside the support of " +
                            std::string(to_string(v)));
  }
  const double fail = 1.0 - p;
  switch (v) {
    case GeomVariant::GeomZero: return std::pow(fail, static_cast<double>(k)) * p;
    case GeomVariant::GeomOne: return std::pow(fail, static_cast<double>(k - 1)) * p;
    case GeomVariant::SizeBiased:
      return static_cast<double>(k + 1) * std::pow(fail, static_cast<double>(k)) * p * p;
  }
  return 0.0;
}

double tail(GeomVariant v, double p, std::int64_t k) {
  check_p(p);
  if (k < support_min(v)) return 1.0;
  const double fail = 1.0 - p;
  switch (v) {
    case GeomVariant::GeomZero: return std::pow(fail, static_cast<double>(k + 1));
    case GeomVariant::GeomOne: return std::pow(fail, static_cast<double>(k));
    case GeomVariant::SizeBiased:
      // Sum of two GeomZero: P(G > k) = (1-p)^(k+1) (1 + (k+1) p).
      return std::pow(fail, static_cast<double>(k + 1)) * (1.0 + static_cast<double>(k + 1) * p);
  }
  return 0.0;
}

double mean(GeomVariant v, double p) {
  check_p(p);
  const double m0 = (1.0 - p) / p;
  switch (v) {
    case GeomVariant::GeomZero: return m0;
    case GeomVariant::GeomOne: return m0 + 1.0;
    case GeomVariant::SizeBiased: return 2.0 * m0;
  }
  return 0.0;
}

std::int64_t sample(GeomVariant v, double p, Rng& rng) {
  check_p(p);
  switch (v) {
    case GeomVariant::GeomZero: return geom_zero(p, rng);
    case GeomVariant::GeomOne: return geom_zero(p, rng) + 1;
    case GeomVariant::SizeBiased: {
      const std::int64_t a = geom_zero(p, rng);
      return a + geom_zero(p, rng);
    }
  }
  return 0;
}

std::vector<std::int64_t> PartitionSample::parts() const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(part_count()));
  for (auto i = static_cast<std::int64_t>(multiplicities.size()); i >= 1; --i) {
    out.insert(out.end(), static_cast<std::size_t>(multiplicities[static_cast<std::size_t>(i - 1)]), i);
  }
  return out;
}

std::int64_t PartitionSample::part_count() const {
  std::int64_t total = 0;
  for (auto m : multiplicities) total += m;
  return total;
}

std::int64_t PartitionSample::weight() const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < multiplicities.size(); ++i) {
    total += static_cast<std::int64_t>(i + 1) * multiplicities[i];
  }
  return total;
}

std::int64_t partition_truncation_index(double q, double epsilon) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("q must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
  if (q == 0.0) return 0;
  std::int64_t i = 0;
  // q^(i+1) / (1-q) < epsilon
  while (std::pow(q, static_cast<double>(i + 1)) / (1.0 - q) >= epsilon) ++i;
  return i;
}

PartitionSample sample_partition(double q, double epsilon, Rng& rng) {
  PartitionSample out;
  out.truncation_epsilon = epsilon;
  out.truncation_index = partition_truncation_index(q, epsilon);
  if (q == 0.0) return out;
  const double log_q = std::log(q);
  out.multiplicities.resize(static_cast<std::size_t>(out.truncation_index));
  for (std::int64_t i = 1; i <= out.truncation_index; ++i) {
    const double success = -std::expm1(static_cast<double>(i) * log_q);  // 1 - q^i
    out.multiplicities[static_cast<std::size_t>(i - 1)] = sample(GeomVariant::GeomZero, success, rng);
  }
  return out;
}

}  // namespace mallows
