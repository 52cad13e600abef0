#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mallows/rng.hpp"

namespace mallows {

/// The three geometric laws used throughout.
///
///   GeomZero    P(G = k) = (1-p)^k p            k >= 0
///   GeomOne     P(G = k) = (1-p)^(k-1) p        k >= 1
///   SizeBiased  P(G = k) = (k+1) (1-p)^k p^2    k >= 0
enum class GeomVariant { GeomZero, GeomOne, SizeBiased };

std::string_view to_string(GeomVariant v);

/// Smallest value in the support of `v` (1 for GeomOne, else 0).
std::int64_t support_min(GeomVariant v);

double pmf(GeomVariant v, double p, std::int64_t k);

/// P(G > k), closed form.
double tail(GeomVariant v, double p, std::int64_t k);

double mean(GeomVariant v, double p);

/// Draw by inversion. SizeBiased is drawn as the sum of two GeomZero draws.
std::int64_t sample(GeomVariant v, double p, Rng& rng);

/// Multiplicities M_1..M_imax of the random partition used by the two-sided
/// construction, M_i ~ GeomZero(1 - q^i) independently.
struct PartitionSample {
  std::vector<std::int64_t> multiplicities;  // multiplicities[i-1] = M_i
  double truncation_epsilon = 0.0;
  std::int64_t truncation_index = 0;  // i_max

  /// Parts in non-increasing order: part i repeated M_i times.
  std::vector<std::int64_t> parts() const;
  std::int64_t part_count() const;
  std::int64_t weight() const;  // sum of parts
};

/// Minimal i_max with q^(i_max+1) / (1-q) < epsilon (0 when q == 0).
std::int64_t partition_truncation_index(double q, double epsilon);

PartitionSample sample_partition(double q, double epsilon, Rng& rng);

inline constexpr double kDefaultPartitionEpsilon = 1e-12;

}  // namespace mallows
