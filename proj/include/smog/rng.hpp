#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "smog/common.hpp"

namespace smog::rng {

using Engine = std::mt19937_64;

/// Derive a child seed from a root seed and a textual label. Distinct labels
/// give statistically independent streams, so adding a new consumer never
/// perturbs existing ones.
std::uint64_t derive(std::uint64_t root, std::string_view label);

/// Labeled derivation with a per-item index (trial number, chunk id, ...).
std::uint64_t derive(std::uint64_t root, std::string_view label,
                     std::uint64_t index);

inline Engine engine(std::uint64_t seed) { return Engine(seed); }

/// Non-deterministic seed for callers that did not supply one.
std::uint64_t entropy_seed();

/// d independent standard normal draws.
Vector gaussian(Engine& eng, Index d);

/// Uniform draw from the unit sphere in R^d (normalized Gaussian).
Vector unit_sphere(Engine& eng, Index d);

}  // namespace smog::rng
