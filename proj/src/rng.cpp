#include "smog/rng.hpp"

namespace smog::rng {

namespace {

// splitmix64 finalizer; full-period bijective mixer.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over the label bytes.
std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive(std::uint64_t root, std::string_view label) {
  return mix(mix(root) ^ hash_label(label));
}

std::uint64_t derive(std::uint64_t root, std::string_view label,
                     std::uint64_t index) {
  return mix(derive(root, label) ^ mix(index));
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  std::uint64_t hi = rd();
  std::uint64_t lo = rd();
  return mix((hi << 32) ^ lo);
}

Vector gaussian(Engine& eng, Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = normal(eng);
  return v;
}

Vector unit_sphere(Engine& eng, Index d) {
  for (;;) {
    Vector v = gaussian(eng, d);
    double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

}  // namespace smog::rng
