#include "splitpack/rotations.hpp"

#include <cmath>

namespace splitpack {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  // FNV-1a over the stream name, mixed with the master seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(master ^ splitmix64(h));
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

std::vector<UnitQuaternion> sample_rotations(std::size_t count,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<UnitQuaternion> out;
  out.reserve(count);
  while (out.size() < count) {
    double x1, y1, s1;
    do {
      x1 = uniform_real(rng, -1.0, 1.0);
      y1 = uniform_real(rng, -1.0, 1.0);
      s1 = x1 * x1 + y1 * y1;
    } while (s1 >= 1.0);
    double x2, y2, s2;
    do {
      x2 = uniform_real(rng, -1.0, 1.0);
      y2 = uniform_real(rng, -1.0, 1.0);
      s2 = x2 * x2 + y2 * y2;
    } while (s2 >= 1.0 || s2 == 0.0);
    const double f = std::sqrt((1.0 - s1) / s2);
    out.push_back(UnitQuaternion::raw(x1, y1, x2 * f, y2 * f));
  }
  return out;
}

const std::vector<UnitQuaternion>& axis_permutation_rotations() {
  static const std::vector<UnitQuaternion> rotations = [] {
    const double h = std::sqrt(0.5);
    return std::vector<UnitQuaternion>{
        UnitQuaternion::identity(),
        UnitQuaternion::raw(h, 0, 0, h),       // swap x, y
        UnitQuaternion::raw(h, h, 0, 0),       // swap y, z
        UnitQuaternion::raw(h, 0, h, 0),       // swap x, z
        UnitQuaternion::raw(0.5, 0.5, 0.5, 0.5),     // x -> y -> z
        UnitQuaternion::raw(0.5, -0.5, -0.5, -0.5),  // x -> z -> y
    };
  }();
  return rotations;
}

std::vector<UnitQuaternion> packing_rotations(std::size_t count,
                                              std::uint64_t seed) {
  const auto& perms = axis_permutation_rotations();
  std::vector<UnitQuaternion> out(
      perms.begin(), perms.begin() + std::min(count, perms.size()));
  if (count > perms.size()) {
    const auto extra =
        sample_rotations(count - perms.size(), derive_seed(seed, "rotations"));
    out.insert(out.end(), extra.begin(), extra.end());
  }
  return out;
}

}  // namespace splitpack
