#pragma once

#include <cmath>
#include <cstdint>

namespace rloc {

// Counter-based generator: every draw is a pure hash of (seed, stream, counter),
// so parallel consumers can sample any stream in any order and still agree
// bit-for-bit with a serial run.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Uniform in (0, 1); never returns 0 or 1 so the normal quantile stays finite.
inline double uniform01(std::uint64_t bits) {
    const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    return u;
}

// Acklam's rational approximation to the standard normal quantile, refined
// with one Halley step. Deterministic across platforms with IEEE doubles.
double normal_quantile(double p);

// Standard normal draw for stream element (seed, stream, counter).
inline double gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const std::uint64_t bits = splitmix64(hash_combine(hash_combine(seed, stream), counter));
    return normal_quantile(uniform01(bits));
}

} // namespace rng
} // namespace rloc
