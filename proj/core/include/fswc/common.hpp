#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fswc {

using Real = double;
using Complex = std::complex<double>;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;
inline constexpr Real kTwoPi = 2.0 * kPi;

/// Point in R^d.
using Point = std::vector<Real>;

// ---------------------------------------------------------------------------
// Error taxonomy. Each operation's error contract throws one of these.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define FSWC_ERROR(Name)                                                       \
    struct Name : Error {                                                      \
        using Error::Error;                                                    \
    }

FSWC_ERROR(DimensionMismatch);
FSWC_ERROR(UnsupportedModel);
FSWC_ERROR(NotRadial);
FSWC_ERROR(UnsupportedDimension);
FSWC_ERROR(Divergent);
FSWC_ERROR(InvalidExponents);
FSWC_ERROR(RootNotFound);
FSWC_ERROR(NonPositiveShift);
FSWC_ERROR(SizeExceeded);
FSWC_ERROR(NoConvergence);
FSWC_ERROR(GradingInsufficient);
FSWC_ERROR(ResolutionExceeded);
FSWC_ERROR(NoBoundState);
FSWC_ERROR(BranchMismatch);
FSWC_ERROR(ContourTooClose);
FSWC_ERROR(NonIntegerRank);
FSWC_ERROR(PlacementFailed);
FSWC_ERROR(ScaleTooLarge);
FSWC_ERROR(ConfigError);

#undef FSWC_ERROR

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

inline Real sqr(Real x) { return x * x; }

inline Real norm2(const Point& x) {
    Real s = 0;
    for (Real v : x) s += v * v;
    return s;
}

/// splitmix64: deterministic, platform-independent stream for test vectors
/// and start vectors. Not for statistics.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// uniform in [0,1)
    Real uniform() { return static_cast<Real>(next() >> 11) * 0x1.0p-53; }
    /// uniform in [-1,1)
    Real symmetric() { return 2.0 * uniform() - 1.0; }
};

/// Surface area of the unit sphere S^{d-1}.
Real sphere_area(int d);

}  // namespace fswc
