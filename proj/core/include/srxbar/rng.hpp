#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

// Counter-based random substreams.
//
// Every random draw in the simulator is a pure function of
// (master seed, stream id, key words, draw index). There is no shared
// generator state, so results are identical no matter how work is split
// across threads or in what order cells are evaluated. Sweep parameters
// (m, L, R_OFF/R_ON ratio, noise variance, ...) are deliberately absent
// from the keys: configurations in a sweep see the same weight, input and
// noise realizations, which pairs the comparisons the experiments make.

namespace srxbar::rng {

/// Stream identifiers. One per non-ideality kind / draw purpose.
enum class Stream : std::uint64_t {
    weights = 1,      // random weight matrices (trial experiments)
    inputs,           // random input vectors
    input_noise,      // additive Gaussian on the input voltages
    wire,             // per-device series wire resistance
    drift,            // per-device R_ON / R_OFF boundary drift
    instability,      // per-column multiplicative read instability
    read_noise,       // per-column additive sensing noise
    variability,      // per-device conductance variability at program time
    pulse,            // program-and-verify pulse step noise
    generic,          // tests and one-off draws
};

/// Key words identifying one substream. a/b/c are caller-defined
/// coordinates (row, column, packed layer|device, ...).
struct Key {
    Stream stream = Stream::generic;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t c = 0;
    std::uint64_t trial = 0;
};

namespace detail {

// SplitMix64 finalizer (Stafford mix13). Full avalanche per word.
inline constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t w) {
    return mix(h ^ w);
}

}  // namespace detail

/// 64 uniform bits for (seed, key, idx).
inline constexpr std::uint64_t word(std::uint64_t seed, const Key& k, std::uint64_t idx) {
    std::uint64_t h = detail::mix(seed);
    h = detail::absorb(h, static_cast<std::uint64_t>(k.stream));
    h = detail::absorb(h, k.a);
    h = detail::absorb(h, k.b);
    h = detail::absorb(h, k.c);
    h = detail::absorb(h, k.trial);
    h = detail::absorb(h, idx);
    return h;
}

/// Uniform in the open interval (0, 1); never returns an exact endpoint.
inline double uniform01(std::uint64_t seed, const Key& k, std::uint64_t idx) {
    return (static_cast<double>(word(seed, k, idx) >> 11) + 0.5) * 0x1p-53;
}

inline double uniform(std::uint64_t seed, const Key& k, std::uint64_t idx, double lo, double hi) {
    return lo + (hi - lo) * uniform01(seed, k, idx);
}

namespace detail {

// Acklam's rational approximation to the inverse normal CDF
// (relative error < 1.2e-9). Used instead of std::normal_distribution so
// that draws are bit-identical across standard library implementations.
inline double inverse_normal_cdf(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Standard normal draw.
inline double normal01(std::uint64_t seed, const Key& k, std::uint64_t idx) {
    return detail::inverse_normal_cdf(uniform01(seed, k, idx));
}

inline double normal(std::uint64_t seed, const Key& k, std::uint64_t idx,
                     double mean, double stddev) {
    return mean + stddev * normal01(seed, k, idx);
}

/// A stateful view over one substream: draws consume consecutive indices.
/// Value type; construction pins the key, so two Substreams built from the
/// same (seed, key) replay the same sequence.
class Substream {
public:
    Substream(std::uint64_t seed, const Key& key) : seed_(seed), key_(key) {}

    double uniform01() { return rng::uniform01(seed_, key_, next_++); }
    double uniform(double lo, double hi) { return rng::uniform(seed_, key_, next_++, lo, hi); }
    double normal01() { return rng::normal01(seed_, key_, next_++); }
    double normal(double mean, double stddev) { return mean + stddev * normal01(); }

    /// Gaussian truncated to strictly positive values (redraws on violation).
    double positive_normal(double mean, double stddev) {
        for (;;) {
            const double x = normal(mean, stddev);
            if (x > 0.0) return x;
        }
    }

private:
    std::uint64_t seed_;
    Key key_;
    std::uint64_t next_ = 0;
};

}  // namespace srxbar::rng
