#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace hclab {

/// Labeled random stream. Streams forked from the same seed under different
/// labels are independent, so conditions that draw in any order or on
/// separate threads see the same numbers. Conversions to double are done
/// by hand so output does not depend on the standard library's distributions.
class Rng {
public:
    Rng(std::uint64_t seed, std::string_view label) : engine_(mix(seed, label)) {}

    Rng fork(std::string_view label) const { return Rng(seed_state(), label); }

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform on {0, ..., n-1}.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
    /// Standard normal via Box-Muller.
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    /// exp(uniform(log lo, log hi)).
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    static std::uint64_t mix(std::uint64_t seed, std::string_view label) {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (unsigned char c : label) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return splitmix(seed ^ splitmix(h));
    }
    std::uint64_t seed_state() const {
        auto copy = engine_;
        return copy();
    }

    std::mt19937_64 engine_;
};

} // namespace hclab
