// Copyright 2026 Chainlab Developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace chainlab {

// Counter-based pseudorandom generator with explicit stream splitting.
//
// The whole state is the triple (seed, stream, counter); the i-th output word
// of stream s under seed q is
//
//     word(q, s, i) = mix(mix(q + (s+1)*GAMMA) + (i+1)*GAMMA)
//
// where GAMMA = 0x9e3779b97f4a7c15 and mix() is the splitmix64 finalizer
//
//     z ^= z >> 30;  z *= 0xbf58476d1ce4e5b9;
//     z ^= z >> 27;  z *= 0x94d049bb133111eb;
//     z ^= z >> 31;
//
// Any implementation language reproduces the byte stream from this formula
// alone, which is what makes instances and samples reproducible cross-tool.
// Streams are used for independent substreams of one logical experiment
// (e.g. one stream per read, one per sample), never re-used across purposes.
class Rng {
public:
    static constexpr std::uint64_t GAMMA = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    static constexpr std::uint64_t word(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
        return mix(mix(seed + (stream + 1) * GAMMA) + (index + 1) * GAMMA);
    }

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed + (stream + 1) * GAMMA)) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * GAMMA); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1], safe as a log() argument
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // standard normal via Box-Muller; consumes two uniforms per pair of calls
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        double a = 2.0 * 3.14159265358979323846 * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // uniform integer in [0, n) by masked rejection (no modulo bias)
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        if (n == 1) return 0;
        std::uint64_t mask = ~0ULL >> __builtin_clzll(n - 1);
        for (;;) {
            std::uint64_t v = next_u64() & mask;
            if (v < n) return v;
        }
    }

    // fair coin mapped to a spin
    int sign() { return (next_u64() >> 63) ? 1 : -1; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace chainlab
