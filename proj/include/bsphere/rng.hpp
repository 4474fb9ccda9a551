#pragma once

#include <cstdint>
#include <random>

namespace bsphere {

using Rng = std::mt19937_64;

// Counter-based sub-seed derivation: sub_seed(seed, k) is a SplitMix64
// finalization of (seed, k). Sub-seeds depend only on the pair, never on
// evaluation order, so parallel batches reproduce serial runs bit for bit.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream);

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(sub_seed(seed, stream));
}

}  // namespace bsphere
