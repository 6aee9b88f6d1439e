#pragma once

#include <cstdint>
#include <random>

namespace dtek {

/// Seedable generator with a platform-independent output sequence.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The distribution transforms are written out here because the standard
/// library's distributions are implementation-defined.
class Rng {
public:
    static constexpr const char* kName = "mt19937_64/u53/box-muller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via the Box-Muller transform (both outputs are used).
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Derive a child seed from a parent seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream)
{
    return mix_seed(parent ^ mix_seed(stream + 0x9e3779b97f4a7c15ULL));
}

} // namespace dtek
