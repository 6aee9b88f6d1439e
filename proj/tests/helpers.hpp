#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dtek/channel_model.hpp"

namespace testutil {

using dtek::Complex;

/// The 32x32 two-path scene at the exact bin fractions 15.25/32, 10.37/32
/// and 25.35/32, 25.43/32, gains 0.5+0.5j.
inline dtek::Scene golden_scene()
{
    return dtek::Scene({{Complex(0.5, 0.5), 15.25 / 32, 10.37 / 32}, {Complex(0.5, 0.5), 25.35 / 32, 25.43 / 32}});
}

/// Same scene with the four-decimal parameters as printed.
inline dtek::Scene golden_scene_rounded()
{
    return dtek::Scene({{Complex(0.5, 0.5), 0.4766, 0.3241}, {Complex(0.5, 0.5), 0.7922, 0.7947}});
}

inline dtek::SystemConfig golden_system_32()
{
    return dtek::SystemConfig::defaults().resized(32, 32);
}

inline int cyclic_gap(int a, int b, int n)
{
    const int d = std::abs(a - b) % n;
    return std::min(d, n - d);
}

/// Q on-grid paths at bins (i/R, j/S) whose pairwise cyclic Chebyshev
/// distance is at least min_sep bins; unit-modulus gains with random phase.
inline dtek::Scene on_grid_scene(int rows, int cols, int q, std::uint64_t seed, int min_sep = 2)
{
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> ri(0, rows - 1), rs(0, cols - 1);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * 3.14159265358979323846);
    std::vector<std::pair<int, int>> bins;
    std::vector<dtek::Scatterer> paths;
    while (static_cast<int>(paths.size()) < q) {
        const int i = ri(gen), j = rs(gen);
        bool ok = true;
        for (const auto& [a, b] : bins)
            if (std::max(cyclic_gap(a, i, rows), cyclic_gap(b, j, cols)) < min_sep)
                ok = false;
        if (!ok)
            continue;
        bins.emplace_back(i, j);
        paths.emplace_back(std::polar(1.0, ph(gen)), static_cast<double>(i) / rows, static_cast<double>(j) / cols);
    }
    return dtek::Scene(std::move(paths));
}

inline dtek::CMatrix random_matrix(int rows, int cols, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    dtek::CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int s = 0; s < cols; ++s)
            m(r, s) = Complex(n(gen), n(gen));
    return m;
}

inline dtek::ChannelMatrix as_channel(const dtek::CMatrix& m)
{
    dtek::ChannelMatrix ch;
    ch.entries = m;
    return ch;
}

} // namespace testutil
