#pragma once

#include <string>
#include <vector>

#include "dtek/common.hpp"

namespace dtek {

enum class Method { Dft, Rotation, Omp2d, Omp1d, Music };

std::string to_string(Method method);

/// Parses "dft", "rotation", "omp2d", "omp1d" or "music".
Method parse_method(const std::string& name);

struct EstimatedPath {
    Complex gain{};
    double theta_norm = 0.0;
    double tau_norm = 0.0;
};

/// Estimated signature {Q, gain_q, theta_q, tau_q}; paths sorted by |gain|
/// descending once finalized.
struct SignatureEstimate {
    std::vector<EstimatedPath> paths;
    Method method = Method::Dft;
    double runtime_s = 0.0;

    std::size_t size() const { return paths.size(); }

    /// Stable sort by |gain| descending.
    void sort_by_gain();
};

} // namespace dtek
