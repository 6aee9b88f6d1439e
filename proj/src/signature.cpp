#include "dtek/signature.hpp"

#include <algorithm>

namespace dtek {

std::string to_string(Method method)
{
    switch (method) {
    case Method::Dft: return "dft";
    case Method::Rotation: return "rotation";
    case Method::Omp2d: return "omp2d";
    case Method::Omp1d: return "omp1d";
    case Method::Music: return "music";
    }
    return "unknown";
}

Method parse_method(const std::string& name)
{
    if (name == "dft") return Method::Dft;
    if (name == "rotation") return Method::Rotation;
    if (name == "omp2d") return Method::Omp2d;
    if (name == "omp1d") return Method::Omp1d;
    if (name == "music") return Method::Music;
    throw ConfigError("unknown method '" + name + "' (expected dft, rotation, omp2d, omp1d, music)");
}

void SignatureEstimate::sort_by_gain()
{
    std::stable_sort(paths.begin(), paths.end(), [](const EstimatedPath& a, const EstimatedPath& b) {
        return std::abs(a.gain) > std::abs(b.gain);
    });
}

} // namespace dtek
