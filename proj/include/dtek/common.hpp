#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dtek {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSpeedOfLight = 2.99792458e8; // m/s

// Error categories. The numeric values double as the C API status codes and
// the CLI exit codes, so they are part of the public contract.
enum class ErrorKind : int {
    Config = 2,   // invalid configuration, parse errors, bad input files
    Numeric = 3,  // domain/dimension/singularity problems in the math
    Resource = 4, // memory cap exceeded
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define DTEK_DEFINE_ERROR(Name, Kind)                                                      \
    class Name : public Error {                                                            \
    public:                                                                                \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, #Name ": " + what) {} \
    };

DTEK_DEFINE_ERROR(ConfigError, Config)
DTEK_DEFINE_ERROR(FormatError, Config)
DTEK_DEFINE_ERROR(IoError, Config)
DTEK_DEFINE_ERROR(DomainError, Numeric)
DTEK_DEFINE_ERROR(DimensionError, Numeric)
DTEK_DEFINE_ERROR(IndexError, Numeric)
DTEK_DEFINE_ERROR(SingularGramError, Numeric)
DTEK_DEFINE_ERROR(RankError, Numeric)
DTEK_DEFINE_ERROR(NoHitsError, Numeric)
DTEK_DEFINE_ERROR(MemoryCapError, Resource)

#undef DTEK_DEFINE_ERROR

/// Reduce x into [0, 1).
inline double wrap_unit(double x)
{
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

/// Map [0, 1) onto the signed interval [-0.5, 0.5).
inline double wrap_signed(double x)
{
    double r = wrap_unit(x);
    return r >= 0.5 ? r - 1.0 : r;
}

/// Circular distance on the unit circle, in [0, 0.5].
inline double circular_distance(double a, double b)
{
    return std::abs(wrap_signed(a - b));
}

/// e^{j*phase}
inline Complex phasor(double phase)
{
    return {std::cos(phase), std::sin(phase)};
}

} // namespace dtek
