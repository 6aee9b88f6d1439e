#pragma once

#include <cstddef>
#include <vector>

#include "dtek/channel_model.hpp"
#include "dtek/signature.hpp"

namespace dtek {

enum class DictionaryKind { Angle, Delay };

/// Overcomplete steering dictionary on the uniform grid p / P, p = 0..P-1.
struct Dictionary {
    CMatrix atoms; // N x P
    std::vector<double> grid;
    DictionaryKind kind = DictionaryKind::Angle;

    int rows() const { return static_cast<int>(atoms.rows()); }
    int size() const { return static_cast<int>(atoms.cols()); }
};

Dictionary build_dictionary(int n, int p, DictionaryKind kind);

struct SupportEntry {
    int p_theta = 0;
    int p_tau = 0;
    Complex coeff{};
};

/// Selected atom pairs in selection order with their least-squares
/// coefficients. residual_norms[t] is ||M_t||_F, starting with ||H||_F.
struct SparseSupport {
    std::vector<SupportEntry> entries;
    std::vector<double> residual_norms;
};

/// OMP termination.
struct StopRule {
    enum class Kind { KnownSparsity, ResidualRatio, MaxIters };
    Kind kind = Kind::KnownSparsity;
    double value = 1.0;

    static StopRule known_sparsity(int q) { return {Kind::KnownSparsity, static_cast<double>(q)}; }
    static StopRule residual_ratio(double eps) { return {Kind::ResidualRatio, eps}; }
    static StopRule max_iters(int k) { return {Kind::MaxIters, static_cast<double>(k)}; }

    void validate() const;
};

inline constexpr std::size_t kDefaultOmp1dMemoryCap = std::size_t{2} << 30; // 2 GiB

/// Bytes needed to materialize the Kronecker dictionary of omp1d.
std::size_t omp1d_dictionary_bytes(int rows, int cols, int p_theta, int p_tau);

/// 2D-OMP on the matrix model H = A X B^T. The correlation step is
/// A^H M conj(B); the least-squares refit uses the separable Gram
/// (a'^H a)(b'^H b) and never forms Kronecker columns.
SparseSupport omp2d(const ChannelMatrix& channel, const Dictionary& angle, const Dictionary& delay,
                    const StopRule& stop);

/// Reference OMP on vec(H) = (B kron A) vec(X), with the Kronecker
/// dictionary materialized in full. Throws MemoryCapError past the cap.
SparseSupport omp1d(const ChannelMatrix& channel, const Dictionary& angle, const Dictionary& delay,
                    const StopRule& stop, std::size_t memory_cap_bytes = kDefaultOmp1dMemoryCap);

/// Holds the dictionaries so repeated estimates do not rebuild them.
class OmpEstimator {
public:
    OmpEstimator(int rows, int cols, int p_theta, int p_tau);

    /// Runs omp2d (or omp1d for Method::Omp1d) and maps grid indices to
    /// normalized parameters.
    SignatureEstimate estimate(const ChannelMatrix& channel, const StopRule& stop,
                               Method variant = Method::Omp2d,
                               std::size_t memory_cap_bytes = kDefaultOmp1dMemoryCap) const;

    const Dictionary& angle() const { return angle_; }
    const Dictionary& delay() const { return delay_; }

private:
    Dictionary angle_;
    Dictionary delay_;
};

SignatureEstimate estimate_omp(const ChannelMatrix& channel, int p_theta, int p_tau, const StopRule& stop);

} // namespace dtek
