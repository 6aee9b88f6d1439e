#pragma once

#include <cstddef>

#include "dtek/channel_model.hpp"
#include "dtek/signature.hpp"

namespace dtek {

/// Subarray size for forward spatial-spectral smoothing.
struct SmoothingSpec {
    int sub_r = 0;
    int sub_s = 0;

    /// ceil(R/2) x ceil(S/2).
    static SmoothingSpec default_for(int rows, int cols);

    /// Number of subarray patches for an R x S channel.
    long long patch_count(int rows, int cols) const;

    /// Checks 1 < sub_r <= R, 1 < sub_s <= S and (when expected_paths > 0)
    /// that there are more patches than expected paths.
    void validate(int rows, int cols, int expected_paths = 0) const;
};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
    RVector values;
    CMatrix vectors;
};

/// Full decomposition (LAPACK zheevr).
HermitianEigen hermitian_eigen(const CMatrix& matrix);

/// Only the `count` largest eigenpairs, still in ascending order.
HermitianEigen hermitian_eigen_top(const CMatrix& matrix, int count);

/// (1/L) sum over all patches of vec(patch) vec(patch)^H, where vec stacks
/// the patch column-major (antenna index fastest).
CMatrix smoothed_covariance(const ChannelMatrix& channel, const SmoothingSpec& spec);

/// Orthonormal eigenvectors of the dim - q_hat smallest eigenvalues.
CMatrix noise_subspace(const CMatrix& covariance, int q_hat);

/// Pseudospectrum 1 / ||E_n^H (b(tau) kron a(theta))||^2 on a grid_p x grid_p
/// grid over [0,1)^2 (row = theta index, column = tau index).
Eigen::MatrixXd music_pseudospectrum(const ChannelMatrix& channel, const SmoothingSpec& spec,
                                     int q_hat, int grid_p);

inline constexpr std::size_t kDefaultMusicMemoryCap = std::size_t{2} << 30; // 2 GiB

/// Approximate peak working memory of estimate_music.
std::size_t music_working_bytes(const ChannelMatrix& channel, const SmoothingSpec& spec);

/// 2D-MUSIC with smoothing: top q_hat local maxima of the pseudospectrum,
/// gains from least squares of the full model on the chosen steering pairs.
SignatureEstimate estimate_music(const ChannelMatrix& channel, const SmoothingSpec& spec, int q_hat,
                                 int grid_p, std::size_t memory_cap_bytes = kDefaultMusicMemoryCap);

} // namespace dtek
