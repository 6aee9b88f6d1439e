#pragma once

#include <string>
#include <vector>

#include "dtek/channel_model.hpp"
#include "dtek/signature.hpp"

namespace dtek {

/// Unitary angle-delay map G = F_R^H H conj(F_S) of a channel matrix.
struct AngleDelayMap {
    CMatrix entries;
};

/// A strict local maximum of |G|.
struct CoarseBin {
    int i = 0;
    int j = 0;
    Complex value{};
};

/// Detection threshold for coarse peaks.
///
/// Relative: |G| > rho * max|G|.
/// Cfar: |G| > sigma * sqrt(-2 ln p_fa) with sigma = median|G| / sqrt(ln 4),
/// i.e. the Rayleigh quantile for a per-bin false-alarm probability p_fa.
struct ThresholdPolicy {
    enum class Kind { Relative, Cfar };
    Kind kind = Kind::Relative;
    double value = 0.25;

    static ThresholdPolicy relative(double rho) { return {Kind::Relative, rho}; }
    static ThresholdPolicy cfar(double p_fa) { return {Kind::Cfar, p_fa}; }

    void validate() const;
    std::string describe() const;
};

/// Column i of the orthonormal DFT matrix: exp(-j 2 pi n i / N) / sqrt(N).
CVector dft_vector(int i, int n);

/// N x N matrix whose columns are dft_vector(0..N-1).
CMatrix dft_matrix(int n);

AngleDelayMap idft2(const ChannelMatrix& channel);

/// sin(pi N x) / sin(pi x), continuous through the removable singularities.
double dirichlet(double x, int n);

/// Threshold value the policy yields for this map.
double peak_threshold(const AngleDelayMap& map, const ThresholdPolicy& policy);

/// Strict local maxima of |G| over the cyclic 8-neighborhood that exceed the
/// policy threshold, sorted by magnitude (descending, ties by index).
std::vector<CoarseBin> detect_peaks(const AngleDelayMap& map, const ThresholdPolicy& policy);

/// sqrt(N) * conj(f_index) scaled elementwise by the rotation phasors for
/// `offset`: entry n = exp(+j 2 pi n (index/N + offset)).
CVector bin_weights(int index, int n, double offset);

/// f_i^H R(theta_off) H R(tau_off) conj(f_j). Costs O(R*S).
Complex bin_power(const ChannelMatrix& channel, int i, int j, double theta_off, double tau_off);

/// Coarse on-grid estimate: one path per detected peak at (i/R, j/S) with
/// gain G(i,j) / sqrt(RS).
SignatureEstimate estimate_dft(const ChannelMatrix& channel, const ThresholdPolicy& policy);

/// |G| as CSV, one line per angle bin.
std::string magnitude_csv(const AngleDelayMap& map);

} // namespace dtek
