#pragma once

#include <vector>

#include "dtek/signature.hpp"
#include "dtek/spectral.hpp"

namespace dtek {

/// Point counts of one refinement stage (each odd and >= 3).
struct StagePoints {
    int n_theta = 11;
    int n_tau = 11;
};

/// Rotation search grid: one entry per stage. A single stage is the direct
/// method; later stages zoom into the previous winner.
class RotationGridSpec {
public:
    explicit RotationGridSpec(std::vector<StagePoints> stages);

    /// Equal counts on both axes, e.g. {11, 5}.
    static RotationGridSpec uniform(const std::vector<int>& points);
    static RotationGridSpec direct(int n_theta, int n_tau) { return RotationGridSpec({{n_theta, n_tau}}); }

    const std::vector<StagePoints>& stages() const { return stages_; }

private:
    std::vector<StagePoints> stages_;
};

/// Fine estimate for one coarse bin.
struct RefinedPath {
    double theta_norm = 0.0;
    double tau_norm = 0.0;
    Complex gain{};
    CoarseBin source_bin;
    /// Cumulative rotation offsets relative to the bin center.
    double theta_offset = 0.0;
    double tau_offset = 0.0;
    /// |bin_power|^2 at the chosen offsets.
    double objective = 0.0;
};

/// Diagonal of R(offset): entry n = exp(+j 2 pi n offset).
CVector rotation_phasors(double offset, int n);

/// n_points values spaced uniformly over [-halfwidth, +halfwidth]; the
/// middle value is exactly zero.
std::vector<double> stage_offsets(double halfwidth, int n_points);

/// Exhaustive single-stage search over an n_theta x n_tau offset grid
/// spanning half a bin on each side.
RefinedPath refine_direct(const ChannelMatrix& channel, const CoarseBin& bin, int n_theta, int n_tau);

/// Multistage search. Stage 1 spans half a bin; stage k spans half the step of
/// stage k-1 around the running best. Candidates that would leave the coarse
/// bin are skipped.
RefinedPath refine_multistage(const ChannelMatrix& channel, const CoarseBin& bin,
                              const RotationGridSpec& spec);

/// Peak detection followed by independent refinement of every coarse bin.
SignatureEstimate estimate_rotation(const ChannelMatrix& channel, const ThresholdPolicy& policy,
                                    const RotationGridSpec& spec);

} // namespace dtek
