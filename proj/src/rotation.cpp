#include "dtek/rotation.hpp"

#include <cmath>
#include <string>

namespace dtek {

RotationGridSpec::RotationGridSpec(std::vector<StagePoints> stages) : stages_(std::move(stages))
{
    if (stages_.empty())
        throw ConfigError("rotation grid needs at least one stage");
    for (const auto& st : stages_) {
        for (int n : {st.n_theta, st.n_tau}) {
            if (n < 3 || n % 2 == 0)
                throw ConfigError("rotation stage point count must be odd and >= 3, got " +
                                  std::to_string(n));
        }
    }
}

RotationGridSpec RotationGridSpec::uniform(const std::vector<int>& points)
{
    std::vector<StagePoints> stages;
    stages.reserve(points.size());
    for (int n : points)
        stages.push_back({n, n});
    return RotationGridSpec(std::move(stages));
}

CVector rotation_phasors(double offset, int n)
{
    CVector d(n);
    for (int k = 0; k < n; ++k)
        d(k) = phasor(kTwoPi * k * offset);
    return d;
}

std::vector<double> stage_offsets(double halfwidth, int n_points)
{
    if (n_points < 3 || n_points % 2 == 0)
        throw DomainError("stage point count must be odd and >= 3, got " + std::to_string(n_points));
    if (!(halfwidth > 0.0))
        throw DomainError("stage halfwidth must be positive");
    const double step = 2.0 * halfwidth / (n_points - 1);
    const int half = (n_points - 1) / 2;
    std::vector<double> out(n_points);
    for (int k = 0; k < n_points; ++k)
        out[k] = (k - half) * step;
    out[0] = -halfwidth;
    out[n_points - 1] = halfwidth;
    return out;
}

namespace {

struct Candidate {
    double theta = 0.0; // stage-local offsets
    double tau = 0.0;
    double objective = -1.0;
    Complex value{};
};

// Data-independent preference between equal objective values: smaller local
// offset magnitude first, then lexicographic on (theta, tau).
bool preferred_on_tie(const Candidate& a, const Candidate& b)
{
    const double ma = a.theta * a.theta + a.tau * a.tau;
    const double mb = b.theta * b.theta + b.tau * b.tau;
    if (ma != mb)
        return ma < mb;
    if (a.theta != b.theta)
        return a.theta < b.theta;
    return a.tau < b.tau;
}

} // namespace

RefinedPath refine_multistage(const ChannelMatrix& channel, const CoarseBin& bin,
                              const RotationGridSpec& spec)
{
    const int R = channel.rows();
    const int S = channel.cols();
    if (bin.i < 0 || bin.i >= R || bin.j < 0 || bin.j >= S)
        throw IndexError("coarse bin outside the channel map");

    const double bin_half_theta = 0.5 / R;
    const double bin_half_tau = 0.5 / S;
    const double scale = 1.0 / std::sqrt(static_cast<double>(R) * S);
    // Slack for rounding when a zoomed grid touches the bin edge.
    const double edge_slack = 1e-12;

    double center_theta = 0.0;
    double center_tau = 0.0;
    double half_theta = bin_half_theta;
    double half_tau = bin_half_tau;
    Candidate best;

    for (const auto& stage : spec.stages()) {
        const auto offs_theta = stage_offsets(half_theta, stage.n_theta);
        const auto offs_tau = stage_offsets(half_tau, stage.n_tau);

        std::vector<CVector> w_theta(offs_theta.size());
        std::vector<bool> theta_ok(offs_theta.size());
        for (std::size_t a = 0; a < offs_theta.size(); ++a) {
            const double total = center_theta + offs_theta[a];
            theta_ok[a] = std::abs(total) <= bin_half_theta + edge_slack;
            if (theta_ok[a])
                w_theta[a] = bin_weights(bin.i, R, total);
        }
        std::vector<CVector> w_tau(offs_tau.size());
        std::vector<bool> tau_ok(offs_tau.size());
        for (std::size_t b = 0; b < offs_tau.size(); ++b) {
            const double total = center_tau + offs_tau[b];
            tau_ok[b] = std::abs(total) <= bin_half_tau + edge_slack;
            if (tau_ok[b])
                w_tau[b] = bin_weights(bin.j, S, total);
        }

        Candidate stage_best;
        for (std::size_t a = 0; a < offs_theta.size(); ++a) {
            if (!theta_ok[a])
                continue;
            for (std::size_t b = 0; b < offs_tau.size(); ++b) {
                if (!tau_ok[b])
                    continue;
                // Full O(RS) evaluation of the rotated bin per candidate.
                Candidate c;
                c.theta = offs_theta[a];
                c.tau = offs_tau[b];
                c.value = (w_theta[a].transpose() * (channel.entries * w_tau[b])).value() * scale;
                c.objective = std::norm(c.value);
                if (c.objective > stage_best.objective ||
                    (c.objective == stage_best.objective && preferred_on_tie(c, stage_best)))
                    stage_best = c;
            }
        }

        center_theta += stage_best.theta;
        center_tau += stage_best.tau;
        best = stage_best;
        half_theta = half_theta / (stage.n_theta - 1);
        half_tau = half_tau / (stage.n_tau - 1);
    }

    RefinedPath out;
    out.source_bin = bin;
    out.theta_offset = center_theta;
    out.tau_offset = center_tau;
    out.theta_norm = wrap_unit(static_cast<double>(bin.i) / R + center_theta);
    out.tau_norm = wrap_unit(static_cast<double>(bin.j) / S + center_tau);
    out.objective = best.objective;
    out.gain = best.value * scale;
    return out;
}

RefinedPath refine_direct(const ChannelMatrix& channel, const CoarseBin& bin, int n_theta, int n_tau)
{
    return refine_multistage(channel, bin, RotationGridSpec::direct(n_theta, n_tau));
}

SignatureEstimate estimate_rotation(const ChannelMatrix& channel, const ThresholdPolicy& policy,
                                    const RotationGridSpec& spec)
{
    SignatureEstimate est;
    est.method = Method::Rotation;
    for (const auto& bin : detect_peaks(idft2(channel), policy)) {
        const RefinedPath p = refine_multistage(channel, bin, spec);
        est.paths.push_back({p.gain, p.theta_norm, p.tau_norm});
    }
    est.sort_by_gain();
    return est;
}

} // namespace dtek
