#include "dtek/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dtek/rng.hpp"

namespace dtek {

SystemConfig::SystemConfig(double carrier_freq_hz, double bandwidth_hz, int num_antennas,
                           int num_subcarriers, std::optional<double> element_spacing_m)
    : carrier_freq_hz_(carrier_freq_hz),
      bandwidth_hz_(bandwidth_hz),
      num_antennas_(num_antennas),
      num_subcarriers_(num_subcarriers),
      element_spacing_m_(0.0)
{
    if (!(carrier_freq_hz > 0.0) || !std::isfinite(carrier_freq_hz))
        throw ConfigError("carrier_freq_hz must be positive");
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
        throw ConfigError("bandwidth_hz must be positive");
    if (num_antennas < 2)
        throw ConfigError("num_antennas must be >= 2");
    if (num_subcarriers < 2)
        throw ConfigError("num_subcarriers must be >= 2");
    element_spacing_m_ = element_spacing_m.value_or(kSpeedOfLight / (2.0 * carrier_freq_hz));
    if (!(element_spacing_m_ > 0.0) || !std::isfinite(element_spacing_m_))
        throw ConfigError("element_spacing_m must be positive");
}

SystemConfig SystemConfig::defaults()
{
    return SystemConfig(73e9, 1e9, 64, 64);
}

SystemConfig SystemConfig::resized(int num_antennas, int num_subcarriers) const
{
    return SystemConfig(carrier_freq_hz_, bandwidth_hz_, num_antennas, num_subcarriers,
                        element_spacing_m_);
}

Scene::Scene(std::vector<Scatterer> scatterers) : scatterers_(std::move(scatterers))
{
    for (std::size_t a = 0; a < scatterers_.size(); ++a) {
        for (std::size_t b = a + 1; b < scatterers_.size(); ++b) {
            if (scatterers_[a].theta_norm == scatterers_[b].theta_norm &&
                scatterers_[a].tau_norm == scatterers_[b].tau_norm)
                throw ConfigError("scene has duplicate (theta, tau) pair at indices " +
                                  std::to_string(a) + " and " + std::to_string(b));
        }
    }
}

namespace {

CVector steering(double freq, int length)
{
    CVector v(length);
    for (int n = 0; n < length; ++n)
        v(n) = phasor(-kTwoPi * n * freq);
    return v;
}

} // namespace

CVector angle_steering(double theta_norm, int num_antennas)
{
    return steering(theta_norm, num_antennas);
}

CVector delay_steering(double tau_norm, int num_subcarriers)
{
    return steering(tau_norm, num_subcarriers);
}

NormalizedParams normalize_physical(double doa_deg, double toa_s, const SystemConfig& cfg)
{
    if (!(std::abs(doa_deg) < 90.0))
        throw DomainError("DoA must lie strictly inside (-90, 90) degrees, got " +
                          std::to_string(doa_deg));
    if (!(toa_s >= 0.0))
        throw DomainError("ToA must be non-negative");
    const double theta = cfg.carrier_freq_hz() * cfg.element_spacing_m() *
                         std::sin(doa_deg * kPi / 180.0) / kSpeedOfLight;
    const double tau = cfg.subcarrier_spacing_hz() * toa_s;
    return {wrap_unit(theta), wrap_unit(tau)};
}

PhysicalParams denormalize(double theta_norm, double tau_norm, const SystemConfig& cfg)
{
    const double arg = kSpeedOfLight * wrap_signed(theta_norm) /
                       (cfg.carrier_freq_hz() * cfg.element_spacing_m());
    if (std::abs(arg) > 1.0)
        throw DomainError("normalized DoA " + std::to_string(theta_norm) +
                          " has no physical angle for this element spacing");
    return {std::asin(arg) * 180.0 / kPi, wrap_unit(tau_norm) / cfg.subcarrier_spacing_hz()};
}

ChannelMatrix synthesize_channel(const Scene& scene, const SystemConfig& cfg)
{
    const int R = cfg.num_antennas();
    const int S = cfg.num_subcarriers();
    if (R < 1 || S < 1)
        throw DimensionError("channel dimensions must be positive");
    ChannelMatrix out;
    out.entries = CMatrix::Zero(R, S);
    for (const auto& sc : scene.scatterers()) {
        const CVector a = angle_steering(sc.theta_norm, R);
        const CVector b = delay_steering(sc.tau_norm, S);
        out.entries.noalias() += sc.gain * (a * b.transpose());
    }
    return out;
}

ChannelMatrix add_awgn(const ChannelMatrix& channel, double snr_db, std::uint64_t seed)
{
    if (!channel.entries.allFinite())
        throw DomainError("channel matrix has non-finite entries");
    if (std::isinf(snr_db) && snr_db > 0)
        return channel;
    if (std::isnan(snr_db))
        throw DomainError("SNR is NaN");

    const double signal_power = channel.entries.squaredNorm() / static_cast<double>(channel.entries.size());
    if (signal_power == 0.0)
        throw DomainError("SNR is undefined for an all-zero channel");
    const double variance = signal_power / std::pow(10.0, snr_db / 10.0);
    const double component_sd = std::sqrt(variance / 2.0);

    ChannelMatrix out = channel;
    Rng rng(seed);
    // Row-major draw order keeps the realization independent of storage order.
    for (int r = 0; r < out.rows(); ++r) {
        for (int s = 0; s < out.cols(); ++s) {
            const double re = rng.normal();
            const double im = rng.normal();
            out.entries(r, s) += Complex(component_sd * re, component_sd * im);
        }
    }
    out.noise_variance = channel.noise_variance + variance;
    return out;
}

Scene random_scene(int num_paths, const SystemConfig& cfg, std::uint64_t seed,
                   const SceneDrawOptions& options)
{
    if (num_paths < 1)
        throw ConfigError("number of paths must be >= 1");
    const long long capacity =
        static_cast<long long>(cfg.num_antennas()) * cfg.num_subcarriers() / 4;
    if (num_paths > capacity)
        throw ConfigError("number of paths " + std::to_string(num_paths) +
                          " exceeds R*S/4 = " + std::to_string(capacity));
    if (!(options.doa_min_deg < options.doa_max_deg) || options.doa_min_deg <= -90.0 ||
        options.doa_max_deg >= 90.0)
        throw ConfigError("invalid DoA draw range");

    double toa_max = options.toa_max_s;
    if (!options.allow_delay_wrap)
        toa_max = std::min(toa_max, 0.95 / cfg.subcarrier_spacing_hz());

    constexpr double kMinSeparation = 1e-6;
    Rng rng(seed);
    std::vector<Scatterer> paths;
    paths.reserve(num_paths);
    while (static_cast<int>(paths.size()) < num_paths) {
        const double phase = rng.uniform(0.0, kTwoPi);
        const double doa = rng.uniform(options.doa_min_deg, options.doa_max_deg);
        const double toa = rng.uniform(0.0, toa_max);
        const auto norm = normalize_physical(doa, toa, cfg);
        const bool too_close = std::any_of(paths.begin(), paths.end(), [&](const Scatterer& p) {
            return circular_distance(p.theta_norm, norm.theta_norm) <= kMinSeparation &&
                   circular_distance(p.tau_norm, norm.tau_norm) <= kMinSeparation;
        });
        if (too_close)
            continue;
        paths.emplace_back(phasor(phase), norm.theta_norm, norm.tau_norm);
    }
    return Scene(std::move(paths));
}

} // namespace dtek
