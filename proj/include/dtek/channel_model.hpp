#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dtek/common.hpp"

namespace dtek {

/// Array and waveform geometry of a ULA receiving an OFDM signal.
///
/// The subcarrier spacing is derived (bandwidth / subcarriers) and never
/// stored. Element spacing defaults to half a carrier wavelength.
class SystemConfig {
public:
    SystemConfig(double carrier_freq_hz, double bandwidth_hz, int num_antennas, int num_subcarriers,
                 std::optional<double> element_spacing_m = std::nullopt);

    /// 73 GHz carrier, 1 GHz bandwidth, 64 antennas, 64 subcarriers, lambda/2.
    static SystemConfig defaults();

    double carrier_freq_hz() const { return carrier_freq_hz_; }
    double bandwidth_hz() const { return bandwidth_hz_; }
    int num_antennas() const { return num_antennas_; }
    int num_subcarriers() const { return num_subcarriers_; }
    double element_spacing_m() const { return element_spacing_m_; }
    double subcarrier_spacing_hz() const { return bandwidth_hz_ / num_subcarriers_; }
    double wavelength_m() const { return kSpeedOfLight / carrier_freq_hz_; }

    /// Same geometry with a different array/subcarrier count (spacing kept).
    SystemConfig resized(int num_antennas, int num_subcarriers) const;

private:
    double carrier_freq_hz_;
    double bandwidth_hz_;
    int num_antennas_;
    int num_subcarriers_;
    double element_spacing_m_;
};

/// One point scatterer; normalized parameters are kept modulo 1.
struct Scatterer {
    Complex gain{1.0, 0.0};
    double theta_norm = 0.0;
    double tau_norm = 0.0;

    Scatterer() = default;
    Scatterer(Complex g, double theta, double tau)
        : gain(g), theta_norm(wrap_unit(theta)), tau_norm(wrap_unit(tau))
    {
    }
};

/// Ground-truth scene. Duplicate (theta, tau) pairs are rejected.
class Scene {
public:
    Scene() = default;
    explicit Scene(std::vector<Scatterer> scatterers);

    const std::vector<Scatterer>& scatterers() const { return scatterers_; }
    std::size_t size() const { return scatterers_.size(); }
    bool empty() const { return scatterers_.empty(); }
    const Scatterer& operator[](std::size_t q) const { return scatterers_[q]; }

private:
    std::vector<Scatterer> scatterers_;
};

/// R x S space-frequency response plus the per-entry noise variance that was
/// added to it (0 when noiseless).
struct ChannelMatrix {
    CMatrix entries;
    double noise_variance = 0.0;

    int rows() const { return static_cast<int>(entries.rows()); }
    int cols() const { return static_cast<int>(entries.cols()); }
};

/// a(theta) with entry r = exp(-j 2 pi r theta).
CVector angle_steering(double theta_norm, int num_antennas);

/// b(tau) with entry s = exp(-j 2 pi s tau).
CVector delay_steering(double tau_norm, int num_subcarriers);

struct NormalizedParams {
    double theta_norm;
    double tau_norm;
};

struct PhysicalParams {
    double doa_deg;
    double toa_s;
};

/// theta = f_c d sin(doa) / c and tau = delta_f * toa, both reduced mod 1.
NormalizedParams normalize_physical(double doa_deg, double toa_s, const SystemConfig& cfg);

/// Inverse of normalize_physical on the unambiguous domain.
PhysicalParams denormalize(double theta_norm, double tau_norm, const SystemConfig& cfg);

/// Noiseless H = sum_q gain_q a(theta_q) b(tau_q)^T.
ChannelMatrix synthesize_channel(const Scene& scene, const SystemConfig& cfg);

/// Adds i.i.d. circular complex Gaussian noise with variance
/// mean(|H|^2) / 10^(snr_db/10). An infinite snr_db returns H unchanged.
ChannelMatrix add_awgn(const ChannelMatrix& channel, double snr_db, std::uint64_t seed);

struct SceneDrawOptions {
    double doa_min_deg = 10.0;
    double doa_max_deg = 80.0;
    double toa_max_s = 333e-9;
    /// When false the delay range is capped at 0.95 / delta_f so that the
    /// normalized delay never wraps.
    bool allow_delay_wrap = false;
};

/// Draws num_paths unit-modulus scatterers with uniform phase, DoA and ToA.
Scene random_scene(int num_paths, const SystemConfig& cfg, std::uint64_t seed,
                   const SceneDrawOptions& options = {});

} // namespace dtek
