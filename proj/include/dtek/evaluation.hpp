#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtek/channel_model.hpp"
#include "dtek/music.hpp"
#include "dtek/omp.hpp"
#include "dtek/rotation.hpp"
#include "dtek/signature.hpp"
#include "dtek/spectral.hpp"

namespace dtek {

/// Outcome of matching one estimate against its ground truth.
struct MatchResult {
    std::vector<std::pair<int, int>> hits; // (truth index, estimate index)
    std::vector<int> false_alarms;         // estimate indices
    std::vector<int> misses;               // truth indices
};

/// Greedy matching in descending |gain| order. An estimate claims the nearest
/// unmatched truth whose circular distance is within 1/R in theta and 1/S in
/// tau; nearness is the bin-scaled Euclidean distance, ties to the lower
/// truth index.
MatchResult match_estimates(const Scene& truth, const SignatureEstimate& est, int rows, int cols);

/// Per-hit estimation errors.
struct HitError {
    double theta_err = 0.0; // signed circular, normalized units
    double tau_err = 0.0;
    double doa_err_deg = 0.0;
    double toa_err_s = 0.0;
    double gain_err_abs = 0.0;
};

/// One trial of one method at one SNR.
struct TrialRecord {
    int trial = 0;
    int true_paths = 0;
    int estimated_paths = 0;
    int hits = 0;
    int false_alarms = 0;
    int misses = 0;
    std::vector<HitError> errors;
    double runtime_s = 0.0;
    bool failed = false;
    std::string failure;
};

/// DoA in degrees for a normalized angle; the arcsin argument is clamped to
/// [-1, 1] so element spacings above lambda/2 never throw.
double doa_deg_clamped(double theta_norm, const SystemConfig& cfg);

/// Builds the record for a finished estimate.
TrialRecord score_trial(int trial, const Scene& truth, const SignatureEstimate& est, const SystemConfig& cfg);

struct MetricsSummary {
    std::string method;
    double snr_db = 0.0;
    std::uint64_t seed_base = 0;
    int trials = 0;        // attempted
    int failed_trials = 0; // excluded from every aggregate
    double hit_rate = 0.0;
    double false_rate = 0.0;
    long long total_hits = 0;
    // Absent when there were no hits.
    std::optional<double> rmse_doa_deg;
    std::optional<double> rmse_toa_s;
    std::optional<double> rmse_gain;
    std::optional<double> rmse_theta_norm;
    std::optional<double> rmse_tau_norm;
    double mean_runtime_s = 0.0;
};

/// Aggregates trial records. hit_rate is the mean of hits/Q, false_rate the
/// mean of false_alarms/max(Q_hat, 1), both over the trials that did not fail.
MetricsSummary summarize_trials(const std::vector<TrialRecord>& records);

/// As summarize_trials but throws NoHitsError when no trial produced a hit.
MetricsSummary rmse_metrics(const std::vector<TrialRecord>& records);

/// Estimator parameters shared by the evaluation drivers, the C API and the CLI.
struct MethodSettings {
    ThresholdPolicy threshold = ThresholdPolicy::relative(0.25);
    RotationGridSpec stages = RotationGridSpec::uniform({11, 5});
    int dict_points_theta = 200;
    int dict_points_tau = 200;
    /// Unset: known sparsity equal to the path count handed to run().
    std::optional<StopRule> stop;
    /// Unset: SmoothingSpec::default_for(R, S).
    std::optional<SmoothingSpec> smoothing;
    int music_grid = 200;
    std::size_t omp1d_memory_cap = kDefaultOmp1dMemoryCap;
    std::size_t music_memory_cap = kDefaultMusicMemoryCap;

    void validate() const;
};

/// Runs any method on channels of one fixed size. Dictionaries are built once
/// in the constructor and are not part of the timed region.
class MethodRunner {
public:
    MethodRunner(MethodSettings settings, int rows, int cols);

    /// `num_paths` is the known path count; when unset it is the number of
    /// coarse peaks under the threshold policy. runtime_s is wall-clock time
    /// of the estimator call alone.
    SignatureEstimate run(Method method, const ChannelMatrix& channel,
                          std::optional<int> num_paths = std::nullopt) const;

    const MethodSettings& settings() const { return settings_; }

private:
    MethodSettings settings_;
    int rows_;
    int cols_;
    OmpEstimator omp_;
};

struct MonteCarloConfig {
    SystemConfig system = SystemConfig::defaults();
    std::vector<Method> methods{Method::Dft, Method::Rotation, Method::Omp2d, Method::Music};
    std::vector<double> snr_db;
    int trials = 200;
    std::uint64_t seed_base = 1;
    int num_paths = 5;
    SceneDrawOptions scene;
    MethodSettings settings;
    /// 0 selects the host core count.
    int threads = 0;

    void validate() const;
};

struct MonteCarloResult {
    /// One summary per (snr, method), SNR-major in input order.
    std::vector<MetricsSummary> summaries;
    /// records[snr_index][method_index][trial]
    std::vector<std::vector<std::vector<TrialRecord>>> records;
};

/// Seed of the noise realization for trial `t` at `snr_db`.
std::uint64_t noise_seed(std::uint64_t seed_base, int trial, double snr_db);

/// Paired Monte-Carlo sweep: every method sees the same scene (seed
/// seed_base + t) and the same noise at each (snr, t). Trials are split over
/// worker threads by index and merged in index order, so the result does not
/// depend on the thread count (runtimes aside).
MonteCarloResult monte_carlo(const MonteCarloConfig& config);

struct RuntimeTableConfig {
    SystemConfig system = SystemConfig::defaults();
    std::vector<int> sizes{64, 128, 256};
    std::vector<int> num_paths{5, 10};
    std::vector<Method> methods{Method::Rotation, Method::Omp2d, Method::Music};
    int repetitions = 5; // timed runs per cell, after one untimed warm-up
    std::uint64_t seed = 1;
    double snr_db = 35.0;
    /// MUSIC cells whose projected time exceeds this are skipped.
    double max_projected_s = 300.0;
    MethodSettings settings;

    void validate() const;
};

struct RuntimeCell {
    enum class Status { Measured, MemoryCap, Skipped };
    Status status = Status::Measured;
    double median_s = 0.0;
    double projected_s = 0.0; // set for skipped cells
};

struct RuntimeTable {
    std::vector<Method> methods;
    std::vector<int> num_paths;
    std::vector<int> sizes;
    /// cells[method][q][size]
    std::vector<std::vector<std::vector<RuntimeCell>>> cells;

    const RuntimeCell& at(Method method, int q, int size) const;
};

/// Median-of-N wall times per (method, Q, size) on seeded inputs. Runs are
/// strictly sequential.
RuntimeTable runtime_table(const RuntimeTableConfig& config);

} // namespace dtek
