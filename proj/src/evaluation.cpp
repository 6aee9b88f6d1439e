#include "dtek/evaluation.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "dtek/rng.hpp"

namespace dtek {

MatchResult match_estimates(const Scene& truth, const SignatureEstimate& est, int rows, int cols)
{
    const double tol_theta = 1.0 / rows;
    const double tol_tau = 1.0 / cols;
    // Absorbs rounding in the circular distance at exactly one bin.
    const double slack = 1.0 + 1e-12;

    std::vector<int> order(est.paths.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(est.paths[a].gain) > std::abs(est.paths[b].gain);
    });

    MatchResult out;
    std::vector<bool> claimed(truth.size(), false);
    for (int e : order) {
        const auto& p = est.paths[static_cast<std::size_t>(e)];
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < truth.size(); ++q) {
            if (claimed[q])
                continue;
            const double dt = circular_distance(p.theta_norm, truth[q].theta_norm);
            const double dd = circular_distance(p.tau_norm, truth[q].tau_norm);
            if (dt > tol_theta * slack || dd > tol_tau * slack)
                continue;
            const double dist = std::hypot(dt * rows, dd * cols);
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<int>(q);
            }
        }
        if (best >= 0) {
            claimed[static_cast<std::size_t>(best)] = true;
            out.hits.emplace_back(best, e);
        } else {
            out.false_alarms.push_back(e);
        }
    }
    for (std::size_t q = 0; q < truth.size(); ++q)
        if (!claimed[q])
            out.misses.push_back(static_cast<int>(q));
    return out;
}

double doa_deg_clamped(double theta_norm, const SystemConfig& cfg)
{
    const double arg = kSpeedOfLight * wrap_signed(theta_norm) / (cfg.carrier_freq_hz() * cfg.element_spacing_m());
    return std::asin(std::clamp(arg, -1.0, 1.0)) * 180.0 / kPi;
}

TrialRecord score_trial(int trial, const Scene& truth, const SignatureEstimate& est, const SystemConfig& cfg)
{
    const MatchResult m = match_estimates(truth, est, cfg.num_antennas(), cfg.num_subcarriers());
    TrialRecord rec;
    rec.trial = trial;
    rec.true_paths = static_cast<int>(truth.size());
    rec.estimated_paths = static_cast<int>(est.size());
    rec.hits = static_cast<int>(m.hits.size());
    rec.false_alarms = static_cast<int>(m.false_alarms.size());
    rec.misses = static_cast<int>(m.misses.size());
    rec.runtime_s = est.runtime_s;
    const double df = cfg.subcarrier_spacing_hz();
    for (const auto& [q, e] : m.hits) {
        const Scatterer& t = truth[static_cast<std::size_t>(q)];
        const EstimatedPath& p = est.paths[static_cast<std::size_t>(e)];
        HitError h;
        h.theta_err = wrap_signed(p.theta_norm - t.theta_norm);
        h.tau_err = wrap_signed(p.tau_norm - t.tau_norm);
        h.doa_err_deg = doa_deg_clamped(p.theta_norm, cfg) - doa_deg_clamped(t.theta_norm, cfg);
        h.toa_err_s = h.tau_err / df;
        h.gain_err_abs = std::abs(p.gain - t.gain);
        rec.errors.push_back(h);
    }
    return rec;
}

MetricsSummary summarize_trials(const std::vector<TrialRecord>& records)
{
    MetricsSummary s;
    s.trials = static_cast<int>(records.size());
    double hit_sum = 0.0, false_sum = 0.0, time_sum = 0.0;
    double e_doa = 0.0, e_toa = 0.0, e_gain = 0.0, e_theta = 0.0, e_tau = 0.0;
    int ok = 0;
    for (const auto& r : records) {
        if (r.failed) {
            ++s.failed_trials;
            continue;
        }
        ++ok;
        hit_sum += r.true_paths > 0 ? static_cast<double>(r.hits) / r.true_paths : 1.0;
        false_sum += static_cast<double>(r.false_alarms) / std::max(r.estimated_paths, 1);
        time_sum += r.runtime_s;
        for (const auto& h : r.errors) {
            ++s.total_hits;
            e_doa += h.doa_err_deg * h.doa_err_deg;
            e_toa += h.toa_err_s * h.toa_err_s;
            e_gain += h.gain_err_abs * h.gain_err_abs;
            e_theta += h.theta_err * h.theta_err;
            e_tau += h.tau_err * h.tau_err;
        }
    }
    if (ok > 0) {
        s.hit_rate = hit_sum / ok;
        s.false_rate = false_sum / ok;
        s.mean_runtime_s = time_sum / ok;
    }
    if (s.total_hits > 0) {
        const double n = static_cast<double>(s.total_hits);
        s.rmse_doa_deg = std::sqrt(e_doa / n);
        s.rmse_toa_s = std::sqrt(e_toa / n);
        s.rmse_gain = std::sqrt(e_gain / n);
        s.rmse_theta_norm = std::sqrt(e_theta / n);
        s.rmse_tau_norm = std::sqrt(e_tau / n);
    }
    return s;
}

MetricsSummary rmse_metrics(const std::vector<TrialRecord>& records)
{
    MetricsSummary s = summarize_trials(records);
    if (s.total_hits == 0)
        throw NoHitsError("no hits across " + std::to_string(records.size()) + " trials; RMSE undefined");
    return s;
}

void MethodSettings::validate() const
{
    threshold.validate();
    if (dict_points_theta < 2 || dict_points_tau < 2)
        throw ConfigError("dictionary needs at least 2 grid points per axis");
    if (stop)
        stop->validate();
    if (music_grid < 3)
        throw ConfigError("MUSIC grid needs at least 3 points per axis");
}

MethodRunner::MethodRunner(MethodSettings settings, int rows, int cols)
    : settings_(std::move(settings)), rows_(rows), cols_(cols),
      omp_(rows, cols, settings_.dict_points_theta, settings_.dict_points_tau)
{
    settings_.validate();
}

SignatureEstimate MethodRunner::run(Method method, const ChannelMatrix& channel, std::optional<int> num_paths) const
{
    if (channel.rows() != rows_ || channel.cols() != cols_)
        throw DimensionError("runner built for " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                             ", channel is " + std::to_string(channel.rows()) + "x" +
                             std::to_string(channel.cols()));
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    const auto path_count = [&]() -> int {
        if (num_paths)
            return *num_paths;
        return static_cast<int>(detect_peaks(idft2(channel), settings_.threshold).size());
    };

    SignatureEstimate est;
    switch (method) {
    case Method::Dft:
        est = estimate_dft(channel, settings_.threshold);
        break;
    case Method::Rotation:
        est = estimate_rotation(channel, settings_.threshold, settings_.stages);
        break;
    case Method::Omp2d:
    case Method::Omp1d: {
        StopRule stop;
        if (settings_.stop) {
            stop = *settings_.stop;
        } else {
            const int q = path_count();
            if (q < 1) {
                est.method = method;
                break;
            }
            stop = StopRule::known_sparsity(q);
        }
        est = omp_.estimate(channel, stop, method, settings_.omp1d_memory_cap);
        break;
    }
    case Method::Music: {
        const SmoothingSpec spec = settings_.smoothing.value_or(SmoothingSpec::default_for(rows_, cols_));
        est = estimate_music(channel, spec, path_count(), settings_.music_grid, settings_.music_memory_cap);
        break;
    }
    }
    est.method = method;
    est.runtime_s = std::chrono::duration<double>(clock::now() - start).count();
    return est;
}

void MonteCarloConfig::validate() const
{
    if (methods.empty())
        throw ConfigError("no methods selected");
    if (snr_db.empty())
        throw ConfigError("SNR list is empty");
    for (double s : snr_db)
        if (std::isnan(s))
            throw ConfigError("SNR values must be numbers");
    if (trials < 1)
        throw ConfigError("trials must be >= 1");
    if (num_paths < 1)
        throw ConfigError("number of paths must be >= 1");
    if (threads < 0)
        throw ConfigError("threads must be >= 0");
    settings.validate();
}

std::uint64_t noise_seed(std::uint64_t seed_base, int trial, double snr_db)
{
    return derive_seed(seed_base + static_cast<std::uint64_t>(trial), std::bit_cast<std::uint64_t>(snr_db));
}

MonteCarloResult monte_carlo(const MonteCarloConfig& config)
{
    config.validate();
    const std::size_t n_snr = config.snr_db.size();
    const std::size_t n_method = config.methods.size();
    const int trials = config.trials;

    MonteCarloResult result;
    result.records.assign(n_snr, std::vector<std::vector<TrialRecord>>(
                                     n_method, std::vector<TrialRecord>(static_cast<std::size_t>(trials))));

    const MethodRunner runner(config.settings, config.system.num_antennas(), config.system.num_subcarriers());

    const auto run_trial = [&](int t) {
        const Scene scene = random_scene(config.num_paths, config.system,
                                         config.seed_base + static_cast<std::uint64_t>(t), config.scene);
        const ChannelMatrix clean = synthesize_channel(scene, config.system);
        for (std::size_t si = 0; si < n_snr; ++si) {
            const double snr = config.snr_db[si];
            const ChannelMatrix noisy = add_awgn(clean, snr, noise_seed(config.seed_base, t, snr));
            for (std::size_t mi = 0; mi < n_method; ++mi) {
                TrialRecord& slot = result.records[si][mi][static_cast<std::size_t>(t)];
                try {
                    const SignatureEstimate est = runner.run(config.methods[mi], noisy, config.num_paths);
                    slot = score_trial(t, scene, est, config.system);
                } catch (const Error& e) {
                    slot = TrialRecord{};
                    slot.trial = t;
                    slot.true_paths = config.num_paths;
                    slot.failed = true;
                    slot.failure = e.what();
                }
            }
        }
    };

    int workers = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, trials);
    if (workers == 1) {
        for (int t = 0; t < trials; ++t)
            run_trial(t);
    } else {
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int t = w; t < trials; t += workers)
                        run_trial(t);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool)
            th.join();
        for (const auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    for (std::size_t si = 0; si < n_snr; ++si) {
        for (std::size_t mi = 0; mi < n_method; ++mi) {
            MetricsSummary s = summarize_trials(result.records[si][mi]);
            s.method = to_string(config.methods[mi]);
            s.snr_db = config.snr_db[si];
            s.seed_base = config.seed_base;
            result.summaries.push_back(std::move(s));
        }
    }
    return result;
}

void RuntimeTableConfig::validate() const
{
    if (sizes.empty() || num_paths.empty() || methods.empty())
        throw ConfigError("runtime table needs sizes, path counts and methods");
    for (int s : sizes)
        if (s < 2)
            throw ConfigError("runtime table sizes must be >= 2");
    for (int q : num_paths)
        if (q < 1)
            throw ConfigError("runtime table path counts must be >= 1");
    if (repetitions < 1)
        throw ConfigError("repetitions must be >= 1");
    if (!(max_projected_s > 0.0))
        throw ConfigError("max_projected_s must be positive");
    settings.validate();
}

const RuntimeCell& RuntimeTable::at(Method method, int q, int size) const
{
    const auto mi = std::find(methods.begin(), methods.end(), method) - methods.begin();
    const auto qi = std::find(num_paths.begin(), num_paths.end(), q) - num_paths.begin();
    const auto si = std::find(sizes.begin(), sizes.end(), size) - sizes.begin();
    if (mi == static_cast<long>(methods.size()) || qi == static_cast<long>(num_paths.size()) ||
        si == static_cast<long>(sizes.size()))
        throw IndexError("runtime table has no such cell");
    return cells[static_cast<std::size_t>(mi)][static_cast<std::size_t>(qi)][static_cast<std::size_t>(si)];
}

namespace {

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Exponent of the dominant cost in the array size N (R = S = N). MUSIC is
// bound by the eigen-decomposition of an (N/2)^2 covariance.
double growth_exponent(Method m)
{
    return m == Method::Music ? 6.0 : 2.0;
}

} // namespace

RuntimeTable runtime_table(const RuntimeTableConfig& config)
{
    config.validate();
    RuntimeTable table;
    table.methods = config.methods;
    table.num_paths = config.num_paths;
    table.sizes = config.sizes;
    table.cells.assign(config.methods.size(),
                       std::vector<std::vector<RuntimeCell>>(config.num_paths.size(),
                                                             std::vector<RuntimeCell>(config.sizes.size())));

    for (std::size_t si = 0; si < config.sizes.size(); ++si) {
        const int n = config.sizes[si];
        const SystemConfig sys = config.system.resized(n, n);
        const MethodRunner runner(config.settings, n, n);
        for (std::size_t qi = 0; qi < config.num_paths.size(); ++qi) {
            const int q = config.num_paths[qi];
            const Scene scene = random_scene(q, sys, config.seed);
            const ChannelMatrix h =
                add_awgn(synthesize_channel(scene, sys), config.snr_db, noise_seed(config.seed, 0, config.snr_db));
            for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
                const Method m = config.methods[mi];
                RuntimeCell& cell = table.cells[mi][qi][si];

                std::size_t need = 0, cap = 0;
                if (m == Method::Music) {
                    need = music_working_bytes(h, config.settings.smoothing.value_or(SmoothingSpec::default_for(n, n)));
                    cap = config.settings.music_memory_cap;
                } else if (m == Method::Omp1d) {
                    need = omp1d_dictionary_bytes(n, n, config.settings.dict_points_theta,
                                                  config.settings.dict_points_tau);
                    cap = config.settings.omp1d_memory_cap;
                }
                if (need > cap) {
                    cell.status = RuntimeCell::Status::MemoryCap;
                    continue;
                }

                // Project from the nearest smaller measured size of this row.
                for (std::size_t prev = si; prev-- > 0;) {
                    const RuntimeCell& p = table.cells[mi][qi][prev];
                    if (p.status != RuntimeCell::Status::Measured)
                        continue;
                    const double ratio = static_cast<double>(n) / config.sizes[prev];
                    const double projected = p.median_s * std::pow(ratio, growth_exponent(m));
                    if (projected > config.max_projected_s) {
                        cell.status = RuntimeCell::Status::Skipped;
                        cell.projected_s = projected;
                    }
                    break;
                }
                if (cell.status == RuntimeCell::Status::Skipped)
                    continue;

                std::vector<double> times;
                try {
                    runner.run(m, h, q); // untimed warm-up
                    for (int r = 0; r < config.repetitions; ++r)
                        times.push_back(runner.run(m, h, q).runtime_s);
                } catch (const MemoryCapError&) {
                    cell.status = RuntimeCell::Status::MemoryCap;
                    continue;
                }
                cell.status = RuntimeCell::Status::Measured;
                cell.median_s = median(times);
            }
        }
    }
    return table;
}

} // namespace dtek
