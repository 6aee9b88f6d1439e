#include "dtek/dtek.h"

#include <cstring>
#include <new>
#include <string>

#include "dtek/evaluation.hpp"
#include "dtek/io.hpp"
#include "dtek/run_config.hpp"

using nlohmann::json;

struct dtek_config {
    json document; // user document, before defaults
    dtek::RunConfig parsed;
};

struct dtek_channel {
    dtek::ChannelMatrix matrix;
};

struct dtek_estimate {
    dtek::SignatureEstimate estimate;
    dtek::SystemConfig system = dtek::SystemConfig::defaults();
    std::uint64_t seed = 0;
    json config;
};

namespace {

thread_local std::string last_error;

dtek_status fail(dtek_status status, const char* message)
{
    last_error = message;
    return status;
}

template <class F>
dtek_status guarded(F&& f)
{
    try {
        f();
        return DTEK_OK;
    } catch (const dtek::Error& e) {
        return fail(static_cast<dtek_status>(e.kind()), e.what());
    } catch (const json::exception& e) {
        return fail(DTEK_ERR_CONFIG, e.what());
    } catch (const std::bad_alloc&) {
        return fail(DTEK_ERR_RESOURCE, "out of memory");
    } catch (const std::exception& e) {
        return fail(DTEK_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(DTEK_ERR_INTERNAL, "unknown error");
    }
}

#define DTEK_REQUIRE(ptr)                                                 \
    do {                                                                  \
        if ((ptr) == nullptr)                                             \
            return fail(DTEK_ERR_CONFIG, "null argument '" #ptr "'");    \
    } while (0)

char* copy_string(const std::string& s)
{
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* dtek_version(void)
{
#ifdef DTEK_VERSION
    return DTEK_VERSION;
#else
    return "unknown";
#endif
}

const char* dtek_last_error(void)
{
    return last_error.c_str();
}

void dtek_string_free(char* s)
{
    delete[] s;
}

dtek_status dtek_config_new(dtek_config** out)
{
    DTEK_REQUIRE(out);
    return guarded([&] {
        auto* cfg = new dtek_config{json::object(), dtek::parse_run_config(json::object())};
        *out = cfg;
    });
}

dtek_status dtek_config_from_json(const char* json_text, dtek_config** out)
{
    DTEK_REQUIRE(json_text);
    DTEK_REQUIRE(out);
    return guarded([&] {
        json doc = dtek::parse_config_text(json_text, "config");
        dtek::RunConfig parsed = dtek::parse_run_config(doc);
        *out = new dtek_config{std::move(doc), std::move(parsed)};
    });
}

dtek_status dtek_config_load(const char* path, dtek_config** out)
{
    DTEK_REQUIRE(path);
    DTEK_REQUIRE(out);
    return guarded([&] {
        json doc = dtek::load_config_file(path);
        dtek::RunConfig parsed = dtek::parse_run_config(doc);
        *out = new dtek_config{std::move(doc), std::move(parsed)};
    });
}

dtek_status dtek_config_patch(dtek_config* cfg, const char* json_patch)
{
    DTEK_REQUIRE(cfg);
    DTEK_REQUIRE(json_patch);
    return guarded([&] {
        const json patch = dtek::parse_config_text(json_patch, "patch");
        json doc = cfg->document;
        doc.merge_patch(patch);
        dtek::RunConfig parsed = dtek::parse_run_config(doc);
        cfg->document = std::move(doc);
        cfg->parsed = std::move(parsed);
    });
}

dtek_status dtek_config_to_json(const dtek_config* cfg, char** out)
{
    DTEK_REQUIRE(cfg);
    DTEK_REQUIRE(out);
    return guarded([&] { *out = copy_string(dtek::resolved_json(cfg->parsed).dump(2)); });
}

void dtek_config_free(dtek_config* cfg)
{
    delete cfg;
}

dtek_status dtek_channel_synthesize(const dtek_config* cfg, dtek_channel** out)
{
    DTEK_REQUIRE(cfg);
    DTEK_REQUIRE(out);
    return guarded([&] { *out = new dtek_channel{dtek::build_channel(cfg->parsed)}; });
}

dtek_status dtek_channel_from_data(uint32_t rows, uint32_t cols, const double* interleaved, double noise_variance,
                                   dtek_channel** out)
{
    DTEK_REQUIRE(interleaved);
    DTEK_REQUIRE(out);
    if (rows < 1 || cols < 1)
        return fail(DTEK_ERR_CONFIG, "channel dimensions must be positive");
    if (!(noise_variance >= 0.0))
        return fail(DTEK_ERR_CONFIG, "noise variance must be >= 0");
    return guarded([&] {
        dtek::ChannelMatrix m;
        m.entries.resize(rows, cols);
        m.noise_variance = noise_variance;
        for (uint32_t r = 0; r < rows; ++r)
            for (uint32_t s = 0; s < cols; ++s) {
                const std::size_t k = 2 * (static_cast<std::size_t>(r) * cols + s);
                m.entries(r, s) = dtek::Complex(interleaved[k], interleaved[k + 1]);
            }
        *out = new dtek_channel{std::move(m)};
    });
}

dtek_status dtek_channel_read(const char* path, dtek_channel** out)
{
    DTEK_REQUIRE(path);
    DTEK_REQUIRE(out);
    return guarded([&] { *out = new dtek_channel{dtek::read_channel_file(path)}; });
}

dtek_status dtek_channel_write(const dtek_channel* ch, const char* path)
{
    DTEK_REQUIRE(ch);
    DTEK_REQUIRE(path);
    return guarded([&] { dtek::write_channel_file(path, ch->matrix); });
}

dtek_status dtek_channel_dims(const dtek_channel* ch, uint32_t* rows, uint32_t* cols)
{
    DTEK_REQUIRE(ch);
    DTEK_REQUIRE(rows);
    DTEK_REQUIRE(cols);
    *rows = static_cast<uint32_t>(ch->matrix.rows());
    *cols = static_cast<uint32_t>(ch->matrix.cols());
    return DTEK_OK;
}

dtek_status dtek_channel_noise_variance(const dtek_channel* ch, double* out)
{
    DTEK_REQUIRE(ch);
    DTEK_REQUIRE(out);
    *out = ch->matrix.noise_variance;
    return DTEK_OK;
}

dtek_status dtek_channel_copy_data(const dtek_channel* ch, double* interleaved, size_t count)
{
    DTEK_REQUIRE(ch);
    DTEK_REQUIRE(interleaved);
    const std::size_t need = 2 * static_cast<std::size_t>(ch->matrix.entries.size());
    if (count < need)
        return fail(DTEK_ERR_CONFIG, "output buffer too small for channel data");
    for (int r = 0; r < ch->matrix.rows(); ++r)
        for (int s = 0; s < ch->matrix.cols(); ++s) {
            const std::size_t k = 2 * (static_cast<std::size_t>(r) * ch->matrix.cols() + s);
            interleaved[k] = ch->matrix.entries(r, s).real();
            interleaved[k + 1] = ch->matrix.entries(r, s).imag();
        }
    return DTEK_OK;
}

void dtek_channel_free(dtek_channel* ch)
{
    delete ch;
}

dtek_status dtek_estimate_run(const dtek_config* cfg, const dtek_channel* ch, dtek_estimate** out)
{
    DTEK_REQUIRE(cfg);
    DTEK_REQUIRE(ch);
    DTEK_REQUIRE(out);
    return guarded([&] {
        const dtek::RunConfig& rc = cfg->parsed;
        const dtek::MethodRunner runner(rc.settings, ch->matrix.rows(), ch->matrix.cols());
        auto* est = new dtek_estimate;
        try {
            est->estimate = runner.run(rc.method, ch->matrix, rc.num_paths);
            est->system = rc.system.resized(ch->matrix.rows(), ch->matrix.cols());
            est->seed = rc.seed;
            est->config = dtek::resolved_json(rc);
        } catch (...) {
            delete est;
            throw;
        }
        *out = est;
    });
}

dtek_status dtek_estimate_count(const dtek_estimate* est, size_t* out)
{
    DTEK_REQUIRE(est);
    DTEK_REQUIRE(out);
    *out = est->estimate.size();
    return DTEK_OK;
}

dtek_status dtek_estimate_path(const dtek_estimate* est, size_t index, double* gain_re, double* gain_im,
                               double* theta_norm, double* tau_norm)
{
    DTEK_REQUIRE(est);
    if (index >= est->estimate.size())
        return fail(DTEK_ERR_NUMERIC, "IndexError: path index out of range");
    const dtek::EstimatedPath& p = est->estimate.paths[index];
    if (gain_re)
        *gain_re = p.gain.real();
    if (gain_im)
        *gain_im = p.gain.imag();
    if (theta_norm)
        *theta_norm = p.theta_norm;
    if (tau_norm)
        *tau_norm = p.tau_norm;
    return DTEK_OK;
}

dtek_status dtek_estimate_runtime(const dtek_estimate* est, double* seconds)
{
    DTEK_REQUIRE(est);
    DTEK_REQUIRE(seconds);
    *seconds = est->estimate.runtime_s;
    return DTEK_OK;
}

dtek_status dtek_estimate_to_json(const dtek_estimate* est, char** out)
{
    DTEK_REQUIRE(est);
    DTEK_REQUIRE(out);
    return guarded([&] {
        json doc = dtek::estimate_json(est->estimate, est->system);
        doc["seed"] = est->seed;
        doc["config"] = est->config;
        *out = copy_string(doc.dump(2));
    });
}

void dtek_estimate_free(dtek_estimate* est)
{
    delete est;
}

dtek_status dtek_sweep_run(const dtek_config* cfg, const char* csv_path, const char* manifest_path)
{
    DTEK_REQUIRE(cfg);
    DTEK_REQUIRE(csv_path);
    return guarded([&] {
        const dtek::MonteCarloResult result = dtek::monte_carlo(dtek::to_monte_carlo(cfg->parsed));
        const std::string csv = dtek::sweep_csv(result.summaries);
        dtek::write_file_atomic(csv_path, [&](std::ostream& o) { o << csv; });
        if (manifest_path) {
            json manifest = dtek::run_manifest("sweep", cfg->parsed);
            json summaries = json::array();
            for (const auto& s : result.summaries)
                summaries.push_back(dtek::summary_json(s));
            manifest["summaries"] = summaries;
            json failures = json::array();
            for (std::size_t si = 0; si < result.records.size(); ++si)
                for (std::size_t mi = 0; mi < result.records[si].size(); ++mi)
                    for (const auto& r : result.records[si][mi])
                        if (r.failed)
                            failures.push_back({{"method", dtek::to_string(cfg->parsed.sweep_methods[mi])},
                                                {"snr_db", cfg->parsed.sweep_snr_db[si]},
                                                {"trial", r.trial},
                                                {"error", r.failure}});
            manifest["failures"] = failures;
            const std::string text = manifest.dump(2) + "\n";
            dtek::write_file_atomic(manifest_path, [&](std::ostream& o) { o << text; });
        }
    });
}

dtek_status dtek_runtime_table_run(const dtek_config* cfg, const char* csv_path, const char* manifest_path)
{
    DTEK_REQUIRE(cfg);
    DTEK_REQUIRE(csv_path);
    return guarded([&] {
        const dtek::RuntimeTable table = dtek::runtime_table(dtek::to_runtime_table(cfg->parsed));
        const std::string csv = dtek::runtime_table_csv(table);
        dtek::write_file_atomic(csv_path, [&](std::ostream& o) { o << csv; });
        if (manifest_path) {
            json manifest = dtek::run_manifest("runtime-table", cfg->parsed);
            manifest["cells"] = dtek::runtime_table_json(table);
            const std::string text = manifest.dump(2) + "\n";
            dtek::write_file_atomic(manifest_path, [&](std::ostream& o) { o << text; });
        }
    });
}

} // extern "C"
