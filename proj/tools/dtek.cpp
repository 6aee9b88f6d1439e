// dtek command-line tool. Talks to the library only through the C API.
//
// Precedence: built-in defaults < --config file < command-line flags.

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtek/dtek.h"

using nlohmann::json;

namespace {

struct Failure {
    dtek_status status;
};

void check(dtek_status st)
{
    if (st != DTEK_OK)
        throw Failure{st};
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(item);
    return out;
}

json int_list(const std::string& spec, const std::string& flag)
{
    json out = json::array();
    for (const auto& part : split(spec, ',')) {
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != part.size())
            throw CLI::ValidationError(flag, "expected comma-separated integers, got '" + spec + "'");
        out.push_back(n);
    }
    return out;
}

json method_list(const std::string& spec)
{
    json out = json::array();
    for (const auto& part : split(spec, ','))
        out.push_back(part);
    return out;
}

// "lo:hi:step" becomes a range object, a single value a one-element list.
json snr_spec(const std::string& spec)
{
    const auto parts = split(spec, ':');
    try {
        if (parts.size() == 1)
            return json::array({std::stod(parts[0])});
        if (parts.size() == 3)
            return json{{"lo", std::stod(parts[0])}, {"hi", std::stod(parts[1])}, {"step", std::stod(parts[2])}};
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--snr", "expected lo:hi:step or a single value, got '" + spec + "'");
}

struct Common {
    std::string config_path;
    std::optional<long long> seed;
};

dtek_config* load_config(const Common& common, const json& patch)
{
    dtek_config* cfg = nullptr;
    if (common.config_path.empty())
        check(dtek_config_new(&cfg));
    else
        check(dtek_config_load(common.config_path.c_str(), &cfg));
    json full = patch;
    if (common.seed)
        full["seed"] = *common.seed;
    if (!full.empty()) {
        const dtek_status st = dtek_config_patch(cfg, full.dump().c_str());
        if (st != DTEK_OK) {
            dtek_config_free(cfg);
            throw Failure{st};
        }
    }
    return cfg;
}

void add_common(CLI::App* cmd, Common& common)
{
    cmd->add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", common.seed, "Scene / experiment seed");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"DoA/ToA signature estimation for multi-antenna OFDM channels"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dtek_version()));

    // synth
    Common synth_common;
    std::string synth_out;
    std::optional<double> synth_snr;
    std::optional<int> synth_random;
    auto* synth = app.add_subcommand("synth", "Synthesize the configured scene into a channel file");
    add_common(synth, synth_common);
    synth->add_option("--snr", synth_snr, "Add noise at this SNR (dB)");
    synth->add_option("--random-paths", synth_random, "Draw this many random scatterers from the seed");
    synth->add_option("out", synth_out, "Output channel file")->required();

    // estimate
    Common est_common;
    std::string est_channel, est_method, est_stages;
    std::optional<int> est_dict, est_paths;
    auto* estimate = app.add_subcommand("estimate", "Estimate the signature of a channel file (JSON on stdout)");
    add_common(estimate, est_common);
    estimate->add_option("--method", est_method, "dft | rotation | omp2d | omp1d | music");
    estimate->add_option("--stages", est_stages, "Rotation stage point counts, e.g. 11,5");
    estimate->add_option("--dict-points", est_dict, "OMP dictionary points per axis");
    estimate->add_option("--num-paths", est_paths, "Known path count (OMP sparsity, MUSIC signal dimension)");
    estimate->add_option("channel", est_channel, "Channel file")->required()->check(CLI::ExistingFile);

    // sweep
    Common sweep_common;
    std::string sweep_out, sweep_manifest, sweep_methods, sweep_snr, sweep_stages;
    std::optional<int> sweep_trials, sweep_threads, sweep_dict;
    bool sweep_wrap = false;
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo SNR sweep to CSV plus a JSON manifest");
    add_common(sweep, sweep_common);
    sweep->add_option("--method", sweep_methods, "Comma-separated methods");
    sweep->add_option("--snr", sweep_snr, "lo:hi:step in dB, or a single value");
    sweep->add_option("--trials", sweep_trials, "Trials per SNR point");
    sweep->add_option("--threads", sweep_threads, "Worker threads (0 = host cores)");
    sweep->add_option("--stages", sweep_stages, "Rotation stage point counts, e.g. 11,5");
    sweep->add_option("--dict-points", sweep_dict, "OMP dictionary points per axis");
    sweep->add_flag("--allow-delay-wrap", sweep_wrap, "Draw delays over the full 333 ns range");
    sweep->add_option("--manifest", sweep_manifest, "Manifest path (default: <out>.manifest.json)");
    sweep->add_option("out", sweep_out, "Output CSV")->required();

    // runtime-table
    Common rt_common;
    std::string rt_out, rt_manifest, rt_methods, rt_sizes;
    std::optional<int> rt_reps;
    auto* rt = app.add_subcommand("runtime-table", "Median wall times per method, size and path count");
    add_common(rt, rt_common);
    rt->add_option("--method", rt_methods, "Comma-separated methods");
    rt->add_option("--sizes", rt_sizes, "Comma-separated array sizes (R = S)");
    rt->add_option("--repetitions", rt_reps, "Runs per cell (median reported)");
    rt->add_option("--manifest", rt_manifest, "Manifest path (default: <out>.manifest.json)");
    rt->add_option("out", rt_out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return DTEK_ERR_CONFIG;
    }

    dtek_config* cfg = nullptr;
    dtek_channel* ch = nullptr;
    dtek_estimate* est = nullptr;
    int code = 0;
    try {
        if (*synth) {
            json patch = json::object();
            if (synth_snr)
                patch["scene"]["snr_db"] = *synth_snr;
            if (synth_random)
                patch["scene"]["random_paths"] = *synth_random;
            cfg = load_config(synth_common, patch);
            check(dtek_channel_synthesize(cfg, &ch));
            check(dtek_channel_write(ch, synth_out.c_str()));
        } else if (*estimate) {
            json patch = json::object();
            if (!est_method.empty())
                patch["method"]["name"] = est_method;
            if (!est_stages.empty())
                patch["method"]["stages"] = int_list(est_stages, "--stages");
            if (est_dict)
                patch["method"]["dict_points"] = *est_dict;
            if (est_paths)
                patch["method"]["num_paths"] = *est_paths;
            cfg = load_config(est_common, patch);
            check(dtek_channel_read(est_channel.c_str(), &ch));
            check(dtek_estimate_run(cfg, ch, &est));
            char* text = nullptr;
            check(dtek_estimate_to_json(est, &text));
            std::printf("%s\n", text);
            dtek_string_free(text);
        } else if (*sweep) {
            json patch = json::object();
            if (!sweep_methods.empty())
                patch["experiment"]["methods"] = method_list(sweep_methods);
            if (!sweep_snr.empty())
                patch["experiment"]["snr_db"] = snr_spec(sweep_snr);
            if (sweep_trials)
                patch["experiment"]["trials"] = *sweep_trials;
            if (sweep_threads)
                patch["experiment"]["threads"] = *sweep_threads;
            if (sweep_wrap)
                patch["experiment"]["allow_delay_wrap"] = true;
            if (!sweep_stages.empty())
                patch["method"]["stages"] = int_list(sweep_stages, "--stages");
            if (sweep_dict)
                patch["method"]["dict_points"] = *sweep_dict;
            cfg = load_config(sweep_common, patch);
            const std::string manifest = sweep_manifest.empty() ? sweep_out + ".manifest.json" : sweep_manifest;
            check(dtek_sweep_run(cfg, sweep_out.c_str(), manifest.c_str()));
            std::fprintf(stderr, "wrote %s and %s\n", sweep_out.c_str(), manifest.c_str());
        } else if (*rt) {
            json patch = json::object();
            if (!rt_methods.empty())
                patch["runtime_table"]["methods"] = method_list(rt_methods);
            if (!rt_sizes.empty())
                patch["runtime_table"]["sizes"] = int_list(rt_sizes, "--sizes");
            if (rt_reps)
                patch["runtime_table"]["repetitions"] = *rt_reps;
            cfg = load_config(rt_common, patch);
            const std::string manifest = rt_manifest.empty() ? rt_out + ".manifest.json" : rt_manifest;
            check(dtek_runtime_table_run(cfg, rt_out.c_str(), manifest.c_str()));
            std::fprintf(stderr, "wrote %s and %s\n", rt_out.c_str(), manifest.c_str());
        }
    } catch (const Failure& f) {
        std::fprintf(stderr, "dtek: %s\n", dtek_last_error());
        code = static_cast<int>(f.status);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "dtek: %s\n", e.what());
        code = DTEK_ERR_CONFIG;
    }
    dtek_estimate_free(est);
    dtek_channel_free(ch);
    dtek_config_free(cfg);
    return code;
}
