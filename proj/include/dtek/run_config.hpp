#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtek/channel_model.hpp"
#include "dtek/evaluation.hpp"

namespace dtek {

/// Fully validated run configuration. Built from a JSON document merged over
/// default_config_json(); unknown keys are rejected.
struct RunConfig {
    SystemConfig system = SystemConfig::defaults();
    std::uint64_t seed = 1;

    // Scene for `synth`: explicit scatterers, or random_paths drawn from seed.
    Scene scene;
    std::optional<int> random_paths;
    std::optional<double> scene_snr_db;

    // Single-shot estimation.
    Method method = Method::Rotation;
    MethodSettings settings;
    std::optional<int> num_paths;

    // Monte-Carlo sweep.
    std::vector<Method> sweep_methods;
    std::vector<double> sweep_snr_db;
    int trials = 200;
    int sweep_paths = 5;
    int threads = 0;
    SceneDrawOptions draw;

    // Runtime table.
    std::vector<int> table_sizes;
    std::vector<int> table_paths;
    std::vector<Method> table_methods;
    int table_repetitions = 5;
    double table_snr_db = 35.0;
    double table_max_projected_s = 300.0;
};

/// Every accepted key with its default value (null marks "unset").
nlohmann::json default_config_json();

/// Parses JSON text; syntax errors become ConfigError with line and column.
nlohmann::json parse_config_text(const std::string& text, const std::string& origin);

nlohmann::json load_config_file(const std::string& path);

/// Throws ConfigError naming the first key of `doc` that the defaults do not
/// know, e.g. "method.stagez".
void reject_unknown_keys(const nlohmann::json& doc);

/// Merges `doc` over the defaults and validates the result.
RunConfig parse_run_config(const nlohmann::json& doc);

/// The resolved configuration with every default spelled out and the SNR
/// range expanded.
nlohmann::json resolved_json(const RunConfig& cfg);

/// Expands "lo:hi:step" or {"lo", "hi", "step"}.
std::vector<double> snr_range(double lo, double hi, double step);
std::vector<double> parse_snr_range(const std::string& spec);

Scene build_scene(const RunConfig& cfg);

/// Scene synthesis plus optional noise at scene_snr_db.
ChannelMatrix build_channel(const RunConfig& cfg);

MonteCarloConfig to_monte_carlo(const RunConfig& cfg);
RuntimeTableConfig to_runtime_table(const RunConfig& cfg);

nlohmann::json estimate_json(const SignatureEstimate& est, const SystemConfig& system);
nlohmann::json summary_json(const MetricsSummary& s);
nlohmann::json runtime_table_json(const RuntimeTable& table);

/// Provenance block for output files: tool version, git revision, host,
/// UTC timestamp, RNG name and the resolved configuration.
nlohmann::json run_manifest(const std::string& command, const RunConfig& cfg);

} // namespace dtek
