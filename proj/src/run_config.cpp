#include "dtek/run_config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <sys/utsname.h>
#include <unistd.h>

#include "dtek/rng.hpp"

#ifndef DTEK_VERSION
#define DTEK_VERSION "unknown"
#endif
#ifndef DTEK_GIT_REVISION
#define DTEK_GIT_REVISION "unknown"
#endif

namespace dtek {

using nlohmann::json;

json default_config_json()
{
    return json{
        {"system",
         {{"carrier_freq_hz", 73e9},
          {"bandwidth_hz", 1e9},
          {"num_antennas", 64},
          {"num_subcarriers", 64},
          {"element_spacing_m", nullptr}}},
        {"seed", 1},
        {"scene", {{"scatterers", json::array()}, {"random_paths", nullptr}, {"snr_db", nullptr}}},
        {"method",
         {{"name", "rotation"},
          {"threshold", {{"kind", "relative"}, {"value", 0.25}}},
          {"stages", {11, 5}},
          {"dict_points", 200},
          {"stop", nullptr},
          {"smoothing", nullptr},
          {"music_grid", 200},
          {"num_paths", nullptr},
          {"omp1d_memory_cap_bytes", kDefaultOmp1dMemoryCap},
          {"music_memory_cap_bytes", kDefaultMusicMemoryCap}}},
        {"experiment",
         {{"methods", {"dft", "rotation", "omp2d", "music"}},
          {"snr_db", {{"lo", -25.0}, {"hi", 35.0}, {"step", 5.0}}},
          {"trials", 200},
          {"num_paths", 5},
          {"threads", 0},
          {"allow_delay_wrap", false},
          {"doa_min_deg", 10.0},
          {"doa_max_deg", 80.0},
          {"toa_max_s", 333e-9}}},
        {"runtime_table",
         {{"sizes", {64, 128, 256}},
          {"num_paths", {5, 10}},
          {"methods", {"rotation", "omp2d", "music"}},
          {"repetitions", 5},
          {"snr_db", 35.0},
          {"max_projected_s", 300.0}}},
    };
}

json parse_config_text(const std::string& text, const std::string& origin)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

json load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

namespace {

void check_keys(const json& doc, const json& schema, const std::string& prefix)
{
    if (!doc.is_object())
        throw ConfigError((prefix.empty() ? std::string("config") : prefix) + " must be an object");
    for (const auto& [key, value] : doc.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (!schema.contains(key))
            throw ConfigError("unknown key '" + name + "'");
        if (schema[key].is_object() && value.is_object())
            check_keys(value, schema[key], name);
    }
}

bool present(const json& obj, const char* key)
{
    return obj.contains(key) && !obj[key].is_null();
}

double number(const json& v, const std::string& name)
{
    if (!v.is_number())
        throw ConfigError("'" + name + "' must be a number");
    return v.get<double>();
}

long long integer(const json& v, const std::string& name)
{
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d != std::floor(d) || std::abs(d) > 9e15)
            throw ConfigError("'" + name + "' must be an integer");
        return static_cast<long long>(d);
    }
    if (!v.is_number_integer())
        throw ConfigError("'" + name + "' must be an integer");
    return v.get<long long>();
}

int small_int(const json& v, const std::string& name)
{
    const long long x = integer(v, name);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ConfigError("'" + name + "' out of range");
    return static_cast<int>(x);
}

std::string text(const json& v, const std::string& name)
{
    if (!v.is_string())
        throw ConfigError("'" + name + "' must be a string");
    return v.get<std::string>();
}

bool boolean(const json& v, const std::string& name)
{
    if (!v.is_boolean())
        throw ConfigError("'" + name + "' must be true or false");
    return v.get<bool>();
}

std::vector<Method> method_list(const json& v, const std::string& name)
{
    if (!v.is_array() || v.empty())
        throw ConfigError("'" + name + "' must be a non-empty list of method names");
    std::vector<Method> out;
    for (const auto& m : v)
        out.push_back(parse_method(text(m, name)));
    return out;
}

std::vector<int> int_list(const json& v, const std::string& name)
{
    if (!v.is_array() || v.empty())
        throw ConfigError("'" + name + "' must be a non-empty list of integers");
    std::vector<int> out;
    for (const auto& x : v)
        out.push_back(small_int(x, name));
    return out;
}

Complex gain_value(const json& v)
{
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("'scene.scatterers[].gain' must be a number or [re, im]");
}

Scene parse_scatterers(const json& list, const SystemConfig& system)
{
    if (!list.is_array())
        throw ConfigError("'scene.scatterers' must be a list");
    static const json allowed = {{"gain", 0}, {"theta_norm", 0}, {"tau_norm", 0}, {"doa_deg", 0}, {"toa_s", 0}};
    std::vector<Scatterer> out;
    for (std::size_t k = 0; k < list.size(); ++k) {
        const json& item = list[k];
        const std::string where = "scene.scatterers[" + std::to_string(k) + "]";
        check_keys(item, allowed, where);
        const Complex g = present(item, "gain") ? gain_value(item["gain"]) : Complex(1.0, 0.0);
        const bool has_norm = present(item, "theta_norm") || present(item, "tau_norm");
        const bool has_phys = present(item, "doa_deg") || present(item, "toa_s");
        if (has_norm == has_phys)
            throw ConfigError(where + " needs either theta_norm/tau_norm or doa_deg/toa_s");
        if (has_norm) {
            if (!present(item, "theta_norm") || !present(item, "tau_norm"))
                throw ConfigError(where + " needs both theta_norm and tau_norm");
            out.emplace_back(g, number(item["theta_norm"], where + ".theta_norm"),
                             number(item["tau_norm"], where + ".tau_norm"));
        } else {
            if (!present(item, "doa_deg") || !present(item, "toa_s"))
                throw ConfigError(where + " needs both doa_deg and toa_s");
            NormalizedParams np;
            try {
                np = normalize_physical(number(item["doa_deg"], where + ".doa_deg"),
                                        number(item["toa_s"], where + ".toa_s"), system);
            } catch (const DomainError& e) {
                throw ConfigError(where + ": " + e.what());
            }
            out.emplace_back(g, np.theta_norm, np.tau_norm);
        }
    }
    try {
        return Scene(std::move(out));
    } catch (const Error& e) {
        throw ConfigError(std::string("scene: ") + e.what());
    }
}

RotationGridSpec parse_stages(const json& v)
{
    if (!v.is_array() || v.empty())
        throw ConfigError("'method.stages' must be a non-empty list");
    std::vector<StagePoints> stages;
    for (const auto& st : v) {
        if (st.is_array()) {
            if (st.size() != 2)
                throw ConfigError("'method.stages' pairs must be [n_theta, n_tau]");
            stages.push_back({small_int(st[0], "method.stages"), small_int(st[1], "method.stages")});
        } else {
            const int n = small_int(st, "method.stages");
            stages.push_back({n, n});
        }
    }
    return RotationGridSpec(std::move(stages));
}

ThresholdPolicy parse_threshold(const json& v)
{
    if (!v.is_object())
        throw ConfigError("'method.threshold' must be an object");
    const std::string kind = text(v.value("kind", json("relative")), "method.threshold.kind");
    const double value = number(v.value("value", json(0.25)), "method.threshold.value");
    ThresholdPolicy p;
    if (kind == "relative")
        p = ThresholdPolicy::relative(value);
    else if (kind == "cfar")
        p = ThresholdPolicy::cfar(value);
    else
        throw ConfigError("'method.threshold.kind' must be relative or cfar");
    p.validate();
    return p;
}

StopRule parse_stop(const json& v)
{
    if (!v.is_object() || !present(v, "kind") || !present(v, "value"))
        throw ConfigError("'method.stop' must be {\"kind\": ..., \"value\": ...}");
    const std::string kind = text(v["kind"], "method.stop.kind");
    const double value = number(v["value"], "method.stop.value");
    StopRule s;
    if (kind == "known_sparsity")
        s = {StopRule::Kind::KnownSparsity, value};
    else if (kind == "residual_ratio")
        s = {StopRule::Kind::ResidualRatio, value};
    else if (kind == "max_iters")
        s = {StopRule::Kind::MaxIters, value};
    else
        throw ConfigError("'method.stop.kind' must be known_sparsity, residual_ratio or max_iters");
    s.validate();
    return s;
}

std::pair<int, int> int_pair(const json& v, const std::string& name)
{
    if (v.is_array()) {
        if (v.size() != 2)
            throw ConfigError("'" + name + "' must be an integer or a pair of integers");
        return {small_int(v[0], name), small_int(v[1], name)};
    }
    const int n = small_int(v, name);
    return {n, n};
}

std::size_t byte_count(const json& v, const std::string& name)
{
    const long long x = integer(v, name);
    if (x < 1)
        throw ConfigError("'" + name + "' must be positive");
    return static_cast<std::size_t>(x);
}

std::string stop_kind_name(StopRule::Kind k)
{
    switch (k) {
    case StopRule::Kind::KnownSparsity:
        return "known_sparsity";
    case StopRule::Kind::ResidualRatio:
        return "residual_ratio";
    case StopRule::Kind::MaxIters:
        return "max_iters";
    }
    return "known_sparsity";
}

json method_names(const std::vector<Method>& methods)
{
    json out = json::array();
    for (Method m : methods)
        out.push_back(to_string(m));
    return out;
}

} // namespace

void reject_unknown_keys(const json& doc)
{
    check_keys(doc, default_config_json(), "");
}

std::vector<double> snr_range(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw ConfigError("SNR range needs lo <= hi and step > 0");
    const long long n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (n > 100000)
        throw ConfigError("SNR range has too many points");
    std::vector<double> out;
    for (long long k = 0; k < n; ++k)
        out.push_back(lo + static_cast<double>(k) * step);
    return out;
}

std::vector<double> parse_snr_range(const std::string& spec)
{
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad SNR range '" + spec + "' (expected lo:hi:step or a single value)");
        }
    }
    if (parts.size() == 1)
        return parts;
    if (parts.size() != 3)
        throw ConfigError("bad SNR range '" + spec + "' (expected lo:hi:step or a single value)");
    return snr_range(parts[0], parts[1], parts[2]);
}

RunConfig parse_run_config(const json& doc)
{
    reject_unknown_keys(doc);
    json merged = default_config_json();
    merged.merge_patch(doc);
    for (const char* section : {"system", "scene", "method", "experiment", "runtime_table"})
        if (!merged[section].is_object())
            throw ConfigError(std::string("'") + section + "' must be an object");

    RunConfig cfg;
    const json& sys = merged["system"];
    std::optional<double> spacing;
    if (present(sys, "element_spacing_m"))
        spacing = number(sys["element_spacing_m"], "system.element_spacing_m");
    cfg.system = SystemConfig(number(sys.value("carrier_freq_hz", json(73e9)), "system.carrier_freq_hz"),
                              number(sys.value("bandwidth_hz", json(1e9)), "system.bandwidth_hz"),
                              small_int(sys.value("num_antennas", json(64)), "system.num_antennas"),
                              small_int(sys.value("num_subcarriers", json(64)), "system.num_subcarriers"), spacing);

    const long long seed = integer(merged.value("seed", json(1)), "seed");
    if (seed < 0)
        throw ConfigError("'seed' must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);

    const json& scene = merged["scene"];
    cfg.scene = parse_scatterers(scene.value("scatterers", json::array()), cfg.system);
    if (present(scene, "random_paths")) {
        if (!cfg.scene.empty())
            throw ConfigError("'scene.scatterers' and 'scene.random_paths' are exclusive");
        cfg.random_paths = small_int(scene["random_paths"], "scene.random_paths");
        if (*cfg.random_paths < 1)
            throw ConfigError("'scene.random_paths' must be >= 1");
    }
    if (present(scene, "snr_db"))
        cfg.scene_snr_db = number(scene["snr_db"], "scene.snr_db");

    const json& m = merged["method"];
    cfg.method = parse_method(text(m.value("name", json("rotation")), "method.name"));
    MethodSettings& st = cfg.settings;
    st.threshold = parse_threshold(m.value("threshold", json::object()));
    st.stages = parse_stages(m.value("stages", json{11, 5}));
    const auto [pt, pd] = int_pair(m.value("dict_points", json(200)), "method.dict_points");
    st.dict_points_theta = pt;
    st.dict_points_tau = pd;
    if (present(m, "stop"))
        st.stop = parse_stop(m["stop"]);
    if (present(m, "smoothing")) {
        const auto [r, s] = int_pair(m["smoothing"], "method.smoothing");
        st.smoothing = SmoothingSpec{r, s};
        st.smoothing->validate(cfg.system.num_antennas(), cfg.system.num_subcarriers());
    }
    st.music_grid = small_int(m.value("music_grid", json(200)), "method.music_grid");
    if (present(m, "num_paths")) {
        cfg.num_paths = small_int(m["num_paths"], "method.num_paths");
        if (*cfg.num_paths < 0)
            throw ConfigError("'method.num_paths' must be >= 0");
    }
    if (present(m, "omp1d_memory_cap_bytes"))
        st.omp1d_memory_cap = byte_count(m["omp1d_memory_cap_bytes"], "method.omp1d_memory_cap_bytes");
    if (present(m, "music_memory_cap_bytes"))
        st.music_memory_cap = byte_count(m["music_memory_cap_bytes"], "method.music_memory_cap_bytes");
    st.validate();

    const json& ex = merged["experiment"];
    cfg.sweep_methods = method_list(ex["methods"], "experiment.methods");
    const json& snr = ex["snr_db"];
    if (snr.is_array()) {
        if (snr.empty())
            throw ConfigError("'experiment.snr_db' must not be empty");
        for (const auto& v : snr)
            cfg.sweep_snr_db.push_back(number(v, "experiment.snr_db"));
    } else if (snr.is_object()) {
        check_keys(snr, json{{"lo", 0}, {"hi", 0}, {"step", 0}}, "experiment.snr_db");
        if (!present(snr, "lo") || !present(snr, "hi") || !present(snr, "step"))
            throw ConfigError("'experiment.snr_db' range needs lo, hi and step");
        cfg.sweep_snr_db = snr_range(number(snr["lo"], "experiment.snr_db.lo"),
                                     number(snr["hi"], "experiment.snr_db.hi"),
                                     number(snr["step"], "experiment.snr_db.step"));
    } else {
        throw ConfigError("'experiment.snr_db' must be a list or {lo, hi, step}");
    }
    cfg.trials = small_int(ex["trials"], "experiment.trials");
    cfg.sweep_paths = small_int(ex["num_paths"], "experiment.num_paths");
    cfg.threads = small_int(ex["threads"], "experiment.threads");
    cfg.draw.allow_delay_wrap = boolean(ex["allow_delay_wrap"], "experiment.allow_delay_wrap");
    cfg.draw.doa_min_deg = number(ex["doa_min_deg"], "experiment.doa_min_deg");
    cfg.draw.doa_max_deg = number(ex["doa_max_deg"], "experiment.doa_max_deg");
    cfg.draw.toa_max_s = number(ex["toa_max_s"], "experiment.toa_max_s");
    if (!(cfg.draw.doa_min_deg > -90.0 && cfg.draw.doa_min_deg < cfg.draw.doa_max_deg && cfg.draw.doa_max_deg < 90.0))
        throw ConfigError("experiment DoA range must satisfy -90 < min < max < 90");
    if (!(cfg.draw.toa_max_s >= 0.0))
        throw ConfigError("'experiment.toa_max_s' must be >= 0");
    to_monte_carlo(cfg).validate();

    const json& rt = merged["runtime_table"];
    cfg.table_sizes = int_list(rt["sizes"], "runtime_table.sizes");
    cfg.table_paths = int_list(rt["num_paths"], "runtime_table.num_paths");
    cfg.table_methods = method_list(rt["methods"], "runtime_table.methods");
    cfg.table_repetitions = small_int(rt["repetitions"], "runtime_table.repetitions");
    cfg.table_snr_db = number(rt["snr_db"], "runtime_table.snr_db");
    cfg.table_max_projected_s = number(rt["max_projected_s"], "runtime_table.max_projected_s");
    to_runtime_table(cfg).validate();
    return cfg;
}

json resolved_json(const RunConfig& cfg)
{
    json scatterers = json::array();
    for (const auto& s : cfg.scene.scatterers())
        scatterers.push_back(
            {{"gain", {s.gain.real(), s.gain.imag()}}, {"theta_norm", s.theta_norm}, {"tau_norm", s.tau_norm}});

    json stages = json::array();
    for (const auto& st : cfg.settings.stages.stages()) {
        if (st.n_theta == st.n_tau)
            stages.push_back(st.n_theta);
        else
            stages.push_back({st.n_theta, st.n_tau});
    }
    const MethodSettings& ms = cfg.settings;
    json dict = ms.dict_points_theta == ms.dict_points_tau ? json(ms.dict_points_theta)
                                                           : json{ms.dict_points_theta, ms.dict_points_tau};
    json stop = nullptr;
    if (ms.stop)
        stop = {{"kind", stop_kind_name(ms.stop->kind)}, {"value", ms.stop->value}};
    json smoothing = nullptr;
    if (ms.smoothing)
        smoothing = {ms.smoothing->sub_r, ms.smoothing->sub_s};

    auto opt = [](const auto& v) -> json { return v ? json(*v) : json(nullptr); };

    return json{
        {"system",
         {{"carrier_freq_hz", cfg.system.carrier_freq_hz()},
          {"bandwidth_hz", cfg.system.bandwidth_hz()},
          {"num_antennas", cfg.system.num_antennas()},
          {"num_subcarriers", cfg.system.num_subcarriers()},
          {"element_spacing_m", cfg.system.element_spacing_m()}}},
        {"seed", cfg.seed},
        {"scene", {{"scatterers", scatterers}, {"random_paths", opt(cfg.random_paths)}, {"snr_db", opt(cfg.scene_snr_db)}}},
        {"method",
         {{"name", to_string(cfg.method)},
          {"threshold",
           {{"kind", ms.threshold.kind == ThresholdPolicy::Kind::Relative ? "relative" : "cfar"},
            {"value", ms.threshold.value}}},
          {"stages", stages},
          {"dict_points", dict},
          {"stop", stop},
          {"smoothing", smoothing},
          {"music_grid", ms.music_grid},
          {"num_paths", opt(cfg.num_paths)},
          {"omp1d_memory_cap_bytes", ms.omp1d_memory_cap},
          {"music_memory_cap_bytes", ms.music_memory_cap}}},
        {"experiment",
         {{"methods", method_names(cfg.sweep_methods)},
          {"snr_db", cfg.sweep_snr_db},
          {"trials", cfg.trials},
          {"num_paths", cfg.sweep_paths},
          {"threads", cfg.threads},
          {"allow_delay_wrap", cfg.draw.allow_delay_wrap},
          {"doa_min_deg", cfg.draw.doa_min_deg},
          {"doa_max_deg", cfg.draw.doa_max_deg},
          {"toa_max_s", cfg.draw.toa_max_s}}},
        {"runtime_table",
         {{"sizes", cfg.table_sizes},
          {"num_paths", cfg.table_paths},
          {"methods", method_names(cfg.table_methods)},
          {"repetitions", cfg.table_repetitions},
          {"snr_db", cfg.table_snr_db},
          {"max_projected_s", cfg.table_max_projected_s}}},
    };
}

Scene build_scene(const RunConfig& cfg)
{
    if (cfg.random_paths) {
        SceneDrawOptions opts = cfg.draw;
        return random_scene(*cfg.random_paths, cfg.system, cfg.seed, opts);
    }
    return cfg.scene;
}

ChannelMatrix build_channel(const RunConfig& cfg)
{
    ChannelMatrix h = synthesize_channel(build_scene(cfg), cfg.system);
    if (cfg.scene_snr_db)
        h = add_awgn(h, *cfg.scene_snr_db, noise_seed(cfg.seed, 0, *cfg.scene_snr_db));
    return h;
}

MonteCarloConfig to_monte_carlo(const RunConfig& cfg)
{
    MonteCarloConfig mc;
    mc.system = cfg.system;
    mc.methods = cfg.sweep_methods;
    mc.snr_db = cfg.sweep_snr_db;
    mc.trials = cfg.trials;
    mc.seed_base = cfg.seed;
    mc.num_paths = cfg.sweep_paths;
    mc.scene = cfg.draw;
    mc.settings = cfg.settings;
    mc.threads = cfg.threads;
    return mc;
}

RuntimeTableConfig to_runtime_table(const RunConfig& cfg)
{
    RuntimeTableConfig rt;
    rt.system = cfg.system;
    rt.sizes = cfg.table_sizes;
    rt.num_paths = cfg.table_paths;
    rt.methods = cfg.table_methods;
    rt.repetitions = cfg.table_repetitions;
    rt.seed = cfg.seed;
    rt.snr_db = cfg.table_snr_db;
    rt.max_projected_s = cfg.table_max_projected_s;
    rt.settings = cfg.settings;
    return rt;
}

json estimate_json(const SignatureEstimate& est, const SystemConfig& system)
{
    json paths = json::array();
    for (const auto& p : est.paths) {
        paths.push_back({{"gain", {p.gain.real(), p.gain.imag()}},
                         {"theta_norm", p.theta_norm},
                         {"tau_norm", p.tau_norm},
                         {"doa_deg", doa_deg_clamped(p.theta_norm, system)},
                         {"toa_s", p.tau_norm / system.subcarrier_spacing_hz()}});
    }
    return json{{"method", to_string(est.method)},
                {"num_paths", est.size()},
                {"runtime_s", est.runtime_s},
                {"paths", paths}};
}

json summary_json(const MetricsSummary& s)
{
    auto opt = [](const std::optional<double>& v) -> json { return v ? json(*v) : json(nullptr); };
    return json{{"method", s.method},
                {"snr_db", s.snr_db},
                {"seed_base", s.seed_base},
                {"trials", s.trials},
                {"failed_trials", s.failed_trials},
                {"hit_rate", s.hit_rate},
                {"false_rate", s.false_rate},
                {"total_hits", s.total_hits},
                {"rmse_doa_deg", opt(s.rmse_doa_deg)},
                {"rmse_toa_s", opt(s.rmse_toa_s)},
                {"rmse_gain", opt(s.rmse_gain)},
                {"rmse_theta_norm", opt(s.rmse_theta_norm)},
                {"rmse_tau_norm", opt(s.rmse_tau_norm)},
                {"mean_runtime_s", s.mean_runtime_s}};
}

json runtime_table_json(const RuntimeTable& table)
{
    json cells = json::array();
    for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
        for (std::size_t qi = 0; qi < table.num_paths.size(); ++qi) {
            for (std::size_t si = 0; si < table.sizes.size(); ++si) {
                const RuntimeCell& c = table.cells[mi][qi][si];
                json cell = {{"method", to_string(table.methods[mi])},
                             {"num_paths", table.num_paths[qi]},
                             {"size", table.sizes[si]}};
                switch (c.status) {
                case RuntimeCell::Status::Measured:
                    cell["status"] = "measured";
                    cell["median_s"] = c.median_s;
                    break;
                case RuntimeCell::Status::MemoryCap:
                    cell["status"] = "memcap";
                    break;
                case RuntimeCell::Status::Skipped:
                    cell["status"] = "skipped";
                    cell["projected_s"] = c.projected_s;
                    break;
                }
                cells.push_back(cell);
            }
        }
    }
    return cells;
}

namespace {

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json host_info()
{
    char name[256] = {};
    if (gethostname(name, sizeof name - 1) != 0)
        name[0] = '\0';
    utsname u{};
    json os = nullptr;
    if (uname(&u) == 0)
        os = std::string(u.sysname) + " " + u.release + " " + u.machine;
    return json{{"hostname", name},
                {"os", os},
                {"hardware_concurrency", std::thread::hardware_concurrency()},
                {"compiler", __VERSION__}};
}

} // namespace

json run_manifest(const std::string& command, const RunConfig& cfg)
{
    return json{
        {"tool", "dtek"},
        {"version", DTEK_VERSION},
        {"git_revision", DTEK_GIT_REVISION},
        {"command", command},
        {"created_utc", utc_timestamp()},
        {"host", host_info()},
        {"rng", Rng::kName},
        {"seed", cfg.seed},
        {"snr_definition", "mean(|H|^2) over the per-entry complex noise variance"},
        {"timing", "wall-clock time of the estimator call only; scene synthesis, noise and dictionary "
                   "construction are excluded"},
        {"config", resolved_json(cfg)},
    };
}

} // namespace dtek
