#include "qbench/reporting.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qbench/charts.hpp"
#include "qbench/hamsim.hpp"
#include "qbench/hhl.hpp"
#include "qbench/hydrogen.hpp"
#include "qbench/image.hpp"
#include "qbench/kak.hpp"
#include "qbench/mitigation.hpp"

namespace qbench {

namespace {

using json = nlohmann::ordered_json;

json spec_json(const RunSpec& s) {
    json j;
    j["benchmark"] = s.benchmark;
    j["method"] = s.method;
    j["min_qubits"] = s.min_qubits;
    j["max_qubits"] = s.max_qubits;
    j["skip"] = s.skip;
    j["shots"] = s.shots;
    j["restarts"] = s.restarts;
    j["seed"] = s.seed;
    j["noise_p1"] = s.noise_p1;
    j["noise_p2"] = s.noise_p2;
    j["readout_flip"] = s.readout_flip;
    j["resynthesis"] = s.resynthesis;
    j["resynthesis_e2"] = s.resynthesis_e2;
    j["mitigation"] = s.mitigation;
    j["exact_probabilities"] = s.exact_probabilities;
    j["deterministic"] = s.deterministic;
    j["iterations"] = s.iterations;
    j["batch_size"] = s.batch_size;
    j["optimizer"] = s.optimizer;
    j["instance_dir"] = s.instance_dir;
    j["mnist_images"] = s.mnist_images;
    j["mnist_labels"] = s.mnist_labels;
    j["synthetic_images"] = s.synthetic_images;
    j["train_images"] = s.train_images;
    j["test_images"] = s.test_images;
    j["qv"] = s.qv;
    j["instances_per_split"] = s.instances_per_split;
    j["hamsim_steps"] = s.hamsim_steps;
    j["hamsim_zz_theta"] = s.hamsim_zz_theta;
    return j;
}

RunSpec spec_from(const json& j) {
    RunSpec s;
    s.benchmark = j.at("benchmark").get<std::string>();
    s.method = j.value("method", 2);
    s.min_qubits = j.value("min_qubits", -1);
    s.max_qubits = j.value("max_qubits", -1);
    s.skip = j.value("skip", 1);
    s.shots = j.value("shots", std::uint64_t{1000});
    s.restarts = j.value("restarts", 1);
    s.seed = j.value("seed", std::uint64_t{12345});
    s.noise_p1 = j.value("noise_p1", 0.0);
    s.noise_p2 = j.value("noise_p2", 0.0);
    s.readout_flip = j.value("readout_flip", 0.0);
    s.resynthesis = j.value("resynthesis", false);
    s.resynthesis_e2 = j.value("resynthesis_e2", 0.005);
    s.mitigation = j.value("mitigation", false);
    s.exact_probabilities = j.value("exact_probabilities", false);
    s.deterministic = j.value("deterministic", false);
    s.iterations = j.value("iterations", -1);
    s.batch_size = j.value("batch_size", 50);
    s.optimizer = j.value("optimizer", std::string("auto"));
    s.instance_dir = j.value("instance_dir", std::string("data/instances"));
    s.mnist_images = j.value("mnist_images", std::string());
    s.mnist_labels = j.value("mnist_labels", std::string());
    s.synthetic_images = j.value("synthetic_images", 0);
    s.train_images = j.value("train_images", 200);
    s.test_images = j.value("test_images", 50);
    s.qv = j.value("qv", 2048);
    s.instances_per_split = j.value("instances_per_split", 1);
    s.hamsim_steps = j.value("hamsim_steps", 2);
    s.hamsim_zz_theta = j.value("hamsim_zz_theta", M_PI / 150);
    return s;
}

}  // namespace

std::string RunSpec::to_json() const { return spec_json(*this).dump(2) + "\n"; }

RunSpec RunSpec::from_json(const std::string& text) {
    return spec_from(json::parse(text));
}

RunSpec run_spec_from_manifest(const std::string& manifest_text) {
    json j = json::parse(manifest_text);
    return spec_from(j.at("run"));
}

std::string metrics_to_json(const MetricStore& store) {
    json j;
    j["schema"] = "qbench-metrics/1";
    j["benchmark"] = store.benchmark();
    j["code_version"] = kCodeVersion;
    json header = json::object();
    for (const auto& [k, v] : store.header) header[k] = v;
    j["header"] = header;
    json records = json::array();
    for (const auto& r : store.records()) {
        json rec;
        rec["group"] = r.group;
        rec["circuit_id"] = r.circuit_id;
        rec["iteration"] = r.iteration;
        rec["create_time"] = r.create_time;
        rec["compile_time"] = r.compile_time;
        rec["quantum_time"] = r.quantum_time;
        rec["mitigate_time"] = r.mitigate_time;
        rec["elapsed"] = r.elapsed;
        rec["fidelity"] = r.fidelity;
        rec["normalized_fidelity"] = r.normalized_fidelity;
        rec["algorithmic_depth"] = r.algorithmic_depth;
        rec["normalized_depth"] = r.normalized_depth;
        json app = json::object();
        for (const auto& [k, v] : r.app) app[k] = v;
        rec["app"] = app;
        rec["failed"] = r.failed;
        if (r.failed) rec["error"] = r.error;
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    return j.dump(2) + "\n";
}

MetricStore metrics_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.at("schema").get<std::string>() != "qbench-metrics/1")
        throw std::runtime_error("unsupported metrics schema");
    MetricStore store(j.at("benchmark").get<std::string>());
    for (auto& [k, v] : j.at("header").items()) store.header[k] = v.get<std::string>();
    for (const auto& rec : j.at("records")) {
        MetricRecord r;
        r.group = rec.at("group").get<int>();
        r.circuit_id = rec.at("circuit_id").get<std::string>();
        r.iteration = rec.at("iteration").get<int>();
        r.create_time = rec.at("create_time").get<double>();
        r.compile_time = rec.at("compile_time").get<double>();
        r.quantum_time = rec.at("quantum_time").get<double>();
        r.mitigate_time = rec.at("mitigate_time").get<double>();
        r.elapsed = rec.at("elapsed").get<double>();
        r.fidelity = rec.at("fidelity").get<double>();
        r.normalized_fidelity = rec.at("normalized_fidelity").get<double>();
        r.algorithmic_depth = rec.at("algorithmic_depth").get<int>();
        r.normalized_depth = rec.at("normalized_depth").get<int>();
        for (auto& [k, v] : rec.at("app").items()) r.app[k] = v.get<double>();
        r.failed = rec.at("failed").get<bool>();
        if (rec.contains("error")) r.error = rec.at("error").get<std::string>();
        store.append(std::move(r));
    }
    return store;
}

std::string metrics_to_csv(const MetricStore& store) {
    std::set<std::string> app_keys;
    for (const auto& r : store.records())
        for (const auto& [k, v] : r.app) app_keys.insert(k);
    std::ostringstream os;
    os << "benchmark,group,circuit_id,iteration,create_time,compile_time,quantum_time,"
          "mitigate_time,elapsed,fidelity,normalized_fidelity,algorithmic_depth,"
          "normalized_depth,failed";
    for (const auto& k : app_keys) os << ",app_" << k;
    os << "\n";
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : store.records()) {
        os << store.benchmark() << "," << r.group << "," << r.circuit_id << "," << r.iteration
           << "," << num(r.create_time) << "," << num(r.compile_time) << ","
           << num(r.quantum_time) << "," << num(r.mitigate_time) << "," << num(r.elapsed) << ","
           << num(r.fidelity) << "," << num(r.normalized_fidelity) << "," << r.algorithmic_depth
           << "," << r.normalized_depth << "," << (r.failed ? 1 : 0);
        for (const auto& k : app_keys) {
            os << ",";
            auto it = r.app.find(k);
            if (it != r.app.end()) os << num(it->second);
        }
        os << "\n";
    }
    return os.str();
}

void write_metrics_file(const MetricStore& store, const std::string& path) {
    write_text_file(path, metrics_to_json(store));
}

MetricStore read_metrics_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metrics file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return metrics_from_json(ss.str());
}

std::vector<std::string> generate_charts(const MetricStore& store, const std::string& out_dir,
                                         int qv) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> paths;
    auto emit = [&](const std::string& name, const std::string& svg) {
        std::string p = out_dir + "/" + name;
        write_text_file(p, svg);
        paths.push_back(p);
    };

    // volumetric positioning: one cell per non-failed record with a depth
    std::vector<VolumetricCell> cells;
    for (const auto& r : store.records()) {
        if (r.failed || r.normalized_depth < 1 || r.iteration > 0) continue;
        cells.push_back({r.group, r.normalized_depth, r.normalized_fidelity, r.circuit_id});
    }
    if (!cells.empty())
        emit("volumetric.svg", render_volumetric(cells, qv, {}, store.benchmark()));

    // per-width bar charts
    std::vector<int> groups = store.groups();
    if (!groups.empty()) {
        auto bars = [&](const std::string& name, auto field, bool log_scale = false) {
            BarChart chart;
            chart.name = store.benchmark() + ": " + name;
            chart.log_scale = log_scale;
            for (int g : groups) {
                GroupStats st = store.group_stats(g, field);
                if (st.count == 0) continue;
                chart.groups.push_back({std::to_string(g), st.mean, st.stddev});
            }
            if (!chart.groups.empty()) emit(name + "_bars.svg", render_bar_chart(chart));
        };
        bars("fidelity", [](const MetricRecord& r) { return r.normalized_fidelity; });
        bars("depth", [](const MetricRecord& r) { return double(r.normalized_depth); });
        bars("quantum_time", [](const MetricRecord& r) { return r.quantum_time; });
        bars("elapsed_time", [](const MetricRecord& r) { return r.elapsed; });
    }

    // area plot over cumulative quantum time when iteration traces exist
    std::vector<AreaRow> rows;
    for (int g : groups) {
        std::map<std::string, std::vector<const MetricRecord*>> by_restart;
        for (const MetricRecord* r : store.group_records(g))
            if (r->iteration >= 0 && r->app.count("cum_quantum") && r->app.count("accuracy_ratio"))
                by_restart[r->circuit_id].push_back(r);
        if (by_restart.empty()) continue;
        const auto& recs = by_restart.begin()->second;
        AreaRow row;
        row.width = g;
        double prev = 0;
        for (const MetricRecord* r : recs) {
            const double t = r->app.at("cum_quantum");
            row.rects.push_back({prev, t, r->app.at("accuracy_ratio")});
            prev = t;
        }
        if (!row.rects.empty()) rows.push_back(std::move(row));
    }
    if (!rows.empty()) emit("area.svg", render_area_plot(rows));

    // training curves when loss/accuracy traces exist
    for (int g : groups) {
        Series loss{"loss", {}}, acc{"accuracy", {}};
        for (const MetricRecord* r : store.group_records(g)) {
            if (r->iteration < 0) continue;
            if (r->app.count("loss")) loss.values.push_back(r->app.at("loss"));
            if (r->app.count("accuracy")) acc.values.push_back(r->app.at("accuracy"));
        }
        if (!loss.values.empty()) {
            std::vector<Series> series{loss};
            if (!acc.values.empty()) series.push_back(acc);
            emit("training_w" + std::to_string(g) + ".svg",
                 render_training_curves(series, store.benchmark() + " @ " + std::to_string(g) + "q"));
        }
    }
    return paths;
}

namespace {

BenchmarkConfig base_config(const RunSpec& s, int default_min, int default_max) {
    BenchmarkConfig cfg;
    cfg.min_qubits = s.min_qubits > 0 ? s.min_qubits : default_min;
    cfg.max_qubits = s.max_qubits > 0 ? s.max_qubits : default_max;
    cfg.skip = s.skip;
    cfg.shots = s.shots;
    cfg.restarts = s.restarts;
    cfg.seed = s.seed;
    cfg.noise = NoiseModel::depolarizing(s.noise_p1, s.noise_p2);
    if (s.readout_flip > 0) cfg.noise.with_symmetric_readout(s.readout_flip, cfg.max_qubits + 1);
    cfg.exact_probabilities = s.exact_probabilities;
    cfg.deterministic_timing = s.deterministic;
    if (s.resynthesis) {
        ResynthesisConfig rcfg;
        rcfg.e2 = s.resynthesis_e2;
        cfg.hooks.register_transformer(
            [rcfg](const Circuit& c) { return kak_resynthesize(c, rcfg); });
    }
    if (s.mitigation) {
        if (!cfg.noise.has_readout())
            throw std::invalid_argument("--mitigation needs a readout error model");
        std::vector<int> qubits(cfg.max_qubits + 1);
        for (int q = 0; q <= cfg.max_qubits; ++q) qubits[q] = q;
        ConfusionMatrixSet cal =
            calibrate_confusion(cfg.noise, qubits, std::max<std::uint64_t>(cfg.shots, 4000),
                                derive_stream(s.seed, 0xca1));
        cfg.hooks.mitigator = [cal](const Distribution& d, const std::vector<int>& map) {
            return mitigate_distribution(d, cal, map);
        };
    }
    return cfg;
}

MetricStore dispatch_run(const RunSpec& s) {
    if (s.benchmark == "hhl") {
        HHLBenchConfig cfg;
        cfg.base = base_config(s, 4, 8);
        cfg.instances_per_split = s.instances_per_split;
        return run_hhl_benchmark(cfg);
    }
    if (s.benchmark == "hydrogen-lattice") {
        VqeConfig cfg;
        cfg.base = base_config(s, 2, 8);
        cfg.instance_dir = s.instance_dir;
        if (s.iterations > 0) cfg.max_iterations = s.iterations;
        if (s.optimizer == "spsa") cfg.optimizer = VqeConfig::Optimizer::spsa;
        else if (s.optimizer == "nelder-mead") cfg.optimizer = VqeConfig::Optimizer::nelder_mead;
        return s.method == 1 ? run_method1(cfg) : run_method2(cfg);
    }
    if (s.benchmark == "image-recognition") {
        ImageDataset ds;
        if (s.synthetic_images > 0) {
            ds = synthesize_digit_dataset(s.synthetic_images, derive_stream(s.seed, 0xda7a));
        } else {
            if (s.mnist_images.empty() || s.mnist_labels.empty())
                throw std::invalid_argument(
                    "image-recognition needs --mnist-images/--mnist-labels or --synthetic-data");
            ds = load_mnist_idx(s.mnist_images, s.mnist_labels);
        }
        ds.split(s.test_images, derive_stream(s.seed, 0x5e7));
        if (s.method == 1) {
            BenchmarkConfig cfg = base_config(s, 2, 6);
            return run_image_method1(ds, cfg);
        }
        TrainConfig cfg;
        cfg.base = base_config(s, 2, 8);
        cfg.qubits = s.max_qubits > 0 ? s.max_qubits : 4;
        cfg.base.min_qubits = 2;  // unused by training, keep valid
        cfg.base.max_qubits = std::max(cfg.qubits, 2);
        if (s.iterations >= 0) cfg.iterations = s.iterations;
        cfg.batch_size = s.batch_size;
        cfg.train_images = s.train_images;
        TrainState state = train(ds, cfg);
        auto [test_loss, test_acc] = validate(ds, state.pca, state.params, cfg);
        MetricStore store = state.metrics;
        MetricRecord summary;
        summary.group = cfg.qubits;
        summary.circuit_id = "validate";
        summary.iteration = -1;
        summary.app["test_loss"] = test_loss;
        summary.app["test_accuracy"] = test_acc;
        summary.app["train_size"] = double(
            std::min<std::size_t>(ds.train_indices.size(),
                                  cfg.train_images > 0 ? cfg.train_images
                                                       : ds.train_indices.size()));
        summary.app["test_size"] = double(ds.test_indices.size());
        store.append(std::move(summary));
        return store;
    }
    if (s.benchmark == "hamsim") {
        HamSimBenchConfig cfg;
        cfg.base = base_config(s, 4, 10);
        cfg.spec.steps = s.hamsim_steps;
        cfg.spec.zz_theta = s.hamsim_zz_theta;
        cfg.with_resynthesis = s.resynthesis;
        cfg.resynthesis_e2 = s.resynthesis_e2;
        cfg.base.hooks.transformers.clear();  // run_hamsim_benchmark installs its own
        return run_hamsim_benchmark(cfg);
    }
    throw std::invalid_argument("unknown benchmark: " + s.benchmark);
}

}  // namespace

std::string manifest_to_json(const RunSpec& spec, const RunResult& result) {
    json j;
    j["schema"] = "qbench-manifest/1";
    j["code_version"] = kCodeVersion;
    if (!spec.deterministic) {
        const auto now = std::chrono::system_clock::now();
        j["created_unix"] =
            std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    }
    j["run"] = spec_json(spec);
    json out;
    out["metrics"] = result.metrics_path;
    out["csv"] = result.csv_path;
    json charts = json::array();
    for (const auto& p : result.chart_paths) charts.push_back(p);
    out["charts"] = charts;
    j["outputs"] = out;
    return j.dump(2) + "\n";
}

RunResult execute_run(const RunSpec& spec, const std::string& output_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(output_dir);
    RunResult result;
    result.store = dispatch_run(spec);
    result.store.header["benchmark"] = spec.benchmark;
    result.store.header["run_spec"] = spec_json(spec).dump();

    result.metrics_path = output_dir + "/metrics.json";
    result.csv_path = output_dir + "/metrics.csv";
    write_metrics_file(result.store, result.metrics_path);
    write_text_file(result.csv_path, metrics_to_csv(result.store));
    result.chart_paths = generate_charts(result.store, output_dir + "/charts", spec.qv);
    result.manifest_path = output_dir + "/manifest.json";
    write_text_file(result.manifest_path, manifest_to_json(spec, result));
    return result;
}

}  // namespace qbench
