#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qbench/reporting.hpp"

namespace {

void add_common_options(CLI::App* cmd, qbench::RunSpec& spec, std::string& noise,
                        std::string& output_dir) {
    cmd->add_option("--min-qubits", spec.min_qubits, "smallest width in the sweep");
    cmd->add_option("--max-qubits", spec.max_qubits, "largest width in the sweep");
    cmd->add_option("--skip", spec.skip, "width stride")->check(CLI::PositiveNumber);
    cmd->add_option("--shots", spec.shots, "shots per circuit")->check(CLI::PositiveNumber);
    cmd->add_option("--restarts", spec.restarts, "optimizer restarts")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", spec.seed, "master seed");
    cmd->add_option("--noise", noise, "depolarizing probabilities p1,p2");
    cmd->add_option("--readout-flip", spec.readout_flip,
                    "symmetric readout flip probability");
    cmd->add_flag("--mitigation", spec.mitigation, "apply confusion-matrix mitigation");
    cmd->add_flag("--exact-probabilities", spec.exact_probabilities,
                  "expectation-level execution instead of sampling");
    cmd->add_flag("--deterministic", spec.deterministic,
                  "virtual timing model; outputs replay byte-identically");
    auto* resyn = cmd->add_option("--resynthesis", spec.resynthesis_e2,
                                  "approximate resynthesis pass (optional per-CX error)");
    resyn->expected(0, 1)->default_str("");
    cmd->callback([resyn, &spec] {
        if (resyn->count()) spec.resynthesis = true;
    });
    cmd->add_option("--qv", spec.qv, "quantum volume for plot backgrounds");
    cmd->add_option("--output-dir", output_dir, "where manifest/metrics/charts go");
}

void parse_noise(const std::string& noise, qbench::RunSpec& spec) {
    if (noise.empty()) return;
    const auto comma = noise.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--noise", "expected p1,p2");
    try {
        spec.noise_p1 = std::stod(noise.substr(0, comma));
        spec.noise_p2 = std::stod(noise.substr(comma + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--noise", "expected p1,p2");
    }
}

int finish_run(const qbench::RunSpec& spec, const std::string& output_dir) {
    qbench::RunResult result = qbench::execute_run(spec, output_dir);
    std::size_t failed = 0;
    for (const auto& r : result.store.records()) failed += r.failed;
    std::printf("benchmark: %s\n", spec.benchmark.c_str());
    std::printf("records:   %zu (%zu failed)\n", result.store.records().size(), failed);
    for (int g : result.store.groups()) {
        qbench::GroupStats f = result.store.group_stats(
            g, [](const qbench::MetricRecord& r) { return r.normalized_fidelity; });
        if (f.count > 0)
            std::printf("  width %2d: normalized fidelity %.4f +- %.4f (%zu records)\n", g,
                        f.mean, f.stddev, f.count);
    }
    std::printf("metrics:   %s\n", result.metrics_path.c_str());
    std::printf("manifest:  %s\n", result.manifest_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"application-oriented quantum benchmark suite"};
    app.require_subcommand(1);

    qbench::RunSpec spec;
    std::string noise;
    std::string output_dir = "qbench-out";

    CLI::App* run = app.add_subcommand("run", "execute a benchmark");
    run->require_subcommand(1);

    CLI::App* hhl = run->add_subcommand("hhl", "linear-solver benchmark");
    add_common_options(hhl, spec, noise, output_dir);
    hhl->add_option("--instances-per-split", spec.instances_per_split,
                    "problem instances per register split");
    hhl->add_option("--instance-dir", spec.instance_dir, "instance file directory");

    CLI::App* hydro = run->add_subcommand("hydrogen-lattice", "VQE benchmark");
    add_common_options(hydro, spec, noise, output_dir);
    hydro->add_option("--iterations", spec.iterations, "optimizer iterations");
    hydro->add_option("--optimizer", spec.optimizer, "spsa | nelder-mead | auto")
        ->check(CLI::IsMember({"spsa", "nelder-mead", "auto"}));
    hydro->add_option("--instance-dir", spec.instance_dir, "shipped instance directory");
    hydro->add_option("--method", spec.method, "1 = ansatz fidelity, 2 = VQE loop")
        ->check(CLI::IsMember({1, 2}));

    CLI::App* image = run->add_subcommand("image-recognition", "binary classifier benchmark");
    add_common_options(image, spec, noise, output_dir);
    image->add_option("--mnist-images", spec.mnist_images, "IDX image file");
    image->add_option("--mnist-labels", spec.mnist_labels, "IDX label file");
    image->add_option("--synthetic-data", spec.synthetic_images,
                      "generate this many synthetic 7/9 images instead of loading files");
    image->add_option("--iterations", spec.iterations, "training iterations");
    image->add_option("--batch-size", spec.batch_size, "images per training batch");
    image->add_option("--train-images", spec.train_images, "training pool size (0 = all)");
    image->add_option("--test-images", spec.test_images, "held-out test set size");
    image->add_option("--method", spec.method, "1 = ansatz fidelity, 2 = train + validate")
        ->check(CLI::IsMember({1, 2}));

    CLI::App* hamsim = run->add_subcommand("hamsim", "small-angle Hamiltonian simulation");
    add_common_options(hamsim, spec, noise, output_dir);
    hamsim->add_option("--steps", spec.hamsim_steps, "Trotter steps");
    hamsim->add_option("--zz-theta", spec.hamsim_zz_theta, "ZZ gate angle");

    std::string manifest_path;
    CLI::App* replay = app.add_subcommand("replay", "re-run a persisted manifest");
    replay->add_option("manifest", manifest_path, "manifest.json from a previous run")
        ->required();
    replay->add_option("--output-dir", output_dir, "where outputs go");

    std::string metrics_path;
    CLI::App* report = app.add_subcommand("report", "regenerate charts from a metrics file");
    report->add_option("metrics", metrics_path, "metrics.json from a previous run")->required();
    report->add_option("--output-dir", output_dir, "where charts go");
    int report_qv = 2048;
    report->add_option("--qv", report_qv, "quantum volume for plot backgrounds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            parse_noise(noise, spec);
            for (CLI::App* sub : {hhl, hydro, image, hamsim})
                if (sub->parsed()) spec.benchmark = sub->get_name();
            return finish_run(spec, output_dir);
        }
        if (replay->parsed()) {
            std::ifstream in(manifest_path);
            if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
            std::stringstream ss;
            ss << in.rdbuf();
            qbench::RunSpec replay_spec = qbench::run_spec_from_manifest(ss.str());
            return finish_run(replay_spec, output_dir);
        }
        if (report->parsed()) {
            qbench::MetricStore store = qbench::read_metrics_file(metrics_path);
            auto paths = qbench::generate_charts(store, output_dir + "/charts", report_qv);
            for (const auto& p : paths) std::printf("chart: %s\n", p.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
