#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qbench/charts.hpp"
#include "qbench/reporting.hpp"

using namespace qbench;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

MetricStore sample_store() {
    MetricStore store("hamsim");
    for (int g : {4, 6}) {
        MetricRecord r;
        r.group = g;
        r.circuit_id = "w" + std::to_string(g);
        r.fidelity = 0.9 - 0.05 * g;
        r.normalized_fidelity = 0.85 - 0.05 * g;
        r.algorithmic_depth = 3 * g;
        r.normalized_depth = 5 * g;
        r.compile_time = 0.001;
        r.quantum_time = 0.01 * g;
        r.elapsed = r.compile_time + r.quantum_time;
        r.app["zz_theta"] = 0.02;
        store.append(std::move(r));
    }
    return store;
}

}  // namespace

TEST_CASE("color scale endpoints and anchor") {
    Rgb lo = fidelity_color(0.0);
    Rgb mid = fidelity_color(0.5);
    Rgb hi = fidelity_color(1.0);
    CHECK(lo.r > lo.g);
    CHECK(mid.r == 255);
    CHECK(mid.g == 221);
    CHECK(hi.g > hi.r);
}

TEST_CASE("volumetric rendering essentials") {
    std::vector<VolumetricCell> cells{{4, 8, 1.0, "a"}, {4, 32, 0.0, "b"}, {8, 64, 0.6, "c"}};
    std::string svg = render_volumetric(cells, 2048);
    CHECK(svg.find("<svg") == 0);
    // top-of-scale and bottom-of-scale colors both present
    CHECK(svg.find("rgb(44,160,44)") != std::string::npos);
    CHECK(svg.find("rgb(214,39,40)") != std::string::npos);
    CHECK_THROWS_AS(render_volumetric(cells, 1000), std::invalid_argument);  // not a power of 2
    std::vector<VolumetricCell> bad{{4, 0, 1.0, "x"}};
    CHECK_THROWS_AS(render_volumetric(bad, 0), std::invalid_argument);
}

TEST_CASE("area plot row count matches widths") {
    std::vector<AreaRow> rows;
    for (int w : {2, 4, 6}) {
        AreaRow row;
        row.width = w;
        row.rects = {{0.0, 0.5, 0.2}, {0.5, 1.5, 0.9}};
        rows.push_back(row);
    }
    std::string svg = render_area_plot(rows);
    CHECK(svg.find("2q") != std::string::npos);
    CHECK(svg.find("4q") != std::string::npos);
    CHECK(svg.find("6q") != std::string::npos);
}

TEST_CASE("training curve handles constant series") {
    std::string svg = render_training_curves({{"loss", {0.5, 0.5, 0.5}}});
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("bar chart error bars vanish at single restart") {
    BarChart c;
    c.name = "fidelity";
    c.groups = {{"4", 0.9, 0.0}, {"6", 0.7, 0.1}};
    std::string svg = render_bar_chart(c);
    CHECK(svg.find("<rect") != std::string::npos);
}

TEST_CASE("metrics json round trip") {
    MetricStore store = sample_store();
    store.header["k"] = "v";
    MetricStore back = metrics_from_json(metrics_to_json(store));
    CHECK(back.benchmark() == "hamsim");
    CHECK(back.header.at("k") == "v");
    REQUIRE(back.records().size() == store.records().size());
    for (std::size_t i = 0; i < back.records().size(); ++i) {
        CHECK(back.records()[i].group == store.records()[i].group);
        CHECK(back.records()[i].quantum_time == store.records()[i].quantum_time);
        CHECK(back.records()[i].app == store.records()[i].app);
    }
}

TEST_CASE("csv export has a stable flat header") {
    std::string csv = metrics_to_csv(sample_store());
    CHECK(csv.rfind("benchmark,group,circuit_id,iteration,", 0) == 0);
    CHECK(csv.find("app_zz_theta") != std::string::npos);
    // one header + two records
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("run spec json round trip") {
    RunSpec s;
    s.benchmark = "hamsim";
    s.noise_p1 = 5e-4;
    s.noise_p2 = 5e-3;
    s.resynthesis = true;
    s.deterministic = true;
    s.max_qubits = 6;
    RunSpec back = RunSpec::from_json(s.to_json());
    CHECK(back.benchmark == "hamsim");
    CHECK(back.noise_p2 == doctest::Approx(5e-3));
    CHECK(back.resynthesis);
    CHECK(back.deterministic);
    CHECK(back.max_qubits == 6);
}

TEST_CASE("deterministic run replays byte-identically") {
    namespace fs = std::filesystem;
    const std::string dir1 = "qbench_test_out1", dir2 = "qbench_test_out2";
    RunSpec s;
    s.benchmark = "hamsim";
    s.min_qubits = 4;
    s.max_qubits = 5;
    s.shots = 400;
    s.noise_p1 = 5e-4;
    s.noise_p2 = 5e-3;
    s.deterministic = true;
    RunResult first = execute_run(s, dir1);
    const std::string manifest_bytes = slurp(first.manifest_path);
    RunSpec replayed = run_spec_from_manifest(manifest_bytes);
    RunResult second = execute_run(replayed, dir2);
    CHECK(slurp(first.metrics_path) == slurp(second.metrics_path));
    CHECK(slurp(first.csv_path) == slurp(second.csv_path));
    REQUIRE(first.chart_paths.size() == second.chart_paths.size());
    for (std::size_t i = 0; i < first.chart_paths.size(); ++i)
        CHECK(slurp(first.chart_paths[i]) == slurp(second.chart_paths[i]));
    // replaying into the same directory reproduces the manifest bytes as well
    // (deterministic mode embeds no timestamp; paths are part of the manifest)
    fs::remove_all(dir1);
    RunResult third = execute_run(replayed, dir1);
    CHECK(slurp(third.manifest_path) == manifest_bytes);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("charts regenerate offline from the metrics file alone") {
    namespace fs = std::filesystem;
    const std::string dir = "qbench_test_out3";
    RunSpec s;
    s.benchmark = "hamsim";
    s.min_qubits = 4;
    s.max_qubits = 4;
    s.shots = 200;
    s.deterministic = true;
    RunResult run = execute_run(s, dir);
    MetricStore loaded = read_metrics_file(run.metrics_path);
    auto paths = generate_charts(loaded, dir + "/charts2", 2048);
    REQUIRE(paths.size() == run.chart_paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
        CHECK(slurp(paths[i]) == slurp(run.chart_paths[i]));
    fs::remove_all(dir);
}

TEST_CASE("unknown benchmark rejected") {
    RunSpec s;
    s.benchmark = "frobnicate";
    CHECK_THROWS_AS(execute_run(s, "qbench_test_out4"), std::invalid_argument);
    std::filesystem::remove_all("qbench_test_out4");
}
