#include <doctest.h>

#include <cmath>

#include "qbench/hydrogen.hpp"
#include "qbench/rng.hpp"

using namespace qbench;

namespace {

const char* kInstanceDir = QBENCH_SOURCE_DIR "/data/instances";

PairedHamiltonian simple_h(int n) {
    PairedHamiltonian h;
    h.n = n;
    h.g.assign(n, 0.0);
    return h;
}

// independent sector ground-state oracle: shifted power iteration
double sector_ground_energy_power(const PairedHamiltonian& h, int iterations = 4000) {
    std::vector<std::uint64_t> basis;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << h.n); ++s)
        if (__builtin_popcountll(s) == h.n / 2) basis.push_back(s);
    std::map<std::uint64_t, int> index;
    for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = static_cast<int>(i);
    const int dim = static_cast<int>(basis.size());
    double bound = std::abs(h.e0);
    for (double gv : h.g) bound += std::abs(gv);
    for (const auto& [k, val] : h.w) bound += std::abs(val);
    for (const auto& [k, val] : h.v) bound += 2 * std::abs(val);
    bound += 1.0;
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < dim; ++i) y[i] = (bound - h.diagonal_energy(basis[i])) * x[i];
        for (int i = 0; i < dim; ++i)
            for (const auto& [k, val] : h.v) {
                const std::uint64_t s = basis[i];
                if (((s >> k.first) & 1) == ((s >> k.second) & 1)) continue;
                const std::uint64_t t =
                    s ^ ((std::uint64_t{1} << k.first) | (std::uint64_t{1} << k.second));
                y[index.at(t)] -= 2 * val * x[i];
            }
    };
    RngStream rng(7);
    std::vector<double> x(dim), y(dim);
    for (auto& v : x) v = rng.uniform(-1, 1);
    double eig = 0;
    for (int it = 0; it < iterations; ++it) {
        apply(x, y);
        double norm = 0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        for (int i = 0; i < dim; ++i) x[i] = y[i] / norm;
        eig = norm;
    }
    // Rayleigh quotient for the converged vector
    apply(x, y);
    double rq = 0;
    for (int i = 0; i < dim; ++i) rq += x[i] * y[i];
    (void)eig;
    return bound - rq;
}

}  // namespace

TEST_CASE("ansatz structure") {
    UpccdAnsatz a2(2);
    CHECK(a2.parameter_count() == 1);
    UpccdAnsatz a6(6);
    CHECK(a6.parameter_count() == 9);
    CHECK_THROWS_AS(UpccdAnsatz(3), std::invalid_argument);
    CHECK_THROWS_AS(a2.circuit({0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("n=2 ansatz is a single planar rotation") {
    UpccdAnsatz a(2);
    for (double alpha : {0.0, 0.3, -1.2}) {
        Circuit c = a.circuit({alpha});
        c.measure_all();
        Distribution d = run_ideal(c);
        // cos(a)|10> + sin(a)|01> in (q1 q0) order: key "10" means q0=1
        double p10 = std::cos(alpha) * std::cos(alpha);
        auto it = d.find("10");
        CHECK((it != d.end() ? it->second : 0.0) == doctest::Approx(p10).epsilon(1e-10));
        it = d.find("01");
        CHECK((it != d.end() ? it->second : 0.0) ==
              doctest::Approx(1 - p10).epsilon(1e-10));
    }
}

TEST_CASE("alpha = 0 concentrates on the reference state") {
    UpccdAnsatz a(4);
    Circuit c = a.circuit({0, 0, 0, 0});
    c.measure_all();
    Distribution d = run_ideal(c);
    REQUIRE(d.size() == 1);
    CHECK(d.begin()->first == "1100");  // qubits 0,1 occupied
}

TEST_CASE("pair number conservation across widths and parameters") {
    RngStream rng(5);
    for (int n : {2, 4, 6, 8, 10, 12}) {
        UpccdAnsatz a(n);
        for (int t = 0; t < (n <= 6 ? 20 : 5); ++t) {
            std::vector<double> alpha(a.parameter_count());
            for (auto& v : alpha) v = rng.uniform(-M_PI, M_PI);
            Circuit c = a.circuit(alpha);
            c.measure_all();
            Distribution d = run_ideal(c);
            for (const auto& [key, p] : d) {
                if (p < 1e-12) continue;
                int weight = 0;
                for (char ch : key) weight += ch == '1';
                CHECK(weight == n / 2);
            }
        }
    }
}

TEST_CASE("three measurement groups regardless of size") {
    for (int n : {2, 6, 10}) CHECK(measurement_groups(n).size() == 3);
}

TEST_CASE("energy of pure Z Hamiltonian from concentrated counts") {
    PairedHamiltonian h = simple_h(2);
    h.e0 = 0.25;
    h.g = {0.5, 0.0};
    Distribution zb{{"00", 1.0}};
    Distribution rest{{"00", 1.0}};
    CHECK(energy_from_counts(zb, rest, rest, h) == doctest::Approx(0.75));
}

TEST_CASE("uniform counts average every non-identity term to e0") {
    PairedHamiltonian h = simple_h(2);
    h.e0 = -0.7;
    h.g = {0.3, -0.4};
    h.w[{0, 1}] = 0.2;
    h.v[{0, 1}] = 0.15;
    Distribution u{{"00", 0.25}, {"01", 0.25}, {"10", 0.25}, {"11", 0.25}};
    CHECK(energy_from_counts(u, u, u, h) == doctest::Approx(-0.7).epsilon(1e-12));
}

TEST_CASE("bell state pair-hopping expectation, exact and sampled") {
    // (|01> + |10>)/sqrt(2) = upCCD ansatz at alpha = pi/4 (up to sign)
    PairedHamiltonian h = simple_h(2);
    h.v[{0, 1}] = 0.3;
    UpccdAnsatz a(2);
    const double exact = exact_energy(h, a, {M_PI / 4});
    CHECK(exact == doctest::Approx(2 * 0.3).epsilon(1e-9));

    // 100k-shot estimate within 3 sigma (sigma ~ 2*v/sqrt(shots))
    Circuit base = a.circuit({M_PI / 4});
    auto groups = measurement_groups(2);
    std::array<Distribution, 3> dists;
    for (int gi = 0; gi < 3; ++gi) {
        ExecutionResult r = run_noisy(compose(base, groups[gi]), NoiseModel::ideal(),
                                      100000, 42 + gi);
        dists[gi] = r.probabilities;
    }
    const double est = energy_from_counts(dists[0], dists[1], dists[2], h);
    CHECK(est == doctest::Approx(0.6).epsilon(0.02));
}

TEST_CASE("grouped estimator is unbiased over random states and hamiltonians") {
    RngStream rng(11);
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + 2 * static_cast<int>(rng.uniform_int(2));  // 2 or 4
        PairedHamiltonian h = simple_h(n);
        h.e0 = rng.uniform(-1, 1);
        for (auto& gv : h.g) gv = rng.uniform(-1, 1);
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                h.w[{j, k}] = rng.uniform(-0.3, 0.3);
                h.v[{j, k}] = rng.uniform(-0.3, 0.3);
            }
        UpccdAnsatz a(n);
        std::vector<double> alpha(a.parameter_count());
        for (auto& v : alpha) v = rng.uniform(-M_PI, M_PI);
        const double exact = exact_energy(h, a, alpha);

        Circuit base = a.circuit(alpha);
        auto groups = measurement_groups(n);
        std::array<Distribution, 3> dists;
        for (int gi = 0; gi < 3; ++gi) {
            ExecutionResult r = run_noisy(compose(base, groups[gi]), NoiseModel::ideal(),
                                          200000, 5000 + 3 * t + gi);
            dists[gi] = r.probabilities;
        }
        const double est = energy_from_counts(dists[0], dists[1], dists[2], h);
        // term-count-scaled 4-sigma budget at 200k shots
        double budget = 0.0;
        for (auto& gv : h.g) budget += std::abs(gv);
        for (auto& [k, val] : h.w) budget += std::abs(val);
        for (auto& [k, val] : h.v) budget += 2 * std::abs(val);
        CHECK(std::abs(est - exact) <= 4 * budget / std::sqrt(200000.0));
    }
}

TEST_CASE("accuracy ratio identities") {
    ReferenceEnergies refs;
    refs.fci = -1.0;
    refs.doci = -1.0;
    refs.random_energy = -0.2;
    CHECK(accuracy_ratio(-1.0, refs) == doctest::Approx(1.0));
    CHECK(accuracy_ratio(-0.2, refs) == doctest::Approx(0.0));
    CHECK(accuracy_ratio(-0.6, refs) == doctest::Approx(0.5));
    // AR is affine: argmin of error over candidates is E_FCI
    CHECK(accuracy_ratio(-1.0, refs) > accuracy_ratio(-0.9, refs));
    CHECK(accuracy_ratio(-0.9, refs) > accuracy_ratio(-0.8, refs));
}

TEST_CASE("accuracy ratio can be negative") {
    ReferenceEnergies refs;
    refs.fci = -1.0;
    refs.random_energy = -0.2;
    refs.doci = -1.0;
    CHECK(accuracy_ratio(0.7, refs) < 0.0);
}

TEST_CASE("solution quality properties") {
    ReferenceEnergies refs;
    refs.fci = -1.2;
    refs.doci = -1.2;
    refs.random_energy = 0.1;
    CHECK(solution_quality(-1.2, refs) == doctest::Approx(1.0));
    CHECK(solution_quality(1e9, refs) == doctest::Approx(0.0).epsilon(1e-4));
    // monotone non-increasing in E_solution
    double prev = 2;
    for (double e = -1.2; e < 3; e += 0.1) {
        double sq = solution_quality(e, refs);
        CHECK(sq <= prev + 1e-12);
        CHECK(sq >= 0.0);
        CHECK(sq <= 1.0);
        prev = sq;
    }
    // larger precision sharpens the drop
    CHECK(solution_quality(-1.0, refs, 10.0) < solution_quality(-1.0, refs, 5.0));
}

TEST_CASE("chemical accuracy band arithmetic") {
    ReferenceEnergies refs;
    refs.fci = -1.0;
    refs.doci = -1.0;
    refs.random_energy = -1.0 + 0.16;
    CHECK(1.0 - chemical_accuracy_band(refs) == doctest::Approx(1e-2));
    // 0.0192 Ha is 12 times the chemical accuracy threshold
    CHECK(0.0192 / 1.6e-3 == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("shipped H2 instance loads and cross-checks") {
    auto [h, refs] = load_paired_hamiltonian(shipped_instance_path(kInstanceDir, 0.75));
    CHECK(h.n == 2);
    CHECK(refs.fci.has_value());
    CHECK(refs.doci == doctest::Approx(-1.137117067).epsilon(1e-8));
    CHECK(refs.hf == doctest::Approx(hf_energy(h)).epsilon(1e-8));
    CHECK(refs.doci <= refs.hf);
    CHECK(refs.random_energy == doctest::Approx(h.e0));
}

TEST_CASE("synthetic instances satisfy the reference invariants") {
    for (int n : {4, 6, 8}) {
        auto [h, refs] = generate_synthetic_instance(n, 11 + n);
        CHECK(refs.doci <= refs.hf + 1e-12);
        CHECK(refs.random_energy == doctest::Approx(h.e0));
        CHECK(refs.doci < 0);
    }
}

TEST_CASE("doci energy matches power iteration oracle at n=4, seed 11") {
    auto [h, refs] = generate_synthetic_instance(4, 11);
    CHECK(doci_energy(h) == doctest::Approx(sector_ground_energy_power(h)).epsilon(1e-9));
}

TEST_CASE("exact nelder-mead run hits the DOCI energy on H2") {
    VqeConfig cfg;
    cfg.base.min_qubits = 2;
    cfg.base.max_qubits = 2;
    cfg.base.exact_probabilities = true;
    cfg.instance_dir = kInstanceDir;
    cfg.max_iterations = 200;
    cfg.nelder_mead.x_tol = 1e-10;
    cfg.nelder_mead.f_tol = 1e-13;
    MetricStore store = run_method2(cfg);
    auto [h, refs] = load_paired_hamiltonian(shipped_instance_path(kInstanceDir, 0.75));
    double final_energy = 0;
    int max_iter = -1;
    for (const auto& r : store.records())
        if (r.group == 2 && r.iteration > max_iter && r.app.count("energy")) {
            max_iter = r.iteration;
            final_energy = r.app.at("energy");
        }
    CHECK(std::abs(final_energy - refs.doci) <= 1e-6);
    CHECK(std::abs(accuracy_ratio(final_energy, refs) - 1.0) <= 1e-5);
}

TEST_CASE("iteration records carry AR, SQ and cumulative quantum time") {
    VqeConfig cfg;
    cfg.base.min_qubits = 4;
    cfg.base.max_qubits = 4;
    cfg.base.shots = 300;
    cfg.max_iterations = 5;
    MetricStore store = run_method2(cfg);
    double last_cum = -1;
    int seen = 0;
    for (const auto& r : store.records()) {
        if (r.iteration < 0) continue;
        ++seen;
        CHECK(r.app.count("accuracy_ratio") == 1);
        CHECK(r.app.count("solution_quality") == 1);
        CHECK(r.app.at("solution_quality") >= 0.0);
        CHECK(r.app.at("solution_quality") <= 1.0);
        CHECK(r.app.at("accuracy_ratio") <= 1.0 + 1e-12);
        CHECK(r.app.at("cum_quantum") >= last_cum);
        last_cum = r.app.at("cum_quantum");
    }
    CHECK(seen == 6);  // iterations 0..5
}

TEST_CASE("method1 fidelity and depth trends") {
    VqeConfig cfg;
    cfg.base.min_qubits = 2;
    cfg.base.max_qubits = 8;
    cfg.base.skip = 2;
    cfg.base.shots = 10000;
    MetricStore store = run_method1(cfg);
    int prev_depth = -1;
    for (int g : store.groups()) {
        auto recs = store.group_records(g);
        REQUIRE(recs.size() == 1);
        CHECK(!recs[0]->failed);
        CHECK(recs[0]->normalized_fidelity >= 0.99);  // noiseless
        CHECK(recs[0]->algorithmic_depth > prev_depth);
        prev_depth = recs[0]->algorithmic_depth;
    }
}

TEST_CASE("spsa replay determinism for method2") {
    VqeConfig cfg;
    cfg.base.min_qubits = 2;
    cfg.base.max_qubits = 2;
    cfg.base.shots = 200;
    cfg.instance_dir = kInstanceDir;
    cfg.optimizer = VqeConfig::Optimizer::spsa;
    cfg.max_iterations = 4;
    MetricStore a = run_method2(cfg);
    MetricStore b = run_method2(cfg);
    REQUIRE(a.records().size() == b.records().size());
    for (std::size_t i = 0; i < a.records().size(); ++i) {
        if (a.records()[i].iteration < 0) continue;
        CHECK(a.records()[i].app.at("energy") == b.records()[i].app.at("energy"));
    }
}
