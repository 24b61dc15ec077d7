#include <doctest.h>

#include <cmath>

#include "qbench/builders.hpp"
#include "qbench/metrics.hpp"
#include "qbench/statevector.hpp"

using namespace qbench;

TEST_CASE("run_ideal basics") {
    Circuit h1(1);
    h1.h(0).measure(0, 0);
    Distribution d = run_ideal(h1);
    CHECK(d["0"] == doctest::Approx(0.5));
    CHECK(d["1"] == doctest::Approx(0.5));

    Circuit x1(1);
    x1.x(0).measure(0, 0);
    d = run_ideal(x1);
    CHECK(d["1"] == doctest::Approx(1.0));
    CHECK(d.count("0") == 0);
}

TEST_CASE("ghz ideal distribution") {
    Distribution d = run_ideal(ghz(3));
    CHECK(d.size() == 2);
    CHECK(d["000"] == doctest::Approx(0.5));
    CHECK(d["111"] == doctest::Approx(0.5));
}

TEST_CASE("marginalization over unmeasured qubits") {
    Circuit c(2);
    c.h(0).cx(0, 1);
    c.measure(1, 0);  // only the second qubit
    Distribution d = run_ideal(c);
    CHECK(d["0"] == doctest::Approx(0.5));
    CHECK(d["1"] == doctest::Approx(0.5));
}

TEST_CASE("width cap enforced") {
    SimulatorOptions opt;
    opt.width_cap = 3;
    Circuit c(4);
    c.h(0).measure_all();
    CHECK_THROWS_AS(run_ideal(c, opt), std::invalid_argument);
}

TEST_CASE("norm preserved along ideal path") {
    RngStream rng(3);
    Circuit c(3);
    for (int i = 0; i < 30; ++i) {
        int q = static_cast<int>(rng.uniform_int(3));
        switch (rng.uniform_int(4)) {
            case 0: c.h(q); break;
            case 1: c.rx(rng.uniform(-3, 3), q); break;
            case 2: c.rz(rng.uniform(-3, 3), q); break;
            default: c.cx(q, (q + 1) % 3); break;
        }
    }
    StateVector sv(3);
    for (const auto& inst : c.instructions()) {
        sv.apply(std::get<Gate>(inst));
        CHECK(std::abs(sv.norm_sq() - 1.0) < 1e-10);
    }
}

TEST_CASE("zero-noise run_noisy matches ideal") {
    Circuit c = ghz(3);
    ExecutionResult res = run_noisy(c, NoiseModel::ideal(), 10000, 42);
    CHECK(res.shots == 10000);
    std::uint64_t total = 0;
    for (const auto& [k, v] : res.counts) total += v;
    CHECK(total == 10000);
    CHECK(hellinger_fidelity(res.probabilities, run_ideal(c)) >= 0.99);
}

TEST_CASE("fully depolarizing two-qubit limit approaches uniform") {
    Circuit c(2);
    for (int i = 0; i < 50; ++i) c.cx(0, 1);
    c.measure_all();
    NoiseModel noise = NoiseModel::depolarizing(0.0, 1.0);
    ExecutionResult res = run_noisy(c, noise, 10000, 7);
    double tv = 0;
    for (const char* k : {"00", "01", "10", "11"}) {
        double p = 0;
        auto it = res.probabilities.find(k);
        if (it != res.probabilities.end()) p = it->second;
        tv += std::abs(p - 0.25);
    }
    CHECK(tv / 2 < 0.05);
}

TEST_CASE("ghz under reference noise keeps high normalized fidelity") {
    Circuit c = ghz(3);
    Distribution ideal = run_ideal(c);
    double mean = 0;
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        ExecutionResult res =
            run_noisy(c, NoiseModel::depolarizing(0.0005, 0.005), 10000, 1000 + s);
        mean += normalized_fidelity(res.probabilities, ideal, 8);
    }
    mean /= seeds;
    CHECK(mean >= 0.95);
    CHECK(mean <= 1.0);
}

TEST_CASE("determinism: identical counts for same seed, any thread count") {
    Circuit c = ghz(4);
    NoiseModel noise = NoiseModel::depolarizing(0.01, 0.02).with_symmetric_readout(0.03, 4);
    SimulatorOptions one;
    one.threads = 1;
    SimulatorOptions four;
    four.threads = 4;
    ExecutionResult a = run_noisy(c, noise, 5000, 99, one);
    ExecutionResult b = run_noisy(c, noise, 5000, 99, four);
    CHECK(a.counts == b.counts);
    ExecutionResult d = run_noisy(c, noise, 5000, 100, one);
    CHECK(a.counts != d.counts);
}

TEST_CASE("monotone fidelity degradation on growing CX ladders") {
    NoiseModel noise = NoiseModel::depolarizing(0.0005, 0.005);
    std::vector<int> depths{1, 10, 20, 40, 60};
    std::vector<double> fid;
    for (int d : depths) {
        Circuit c(2);
        c.h(0);
        for (int i = 0; i < d; ++i) c.cx(0, 1);
        c.measure_all();
        Distribution ideal = run_ideal(c);
        double mean = 0;
        for (int s = 0; s < 5; ++s) {
            ExecutionResult res = run_noisy(c, noise, 10000, 555 + s);
            mean += normalized_fidelity(res.probabilities, ideal, 4);
        }
        fid.push_back(mean / 5);
    }
    for (std::size_t i = 1; i < fid.size(); ++i) CHECK(fid[i] <= fid[i - 1] + 0.03);
    CHECK(fid.back() < fid.front());
}

TEST_CASE("post_select basics") {
    Distribution d{{"10", 0.5}, {"01", 0.5}};
    auto [cond, prob] = post_select(d, 0, 1);
    CHECK(prob == doctest::Approx(0.5));
    CHECK(cond.size() == 1);
    CHECK(cond["0"] == doctest::Approx(1.0));
}

TEST_CASE("post_select independence case") {
    // product distribution: bit0 independent of bit1
    Distribution d{{"00", 0.28}, {"10", 0.42}, {"01", 0.12}, {"11", 0.18}};
    auto [cond, prob] = post_select(d, 0, 1);
    CHECK(prob == doctest::Approx(0.6));
    Distribution marg = marginalize(d, {1});
    CHECK(cond["0"] == doctest::Approx(marg["0"]));
    CHECK(cond["1"] == doctest::Approx(marg["1"]));
}

TEST_CASE("post_select empty branch throws") {
    Distribution d{{"00", 1.0}};
    CHECK_THROWS_AS(post_select(d, 0, 1), std::runtime_error);
}

TEST_CASE("z parity expectation") {
    Distribution d{{"00", 0.5}, {"11", 0.5}};
    CHECK(z_parity_expectation(d, {0}) == doctest::Approx(0.0));
    CHECK(z_parity_expectation(d, {0, 1}) == doctest::Approx(1.0));
}

TEST_CASE("readout confusion validation") {
    NoiseModel noise;
    Eigen::Matrix2d bad;
    bad << 0.9, 0.2, 0.1, 0.9;
    noise.readout = {bad};
    Circuit c(1);
    c.measure(0, 0);
    CHECK_THROWS_AS(run_noisy(c, noise, 10, 1), std::invalid_argument);
}
