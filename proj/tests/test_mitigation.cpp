#include <doctest.h>

#include <cmath>

#include "qbench/builders.hpp"
#include "qbench/metrics.hpp"
#include "qbench/mitigation.hpp"
#include "qbench/rng.hpp"

using namespace qbench;

namespace {

ConfusionMatrixSet identity_cal(int n) {
    ConfusionMatrixSet cal;
    for (int q = 0; q < n; ++q) cal.matrices[q] = Eigen::Matrix2d::Identity();
    return cal;
}

ConfusionMatrixSet symmetric_cal(int n, double flip) {
    ConfusionMatrixSet cal;
    Eigen::Matrix2d m;
    m << 1 - flip, flip, flip, 1 - flip;
    for (int q = 0; q < n; ++q) cal.matrices[q] = m;
    return cal;
}

}  // namespace

TEST_CASE("calibration with identity readout") {
    NoiseModel noise;  // no readout error
    ConfusionMatrixSet cal = calibrate_confusion(noise, {0, 1}, 10000, 3);
    for (int q : {0, 1}) {
        CHECK(cal.matrices.at(q)(0, 0) == doctest::Approx(1.0));
        CHECK(cal.matrices.at(q)(1, 1) == doctest::Approx(1.0));
    }
}

TEST_CASE("calibration recovers symmetric flip rate") {
    NoiseModel noise;
    noise.with_symmetric_readout(0.02, 2);
    ConfusionMatrixSet cal = calibrate_confusion(noise, {0, 1}, 10000, 11);
    // binomial std at p=0.02, n=10000 is ~0.0014; allow 4 sigma
    for (int q : {0, 1}) {
        CHECK(cal.matrices.at(q)(0, 1) == doctest::Approx(0.02).epsilon(0.35));
        CHECK(cal.matrices.at(q)(1, 0) == doctest::Approx(0.02).epsilon(0.35));
    }
}

TEST_CASE("calibration recovers asymmetric flips per row") {
    NoiseModel noise;
    Eigen::Matrix2d m;
    m << 0.99, 0.01, 0.05, 0.95;
    noise.readout = {m};
    ConfusionMatrixSet cal = calibrate_confusion(noise, {0}, 20000, 21);
    CHECK(cal.matrices.at(0)(0, 1) == doctest::Approx(0.01).epsilon(0.4));
    CHECK(cal.matrices.at(0)(1, 0) == doctest::Approx(0.05).epsilon(0.25));
}

TEST_CASE("identity calibration is a no-op") {
    Counts counts{{"00", 400}, {"01", 300}, {"10", 200}, {"11", 100}};
    MitigationResult res = mitigate_counts(counts, identity_cal(2), {0, 1});
    Distribution raw = counts_to_distribution(counts);
    for (const auto& [k, v] : raw) CHECK(res.distribution.at(k) == doctest::Approx(v).epsilon(1e-12));
    CHECK(res.clipped_mass == doctest::Approx(0.0));
}

TEST_CASE("mitigation inverts a known 2x2 channel") {
    // true state |0>, flip 0.05: observed ~ {0: 0.95, 1: 0.05}
    Counts counts{{"0", 95000}, {"1", 5000}};
    MitigationResult res = mitigate_counts(counts, symmetric_cal(1, 0.05), {0});
    CHECK(res.distribution.at("0") >= 0.999);
}

TEST_CASE("round trip through the forward channel") {
    RngStream rng(3);
    ConfusionMatrixSet cal = symmetric_cal(3, 0.04);
    Distribution raw;
    double total = 0;
    for (int i = 0; i < 8; ++i) {
        std::string key(3, '0');
        for (int b = 0; b < 3; ++b)
            if (i & (1 << b)) key[b] = '1';
        raw[key] = rng.uniform() + 0.05;  // interior point: no clipping
        total += raw[key];
    }
    for (auto& [k, v] : raw) v /= total;
    MitigationResult m = mitigate_distribution(raw, cal, {0, 1, 2});
    CHECK(m.clipped_mass == doctest::Approx(0.0).epsilon(1e-10));
    Distribution back = apply_confusion(m.distribution, cal, {0, 1, 2});
    for (const auto& [k, v] : raw) CHECK(back.at(k) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("negative quasi-probabilities are clipped and renormalized") {
    // observed cleaner than the channel could produce -> negative entries
    Counts counts{{"0", 10000}};
    MitigationResult res = mitigate_counts(counts, symmetric_cal(1, 0.1), {0});
    double sum = 0;
    for (const auto& [k, v] : res.distribution) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(res.clipped_mass > 0.0);
}

TEST_CASE("singular confusion matrix rejected") {
    ConfusionMatrixSet cal;
    Eigen::Matrix2d m;
    m << 0.5, 0.5, 0.5, 0.5;
    cal.matrices[0] = m;
    Counts counts{{"0", 10}};
    CHECK_THROWS_AS(mitigate_counts(counts, cal, {0}), std::invalid_argument);
}

TEST_CASE("calibration must cover measured qubits") {
    Counts counts{{"00", 10}};
    CHECK_THROWS_AS(mitigate_counts(counts, identity_cal(1), {0, 1}), std::invalid_argument);
}

TEST_CASE("ghz mitigation beats raw under readout noise") {
    NoiseModel noise;
    noise.with_symmetric_readout(0.05, 3);
    Circuit c = ghz(3);
    Distribution ideal = run_ideal(c);
    ConfusionMatrixSet cal = symmetric_cal(3, 0.05);
    int wins = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        ExecutionResult res = run_noisy(c, noise, 10000, 7000 + s);
        double raw = hellinger_fidelity(res.probabilities, ideal);
        MitigationResult m = mitigate_counts(res.counts, cal, {0, 1, 2});
        double fixed = hellinger_fidelity(m.distribution, ideal);
        if (fixed > raw) ++wins;
    }
    CHECK(wins >= 18);
}
