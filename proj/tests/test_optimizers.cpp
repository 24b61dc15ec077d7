#include <doctest.h>

#include <cmath>

#include <stdexcept>

#include "qbench/optimizers.hpp"

using namespace qbench;

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("spsa minimizes a quadratic") {
    Objective f = [](const std::vector<double>& x) {
        double s = 0;
        for (double v : x) s += v * v;
        return ObjectiveValue{s, {}};
    };
    SpsaConfig cfg;
    cfg.max_iterations = 200;
    OptTrace trace = spsa_minimize(f, {1.0, 1.0}, cfg, 7);
    CHECK(trace.size() == 201);
    CHECK(norm2(trace.back().params) < 0.1);
}

TEST_CASE("spsa zero iterations returns theta0 evaluation") {
    Objective f = [](const std::vector<double>& x) {
        return ObjectiveValue{x[0] * 2, {{"tag", 1.0}}};
    };
    SpsaConfig cfg;
    cfg.max_iterations = 0;
    OptTrace trace = spsa_minimize(f, {3.0}, cfg, 1);
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].params[0] == doctest::Approx(3.0));
    CHECK(trace[0].value == doctest::Approx(6.0));
    CHECK(trace[0].aux.at("tag") == doctest::Approx(1.0));
}

TEST_CASE("spsa deterministic replay") {
    Objective f = [](const std::vector<double>& x) {
        return ObjectiveValue{std::sin(x[0]) + x[1] * x[1], {}};
    };
    SpsaConfig cfg;
    cfg.max_iterations = 50;
    OptTrace a = spsa_minimize(f, {0.5, -0.25}, cfg, 99);
    OptTrace b = spsa_minimize(f, {0.5, -0.25}, cfg, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].value == b[i].value);
        CHECK(a[i].params == b[i].params);
    }
    OptTrace c = spsa_minimize(f, {0.5, -0.25}, cfg, 100);
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].params != c[i].params) same = false;
    CHECK(!same);
}

TEST_CASE("spsa pre-iteration callback ordering") {
    std::vector<int> seen;
    Objective f = [&](const std::vector<double>& x) {
        return ObjectiveValue{x[0] * x[0], {}};
    };
    SpsaConfig cfg;
    cfg.max_iterations = 3;
    spsa_minimize(f, {1.0}, cfg, 5, [&](int k) { seen.push_back(k); });
    CHECK(seen == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("spsa rejects bad config") {
    Objective f = [](const std::vector<double>&) { return ObjectiveValue{0, {}}; };
    SpsaConfig bad;
    bad.a = 0;
    CHECK_THROWS_AS(spsa_minimize(f, {1.0}, bad, 1), std::invalid_argument);
    CHECK_THROWS_AS(spsa_minimize(f, {}, SpsaConfig{}, 1), std::invalid_argument);
}

TEST_CASE("nelder-mead minimizes (x-2)^2") {
    Objective f = [](const std::vector<double>& x) {
        return ObjectiveValue{(x[0] - 2) * (x[0] - 2), {}};
    };
    OptTrace trace = nelder_mead_minimize(f, {0.0});
    CHECK(std::abs(trace.back().params[0] - 2.0) < 1e-4);
}

TEST_CASE("nelder-mead constant objective terminates") {
    int calls = 0;
    Objective f = [&](const std::vector<double>&) {
        ++calls;
        return ObjectiveValue{1.0, {}};
    };
    NelderMeadOptions opt;
    opt.max_iterations = 50;
    OptTrace trace = nelder_mead_minimize(f, {0.0, 0.0});
    CHECK(trace.back().value == doctest::Approx(1.0));
    CHECK(calls > 0);
}

TEST_CASE("nelder-mead rosenbrock-lite in 2d") {
    Objective f = [](const std::vector<double>& x) {
        double a = 1 - x[0], b = x[1] - x[0] * x[0];
        return ObjectiveValue{a * a + 10 * b * b, {}};
    };
    NelderMeadOptions opt;
    opt.max_iterations = 2000;
    opt.x_tol = 1e-10;
    opt.f_tol = 1e-12;
    OptTrace trace = nelder_mead_minimize(f, {-1.0, 1.0}, opt);
    CHECK(trace.back().value < 1e-6);
}
