#include "qbench/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qbench/rng.hpp"

namespace qbench {

OptTrace spsa_minimize(const Objective& f, std::vector<double> theta0, const SpsaConfig& cfg,
                       std::uint64_t seed, const std::function<void(int)>& pre_iteration,
                       const StopRule& should_stop) {
    if (theta0.empty()) throw std::invalid_argument("spsa: need at least one parameter");
    if (cfg.a <= 0 || cfg.c <= 0) throw std::invalid_argument("spsa: gains must be positive");
    RngStream rng(derive_stream(seed, 0x5b5a));
    const std::size_t dim = theta0.size();
    OptTrace trace;
    std::vector<double> theta = std::move(theta0);
    std::vector<double> plus(dim), minus(dim), delta(dim);
    for (int k = 0; k < cfg.max_iterations; ++k) {
        if (pre_iteration) pre_iteration(k);
        ObjectiveValue at = f(theta);
        trace.push_back({theta, at.value, std::move(at.aux)});
        if (should_stop && should_stop(trace)) return trace;
        const double ak = cfg.a / std::pow(k + 1 + cfg.big_a, cfg.alpha);
        const double ck = cfg.c / std::pow(k + 1, cfg.gamma);
        for (std::size_t i = 0; i < dim; ++i) {
            delta[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
            plus[i] = theta[i] + ck * delta[i];
            minus[i] = theta[i] - ck * delta[i];
        }
        const double fp = f(plus).value;
        const double fm = f(minus).value;
        const double scale = (fp - fm) / (2 * ck);
        for (std::size_t i = 0; i < dim; ++i) theta[i] -= ak * scale / delta[i];
    }
    if (pre_iteration) pre_iteration(cfg.max_iterations);
    ObjectiveValue last = f(theta);
    trace.push_back({theta, last.value, std::move(last.aux)});
    return trace;
}

StopRule relative_change_stop(int window, double rel_tol) {
    return [window, rel_tol](const OptTrace& trace) {
        if (static_cast<int>(trace.size()) <= window) return false;
        const double now = trace.back().value;
        const double then = trace[trace.size() - 1 - window].value;
        const double scale = std::max({std::abs(now), std::abs(then), 1e-12});
        return std::abs(now - then) / scale < rel_tol;
    };
}

OptTrace nelder_mead_minimize(const Objective& f, std::vector<double> theta0,
                              const NelderMeadOptions& opt) {
    if (theta0.empty()) throw std::invalid_argument("nelder-mead: need at least one parameter");
    const std::size_t n = theta0.size();

    struct Vertex {
        std::vector<double> x;
        double fx;
        std::map<std::string, double> aux;
    };
    auto eval = [&](std::vector<double> x) {
        ObjectiveValue v = f(x);
        return Vertex{std::move(x), v.value, std::move(v.aux)};
    };

    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back(eval(theta0));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x = theta0;
        x[i] += (x[i] != 0.0) ? opt.initial_step * std::abs(x[i]) : opt.initial_step * 0.25;
        simplex.push_back(eval(std::move(x)));
    }
    auto by_value = [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; };
    std::sort(simplex.begin(), simplex.end(), by_value);

    OptTrace trace;
    trace.push_back({simplex[0].x, simplex[0].fx, simplex[0].aux});

    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    for (int it = 0; it < opt.max_iterations; ++it) {
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / double(n);
        const Vertex& worst = simplex[n];
        for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + (centroid[i] - worst.x[i]);
        Vertex vr = eval(xr);
        if (vr.fx < simplex[0].fx) {
            for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + 2 * (centroid[i] - worst.x[i]);
            Vertex ve = eval(xe);
            simplex[n] = ve.fx < vr.fx ? std::move(ve) : std::move(vr);
        } else if (vr.fx < simplex[n - 1].fx) {
            simplex[n] = std::move(vr);
        } else {
            const Vertex& better = vr.fx < worst.fx ? vr : worst;
            for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + 0.5 * (better.x[i] - centroid[i]);
            Vertex vc = eval(xc);
            if (vc.fx < better.fx) {
                simplex[n] = std::move(vc);
            } else {
                for (std::size_t v = 1; v <= n; ++v) {
                    std::vector<double> x(n);
                    for (std::size_t i = 0; i < n; ++i)
                        x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    simplex[v] = eval(std::move(x));
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_value);
        trace.push_back({simplex[0].x, simplex[0].fx, simplex[0].aux});

        double fspread = std::abs(simplex[n].fx - simplex[0].fx);
        double xspread = 0;
        for (std::size_t i = 0; i < n; ++i)
            xspread = std::max(xspread, std::abs(simplex[n].x[i] - simplex[0].x[i]));
        if (fspread < opt.f_tol && xspread < opt.x_tol) break;
    }
    return trace;
}

}  // namespace qbench
