#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qbench {

struct ObjectiveValue {
    double value = 0.0;
    std::map<std::string, double> aux;  // application metrics carried through traces
};

using Objective = std::function<ObjectiveValue(const std::vector<double>&)>;

struct OptIterate {
    std::vector<double> params;
    double value = 0.0;
    std::map<std::string, double> aux;
};

using OptTrace = std::vector<OptIterate>;

struct SpsaConfig {
    double a = 0.15;
    double c = 0.1;
    double big_a = 10.0;   // stability constant A
    double alpha = 0.602;
    double gamma = 0.101;
    int max_iterations = 100;
};

using StopRule = std::function<bool(const OptTrace&)>;

/// Two-sided SPSA with Rademacher perturbations and gains
/// a_k = a/(k+1+A)^alpha, c_k = c/(k+1)^gamma. The trace holds f(theta_k) for
/// every iterate including theta_0; deterministic given the seed.
/// `pre_iteration` (when set) runs before the evaluations of iteration k;
/// `should_stop` is checked after each appended iterate.
OptTrace spsa_minimize(const Objective& f, std::vector<double> theta0,
                       const SpsaConfig& cfg, std::uint64_t seed,
                       const std::function<void(int)>& pre_iteration = nullptr,
                       const StopRule& should_stop = nullptr);

/// True once the best value changed by less than rel_tol (relatively) over the
/// trailing `window` iterates.
StopRule relative_change_stop(int window, double rel_tol);

struct NelderMeadOptions {
    int max_iterations = 400;   // simplex iterations
    double x_tol = 1e-8;
    double f_tol = 1e-10;
    double initial_step = 0.1;
};

/// Standard simplex method (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). The trace records the best vertex after every iteration.
OptTrace nelder_mead_minimize(const Objective& f, std::vector<double> theta0,
                              const NelderMeadOptions& opt = {});

}  // namespace qbench
