#include "qbench/hamsim.hpp"

#include <chrono>
#include <stdexcept>

#include "qbench/rng.hpp"

namespace qbench {

void HamSimSpec::validate() const {
    if (n < 2) throw std::invalid_argument("hamsim needs n >= 2");
    if (steps < 1) throw std::invalid_argument("hamsim needs steps >= 1");
}

Circuit build_hamsim_circuit(const HamSimSpec& spec) {
    spec.validate();
    Circuit c(spec.n);
    c.metadata["benchmark"] = "hamsim";
    for (int step = 0; step < spec.steps; ++step) {
        for (int q = 0; q < spec.n; ++q) c.rx(spec.x_beta, q);
        for (int q = 0; q + 1 < spec.n; ++q) c.zz(spec.zz_theta, q, q + 1);
    }
    c.measure_all();
    return c;
}

MetricStore run_hamsim_benchmark(const HamSimBenchConfig& cfg) {
    cfg.base.validate();
    MetricStore store(cfg.with_resynthesis ? "hamsim+resynthesis" : "hamsim");
    BenchmarkConfig base = cfg.base;
    if (cfg.with_resynthesis) {
        ResynthesisConfig rcfg;
        rcfg.e2 = cfg.resynthesis_e2;
        base.hooks.register_transformer(
            [rcfg](const Circuit& c) { return kak_resynthesize(c, rcfg); });
    }
    for (int n : base.widths()) {
        HamSimSpec spec = cfg.spec;
        spec.n = n;
        const auto t0 = std::chrono::steady_clock::now();
        Circuit c = build_hamsim_circuit(spec);
        const double create =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ExecutionOutcome out =
            execute_circuit(c, base, derive_stream(base.seed, std::uint64_t(n)), n,
                            "w" + std::to_string(n), create);
        out.record.app["zz_theta"] = spec.zz_theta;
        out.record.app["steps"] = spec.steps;
        store.append(std::move(out.record));
    }
    return store;
}

}  // namespace qbench
