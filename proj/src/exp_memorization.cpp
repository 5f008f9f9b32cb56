#include <cmath>

#include "mhpm/experiments.hpp"
#include "mhpm/modulation.hpp"
#include "mhpm/rng.hpp"
#include "mhpm/unit.hpp"

namespace mhpm {

// One AR unit sees two period-4 sequences in alternating blocks. They share
// their first three vectors, so with a window of 3 the last element of each
// period is ambiguous and the unit must compromise between the two endings.
// Only sequence A is rewarded.
MemorizationResult run_memorization(std::uint64_t seed) {
    constexpr std::size_t kDim = 4, kBlock = 200, kBlocks = 40;
    Rng rng(derive_seed(seed, "memorization"));
    auto vec = [&] {
        std::vector<double> v(kDim);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        return SignalVector(std::move(v));
    };
    const SignalVector s0 = vec(), s1 = vec(), s2 = vec();
    const SignalVector a[4] = {s0, s1, s2, vec()};
    const SignalVector b[4] = {s0, s1, s2, vec()};

    ARConfig ac;
    ac.input_dim = kDim;
    ac.window = 3;
    ac.base_lr = 0.01;
    ARUnit ar(ac, rng);
    Modulator mod;
    const SignalVector none = SignalVector::zeros(0);

    const std::size_t total = kBlock * kBlocks, tail = total - total / 5;
    double loss_a = 0, loss_b = 0, n_a = 0, n_b = 0;
    for (std::size_t t = 0; t < total; ++t) {
        const bool is_a = (t / kBlock) % 2 == 0;
        const SignalVector& x = is_a ? a[t % 4] : b[t % 4];
        const double m = mod.step(is_a ? 1.0 : 0.0);
        const double loss = ar.observe(none, x, ar.base_lr() * m);
        if (t < tail) continue;
        (is_a ? loss_a : loss_b) += loss;
        (is_a ? n_a : n_b) += 1;
    }
    return {loss_a / n_a, loss_b / n_b};
}

}  // namespace mhpm
