// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

namespace sprawl {

template <class Distance>
AxiomReport check_metric_axioms(Distance&& dist, std::span<const Payload> sample,
                                std::size_t trials, std::uint64_t seed) {
    AxiomReport report;
    if (sample.empty()) return report;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
    for (std::size_t t = 0; t < trials; ++t) {
        ++report.trials;
        std::size_t u = pick(rng), v = pick(rng), w = pick(rng);
        double uv = dist(sample[u], sample[v]);
        double vu = dist(sample[v], sample[u]);
        if (uv != vu) {
            report.violation = AxiomViolation{AxiomViolation::Kind::Symmetry, u, v, v, uv, vu};
            return report;
        }
        bool same = sample[u] == sample[v];
        if (same != (uv == 0.0)) {
            report.violation = AxiomViolation{AxiomViolation::Kind::Identity, u, v, v, uv, 0.0};
            return report;
        }
        double uw = dist(sample[u], sample[w]);
        double wv = dist(sample[w], sample[v]);
        if (uv > uw + wv + kEpsilon) {
            report.violation = AxiomViolation{AxiomViolation::Kind::Triangle, u, v, w, uv, uw + wv};
            return report;
        }
    }
    return report;
}

}  // namespace sprawl
