#pragma once

#include <random>

#include "chaostune/parameters.hpp"

namespace chaostune {

/// Candidate distribution: s1 ~ Uniform[low, high], s2 tied to s1 by the
/// coupling or drawn independently from the same interval.
struct SamplerConfig {
    double low = -50.0;
    double high = 50.0;
    Coupling coupling;
};

[[nodiscard]] inline SigmaPair sample_sigmas(const SamplerConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(cfg.low, cfg.high);
    const double s1 = dist(rng);
    const double s2 = cfg.coupling.uncoupled ? dist(rng) : cfg.coupling.ratio * s1;
    return {s1, s2};
}

}  // namespace chaostune
