#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "chaostune/parameters.hpp"
#include "chaostune/simulation.hpp"

namespace chaostune {

/// One logged control step: time, state, control, active sigmas and the
/// absolute tracking error |qd - x|.
struct SampleRecord {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
    double u = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double err = 0.0;

    bool operator==(const SampleRecord&) const = default;
};

/// Records plus an optional train/test partition (indices into `records`).
struct Dataset {
    std::vector<SampleRecord> records;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;

    [[nodiscard]] bool is_split() const noexcept { return !train_idx.empty() || !test_idx.empty(); }
    [[nodiscard]] std::vector<SampleRecord> train_records() const;
    [[nodiscard]] std::vector<SampleRecord> test_records() const;

    bool operator==(const Dataset&) const = default;
};

/// Converts trajectory rows to records; err is |e| capped at `err_cap` and
/// rows with a non-finite state are dropped.
[[nodiscard]] std::vector<SampleRecord> to_records(const Trajectory& trajectory, double err_cap);

struct SigmaDistribution {
    double low = -50.0;
    double high = 50.0;
    Coupling coupling;
};

struct CollectionSpec {
    PlantState initial;
    ClosedLoop loop;
    SimOptions options;
    SigmaBinding binding;
    SigmaDistribution sigmas;
    std::size_t episodes = 50;
    std::uint64_t seed = 0;
};

/// Runs `episodes` closed-loop simulations, each with one sigma pair drawn
/// from `sigmas` and applied at t = 0, and concatenates the records in
/// episode order. Throws InvalidArgument when episodes == 0.
[[nodiscard]] Dataset collect_dataset(const CollectionSpec& spec);

/// Seeded uniform shuffle; the first round(ratio * N) indices go to train.
/// Throws TooSmall for N < 2.
[[nodiscard]] Dataset split_dataset(Dataset ds, double ratio = 0.6, std::uint64_t seed = 0);

}  // namespace chaostune
