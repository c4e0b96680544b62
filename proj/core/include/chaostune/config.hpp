#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "chaostune/adaptive.hpp"
#include "chaostune/dataset.hpp"
#include "chaostune/simulation.hpp"
#include "chaostune/surrogate.hpp"

namespace chaostune {

struct CollectionSettings {
    std::size_t episodes = 50;
    double t_end = 2.5;
    SigmaDistribution sigmas;
    double split_ratio = 0.6;
};

struct SurrogateSettings {
    NetConfig net;
    TrainOptions training;
};

/// Full run configuration. Defaults reproduce the unoptimised baseline:
/// delta 0.5, eps1 1.6, eps2 -0.8, P 3, w 10, gamma1 12, gamma2 4, k 115.
struct RunConfig {
    PlantState initial;
    ClosedLoop loop;
    SimOptions simulation;
    AdaptiveConfig adaptive;
    CollectionSettings collection;
    SurrogateSettings surrogate;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";

    /// Pushes `seed` into every seeded component.
    void set_seed(std::uint64_t s);
};

[[nodiscard]] RunConfig default_config();

/// JSON document with optional sections plant, controller, reference,
/// simulation, adaptive, collection, surrogate and top-level seed / out_dir.
/// Missing keys keep their defaults; unknown keys throw ConfigError.
[[nodiscard]] RunConfig parse_config(std::string_view json_text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);
[[nodiscard]] std::string config_to_json(const RunConfig& cfg);

[[nodiscard]] CollectionSpec collection_spec(const RunConfig& cfg);

}  // namespace chaostune
