#include "chaostune/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "chaostune/error.hpp"
#include "chaostune/sampling.hpp"

namespace chaostune {

std::vector<SampleRecord> Dataset::train_records() const {
    if (!is_split()) return records;
    std::vector<SampleRecord> out;
    out.reserve(train_idx.size());
    for (auto i : train_idx) out.push_back(records.at(i));
    return out;
}

std::vector<SampleRecord> Dataset::test_records() const {
    std::vector<SampleRecord> out;
    out.reserve(test_idx.size());
    for (auto i : test_idx) out.push_back(records.at(i));
    return out;
}

std::vector<SampleRecord> to_records(const Trajectory& trajectory, double err_cap) {
    std::vector<SampleRecord> out;
    out.reserve(trajectory.rows.size());
    for (const auto& r : trajectory.rows) {
        if (!std::isfinite(r.x) || !std::isfinite(r.v)) continue;
        double err = std::abs(r.e);
        if (!(err <= err_cap)) err = err_cap;
        out.push_back({r.t, r.x, r.v, r.u, r.s1, r.s2, err});
    }
    return out;
}

Dataset collect_dataset(const CollectionSpec& spec) {
    if (spec.episodes == 0) throw Error(ErrorCode::InvalidArgument, "collect_dataset needs at least one episode");
    std::mt19937_64 rng(spec.seed);
    const SamplerConfig sampler{spec.sigmas.low, spec.sigmas.high, spec.sigmas.coupling};

    Dataset ds;
    for (std::size_t ep = 0; ep < spec.episodes; ++ep) {
        const SigmaPair pair = sample_sigmas(sampler, rng);
        const ClosedLoop loop = apply_sigmas(spec.loop, pair, spec.binding);
        const Trajectory tr = simulate(spec.initial, loop, spec.options, {}, spec.binding);
        auto recs = to_records(tr, spec.options.divergence_bound);
        ds.records.insert(ds.records.end(), recs.begin(), recs.end());
    }
    return ds;
}

Dataset split_dataset(Dataset ds, double ratio, std::uint64_t seed) {
    const std::size_t n = ds.records.size();
    if (n < 2) throw Error(ErrorCode::TooSmall, "split_dataset needs at least 2 records");
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw Error(ErrorCode::InvalidArgument, "split ratio must be in [0, 1]");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    ds.train_idx.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    ds.test_idx.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    return ds;
}

}  // namespace chaostune
