#include "chaostune/parameters.hpp"

#include <array>
#include <charconv>
#include <utility>

#include "chaostune/error.hpp"
#include "chaostune/text.hpp"

namespace chaostune {

namespace {

constexpr std::array<std::pair<ParamTarget, std::string_view>, 15> kTargetNames{{
    {ParamTarget::Gamma1, "gamma1"},
    {ParamTarget::Gamma2, "gamma2"},
    {ParamTarget::K, "k"},
    {ParamTarget::Delta, "delta"},
    {ParamTarget::Eps1, "eps1"},
    {ParamTarget::Eps2, "eps2"},
    {ParamTarget::ForcingAmp, "forcing_amp"},
    {ParamTarget::ForcingFreq, "forcing_freq"},
    {ParamTarget::LinStiffness, "lin_stiffness"},
    {ParamTarget::ModelDelta, "model.delta"},
    {ParamTarget::ModelEps1, "model.eps1"},
    {ParamTarget::ModelEps2, "model.eps2"},
    {ParamTarget::ModelForcingAmp, "model.forcing_amp"},
    {ParamTarget::ModelForcingFreq, "model.forcing_freq"},
    {ParamTarget::ModelLinStiffness, "model.lin_stiffness"},
}};

}  // namespace

ParamTarget parse_target(std::string_view name) {
    const auto trimmed = trim(name);
    for (const auto& [target, n] : kTargetNames) {
        if (n == trimmed) return target;
    }
    throw Error(ErrorCode::UnknownTarget, "unknown parameter '" + std::string(trimmed) + "'");
}

std::string_view target_name(ParamTarget target) noexcept {
    for (const auto& [t, n] : kTargetNames) {
        if (t == target) return n;
    }
    return "?";
}

double& param_ref(ClosedLoop& loop, ParamTarget target) noexcept {
    switch (target) {
        case ParamTarget::Gamma1: return loop.gains.gamma1;
        case ParamTarget::Gamma2: return loop.gains.gamma2;
        case ParamTarget::K: return loop.gains.k;
        case ParamTarget::Delta: return loop.plant.delta;
        case ParamTarget::Eps1: return loop.plant.eps1;
        case ParamTarget::Eps2: return loop.plant.eps2;
        case ParamTarget::ForcingAmp: return loop.plant.forcing_amp;
        case ParamTarget::ForcingFreq: return loop.plant.forcing_freq;
        case ParamTarget::LinStiffness: return loop.plant.lin_stiffness;
        case ParamTarget::ModelDelta: return loop.model.delta;
        case ParamTarget::ModelEps1: return loop.model.eps1;
        case ParamTarget::ModelEps2: return loop.model.eps2;
        case ParamTarget::ModelForcingAmp: return loop.model.forcing_amp;
        case ParamTarget::ModelForcingFreq: return loop.model.forcing_freq;
        case ParamTarget::ModelLinStiffness: return loop.model.lin_stiffness;
    }
    return loop.gains.gamma1;
}

double param_value(const ClosedLoop& loop, ParamTarget target) noexcept {
    return param_ref(const_cast<ClosedLoop&>(loop), target);
}

SigmaBinding SigmaBinding::parse(std::string_view spec) {
    const auto parts = split(spec, ',');
    if (parts.size() != 2) {
        throw Error(ErrorCode::UnknownTarget, "binding must name exactly two targets: '" + std::string(spec) + "'");
    }
    SigmaBinding b{parse_target(parts[0]), parse_target(parts[1])};
    if (b.first == b.second) throw Error(ErrorCode::UnknownTarget, "binding targets must be distinct");
    return b;
}

std::string SigmaBinding::to_string() const {
    return std::string(target_name(first)) + "," + std::string(target_name(second));
}

ClosedLoop apply_sigmas(const ClosedLoop& loop, const SigmaPair& pair, const SigmaBinding& binding) {
    if (binding.first == binding.second) throw Error(ErrorCode::UnknownTarget, "binding targets must be distinct");
    ClosedLoop out = loop;
    param_ref(out, binding.first) = pair.s1;
    param_ref(out, binding.second) = pair.s2;
    return out;
}

SigmaPair read_sigmas(const ClosedLoop& loop, const SigmaBinding& binding) noexcept {
    return {param_value(loop, binding.first), param_value(loop, binding.second)};
}

Coupling Coupling::parse(std::string_view spec) {
    const auto s = trim(spec);
    if (s == "uncoupled") return Coupling{true, 0.0};
    const auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) return Coupling{false, parse_double(s)};
        const double num = parse_double(s.substr(0, slash));
        const double den = parse_double(s.substr(slash + 1));
        if (den == 0.0) throw Error(ErrorCode::ParseFailure, "zero denominator");
        return Coupling{false, num / den};
    } catch (const Error&) {
        throw Error(ErrorCode::ParseFailure, "coupling must be 'uncoupled' or a ratio, got '" + std::string(s) + "'");
    }
}

std::string Coupling::to_string() const {
    return uncoupled ? std::string("uncoupled") : format_double(ratio);
}

}  // namespace chaostune
