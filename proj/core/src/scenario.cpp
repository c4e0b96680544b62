#include "chaostune/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chaostune/error.hpp"

namespace chaostune {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw Error(ErrorCode::ConfigError, where + ": unknown key '" + key + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw Error(ErrorCode::ConfigError, where + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, where + ": '" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(ErrorCode::ConfigError, where + ": '" + key + "' must be finite");
    return d;
}

std::optional<double> maybe_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, key, where);
}

ScenarioEvent parse_event(const json& ev, std::size_t index) {
    const std::string where = "events[" + std::to_string(index) + "]";
    if (!ev.is_object()) throw Error(ErrorCode::ConfigError, where + ": must be an object");
    if (!ev.contains("action") || !ev.at("action").is_string()) {
        throw Error(ErrorCode::ConfigError, where + ": missing string 'action'");
    }
    ScenarioEvent out;
    out.at_time = number(ev, "at_time", where);
    if (out.at_time < 0.0) throw Error(ErrorCode::ConfigError, where + ": at_time must be >= 0");

    const auto action = ev.at("action").get<std::string>();
    if (action == "SetControllerGains") {
        check_keys(ev, {"at_time", "action", "gamma1", "gamma2", "k"}, where);
        out.action = SetControllerGains{maybe_number(ev, "gamma1", where), maybe_number(ev, "gamma2", where),
                                        maybe_number(ev, "k", where)};
    } else if (action == "SetSigmas") {
        check_keys(ev, {"at_time", "action", "s1", "s2"}, where);
        out.action = SetSigmas{{number(ev, "s1", where), number(ev, "s2", where)}};
    } else if (action == "SetPlantParams") {
        check_keys(ev, {"at_time", "action", "delta", "eps1", "eps2", "forcing_amp", "forcing_freq", "lin_stiffness"},
                   where);
        out.action = SetPlantParams{maybe_number(ev, "delta", where),        maybe_number(ev, "eps1", where),
                                    maybe_number(ev, "eps2", where),         maybe_number(ev, "forcing_amp", where),
                                    maybe_number(ev, "forcing_freq", where), maybe_number(ev, "lin_stiffness", where)};
    } else if (action == "ActuatorScale") {
        check_keys(ev, {"at_time", "action", "factor"}, where);
        out.action = ActuatorScale{number(ev, "factor", where)};
    } else if (action == "AdditiveDisturbance") {
        check_keys(ev, {"at_time", "action", "amplitude", "freq", "duration"}, where);
        AdditiveDisturbance d{number(ev, "amplitude", where), number(ev, "freq", where), number(ev, "duration", where)};
        if (d.duration < 0.0) throw Error(ErrorCode::ConfigError, where + ": duration must be >= 0");
        out.action = d;
    } else if (action == "ImpulseVelocity") {
        check_keys(ev, {"at_time", "action", "dv"}, where);
        out.action = ImpulseVelocity{number(ev, "dv", where)};
    } else {
        throw Error(ErrorCode::ConfigError, where + ": unknown action '" + action + "'");
    }
    return out;
}

void put_optional(json& obj, const char* key, const std::optional<double>& v) {
    if (v) obj[key] = *v;
}

}  // namespace

std::string_view action_name(const EventAction& action) noexcept {
    struct Visitor {
        std::string_view operator()(const SetControllerGains&) const { return "SetControllerGains"; }
        std::string_view operator()(const SetSigmas&) const { return "SetSigmas"; }
        std::string_view operator()(const SetPlantParams&) const { return "SetPlantParams"; }
        std::string_view operator()(const ActuatorScale&) const { return "ActuatorScale"; }
        std::string_view operator()(const AdditiveDisturbance&) const { return "AdditiveDisturbance"; }
        std::string_view operator()(const ImpulseVelocity&) const { return "ImpulseVelocity"; }
    };
    return std::visit(Visitor{}, action);
}

Scenario parse_scenario(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "scenario must be a JSON object");
    check_keys(doc, {"description", "binding", "coupling", "events"}, "scenario");

    Scenario sc;
    if (doc.contains("description")) sc.description = doc.at("description").get<std::string>();
    try {
        if (doc.contains("binding")) sc.binding = SigmaBinding::parse(doc.at("binding").get<std::string>());
        if (doc.contains("coupling")) {
            const auto& c = doc.at("coupling");
            sc.coupling = c.is_number() ? Coupling{false, c.get<double>()} : Coupling::parse(c.get<std::string>());
        }
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, std::string("scenario: ") + e.what());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("scenario: ") + e.what());
    }
    if (doc.contains("events")) {
        const auto& evs = doc.at("events");
        if (!evs.is_array()) throw Error(ErrorCode::ConfigError, "scenario: 'events' must be an array");
        for (std::size_t i = 0; i < evs.size(); ++i) sc.events.push_back(parse_event(evs[i], i));
    }
    std::stable_sort(sc.events.begin(), sc.events.end(),
                     [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.at_time < b.at_time; });
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open scenario file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& sc) {
    json doc = json::object();
    if (!sc.description.empty()) doc["description"] = sc.description;
    if (sc.binding) doc["binding"] = sc.binding->to_string();
    if (sc.coupling) doc["coupling"] = sc.coupling->to_string();
    json evs = json::array();
    for (const auto& ev : sc.events) {
        json e = {{"at_time", ev.at_time}, {"action", std::string(action_name(ev.action))}};
        std::visit(
            [&](const auto& a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, SetControllerGains>) {
                    put_optional(e, "gamma1", a.gamma1);
                    put_optional(e, "gamma2", a.gamma2);
                    put_optional(e, "k", a.k);
                } else if constexpr (std::is_same_v<T, SetSigmas>) {
                    e["s1"] = a.pair.s1;
                    e["s2"] = a.pair.s2;
                } else if constexpr (std::is_same_v<T, SetPlantParams>) {
                    put_optional(e, "delta", a.delta);
                    put_optional(e, "eps1", a.eps1);
                    put_optional(e, "eps2", a.eps2);
                    put_optional(e, "forcing_amp", a.forcing_amp);
                    put_optional(e, "forcing_freq", a.forcing_freq);
                    put_optional(e, "lin_stiffness", a.lin_stiffness);
                } else if constexpr (std::is_same_v<T, ActuatorScale>) {
                    e["factor"] = a.factor;
                } else if constexpr (std::is_same_v<T, AdditiveDisturbance>) {
                    e["amplitude"] = a.amplitude;
                    e["freq"] = a.freq;
                    e["duration"] = a.duration;
                } else {
                    e["dv"] = a.dv;
                }
            },
            ev.action);
        evs.push_back(std::move(e));
    }
    doc["events"] = std::move(evs);
    return doc.dump(2);
}

}  // namespace chaostune
