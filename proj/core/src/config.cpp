#include "chaostune/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chaostune/error.hpp"

namespace chaostune {

using nlohmann::json;

void RunConfig::set_seed(std::uint64_t s) {
    seed = s;
    adaptive.seed = s;
    surrogate.net.seed = s;
    surrogate.training.seed = s;
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.loop.model = cfg.loop.plant;
    cfg.set_seed(0);
    return cfg;
}

namespace {

class Section {
public:
    Section(const json& obj, std::string name) : obj_(obj), name_(std::move(name)) {
        if (!obj_.is_object()) throw Error(ErrorCode::ConfigError, name_ + ": must be an object");
    }

    ~Section() = default;
    Section(const Section&) = delete;
    Section& operator=(const Section&) = delete;

    void check(const std::set<std::string>& allowed) const {
        for (const auto& [key, _] : obj_.items()) {
            if (!allowed.contains(key)) throw Error(ErrorCode::ConfigError, name_ + ": unknown key '" + key + "'");
        }
    }

    bool has(const char* key) const { return obj_.contains(key); }
    const json& at(const char* key) const { return obj_.at(key); }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        const auto& v = obj_.at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            throw Error(ErrorCode::ConfigError, name_ + "." + key + ": expected a finite number");
        }
        out = v.get<double>();
    }

    template <typename Int>
    void integer(const char* key, Int& out) const {
        if (!has(key)) return;
        const auto& v = obj_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw Error(ErrorCode::ConfigError, name_ + "." + key + ": expected a non-negative integer");
        }
        out = static_cast<Int>(v.get<unsigned long long>());
    }

    void boolean(const char* key, bool& out) const {
        if (!has(key)) return;
        if (!obj_.at(key).is_boolean()) throw Error(ErrorCode::ConfigError, name_ + "." + key + ": expected true/false");
        out = obj_.at(key).get<bool>();
    }

    std::optional<std::string> string(const char* key) const {
        if (!has(key)) return std::nullopt;
        if (!obj_.at(key).is_string()) throw Error(ErrorCode::ConfigError, name_ + "." + key + ": expected a string");
        return obj_.at(key).get<std::string>();
    }

    const std::string& name() const { return name_; }

private:
    const json& obj_;
    std::string name_;
};

const std::set<std::string> kPlantKeys{"delta", "eps1", "eps2", "forcing_amp", "forcing_freq", "lin_stiffness"};

void read_plant(const Section& s, PlantParams& p) {
    s.check(kPlantKeys);
    s.number("delta", p.delta);
    s.number("eps1", p.eps1);
    s.number("eps2", p.eps2);
    s.number("forcing_amp", p.forcing_amp);
    s.number("forcing_freq", p.forcing_freq);
    s.number("lin_stiffness", p.lin_stiffness);
}

json plant_json(const PlantParams& p) {
    return {{"delta", p.delta},
            {"eps1", p.eps1},
            {"eps2", p.eps2},
            {"forcing_amp", p.forcing_amp},
            {"forcing_freq", p.forcing_freq},
            {"lin_stiffness", p.lin_stiffness}};
}

Coupling coupling_from(const json& v, const std::string& where) {
    try {
        if (v.is_number()) return Coupling{false, v.get<double>()};
        if (v.is_string()) return Coupling::parse(v.get<std::string>());
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, where + ": " + e.what());
    }
    throw Error(ErrorCode::ConfigError, where + ": expected a number or string");
}

void wrap_config_errors(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        throw Error(ErrorCode::ConfigError, e.what());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg = default_config();
    wrap_config_errors([&] {
        const Section top(doc, "config");
        top.check({"seed", "out_dir", "plant", "controller", "reference", "simulation", "adaptive", "collection",
                   "surrogate"});
        if (top.has("seed")) {
            std::uint64_t s = 0;
            top.integer("seed", s);
            cfg.set_seed(s);
        }
        if (auto d = top.string("out_dir")) cfg.out_dir = *d;

        if (top.has("plant")) read_plant(Section(top.at("plant"), "plant"), cfg.loop.plant);
        cfg.loop.model = cfg.loop.plant;

        if (top.has("controller")) {
            const Section c(top.at("controller"), "controller");
            c.check({"gamma1", "gamma2", "k", "hold", "model"});
            c.number("gamma1", cfg.loop.gains.gamma1);
            c.number("gamma2", cfg.loop.gains.gamma2);
            c.number("k", cfg.loop.gains.k);
            if (auto h = c.string("hold")) {
                if (*h == "zoh") cfg.simulation.hold = ControlHold::ZeroOrderHold;
                else if (*h == "continuous") cfg.simulation.hold = ControlHold::Continuous;
                else throw Error(ErrorCode::ConfigError, "controller.hold: expected 'zoh' or 'continuous'");
            }
            if (c.has("model")) read_plant(Section(c.at("model"), "controller.model"), cfg.loop.model);
            validate(cfg.loop.gains);
        }

        if (top.has("reference")) {
            const Section r(top.at("reference"), "reference");
            r.check({"base_freq", "harmonics"});
            r.number("base_freq", cfg.loop.reference.base_freq);
            if (r.has("harmonics")) {
                const auto& hs = r.at("harmonics");
                if (!hs.is_array()) throw Error(ErrorCode::ConfigError, "reference.harmonics: expected a list");
                cfg.loop.reference.harmonics.clear();
                for (const auto& h : hs) {
                    if (!h.is_array() || h.size() != 2 || !h[0].is_number_integer() || !h[1].is_number()) {
                        throw Error(ErrorCode::ConfigError, "reference.harmonics: entries must be [index, amplitude]");
                    }
                    cfg.loop.reference.harmonics.push_back({h[0].get<int>(), h[1].get<double>()});
                }
            }
            validate(cfg.loop.reference);
        }

        if (top.has("simulation")) {
            const Section s(top.at("simulation"), "simulation");
            s.check({"dt", "t_end", "x0", "v0", "t0", "divergence_bound"});
            s.number("dt", cfg.simulation.dt);
            s.number("t_end", cfg.simulation.t_end);
            s.number("x0", cfg.initial.x);
            s.number("v0", cfg.initial.v);
            s.number("t0", cfg.initial.t);
            s.number("divergence_bound", cfg.simulation.divergence_bound);
            if (!(cfg.simulation.dt > 0.0)) throw Error(ErrorCode::ConfigError, "simulation.dt must be > 0");
            if (!(cfg.simulation.t_end > cfg.initial.t)) {
                throw Error(ErrorCode::ConfigError, "simulation.t_end must exceed t0");
            }
        }

        if (top.has("adaptive")) {
            const Section a(top.at("adaptive"), "adaptive");
            a.check({"threshold", "window", "max_attempts", "memory_fraction", "binding", "coupling", "sigma_low",
                     "sigma_high", "trigger", "use_memory"});
            auto& ad = cfg.adaptive;
            a.number("threshold", ad.err_threshold);
            a.integer("window", ad.window);
            a.integer("max_attempts", ad.max_attempts);
            a.number("memory_fraction", ad.memory_fraction);
            if (auto b = a.string("binding")) ad.binding = SigmaBinding::parse(*b);
            if (a.has("coupling")) ad.sampler.coupling = coupling_from(a.at("coupling"), "adaptive.coupling");
            a.number("sigma_low", ad.sampler.low);
            a.number("sigma_high", ad.sampler.high);
            if (auto t = a.string("trigger")) {
                if (*t == "level") ad.trigger = TriggerMode::Level;
                else if (*t == "slope") ad.trigger = TriggerMode::Slope;
                else throw Error(ErrorCode::ConfigError, "adaptive.trigger: expected 'level' or 'slope'");
            }
            a.boolean("use_memory", ad.use_memory);
            validate(ad);
        }

        if (top.has("collection")) {
            const Section c(top.at("collection"), "collection");
            c.check({"episodes", "t_end", "sigma_low", "sigma_high", "coupling", "split_ratio"});
            auto& col = cfg.collection;
            c.integer("episodes", col.episodes);
            c.number("t_end", col.t_end);
            c.number("sigma_low", col.sigmas.low);
            c.number("sigma_high", col.sigmas.high);
            if (c.has("coupling")) col.sigmas.coupling = coupling_from(c.at("coupling"), "collection.coupling");
            c.number("split_ratio", col.split_ratio);
            if (col.episodes < 1) throw Error(ErrorCode::ConfigError, "collection.episodes must be >= 1");
            if (!(col.sigmas.low < col.sigmas.high)) throw Error(ErrorCode::ConfigError, "collection sigma range is empty");
            if (!(col.split_ratio > 0.0 && col.split_ratio < 1.0)) {
                throw Error(ErrorCode::ConfigError, "collection.split_ratio must be in (0, 1)");
            }
        }

        if (top.has("surrogate")) {
            const Section s(top.at("surrogate"), "surrogate");
            s.check({"hidden_width", "dropout_rate", "bn_momentum", "bn_epsilon", "include_u", "epochs", "lr",
                     "decay", "decay_every", "batch_size"});
            auto& net = cfg.surrogate.net;
            auto& tr = cfg.surrogate.training;
            s.integer("hidden_width", net.hidden_width);
            s.number("dropout_rate", net.dropout_rate);
            s.number("bn_momentum", net.bn_momentum);
            s.number("bn_epsilon", net.bn_epsilon);
            bool include_u = net.input_dim > 5;
            s.boolean("include_u", include_u);
            net.input_dim = include_u ? 6 : 5;
            s.integer("epochs", tr.epochs);
            s.number("lr", tr.lr0);
            s.number("decay", tr.decay);
            s.integer("decay_every", tr.decay_every);
            s.integer("batch_size", tr.batch_size);
            validate(net);
        }
        cfg.adaptive.retrain = cfg.surrogate.training;
    });
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
    json harmonics = json::array();
    for (const auto& h : cfg.loop.reference.harmonics) harmonics.push_back({h.index, h.amplitude});
    const auto& ad = cfg.adaptive;
    const auto& col = cfg.collection;
    const auto& net = cfg.surrogate.net;
    const auto& tr = cfg.surrogate.training;
    json doc = {
        {"seed", cfg.seed},
        {"out_dir", cfg.out_dir.string()},
        {"plant", plant_json(cfg.loop.plant)},
        {"controller",
         {{"gamma1", cfg.loop.gains.gamma1},
          {"gamma2", cfg.loop.gains.gamma2},
          {"k", cfg.loop.gains.k},
          {"hold", cfg.simulation.hold == ControlHold::ZeroOrderHold ? "zoh" : "continuous"},
          {"model", plant_json(cfg.loop.model)}}},
        {"reference", {{"base_freq", cfg.loop.reference.base_freq}, {"harmonics", harmonics}}},
        {"simulation",
         {{"dt", cfg.simulation.dt},
          {"t_end", cfg.simulation.t_end},
          {"t0", cfg.initial.t},
          {"x0", cfg.initial.x},
          {"v0", cfg.initial.v},
          {"divergence_bound", cfg.simulation.divergence_bound}}},
        {"adaptive",
         {{"threshold", ad.err_threshold},
          {"window", ad.window},
          {"max_attempts", ad.max_attempts},
          {"memory_fraction", ad.memory_fraction},
          {"binding", ad.binding.to_string()},
          {"coupling", ad.sampler.coupling.to_string()},
          {"sigma_low", ad.sampler.low},
          {"sigma_high", ad.sampler.high},
          {"trigger", ad.trigger == TriggerMode::Level ? "level" : "slope"},
          {"use_memory", ad.use_memory}}},
        {"collection",
         {{"episodes", col.episodes},
          {"t_end", col.t_end},
          {"sigma_low", col.sigmas.low},
          {"sigma_high", col.sigmas.high},
          {"coupling", col.sigmas.coupling.to_string()},
          {"split_ratio", col.split_ratio}}},
        {"surrogate",
         {{"hidden_width", net.hidden_width},
          {"dropout_rate", net.dropout_rate},
          {"bn_momentum", net.bn_momentum},
          {"bn_epsilon", net.bn_epsilon},
          {"include_u", net.input_dim > 5},
          {"epochs", tr.epochs},
          {"lr", tr.lr0},
          {"decay", tr.decay},
          {"decay_every", tr.decay_every},
          {"batch_size", tr.batch_size}}},
    };
    return doc.dump(2);
}

CollectionSpec collection_spec(const RunConfig& cfg) {
    CollectionSpec spec;
    spec.initial = cfg.initial;
    spec.loop = cfg.loop;
    spec.options = cfg.simulation;
    spec.options.t_end = cfg.initial.t + cfg.collection.t_end;
    spec.binding = cfg.adaptive.binding;
    spec.sigmas = cfg.collection.sigmas;
    spec.episodes = cfg.collection.episodes;
    spec.seed = cfg.seed;
    return spec;
}

}  // namespace chaostune
