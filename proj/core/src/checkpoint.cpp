#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chaostune/csv.hpp"
#include "chaostune/error.hpp"
#include "chaostune/surrogate.hpp"

namespace chaostune {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "chaostune-regression-net";
constexpr int kVersion = 1;

template <typename Vec>
json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i)));
    return rows;
}

Eigen::VectorXd vec_from_json(const json& a, Eigen::Index expected, const std::string& what) {
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != expected) {
        throw Error(ErrorCode::ParseFailure, "checkpoint: '" + what + "' has the wrong length");
    }
    Eigen::VectorXd v(expected);
    for (Eigen::Index i = 0; i < expected; ++i) v(i) = a[static_cast<std::size_t>(i)].get<double>();
    return v;
}

Eigen::MatrixXd mat_from_json(const json& a, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != rows) {
        throw Error(ErrorCode::ParseFailure, "checkpoint: '" + what + "' has the wrong row count");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) m.row(i) = vec_from_json(a[static_cast<std::size_t>(i)], cols, what).transpose();
    return m;
}

}  // namespace

std::string checkpoint_to_json(const RegressionNet& net) {
    const auto& cfg = net.config();
    const auto& p = net.params();
    json doc;
    doc["format"] = kFormat;
    doc["version"] = kVersion;
    doc["config"] = {{"input_dim", cfg.input_dim},       {"hidden_width", cfg.hidden_width},
                     {"blocks", cfg.blocks},             {"dropout_rate", cfg.dropout_rate},
                     {"bn_momentum", cfg.bn_momentum},   {"bn_epsilon", cfg.bn_epsilon},
                     {"seed", cfg.seed}};
    doc["trained"] = net.trained();
    doc["train_mean_err"] = net.train_mean_err();
    doc["standardizer"] = {{"mean", vec_to_json(net.standardizer().mean)},
                           {"scale", vec_to_json(net.standardizer().scale)}};
    json blocks = json::array();
    for (std::size_t b = 0; b < cfg.blocks; ++b) {
        blocks.push_back({{"weight", mat_to_json(p.weight[b])},
                          {"bias", vec_to_json(p.bias[b])},
                          {"bn_scale", vec_to_json(p.bn_scale[b])},
                          {"bn_shift", vec_to_json(p.bn_shift[b])},
                          {"running_mean", vec_to_json(net.running_mean()[b])},
                          {"running_var", vec_to_json(net.running_var()[b])}});
    }
    doc["blocks"] = std::move(blocks);
    doc["output"] = {{"weight", vec_to_json(p.out_weight)}, {"bias", p.out_bias(0)}};
    return doc.dump();
}

RegressionNet checkpoint_from_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        if (doc.value("format", "") != kFormat) throw Error(ErrorCode::ParseFailure, "not a chaostune checkpoint");
        if (doc.at("version").get<int>() != kVersion) {
            throw Error(ErrorCode::ParseFailure, "unsupported checkpoint version " + doc.at("version").dump());
        }
        const auto& c = doc.at("config");
        NetConfig cfg;
        cfg.input_dim = c.at("input_dim").get<std::size_t>();
        cfg.hidden_width = c.at("hidden_width").get<std::size_t>();
        cfg.blocks = c.at("blocks").get<std::size_t>();
        cfg.dropout_rate = c.at("dropout_rate").get<double>();
        cfg.bn_momentum = c.at("bn_momentum").get<double>();
        cfg.bn_epsilon = c.at("bn_epsilon").get<double>();
        cfg.seed = c.at("seed").get<std::uint64_t>();

        RegressionNet net(cfg);
        const auto dim = static_cast<Eigen::Index>(cfg.input_dim);
        const auto width = static_cast<Eigen::Index>(cfg.hidden_width);
        net.set_standardizer({vec_from_json(doc.at("standardizer").at("mean"), dim, "standardizer.mean").transpose(),
                              vec_from_json(doc.at("standardizer").at("scale"), dim, "standardizer.scale").transpose()});
        const auto& blocks = doc.at("blocks");
        if (blocks.size() != cfg.blocks) throw Error(ErrorCode::ParseFailure, "checkpoint: block count mismatch");
        auto& p = net.params();
        Eigen::Index fan_in = dim;
        for (std::size_t b = 0; b < cfg.blocks; ++b) {
            const auto& jb = blocks[b];
            p.weight[b] = mat_from_json(jb.at("weight"), width, fan_in, "weight");
            p.bias[b] = vec_from_json(jb.at("bias"), width, "bias");
            p.bn_scale[b] = vec_from_json(jb.at("bn_scale"), width, "bn_scale");
            p.bn_shift[b] = vec_from_json(jb.at("bn_shift"), width, "bn_shift");
            net.running_mean()[b] = vec_from_json(jb.at("running_mean"), width, "running_mean");
            net.running_var()[b] = vec_from_json(jb.at("running_var"), width, "running_var");
            fan_in = width;
        }
        p.out_weight = vec_from_json(doc.at("output").at("weight"), width, "output.weight");
        p.out_bias(0) = doc.at("output").at("bias").get<double>();
        net.mark_trained(doc.at("trained").get<bool>());
        net.set_train_mean_err(doc.value("train_mean_err", 0.0));
        return net;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseFailure, std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const RegressionNet& net, const std::filesystem::path& path) {
    write_text_file(path, checkpoint_to_json(net) + "\n");
}

RegressionNet load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open checkpoint " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_json(ss.str());
}

}  // namespace chaostune
