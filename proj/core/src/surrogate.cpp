#include "chaostune/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chaostune/error.hpp"

namespace chaostune {

void validate(const NetConfig& cfg) {
    if (cfg.input_dim != 5 && cfg.input_dim != 6) {
        throw Error(ErrorCode::InvalidArgument, "input_dim must be 5 (t,x,v,s1,s2) or 6 (with u)");
    }
    if (cfg.hidden_width < 1) throw Error(ErrorCode::InvalidArgument, "hidden_width must be >= 1");
    if (cfg.blocks < 1) throw Error(ErrorCode::InvalidArgument, "blocks must be >= 1");
    if (!(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "dropout_rate must be in [0, 1)");
    }
    if (!(cfg.bn_momentum >= 0.0 && cfg.bn_momentum <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "bn_momentum must be in [0, 1]");
    }
    if (!(cfg.bn_epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "bn_epsilon must be > 0");
}

// ---------------------------------------------------------------------------
// NetParams

NetParams NetParams::zeros_like() const {
    NetParams z;
    for (const auto& w : weight) z.weight.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    for (const auto& b : bias) z.bias.push_back(Eigen::VectorXd::Zero(b.size()));
    for (const auto& g : bn_scale) z.bn_scale.push_back(Eigen::VectorXd::Zero(g.size()));
    for (const auto& b : bn_shift) z.bn_shift.push_back(Eigen::VectorXd::Zero(b.size()));
    z.out_weight = Eigen::VectorXd::Zero(out_weight.size());
    z.out_bias = Eigen::VectorXd::Zero(out_bias.size());
    return z;
}

std::vector<std::span<double>> NetParams::views() {
    std::vector<std::span<double>> out;
    auto add = [&](auto& m) { out.emplace_back(m.data(), static_cast<std::size_t>(m.size())); };
    for (std::size_t b = 0; b < weight.size(); ++b) {
        add(weight[b]);
        add(bias[b]);
        add(bn_scale[b]);
        add(bn_shift[b]);
    }
    add(out_weight);
    add(out_bias);
    return out;
}

std::vector<std::span<const double>> NetParams::views() const {
    auto mutable_views = const_cast<NetParams*>(this)->views();
    return {mutable_views.begin(), mutable_views.end()};
}

std::size_t NetParams::size() const {
    std::size_t n = 0;
    for (const auto& v : views()) n += v.size();
    return n;
}

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::identity(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return {Eigen::RowVectorXd::Zero(d), Eigen::RowVectorXd::Ones(d)};
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& features) {
    if (features.rows() == 0) throw Error(ErrorCode::EmptyDataset, "cannot standardize an empty feature matrix");
    Standardizer s;
    s.mean = features.colwise().mean();
    const Eigen::MatrixXd centered = features.rowwise() - s.mean;
    s.scale = (centered.array().square().colwise().mean()).sqrt().matrix();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
        if (!(s.scale(j) > 1e-12)) s.scale(j) = 1.0;
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& features) const {
    return ((features.rowwise() - mean).array().rowwise() / scale.array()).matrix();
}

// ---------------------------------------------------------------------------
// RegressionNet

RegressionNet::RegressionNet(const NetConfig& cfg) : cfg_(cfg) {
    validate(cfg_);
    std::mt19937_64 rng(cfg_.seed);
    const auto width = static_cast<Eigen::Index>(cfg_.hidden_width);
    Eigen::Index fan_in = static_cast<Eigen::Index>(cfg_.input_dim);
    for (std::size_t b = 0; b < cfg_.blocks; ++b) {
        // He initialisation for ReLU blocks.
        std::normal_distribution<double> init(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
        Eigen::MatrixXd w(width, fan_in);
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = init(rng);
        }
        params_.weight.push_back(std::move(w));
        params_.bias.push_back(Eigen::VectorXd::Zero(width));
        params_.bn_scale.push_back(Eigen::VectorXd::Ones(width));
        params_.bn_shift.push_back(Eigen::VectorXd::Zero(width));
        running_mean_.push_back(Eigen::VectorXd::Zero(width));
        running_var_.push_back(Eigen::VectorXd::Ones(width));
        fan_in = width;
    }
    std::normal_distribution<double> head(0.0, std::sqrt(1.0 / static_cast<double>(width)));
    params_.out_weight = Eigen::VectorXd(width);
    for (Eigen::Index i = 0; i < width; ++i) params_.out_weight(i) = head(rng);
    params_.out_bias = Eigen::VectorXd::Zero(1);
    standardizer_ = Standardizer::identity(cfg_.input_dim);
}

void RegressionNet::set_standardizer(Standardizer s) {
    if (static_cast<std::size_t>(s.mean.size()) != cfg_.input_dim ||
        static_cast<std::size_t>(s.scale.size()) != cfg_.input_dim) {
        throw Error(ErrorCode::DimensionMismatch, "standardizer width does not match input_dim");
    }
    standardizer_ = std::move(s);
}

Eigen::VectorXd RegressionNet::forward(const Eigen::MatrixXd& batch, Mode mode, std::mt19937_64* dropout_rng,
                                       ForwardCache* cache) const {
    if (static_cast<std::size_t>(batch.cols()) != cfg_.input_dim) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(cfg_.input_dim) + " features, got " +
                                                      std::to_string(batch.cols()));
    }
    const Eigen::Index n = batch.rows();
    const bool training = mode == Mode::Train;
    if (training && n < 2) throw Error(ErrorCode::DegenerateBatch, "Train mode needs at least 2 rows for batch norm");
    if (training && cfg_.dropout_rate > 0.0 && dropout_rng == nullptr) {
        throw Error(ErrorCode::InvalidArgument, "Train mode with dropout needs an RNG");
    }
    if (cache) *cache = ForwardCache{};

    Eigen::MatrixXd h = standardizer_.apply(batch);
    for (std::size_t b = 0; b < cfg_.blocks; ++b) {
        Eigen::MatrixXd z = (h * params_.weight[b].transpose()).rowwise() + params_.bias[b].transpose();

        Eigen::RowVectorXd mean;
        Eigen::RowVectorXd var;
        if (training) {
            mean = z.colwise().mean();
            var = (z.rowwise() - mean).array().square().colwise().mean().matrix();
        } else {
            mean = running_mean_[b].transpose();
            var = running_var_[b].transpose();
        }
        const Eigen::RowVectorXd inv_std = (var.array() + cfg_.bn_epsilon).rsqrt().matrix();
        Eigen::MatrixXd xhat = ((z.rowwise() - mean).array().rowwise() * inv_std.array()).matrix();
        Eigen::MatrixXd y = ((xhat.array().rowwise() * params_.bn_scale[b].transpose().array()).rowwise() +
                             params_.bn_shift[b].transpose().array())
                                .matrix();
        Eigen::MatrixXd a = y.cwiseMax(0.0);

        if (cache) {
            cache->block_input.push_back(std::move(h));
            cache->normalized.push_back(std::move(xhat));
            cache->inv_std.push_back(inv_std);
            cache->pre_relu.push_back(std::move(y));
            cache->batch_mean.push_back(mean);
            cache->batch_var.push_back(var);
        }
        h = std::move(a);
    }

    if (training && cfg_.dropout_rate > 0.0) {
        std::bernoulli_distribution keep(1.0 - cfg_.dropout_rate);
        const double scale = 1.0 / (1.0 - cfg_.dropout_rate);
        Eigen::MatrixXd mask(h.rows(), h.cols());
        for (Eigen::Index i = 0; i < mask.rows(); ++i) {
            for (Eigen::Index j = 0; j < mask.cols(); ++j) mask(i, j) = keep(*dropout_rng) ? scale : 0.0;
        }
        h = h.cwiseProduct(mask);
        if (cache) cache->dropout_mask = std::move(mask);
    }

    Eigen::VectorXd out = (h * params_.out_weight).array() + params_.out_bias(0);
    if (cache) cache->head_input = std::move(h);
    return out;
}

void RegressionNet::commit_batch_stats(const ForwardCache& cache) {
    const double m = cfg_.bn_momentum;
    const auto n = static_cast<double>(cache.head_input.rows());
    const double unbias = n > 1.0 ? n / (n - 1.0) : 1.0;
    for (std::size_t b = 0; b < cfg_.blocks; ++b) {
        running_mean_[b] = m * running_mean_[b] + (1.0 - m) * cache.batch_mean[b].transpose();
        running_var_[b] = m * running_var_[b] + (1.0 - m) * unbias * cache.batch_var[b].transpose();
    }
}

// ---------------------------------------------------------------------------
// Loss and gradients

double loss_mse(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw Error(ErrorCode::DimensionMismatch, "prediction/target length mismatch");
    if (pred.empty()) throw Error(ErrorCode::DimensionMismatch, "loss_mse needs at least one element");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - target[i];
        sum += r * r;
    }
    return sum / static_cast<double>(pred.size());
}

Gradients backward(const RegressionNet& net, const ForwardCache& cache, const Eigen::VectorXd& predictions,
                   const Eigen::VectorXd& targets) {
    if (predictions.size() != targets.size()) {
        throw Error(ErrorCode::DimensionMismatch, "prediction/target length mismatch");
    }
    const auto& p = net.params();
    const auto blocks = net.config().blocks;
    const auto n = static_cast<double>(targets.size());

    Gradients out;
    out.loss = loss_mse({predictions.data(), static_cast<std::size_t>(predictions.size())},
                        {targets.data(), static_cast<std::size_t>(targets.size())});
    out.grad = p.zeros_like();
    auto& g = out.grad;

    const Eigen::VectorXd d_pred = 2.0 * (predictions - targets) / n;
    g.out_weight = cache.head_input.transpose() * d_pred;
    g.out_bias(0) = d_pred.sum();

    Eigen::MatrixXd d_h = d_pred * p.out_weight.transpose();
    if (cache.dropout_mask.size() > 0) d_h = d_h.cwiseProduct(cache.dropout_mask);

    for (std::size_t bi = blocks; bi-- > 0;) {
        const auto& y = cache.pre_relu[bi];
        const auto& xhat = cache.normalized[bi];
        const Eigen::MatrixXd d_y = (y.array() > 0.0).select(d_h, 0.0);

        g.bn_scale[bi] = (d_y.cwiseProduct(xhat)).colwise().sum().transpose();
        g.bn_shift[bi] = d_y.colwise().sum().transpose();

        const Eigen::MatrixXd d_xhat = (d_y.array().rowwise() * p.bn_scale[bi].transpose().array()).matrix();
        const Eigen::RowVectorXd sum_dxhat = d_xhat.colwise().sum();
        const Eigen::RowVectorXd sum_dxhat_xhat = d_xhat.cwiseProduct(xhat).colwise().sum();
        const Eigen::MatrixXd inner =
            ((n * d_xhat).rowwise() - sum_dxhat).array() - (xhat.array().rowwise() * sum_dxhat_xhat.array());
        const Eigen::MatrixXd d_z = (inner.array().rowwise() * (cache.inv_std[bi].array() / n)).matrix();

        g.weight[bi] = d_z.transpose() * cache.block_input[bi];
        g.bias[bi] = d_z.colwise().sum().transpose();
        if (bi > 0) d_h = d_z * p.weight[bi];
    }
    return out;
}

Gradients backward(const RegressionNet& net, const Eigen::MatrixXd& batch, const Eigen::VectorXd& targets,
                   std::uint64_t mask_seed) {
    if (batch.rows() != targets.size()) throw Error(ErrorCode::DimensionMismatch, "batch/target length mismatch");
    std::mt19937_64 rng(mask_seed);
    ForwardCache cache;
    const Eigen::VectorXd pred = net.forward(batch, Mode::Train, &rng, &cache);
    return backward(net, cache, pred, targets);
}

// ---------------------------------------------------------------------------
// Adam

AdamState AdamState::for_params(const NetParams& params) {
    AdamState s;
    s.m = params.zeros_like();
    s.v = params.zeros_like();
    return s;
}

void adam_step(NetParams& params, const NetParams& grads, AdamState& state, double lr) {
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    auto pv = params.views();
    const auto gv = grads.views();
    auto mv = state.m.views();
    auto vv = state.v.views();
    if (gv.size() != pv.size() || mv.size() != pv.size() || vv.size() != pv.size()) {
        throw Error(ErrorCode::DimensionMismatch, "Adam state does not match parameter layout");
    }
    for (std::size_t k = 0; k < pv.size(); ++k) {
        if (gv[k].size() != pv[k].size()) throw Error(ErrorCode::DimensionMismatch, "gradient shape mismatch");
        for (std::size_t i = 0; i < pv[k].size(); ++i) {
            const double gi = gv[k][i];
            mv[k][i] = state.beta1 * mv[k][i] + (1.0 - state.beta1) * gi;
            vv[k][i] = state.beta2 * vv[k][i] + (1.0 - state.beta2) * gi * gi;
            const double m_hat = mv[k][i] / bc1;
            const double v_hat = vv[k][i] / bc2;
            pv[k][i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
        }
    }
}

// ---------------------------------------------------------------------------
// Training

double scheduled_lr(const TrainOptions& opts, int epoch) noexcept {
    const int every = std::max(1, opts.decay_every);
    return opts.lr0 * std::pow(opts.decay, epoch / every);
}

Eigen::MatrixXd feature_matrix(std::span<const SampleRecord> records, std::size_t input_dim) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(input_dim));
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto row = static_cast<Eigen::Index>(i);
        m(row, 0) = r.t;
        m(row, 1) = r.x;
        m(row, 2) = r.v;
        m(row, 3) = r.s1;
        m(row, 4) = r.s2;
        if (input_dim > 5) m(row, 5) = r.u;
    }
    return m;
}

Eigen::VectorXd target_vector(std::span<const SampleRecord> records) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) y(static_cast<Eigen::Index>(i)) = records[i].err;
    return y;
}

namespace {

double rmse_of(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
    if (target.size() == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt((pred - target).squaredNorm() / static_cast<double>(target.size()));
}

}  // namespace

TrainLog train(RegressionNet& net, std::span<const SampleRecord> train_rows, std::span<const SampleRecord> test_rows,
               const TrainOptions& opts) {
    if (train_rows.empty()) throw Error(ErrorCode::EmptyDataset, "training split is empty");
    if (train_rows.size() < 2) throw Error(ErrorCode::DegenerateBatch, "training needs at least 2 rows");
    if (opts.batch_size < 2) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 2");
    if (opts.epochs < 0) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 0");

    const auto dim = net.config().input_dim;
    const Eigen::MatrixXd x_train = feature_matrix(train_rows, dim);
    const Eigen::VectorXd y_train = target_vector(train_rows);
    const Eigen::MatrixXd x_test = feature_matrix(test_rows, dim);
    const Eigen::VectorXd y_test = target_vector(test_rows);

    if (opts.fit_standardizer) {
        net.set_standardizer(Standardizer::fit(x_train));
        net.set_train_mean_err(y_train.cwiseAbs().mean());
    }

    std::mt19937_64 shuffle_rng(opts.seed);
    std::mt19937_64 dropout_rng(opts.seed ^ 0x9E3779B97F4A7C15ULL);
    AdamState adam = AdamState::for_params(net.params());

    const std::size_t n = train_rows.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainLog log;
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        const double lr = scheduled_lr(opts, epoch);
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0; start < n;) {
            std::size_t end = std::min(n, start + opts.batch_size);
            if (n - end == 1) end = n;  // never leave a single-row batch for batch norm
            const auto rows = static_cast<Eigen::Index>(end - start);
            Eigen::MatrixXd xb(rows, x_train.cols());
            Eigen::VectorXd yb(rows);
            for (Eigen::Index r = 0; r < rows; ++r) {
                const auto src = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(r)]);
                xb.row(r) = x_train.row(src);
                yb(r) = y_train(src);
            }
            ForwardCache cache;
            const Eigen::VectorXd pred = net.forward(xb, Mode::Train, &dropout_rng, &cache);
            const Gradients g = backward(net, cache, pred, yb);
            net.commit_batch_stats(cache);
            adam_step(net.params(), g.grad, adam, lr);
            start = end;
        }
        net.mark_trained();
        TrainLogRow row;
        row.epoch = epoch;
        row.lr = lr;
        row.train_rmse = rmse_of(net.forward(x_train, Mode::Infer), y_train);
        row.test_rmse = x_test.rows() > 0 ? rmse_of(net.forward(x_test, Mode::Infer), y_test)
                                          : std::numeric_limits<double>::quiet_NaN();
        row.batch_size = opts.batch_size;
        log.push_back(row);
    }
    net.mark_trained();
    return log;
}

TrainLog train(RegressionNet& net, const Dataset& dataset, const TrainOptions& opts) {
    const auto tr = dataset.train_records();
    const auto te = dataset.test_records();
    return train(net, tr, te, opts);
}

double predict_error(const RegressionNet& net, double t, double x, double v, double s1, double s2, double u) {
    if (!net.trained()) throw Error(ErrorCode::Untrained, "predict_error on an untrained network");
    Eigen::MatrixXd row(1, static_cast<Eigen::Index>(net.config().input_dim));
    row(0, 0) = t;
    row(0, 1) = x;
    row(0, 2) = v;
    row(0, 3) = s1;
    row(0, 4) = s2;
    if (net.config().input_dim > 5) row(0, 5) = u;
    return net.forward(row, Mode::Infer)(0);
}

Eigen::VectorXd predict_records(const RegressionNet& net, std::span<const SampleRecord> records) {
    if (!net.trained()) throw Error(ErrorCode::Untrained, "prediction on an untrained network");
    if (records.empty()) return {};
    return net.forward(feature_matrix(records, net.config().input_dim), Mode::Infer);
}

double rmse_on(const RegressionNet& net, std::span<const SampleRecord> records) {
    return rmse_of(predict_records(net, records), target_vector(records));
}

}  // namespace chaostune
