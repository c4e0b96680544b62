#pragma once

// Error-prediction regression network.
//
// Five dense blocks, each   affine -> batch norm -> ReLU,   the last one
// followed by inverted dropout (training only) and a scalar linear head.
// Inputs are (t, x, v, s1, s2), optionally with the control signal u as a
// sixth feature, standardized with statistics stored in the network.
// Trained with mean squared error and Adam.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chaostune/dataset.hpp"

namespace chaostune {

struct NetConfig {
    std::size_t input_dim = 5;
    std::size_t hidden_width = 32;
    std::size_t blocks = 5;
    double dropout_rate = 0.2;
    double bn_momentum = 0.9;  // running = momentum * running + (1 - momentum) * batch
    double bn_epsilon = 1e-5;
    std::uint64_t seed = 0;

    bool operator==(const NetConfig&) const = default;
};

void validate(const NetConfig& cfg);

enum class Mode { Train, Infer };

/// Trainable parameters; also used as the container for gradients and
/// Adam moments so they can be walked in lockstep.
struct NetParams {
    std::vector<Eigen::MatrixXd> weight;  // [block] hidden_width x fan_in
    std::vector<Eigen::VectorXd> bias;
    std::vector<Eigen::VectorXd> bn_scale;
    std::vector<Eigen::VectorXd> bn_shift;
    Eigen::VectorXd out_weight;
    Eigen::VectorXd out_bias;  // size 1

    [[nodiscard]] NetParams zeros_like() const;
    [[nodiscard]] std::vector<std::span<double>> views();
    [[nodiscard]] std::vector<std::span<const double>> views() const;
    [[nodiscard]] std::size_t size() const;
};

struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    [[nodiscard]] static Standardizer identity(std::size_t dim);
    /// Column mean and population std; zero-variance columns get scale 1.
    [[nodiscard]] static Standardizer fit(const Eigen::MatrixXd& features);
    [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
};

/// Intermediate values of a Train-mode forward pass needed for backprop.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> block_input;  // input to each block's affine layer
    std::vector<Eigen::MatrixXd> normalized;   // batch-normalized pre-activations (before scale/shift)
    std::vector<Eigen::RowVectorXd> inv_std;
    std::vector<Eigen::MatrixXd> pre_relu;     // scale * normalized + shift
    std::vector<Eigen::RowVectorXd> batch_mean;
    std::vector<Eigen::RowVectorXd> batch_var;  // biased
    Eigen::MatrixXd dropout_mask;              // 0 or 1/(1-p); empty when p == 0
    Eigen::MatrixXd head_input;
};

class RegressionNet {
public:
    explicit RegressionNet(const NetConfig& cfg = {});

    [[nodiscard]] const NetConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] NetParams& params() noexcept { return params_; }
    [[nodiscard]] const NetParams& params() const noexcept { return params_; }
    [[nodiscard]] std::vector<Eigen::VectorXd>& running_mean() noexcept { return running_mean_; }
    [[nodiscard]] const std::vector<Eigen::VectorXd>& running_mean() const noexcept { return running_mean_; }
    [[nodiscard]] std::vector<Eigen::VectorXd>& running_var() noexcept { return running_var_; }
    [[nodiscard]] const std::vector<Eigen::VectorXd>& running_var() const noexcept { return running_var_; }
    [[nodiscard]] const Standardizer& standardizer() const noexcept { return standardizer_; }
    void set_standardizer(Standardizer s);

    [[nodiscard]] bool trained() const noexcept { return trained_; }
    void mark_trained(bool v = true) noexcept { trained_ = v; }

    /// Mean absolute error of the data the net was first trained on.
    [[nodiscard]] double train_mean_err() const noexcept { return train_mean_err_; }
    void set_train_mean_err(double v) noexcept { train_mean_err_ = v; }

    /// Predictions for raw (unstandardized) feature rows. Train mode uses
    /// batch statistics and needs `dropout_rng` when dropout_rate > 0; the
    /// running statistics are not touched (see commit_batch_stats).
    [[nodiscard]] Eigen::VectorXd forward(const Eigen::MatrixXd& batch, Mode mode,
                                          std::mt19937_64* dropout_rng = nullptr,
                                          ForwardCache* cache = nullptr) const;

    /// Folds the batch statistics of a Train-mode pass into the running estimates.
    void commit_batch_stats(const ForwardCache& cache);

private:
    NetConfig cfg_;
    NetParams params_;
    std::vector<Eigen::VectorXd> running_mean_;
    std::vector<Eigen::VectorXd> running_var_;
    Standardizer standardizer_;
    bool trained_ = false;
    double train_mean_err_ = 0.0;
};

[[nodiscard]] double loss_mse(std::span<const double> pred, std::span<const double> target);

struct Gradients {
    double loss = 0.0;
    NetParams grad;
};

/// Exact gradient of loss_mse(forward(batch, Train), targets) with the
/// dropout mask held fixed at the one recorded in `cache`.
[[nodiscard]] Gradients backward(const RegressionNet& net, const ForwardCache& cache,
                                 const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

/// Convenience: Train-mode forward with a mask drawn from `mask_seed`, then backward.
[[nodiscard]] Gradients backward(const RegressionNet& net, const Eigen::MatrixXd& batch,
                                 const Eigen::VectorXd& targets, std::uint64_t mask_seed = 0);

struct AdamState {
    NetParams m;
    NetParams v;
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    [[nodiscard]] static AdamState for_params(const NetParams& params);
};

/// Bias-corrected Adam update in place; increments state.step.
void adam_step(NetParams& params, const NetParams& grads, AdamState& state, double lr);

struct TrainOptions {
    int epochs = 5;
    double lr0 = 1e-3;
    double decay = 0.2;
    int decay_every = 5;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    bool fit_standardizer = true;  // false keeps the net's existing input scaling (retraining)
};

/// lr0 * decay^floor(epoch / decay_every).
[[nodiscard]] double scheduled_lr(const TrainOptions& opts, int epoch) noexcept;

struct TrainLogRow {
    int epoch = 0;
    double lr = 0.0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;  // nan when there is no test split
    std::size_t batch_size = 0;

    bool operator==(const TrainLogRow&) const = default;
};

using TrainLog = std::vector<TrainLogRow>;

/// Feature matrix in the net's input order (t, x, v, s1, s2[, u]).
[[nodiscard]] Eigen::MatrixXd feature_matrix(std::span<const SampleRecord> records, std::size_t input_dim);
[[nodiscard]] Eigen::VectorXd target_vector(std::span<const SampleRecord> records);

/// Shuffled mini-batch training with Adam restarted from fresh moments.
/// Throws EmptyDataset when there are no training rows.
TrainLog train(RegressionNet& net, std::span<const SampleRecord> train_rows,
               std::span<const SampleRecord> test_rows, const TrainOptions& opts);

/// Uses the dataset's split when present, otherwise trains on every record.
TrainLog train(RegressionNet& net, const Dataset& dataset, const TrainOptions& opts);

/// Infer-mode prediction of |e| for one state / sigma pair. Throws Untrained.
[[nodiscard]] double predict_error(const RegressionNet& net, double t, double x, double v, double s1,
                                   double s2, double u = 0.0);

/// Infer-mode predictions for many records at once.
[[nodiscard]] Eigen::VectorXd predict_records(const RegressionNet& net, std::span<const SampleRecord> records);

[[nodiscard]] double rmse_on(const RegressionNet& net, std::span<const SampleRecord> records);

/// Versioned JSON checkpoint; load(save(net)) predicts bit-identically.
[[nodiscard]] std::string checkpoint_to_json(const RegressionNet& net);
[[nodiscard]] RegressionNet checkpoint_from_json(std::string_view text);
void save_checkpoint(const RegressionNet& net, const std::filesystem::path& path);
[[nodiscard]] RegressionNet load_checkpoint(const std::filesystem::path& path);

}  // namespace chaostune
