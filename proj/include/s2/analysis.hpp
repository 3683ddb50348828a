#pragma once

#include "s2/backbone.hpp"
#include "s2/tensor.hpp"
#include "s2/wrapper.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace s2 {

// Row-aligned feature pairs: source[i] and target[i] come from the same
// underlying input.
struct FeaturePairSet {
    Tensor source; // [n, dx]
    Tensor target; // [n, dy]

    static FeaturePairSet make(Tensor source, Tensor target);
    std::int64_t samples() const { return source.dim(0); }
};

struct FitResult {
    Tensor weights; // [dx + 1, dy]; the last row is the bias
    double loss = 0.0;
};

// Closed-form ridge regression through the normal equations, with an
// appended all-ones column modeling the bias. Minimizes
//   (1 / (n*dy)) * |target - [source, 1] W|^2 + ridge * |W|^2
// and reports the mean squared residual per element. The solve runs in
// double precision; a non-positive-definite system with ridge = 0 raises
// ConditioningError.
FitResult fit_linear_reconstruction(const FeaturePairSet& pairs, double ridge);

// Mean squared error per element of the best constant predictor (the
// column mean), i.e. the mean-centered variance of the targets.
double baseline_loss(const Tensor& target);

// I = -ln(l / l0) in nats, clamped to 0 when l >= l0. A non-positive l is
// floored at 1e-12 before the log; callers surface that via
// ReconstructionReport::loss_floored.
double mutual_information(double l, double l0);

// 100 * info / info_upper; may exceed 100. Throws InputError when the
// upper bound is not positive.
double reconstruction_ratio(double info, double info_upper);

struct ReconstructionReport {
    double loss = 0.0;
    double baseline = 0.0;
    double info = 0.0;
    std::optional<double> info_upper;
    std::optional<double> ratio_percent;
    bool loss_floored = false;
};

ReconstructionReport make_report(double loss, double baseline, std::optional<double> info_upper);

// "Loss  Info  Ratio" row, e.g. "0.1100  0.440  82.9%" ("-" when no
// upper bound is available).
std::string format_table_row(const ReconstructionReport& report);

// Default regularizer 1e-6 * trace(X^T X) / dx.
double default_ridge(const Tensor& source);

// Any-rank feature tensor as [rows, last_dim]: leading dims collapse so
// each spatial token (or sample) becomes one row.
Tensor flatten_to_rows(const Tensor& t);

// Exact multiply-accumulate count of one backbone forward at base_img,
// counting one MAC as one FLOP: patch embedding g^2*d*3p^2, per block
// 4*n*d^2 (qkv + output projections) + 2*n^2*d (attention) + 2*n*d*h
// (MLP), with n the token count including cls. Norms, softmax,
// activations, and biases are ignored.
std::int64_t flops_vit_macs(const ViTConfig& cfg);
double flops_vit(const ViTConfig& cfg); // GFLOPs

struct FlopsScaleEntry {
    std::int64_t size = 0;
    std::int64_t sub_images = 0;
    std::int64_t macs = 0;
    double gflops = 0.0;
};

struct FlopsReport {
    std::vector<FlopsScaleEntry> per_scale;
    std::int64_t total_macs = 0;
    double total_gflops = 0.0;
};

// Split-path cost: every sub-image is one base-size forward, so the
// total is flops_vit * sum of k^2 over scales.
FlopsReport flops_s2(const ViTConfig& cfg, const ScaleSet& scales);

enum class ProbeMode { class_labels, instance_discrimination };

struct ProbeConfig {
    int epochs = 30;
    double learning_rate = 0.0005;
    int batch_size = 512;
    ProbeMode mode = ProbeMode::class_labels;
    std::uint64_t shuffle_seed = 0x53325345ull; // fixed: probe results are reproducible

    void validate() const;
};

struct ProbeModel {
    Tensor weights; // [D, C]
    Tensor bias;    // [C]
    double final_loss = 0.0;
    std::vector<double> epoch_losses;
    std::int64_t classes = 0;
};

// Single linear layer trained with softmax cross-entropy by plain
// mini-batch gradient descent (no momentum), deterministic shuffle. In
// instance_discrimination mode every row is its own class and `labels`
// may be empty. Batches shrink to the dataset size when n < batch_size.
ProbeModel probe_train(const Tensor& features, const std::vector<int>& labels, const ProbeConfig& cfg);

// Top-1 accuracy in [0, 1].
double probe_eval(const ProbeModel& model, const Tensor& features, const std::vector<int>& labels);

// One integer per line.
std::vector<int> read_labels(const std::filesystem::path& path);

} // namespace s2
