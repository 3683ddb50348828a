#include "s2/analysis.hpp"

#include "s2/errors.hpp"
#include "s2/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

namespace s2 {

FeaturePairSet FeaturePairSet::make(Tensor source, Tensor target) {
    if (source.rank() != 2 || target.rank() != 2) {
        throw ShapeError("feature pair tensors must be rank 2 (rows = samples)");
    }
    if (source.dim(0) != target.dim(0)) {
        throw InputError("feature pair row counts differ: " + std::to_string(source.dim(0)) + " vs " +
                         std::to_string(target.dim(0)));
    }
    if (source.dim(0) < 2) throw InputError("feature pair needs at least 2 samples");
    return FeaturePairSet{std::move(source), std::move(target)};
}

namespace {

// Cholesky factorization in place; lower triangle of a col-major-agnostic
// dense symmetric matrix. Returns false on a non-positive pivot.
bool cholesky(std::vector<double>& a, std::int64_t n) {
    for (std::int64_t j = 0; j < n; ++j) {
        double diag = a[static_cast<std::size_t>(j * n + j)];
        for (std::int64_t k = 0; k < j; ++k) {
            const double v = a[static_cast<std::size_t>(j * n + k)];
            diag -= v * v;
        }
        if (!(diag > 0.0)) return false;
        const double root = std::sqrt(diag);
        a[static_cast<std::size_t>(j * n + j)] = root;
        for (std::int64_t i = j + 1; i < n; ++i) {
            double v = a[static_cast<std::size_t>(i * n + j)];
            for (std::int64_t k = 0; k < j; ++k) {
                v -= a[static_cast<std::size_t>(i * n + k)] * a[static_cast<std::size_t>(j * n + k)];
            }
            a[static_cast<std::size_t>(i * n + j)] = v / root;
        }
    }
    return true;
}

// Solves L L^T x = b for one right-hand side, in place.
void cholesky_solve(const std::vector<double>& l, std::int64_t n, std::vector<double>& b) {
    for (std::int64_t i = 0; i < n; ++i) {
        double v = b[static_cast<std::size_t>(i)];
        for (std::int64_t k = 0; k < i; ++k) v -= l[static_cast<std::size_t>(i * n + k)] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = v / l[static_cast<std::size_t>(i * n + i)];
    }
    for (std::int64_t i = n - 1; i >= 0; --i) {
        double v = b[static_cast<std::size_t>(i)];
        for (std::int64_t k = i + 1; k < n; ++k) v -= l[static_cast<std::size_t>(k * n + i)] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = v / l[static_cast<std::size_t>(i * n + i)];
    }
}

} // namespace

FitResult fit_linear_reconstruction(const FeaturePairSet& pairs, double ridge) {
    if (ridge < 0.0) throw InputError("ridge must be non-negative");
    const std::int64_t n = pairs.source.dim(0);
    const std::int64_t dx = pairs.source.dim(1);
    const std::int64_t dy = pairs.target.dim(1);
    const std::int64_t da = dx + 1; // augmented with the bias column
    if (n <= dx) {
        std::cerr << "warning: fitting " << da << " parameters per target column from only " << n
                  << " samples; the system may be underdetermined\n";
    }

    const auto x = pairs.source.data();
    const auto y = pairs.target.data();

    // Gram matrix of [X, 1] and its cross-products with Y, in double.
    std::vector<double> gram(static_cast<std::size_t>(da * da), 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(da * dy), 0.0);
    for (std::int64_t r = 0; r < n; ++r) {
        const float* xr = x.data() + r * dx;
        const float* yr = y.data() + r * dy;
        for (std::int64_t i = 0; i < da; ++i) {
            const double xi = i < dx ? static_cast<double>(xr[i]) : 1.0;
            for (std::int64_t j = 0; j <= i; ++j) {
                const double xj = j < dx ? static_cast<double>(xr[j]) : 1.0;
                gram[static_cast<std::size_t>(i * da + j)] += xi * xj;
            }
            for (std::int64_t j = 0; j < dy; ++j) {
                rhs[static_cast<std::size_t>(i * dy + j)] += xi * static_cast<double>(yr[j]);
            }
        }
    }
    for (std::int64_t i = 0; i < da; ++i) {
        for (std::int64_t j = i + 1; j < da; ++j) {
            gram[static_cast<std::size_t>(i * da + j)] = gram[static_cast<std::size_t>(j * da + i)];
        }
    }
    // (G + ridge*n*dy*I) W = A^T Y  is the stationary point of the
    // stated objective.
    const double shift = ridge * static_cast<double>(n) * static_cast<double>(dy);
    for (std::int64_t i = 0; i < da; ++i) gram[static_cast<std::size_t>(i * da + i)] += shift;

    std::vector<double> chol = gram;
    if (!cholesky(chol, da)) {
        throw ConditioningError("normal matrix is singular; supply a positive ridge");
    }

    std::vector<double> solution(static_cast<std::size_t>(da * dy));
    std::vector<double> column(static_cast<std::size_t>(da));
    for (std::int64_t j = 0; j < dy; ++j) {
        for (std::int64_t i = 0; i < da; ++i) column[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i * dy + j)];
        cholesky_solve(chol, da, column);
        for (std::int64_t i = 0; i < da; ++i) solution[static_cast<std::size_t>(i * dy + j)] = column[static_cast<std::size_t>(i)];
    }

    double sq_err = 0.0;
    for (std::int64_t r = 0; r < n; ++r) {
        const float* xr = x.data() + r * dx;
        const float* yr = y.data() + r * dy;
        for (std::int64_t j = 0; j < dy; ++j) {
            double pred = solution[static_cast<std::size_t>(dx * dy + j)]; // bias row
            for (std::int64_t i = 0; i < dx; ++i) {
                pred += static_cast<double>(xr[i]) * solution[static_cast<std::size_t>(i * dy + j)];
            }
            const double delta = static_cast<double>(yr[j]) - pred;
            sq_err += delta * delta;
        }
    }

    FitResult result;
    Tensor weights({da, dy});
    for (std::int64_t i = 0; i < da * dy; ++i) {
        weights.data()[static_cast<std::size_t>(i)] = static_cast<float>(solution[static_cast<std::size_t>(i)]);
    }
    result.weights = std::move(weights);
    result.loss = sq_err / (static_cast<double>(n) * static_cast<double>(dy));
    return result;
}

double baseline_loss(const Tensor& target) {
    if (target.rank() != 2) throw ShapeError("baseline_loss expects a rank-2 tensor");
    const std::int64_t n = target.dim(0), dy = target.dim(1);
    if (n < 2) throw InputError("baseline_loss needs at least 2 samples");
    const auto y = target.data();

    std::vector<double> mean(static_cast<std::size_t>(dy), 0.0);
    for (std::int64_t r = 0; r < n; ++r) {
        for (std::int64_t j = 0; j < dy; ++j) mean[static_cast<std::size_t>(j)] += static_cast<double>(y[r * dy + j]);
    }
    for (double& m : mean) m /= static_cast<double>(n);

    double sq = 0.0;
    for (std::int64_t r = 0; r < n; ++r) {
        for (std::int64_t j = 0; j < dy; ++j) {
            const double delta = static_cast<double>(y[r * dy + j]) - mean[static_cast<std::size_t>(j)];
            sq += delta * delta;
        }
    }
    return sq / (static_cast<double>(n) * static_cast<double>(dy));
}

double mutual_information(double l, double l0) {
    if (!(l0 > 0.0)) throw InputError("mutual_information requires a positive baseline loss");
    if (l <= 0.0) l = 1e-12;
    if (l >= l0) return 0.0;
    return -std::log(l / l0);
}

double reconstruction_ratio(double info, double info_upper) {
    if (!(info_upper > 0.0)) throw InputError("reconstruction ratio undefined: upper-bound info is not positive");
    return 100.0 * info / info_upper;
}

ReconstructionReport make_report(double loss, double baseline, std::optional<double> info_upper) {
    ReconstructionReport report;
    report.loss = loss;
    report.baseline = baseline;
    report.loss_floored = loss <= 0.0;
    report.info = mutual_information(loss, baseline);
    report.info_upper = info_upper;
    if (info_upper.has_value()) {
        report.ratio_percent = reconstruction_ratio(report.info, *info_upper);
    }
    return report;
}

std::string format_table_row(const ReconstructionReport& report) {
    char buf[96];
    if (report.ratio_percent.has_value()) {
        std::snprintf(buf, sizeof(buf), "%.4f  %.3f  %.1f%%", report.loss, report.info, *report.ratio_percent);
    } else {
        std::snprintf(buf, sizeof(buf), "%.4f  %.3f  -", report.loss, report.info);
    }
    return buf;
}

double default_ridge(const Tensor& source) {
    if (source.rank() != 2) throw ShapeError("default_ridge expects a rank-2 tensor");
    double trace = 0.0;
    for (float v : source.data()) trace += static_cast<double>(v) * static_cast<double>(v);
    return 1e-6 * trace / static_cast<double>(source.dim(1));
}

Tensor flatten_to_rows(const Tensor& t) {
    if (t.rank() == 1) return t.reshaped({1, t.dim(0)});
    std::int64_t rows = 1;
    for (std::int64_t i = 0; i + 1 < t.rank(); ++i) rows *= t.dim(i);
    return t.reshaped({rows, t.dim(t.rank() - 1)});
}

std::int64_t flops_vit_macs(const ViTConfig& cfg) {
    cfg.validate();
    const std::int64_t g = cfg.token_grid();
    const std::int64_t d = cfg.embed_dim;
    const std::int64_t p = cfg.patch_size;
    const std::int64_t n = cfg.token_count();
    const std::int64_t h = cfg.mlp_hidden();

    const std::int64_t patch_embed = g * g * d * 3 * p * p;
    const std::int64_t projections = 4 * n * d * d;
    const std::int64_t attention = 2 * n * n * d;
    const std::int64_t mlp = 2 * n * d * h;
    return patch_embed + cfg.depth * (projections + attention + mlp);
}

double flops_vit(const ViTConfig& cfg) {
    return static_cast<double>(flops_vit_macs(cfg)) / 1e9;
}

FlopsReport flops_s2(const ViTConfig& cfg, const ScaleSet& scales) {
    const std::int64_t base_macs = flops_vit_macs(cfg);
    FlopsReport report;
    for (const SubImagePlanEntry& entry : sub_image_plan(scales)) {
        FlopsScaleEntry e;
        e.size = entry.size;
        e.sub_images = entry.count;
        e.macs = base_macs * entry.count;
        e.gflops = static_cast<double>(e.macs) / 1e9;
        report.per_scale.push_back(e);
        report.total_macs += e.macs;
    }
    report.total_gflops = static_cast<double>(report.total_macs) / 1e9;
    return report;
}

void ProbeConfig::validate() const {
    if (epochs < 1 || learning_rate <= 0.0 || batch_size < 1) {
        throw InputError("probe hyperparameters must be positive");
    }
}

namespace {

std::vector<int> instance_labels(std::int64_t n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 0);
    return labels;
}

} // namespace

ProbeModel probe_train(const Tensor& features, const std::vector<int>& labels_in, const ProbeConfig& cfg) {
    cfg.validate();
    if (features.rank() != 2) throw ShapeError("probe features must be [n, D]");
    const std::int64_t n = features.dim(0);
    const std::int64_t dim = features.dim(1);
    if (n < 1) throw InputError("probe training set is empty");

    std::vector<int> labels;
    if (cfg.mode == ProbeMode::instance_discrimination) {
        if (!labels_in.empty() && static_cast<std::int64_t>(labels_in.size()) != n) {
            throw InputError("instance mode expects no labels or exactly one per row");
        }
        labels = instance_labels(n);
    } else {
        labels = labels_in;
        if (static_cast<std::int64_t>(labels.size()) != n) {
            throw InputError("labels count " + std::to_string(labels.size()) + " does not match rows " +
                             std::to_string(n));
        }
    }
    std::int64_t classes = 0;
    for (int l : labels) {
        if (l < 0) throw InputError("labels must be non-negative");
        classes = std::max<std::int64_t>(classes, l + 1);
    }

    const std::int64_t batch = std::min<std::int64_t>(cfg.batch_size, n);
    const auto x = features.data();

    std::vector<double> weights(static_cast<std::size_t>(dim * classes), 0.0);
    std::vector<double> bias(static_cast<std::size_t>(classes), 0.0);
    std::vector<double> grad_w(weights.size());
    std::vector<double> grad_b(bias.size());
    std::vector<double> logits(static_cast<std::size_t>(classes));
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    SplitMix64 rng(cfg.shuffle_seed);
    ProbeModel model;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::int64_t i = n - 1; i > 0; --i) {
            std::swap(order[static_cast<std::size_t>(i)],
                      order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        }
        double epoch_loss = 0.0;
        for (std::int64_t start = 0; start < n; start += batch) {
            const std::int64_t count = std::min(batch, n - start);
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            std::fill(grad_b.begin(), grad_b.end(), 0.0);
            for (std::int64_t bi = 0; bi < count; ++bi) {
                const std::int64_t row = order[static_cast<std::size_t>(start + bi)];
                const float* xr = x.data() + row * dim;
                for (std::int64_t c = 0; c < classes; ++c) {
                    double v = bias[static_cast<std::size_t>(c)];
                    for (std::int64_t j = 0; j < dim; ++j) {
                        v += static_cast<double>(xr[j]) * weights[static_cast<std::size_t>(j * classes + c)];
                    }
                    logits[static_cast<std::size_t>(c)] = v;
                }
                const double peak = *std::max_element(logits.begin(), logits.end());
                double denom = 0.0;
                for (double& v : logits) {
                    v = std::exp(v - peak);
                    denom += v;
                }
                const int label = labels[static_cast<std::size_t>(row)];
                const double p_label = logits[static_cast<std::size_t>(label)] / denom;
                epoch_loss += -std::log(std::max(p_label, 1e-300));
                for (std::int64_t c = 0; c < classes; ++c) {
                    const double coeff = (logits[static_cast<std::size_t>(c)] / denom - (c == label ? 1.0 : 0.0)) /
                                         static_cast<double>(count);
                    grad_b[static_cast<std::size_t>(c)] += coeff;
                    for (std::int64_t j = 0; j < dim; ++j) {
                        grad_w[static_cast<std::size_t>(j * classes + c)] += coeff * static_cast<double>(xr[j]);
                    }
                }
            }
            for (std::size_t i = 0; i < weights.size(); ++i) weights[i] -= cfg.learning_rate * grad_w[i];
            for (std::size_t i = 0; i < bias.size(); ++i) bias[i] -= cfg.learning_rate * grad_b[i];
        }
        model.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
    }

    model.final_loss = model.epoch_losses.back();
    model.classes = classes;
    Tensor w({dim, classes});
    for (std::size_t i = 0; i < weights.size(); ++i) w.data()[i] = static_cast<float>(weights[i]);
    Tensor b({classes});
    for (std::size_t i = 0; i < bias.size(); ++i) b.data()[i] = static_cast<float>(bias[i]);
    model.weights = std::move(w);
    model.bias = std::move(b);
    return model;
}

double probe_eval(const ProbeModel& model, const Tensor& features, const std::vector<int>& labels_in) {
    if (features.rank() != 2) throw ShapeError("probe features must be [n, D]");
    const std::int64_t n = features.dim(0);
    const std::int64_t dim = features.dim(1);
    if (n < 1) throw InputError("probe evaluation set is empty");
    if (dim != model.weights.dim(0)) {
        throw ShapeError("probe feature width " + std::to_string(dim) + " does not match model " +
                         model.weights.shape_str());
    }
    std::vector<int> labels = labels_in.empty() ? instance_labels(n) : labels_in;
    if (static_cast<std::int64_t>(labels.size()) != n) throw InputError("labels count does not match rows");

    const std::int64_t classes = model.classes;
    const auto x = features.data();
    std::int64_t correct = 0;
    for (std::int64_t row = 0; row < n; ++row) {
        const float* xr = x.data() + row * dim;
        std::int64_t best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (std::int64_t c = 0; c < classes; ++c) {
            double v = static_cast<double>(model.bias.at(c));
            for (std::int64_t j = 0; j < dim; ++j) {
                v += static_cast<double>(xr[j]) * static_cast<double>(model.weights.at(j, c));
            }
            if (v > best_v) {
                best_v = v;
                best = c;
            }
        }
        if (best == labels[static_cast<std::size_t>(row)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

std::vector<int> read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open labels file '" + path.string() + "'");
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0;
        int v;
        try {
            v = std::stoi(line, &pos);
        } catch (const std::exception&) {
            throw InputError("labels file '" + path.string() + "' has a non-integer line: '" + line + "'");
        }
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\r' || line[pos] == '\t')) ++pos;
        if (pos != line.size()) {
            throw InputError("labels file '" + path.string() + "' has trailing junk on line: '" + line + "'");
        }
        labels.push_back(v);
    }
    return labels;
}

} // namespace s2
