#include "s2/wrapper.hpp"

#include "s2/errors.hpp"
#include "s2/s2tf.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace s2 {

ScaleSet ScaleSet::make(std::int64_t base, std::vector<std::int64_t> sizes) {
    if (base < 1) throw ScaleError("scale base must be positive");
    if (sizes.empty()) throw ScaleError("scale set must not be empty");
    if (sizes.front() != base) {
        throw ScaleError("first scale must equal the base side " + std::to_string(base) + ", got " +
                         std::to_string(sizes.front()));
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] % base != 0) {
            throw ScaleError("scale " + std::to_string(sizes[i]) + " is not a multiple of base " +
                             std::to_string(base));
        }
        if (i > 0 && sizes[i] <= sizes[i - 1]) throw ScaleError("scales must be strictly increasing");
    }
    return ScaleSet{base, std::move(sizes)};
}

std::string ScaleSet::sizes_str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) os << ",";
        os << sizes[i];
    }
    return os.str();
}

std::vector<SubImagePlanEntry> sub_image_plan(const ScaleSet& scales) {
    std::vector<SubImagePlanEntry> plan;
    plan.reserve(scales.sizes.size());
    for (std::int64_t size : scales.sizes) {
        const std::int64_t k = size / scales.base;
        plan.push_back(SubImagePlanEntry{size, k, k * k});
    }
    return plan;
}

std::int64_t total_forwards(const ScaleSet& scales) {
    std::int64_t total = 0;
    for (const SubImagePlanEntry& e : sub_image_plan(scales)) total += e.count;
    return total;
}

const char* merge_name(MergeMode m) { return m == MergeMode::concat ? "concat" : "add"; }

const char* source_name(ScaleSource s) {
    return s == ScaleSource::interpolate_from_base ? "base" : "native";
}

MultiScaleFeature s2_extract(const ViTConfig& cfg, const WeightStore& w, const Image& img,
                             const ScaleSet& scales, const S2Options& opts, WorkerPool& pool) {
    cfg.validate();
    if (scales.base != cfg.base_img) {
        throw ScaleError("scale base " + std::to_string(scales.base) + " does not match backbone input side " +
                         std::to_string(cfg.base_img));
    }
    if (img.height() != img.width()) throw ScaleError("extraction expects a square image");
    if (opts.source == ScaleSource::interpolate_from_base) {
        if (img.height() != scales.base) {
            throw ScaleError("source=base expects a " + std::to_string(scales.base) + "-sided image, got " +
                             std::to_string(img.height()));
        }
    } else if (img.height() < scales.sizes.back()) {
        throw ScaleError("source=native expects an image side of at least " +
                         std::to_string(scales.sizes.back()) + ", got " + std::to_string(img.height()));
    }

    const auto plan = sub_image_plan(scales);
    const std::size_t num_scales = plan.size();

    // Per-scale inputs are prepared up front on the coordinating thread.
    std::vector<std::vector<Image>> inputs(num_scales); // split: k*k tiles; no-split: 1 image
    for (std::size_t s = 0; s < num_scales; ++s) {
        const Image scaled = resize_bilinear(img, plan[s].size, plan[s].size);
        if (opts.split) {
            inputs[s] = std::move(split_into_subimages(scaled, scales.base).cells);
        } else {
            inputs[s].push_back(scaled);
        }
    }

    // One flat queue over every forward of every scale; task i writes to
    // slot i and nothing else.
    struct WorkItem {
        std::size_t scale;
        std::size_t cell;
    };
    std::vector<WorkItem> items;
    std::vector<std::vector<FeatureMap>> slots(num_scales);
    for (std::size_t s = 0; s < num_scales; ++s) {
        slots[s].resize(inputs[s].size());
        for (std::size_t c = 0; c < inputs[s].size(); ++c) items.push_back(WorkItem{s, c});
    }

    pool.run(static_cast<std::int64_t>(items.size()), [&](std::int64_t i) {
        const WorkItem& item = items[static_cast<std::size_t>(i)];
        const Image& input = inputs[item.scale][item.cell];
        FeatureMap& slot = slots[item.scale][item.cell];
        if (opts.split) {
            slot = vit_forward(cfg, w, input);
        } else {
            slot = vit_forward_scaled(cfg, w, input).features;
        }
    });

    // Merge deterministically in ascending scale order.
    const std::int64_t g = cfg.token_grid();
    std::vector<FeatureMap> pooled;
    pooled.reserve(num_scales);
    for (std::size_t s = 0; s < num_scales; ++s) {
        FeatureMap whole = opts.split ? merge_grid(slots[s], plan[s].tiling) : std::move(slots[s][0]);
        pooled.push_back(avg_pool_to(whole, g, g));
    }

    MultiScaleFeature out;
    if (opts.merge == MergeMode::concat) {
        out.features = concat_channels(pooled).tensor;
        for (const FeatureMap& m : pooled) out.per_scale_dims.push_back(m.depth());
    } else {
        out.features = add_channels(pooled).tensor;
        out.per_scale_dims.push_back(cfg.embed_dim);
    }
    return out;
}

MultiScaleFeature s2_extract(const ViTConfig& cfg, const WeightStore& w, const Image& img,
                             const ScaleSet& scales, const S2Options& opts, int threads) {
    WorkerPool pool(threads);
    return s2_extract(cfg, w, img, scales, opts, pool);
}

void write_feature_file(const std::filesystem::path& path, const MultiScaleFeature& feature,
                        const ViTConfig& cfg, const ScaleSet& scales, const S2Options& opts) {
    std::map<std::string, Tensor> tensors;
    tensors.emplace("features", feature.features);
    s2tf::write_file(path, tensors);

    std::ofstream meta(path.string() + ".meta", std::ios::trunc);
    if (!meta) throw InputError("cannot write metadata sidecar for '" + path.string() + "'");
    meta << "base=" << scales.base << "\n"
         << "sizes=" << scales.sizes_str() << "\n"
         << "merge=" << merge_name(opts.merge) << "\n"
         << "split=" << (opts.split ? "true" : "false") << "\n"
         << "config_hash=" << config_hash_hex(cfg) << "\n";
}

} // namespace s2
