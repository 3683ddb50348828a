#pragma once

#include "s2/backbone.hpp"
#include "s2/imgops.hpp"
#include "s2/tensor.hpp"
#include "s2/threadpool.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace s2 {

// The image sides a multi-scale extraction runs at. The first entry is
// the backbone's pre-training side; every entry must be a multiple of it
// and the list strictly increasing.
struct ScaleSet {
    std::int64_t base = 0;
    std::vector<std::int64_t> sizes;

    static ScaleSet make(std::int64_t base, std::vector<std::int64_t> sizes);
    std::string sizes_str() const;
};

enum class MergeMode { concat, add };

enum class ScaleSource {
    interpolate_from_base, // upsample the base-side input to each scale
    native_hi_res,         // downsample a high-resolution input to each scale
};

struct S2Options {
    MergeMode merge = MergeMode::concat;
    bool split = true; // false = run whole large images with interpolated pos embed
    ScaleSource source = ScaleSource::interpolate_from_base;
};

struct SubImagePlanEntry {
    std::int64_t size = 0;
    std::int64_t tiling = 0; // k: sub-images per axis
    std::int64_t count = 0;  // k * k
};

std::vector<SubImagePlanEntry> sub_image_plan(const ScaleSet& scales);
std::int64_t total_forwards(const ScaleSet& scales);

// Multi-scale feature map on the base token grid: [g, g, D] where D is
// the sum of per-scale channel widths under concat merging, or the
// backbone width under add merging.
struct MultiScaleFeature {
    Tensor features;
    std::vector<std::int64_t> per_scale_dims;

    std::int64_t grid() const { return features.dim(0); }
    std::int64_t channels() const { return features.dim(2); }
};

// Runs the multi-scale pipeline: for each scale (ascending) resample the
// input, tile it into base-sized sub-images (or run one big forward when
// opts.split is false), push every sub-image through the backbone, stitch
// the per-scale map back together, pool it to the base grid, and merge
// across scales. Sub-image forwards across all scales form one flat work
// queue; each result lands in a pre-assigned slot, so the output is
// byte-identical no matter how many workers execute it.
MultiScaleFeature s2_extract(const ViTConfig& cfg, const WeightStore& w, const Image& img,
                             const ScaleSet& scales, const S2Options& opts, WorkerPool& pool);
MultiScaleFeature s2_extract(const ViTConfig& cfg, const WeightStore& w, const Image& img,
                             const ScaleSet& scales, const S2Options& opts, int threads = 1);

const char* merge_name(MergeMode m);
const char* source_name(ScaleSource s);

// Writes the feature tensor (named "features") as S2TF plus a "<path>.meta"
// sidecar of key=value lines: base, sizes, merge, split, config_hash.
void write_feature_file(const std::filesystem::path& path, const MultiScaleFeature& feature,
                        const ViTConfig& cfg, const ScaleSet& scales, const S2Options& opts);

} // namespace s2
