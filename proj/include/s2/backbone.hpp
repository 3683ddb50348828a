#pragma once

#include "s2/imgops.hpp"
#include "s2/tensor.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace s2 {

// Plain ViT encoder hyperparameters. embed_dim must divide evenly by
// num_heads and base_img by patch_size.
struct ViTConfig {
    std::int64_t patch_size = 16;
    std::int64_t embed_dim = 768;
    std::int64_t depth = 12;
    std::int64_t num_heads = 12;
    double mlp_ratio = 4.0;
    std::int64_t base_img = 224;
    bool use_cls_token = true;

    std::int64_t token_grid() const { return base_img / patch_size; }
    std::int64_t head_dim() const { return embed_dim / num_heads; }
    std::int64_t mlp_hidden() const;
    std::int64_t token_count() const { return token_grid() * token_grid() + (use_cls_token ? 1 : 0); }

    void validate() const;
};

// Stable hash over the architecture fields, used to tag outputs.
std::uint64_t config_hash(const ViTConfig& cfg);
std::string config_hash_hex(const ViTConfig& cfg);

using TensorMap = std::map<std::string, Tensor>;

// Expected tensor names and shapes for a config. Linear weights are
// stored [out, in] (the patch embedding is [d, 3*p*p]); within a patch,
// pixels are flattened row-major with the channel fastest.
std::map<std::string, std::vector<std::int64_t>> weight_schema(const ViTConfig& cfg);

// Validated, immutable parameter set. Construction checks the tensor map
// against the schema in both directions: missing names, extra names, and
// shape mismatches are all SchemaErrors.
class WeightStore {
public:
    static WeightStore from_tensors(TensorMap tensors, const ViTConfig& cfg);

    const Tensor& at(const std::string& name) const;
    const TensorMap& tensors() const { return tensors_; }

private:
    WeightStore() = default;
    TensorMap tensors_;
};

WeightStore load_weights(std::span<const std::byte> bytes, const ViTConfig& cfg);
std::vector<std::byte> save_weights(const WeightStore& store);

// Per-layer attention probabilities captured during a forward pass, one
// [n, n] tensor per (layer, head) in layer-major order.
struct ForwardTrace {
    std::vector<Tensor> attention;
};

struct ForwardResult {
    FeatureMap features;                // [g, g, d]
    std::optional<Tensor> cls_feature;  // [d], present when the config has a cls token
};

// Full encoder forward at the pre-training image side. The spatial token
// grid is returned row-major; the cls token (if any) is dropped from the
// grid and surfaced separately.
ForwardResult vit_forward_full(const ViTConfig& cfg, const WeightStore& w, const Image& img,
                               ForwardTrace* trace = nullptr);
FeatureMap vit_forward(const ViTConfig& cfg, const WeightStore& w, const Image& img);

// Forward at a larger side (a multiple of patch_size) using a bilinearly
// interpolated positional embedding; the no-split execution path.
ForwardResult vit_forward_scaled(const ViTConfig& cfg, const WeightStore& w, const Image& img,
                                 ForwardTrace* trace = nullptr);

// Resamples the spatial part of a positional embedding from an old_g x
// old_g grid to new_g x new_g; a leading cls slot, when present, is
// copied through unchanged.
Tensor interpolate_pos_embed(const Tensor& pos, std::int64_t old_g, std::int64_t new_g);

} // namespace s2
