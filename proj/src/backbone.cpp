#include "s2/backbone.hpp"

#include "s2/errors.hpp"
#include "s2/kernels.hpp"
#include "s2/s2tf.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace s2 {

namespace {

constexpr float kLayerNormEps = 1e-6f;

std::string block_key(std::int64_t block, const char* suffix) {
    return "blocks." + std::to_string(block) + "." + suffix;
}

} // namespace

std::int64_t ViTConfig::mlp_hidden() const {
    return static_cast<std::int64_t>(std::llround(mlp_ratio * static_cast<double>(embed_dim)));
}

void ViTConfig::validate() const {
    if (patch_size < 1 || embed_dim < 1 || num_heads < 1 || depth < 0 || base_img < 1) {
        throw ShapeError("vit config fields must be positive (depth may be 0)");
    }
    if (embed_dim % num_heads != 0) {
        throw ShapeError("embed_dim " + std::to_string(embed_dim) + " not divisible by num_heads " +
                         std::to_string(num_heads));
    }
    if (base_img % patch_size != 0) {
        throw ShapeError("base_img " + std::to_string(base_img) + " not divisible by patch_size " +
                         std::to_string(patch_size));
    }
    if (mlp_ratio <= 0.0 || mlp_hidden() < 1) {
        throw ShapeError("mlp_ratio must yield a positive hidden width");
    }
}

std::uint64_t config_hash(const ViTConfig& cfg) {
    std::ostringstream os;
    os << "p=" << cfg.patch_size << ";d=" << cfg.embed_dim << ";L=" << cfg.depth << ";h=" << cfg.num_heads
       << ";r=" << cfg.mlp_ratio << ";b=" << cfg.base_img << ";cls=" << (cfg.use_cls_token ? 1 : 0);
    const std::string s = os.str();
    std::uint64_t h = 14695981039346656037ull; // FNV-1a
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash_hex(const ViTConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    return buf;
}

std::map<std::string, std::vector<std::int64_t>> weight_schema(const ViTConfig& cfg) {
    cfg.validate();
    const std::int64_t d = cfg.embed_dim;
    const std::int64_t p = cfg.patch_size;
    const std::int64_t n = cfg.token_count();
    const std::int64_t h = cfg.mlp_hidden();

    std::map<std::string, std::vector<std::int64_t>> schema;
    schema["patch_embed.weight"] = {d, 3 * p * p};
    schema["patch_embed.bias"] = {d};
    schema["pos_embed"] = {n, d};
    if (cfg.use_cls_token) schema["cls_token"] = {d};
    for (std::int64_t b = 0; b < cfg.depth; ++b) {
        schema[block_key(b, "norm1.gamma")] = {d};
        schema[block_key(b, "norm1.beta")] = {d};
        schema[block_key(b, "attn.qkv.weight")] = {3 * d, d};
        schema[block_key(b, "attn.qkv.bias")] = {3 * d};
        schema[block_key(b, "attn.out.weight")] = {d, d};
        schema[block_key(b, "attn.out.bias")] = {d};
        schema[block_key(b, "norm2.gamma")] = {d};
        schema[block_key(b, "norm2.beta")] = {d};
        schema[block_key(b, "mlp.fc1.weight")] = {h, d};
        schema[block_key(b, "mlp.fc1.bias")] = {h};
        schema[block_key(b, "mlp.fc2.weight")] = {d, h};
        schema[block_key(b, "mlp.fc2.bias")] = {d};
    }
    schema["norm.gamma"] = {d};
    schema["norm.beta"] = {d};
    return schema;
}

WeightStore WeightStore::from_tensors(TensorMap tensors, const ViTConfig& cfg) {
    const auto schema = weight_schema(cfg);
    for (const auto& [name, dims] : schema) {
        const auto it = tensors.find(name);
        if (it == tensors.end()) throw SchemaError("weights missing tensor '" + name + "'");
        if (it->second.dims() != dims) {
            throw SchemaError("weights tensor '" + name + "' has shape " + it->second.shape_str() +
                              ", schema expects another shape");
        }
    }
    for (const auto& [name, tensor] : tensors) {
        if (schema.find(name) == schema.end()) {
            throw SchemaError("weights contain unexpected tensor '" + name + "'");
        }
    }
    WeightStore store;
    store.tensors_ = std::move(tensors);
    return store;
}

const Tensor& WeightStore::at(const std::string& name) const {
    const auto it = tensors_.find(name);
    if (it == tensors_.end()) throw SchemaError("weight store has no tensor '" + name + "'");
    return it->second;
}

WeightStore load_weights(std::span<const std::byte> bytes, const ViTConfig& cfg) {
    return WeightStore::from_tensors(s2tf::read(bytes), cfg);
}

std::vector<std::byte> save_weights(const WeightStore& store) {
    return s2tf::write(store.tensors());
}

Tensor interpolate_pos_embed(const Tensor& pos, std::int64_t old_g, std::int64_t new_g) {
    if (pos.rank() != 2) throw ShapeError("pos embed must be rank 2");
    const std::int64_t n = pos.dim(0);
    const std::int64_t d = pos.dim(1);
    const std::int64_t spatial = old_g * old_g;
    bool has_cls;
    if (n == spatial) {
        has_cls = false;
    } else if (n == spatial + 1) {
        has_cls = true;
    } else {
        throw ShapeError("pos embed rows " + std::to_string(n) + " inconsistent with grid " +
                         std::to_string(old_g));
    }
    if (new_g == old_g) return pos;

    const std::int64_t head = has_cls ? 1 : 0;
    Tensor grid({old_g, old_g, d});
    std::memcpy(grid.data().data(), pos.data().data() + head * d,
                static_cast<std::size_t>(spatial * d) * sizeof(float));
    const FeatureMap resized = resize_bilinear(FeatureMap(std::move(grid)), new_g, new_g);

    Tensor out({new_g * new_g + head, d});
    if (has_cls) {
        std::memcpy(out.data().data(), pos.data().data(), static_cast<std::size_t>(d) * sizeof(float));
    }
    std::memcpy(out.data().data() + head * d, resized.tensor.data().data(),
                static_cast<std::size_t>(new_g * new_g * d) * sizeof(float));
    return out;
}

namespace {

// Patch pixels flatten row-major with channels fastest:
// index = (py * p + px) * 3 + c.
Tensor patchify(const Image& img, std::int64_t p) {
    const std::int64_t c = img.channels(), side = img.height();
    const std::int64_t g = side / p;
    Tensor patches({g * g, c * p * p});
    const float* src = img.tensor.data().data();
    float* dst = patches.data().data();
    for (std::int64_t gy = 0; gy < g; ++gy) {
        for (std::int64_t gx = 0; gx < g; ++gx) {
            float* patch = dst + (gy * g + gx) * c * p * p;
            for (std::int64_t py = 0; py < p; ++py) {
                for (std::int64_t px = 0; px < p; ++px) {
                    for (std::int64_t ch = 0; ch < c; ++ch) {
                        patch[(py * p + px) * c + ch] = src[(ch * side + gy * p + py) * side + gx * p + px];
                    }
                }
            }
        }
    }
    return patches;
}

// Columns [c0, c0+width) of a rank-2 tensor as a contiguous copy.
Tensor slice_cols(const Tensor& a, std::int64_t c0, std::int64_t width) {
    const std::int64_t m = a.dim(0), n = a.dim(1);
    Tensor out({m, width});
    for (std::int64_t i = 0; i < m; ++i) {
        std::memcpy(out.data().data() + i * width, a.data().data() + i * n + c0,
                    static_cast<std::size_t>(width) * sizeof(float));
    }
    return out;
}

Tensor multi_head_attention(const Tensor& x_normed, const Tensor& qkv_w_t, const Tensor& qkv_b,
                            const Tensor& out_w_t, const Tensor& out_b, std::int64_t heads,
                            ForwardTrace* trace) {
    const std::int64_t n = x_normed.dim(0);
    const std::int64_t d = x_normed.dim(1);
    const std::int64_t dh = d / heads;
    const float inv_sqrt_dh = 1.0f / std::sqrt(static_cast<float>(dh));

    const Tensor qkv = add_bias_rows(matmul(x_normed, qkv_w_t), qkv_b);

    Tensor context({n, d});
    for (std::int64_t head = 0; head < heads; ++head) {
        const Tensor q = slice_cols(qkv, head * dh, dh);
        const Tensor k = slice_cols(qkv, d + head * dh, dh);
        const Tensor v = slice_cols(qkv, 2 * d + head * dh, dh);
        const Tensor probs = softmax_rows(scale(matmul(q, transpose2d(k)), inv_sqrt_dh));
        if (trace) trace->attention.push_back(probs);
        const Tensor head_out = matmul(probs, v);
        for (std::int64_t i = 0; i < n; ++i) {
            std::memcpy(context.data().data() + i * d + head * dh, head_out.data().data() + i * dh,
                        static_cast<std::size_t>(dh) * sizeof(float));
        }
    }
    return add_bias_rows(matmul(context, out_w_t), out_b);
}

// Shared encoder body. `pos` must already match the token count implied
// by the image side.
ForwardResult encode(const ViTConfig& cfg, const WeightStore& w, const Image& img, const Tensor& pos,
                     ForwardTrace* trace) {
    if (img.channels() != 3) throw ShapeError("backbone expects 3-channel images");
    const std::int64_t side = img.height();
    const std::int64_t g = side / cfg.patch_size;
    const std::int64_t d = cfg.embed_dim;

    Tensor tokens = add_bias_rows(matmul(patchify(img, cfg.patch_size), transpose2d(w.at("patch_embed.weight"))),
                                  w.at("patch_embed.bias"));

    const std::int64_t n = g * g + (cfg.use_cls_token ? 1 : 0);
    Tensor x({n, d});
    if (cfg.use_cls_token) {
        std::memcpy(x.data().data(), w.at("cls_token").data().data(), static_cast<std::size_t>(d) * sizeof(float));
        std::memcpy(x.data().data() + d, tokens.data().data(),
                    static_cast<std::size_t>(g * g * d) * sizeof(float));
    } else {
        x = std::move(tokens);
    }
    x = add(x, pos);

    for (std::int64_t b = 0; b < cfg.depth; ++b) {
        const Tensor normed1 = layernorm(x, w.at(block_key(b, "norm1.gamma")), w.at(block_key(b, "norm1.beta")),
                                         kLayerNormEps);
        const Tensor attn = multi_head_attention(normed1, transpose2d(w.at(block_key(b, "attn.qkv.weight"))),
                                                 w.at(block_key(b, "attn.qkv.bias")),
                                                 transpose2d(w.at(block_key(b, "attn.out.weight"))),
                                                 w.at(block_key(b, "attn.out.bias")), cfg.num_heads, trace);
        x = add(x, attn);

        const Tensor normed2 = layernorm(x, w.at(block_key(b, "norm2.gamma")), w.at(block_key(b, "norm2.beta")),
                                         kLayerNormEps);
        const Tensor hidden = gelu(add_bias_rows(matmul(normed2, transpose2d(w.at(block_key(b, "mlp.fc1.weight")))),
                                                 w.at(block_key(b, "mlp.fc1.bias"))));
        const Tensor mlp = add_bias_rows(matmul(hidden, transpose2d(w.at(block_key(b, "mlp.fc2.weight")))),
                                         w.at(block_key(b, "mlp.fc2.bias")));
        x = add(x, mlp);
    }

    x = layernorm(x, w.at("norm.gamma"), w.at("norm.beta"), kLayerNormEps);

    ForwardResult result;
    const std::int64_t head_rows = cfg.use_cls_token ? 1 : 0;
    if (cfg.use_cls_token) {
        Tensor cls({d});
        std::memcpy(cls.data().data(), x.data().data(), static_cast<std::size_t>(d) * sizeof(float));
        result.cls_feature = std::move(cls);
    }
    Tensor grid({g, g, d});
    std::memcpy(grid.data().data(), x.data().data() + head_rows * d,
                static_cast<std::size_t>(g * g * d) * sizeof(float));
    result.features = FeatureMap(std::move(grid));
    return result;
}

} // namespace

ForwardResult vit_forward_full(const ViTConfig& cfg, const WeightStore& w, const Image& img,
                               ForwardTrace* trace) {
    cfg.validate();
    if (img.height() != cfg.base_img || img.width() != cfg.base_img) {
        throw ScaleError("vit_forward expects a " + std::to_string(cfg.base_img) + "-sided image, got " +
                         std::to_string(img.height()) + "x" + std::to_string(img.width()));
    }
    return encode(cfg, w, img, w.at("pos_embed"), trace);
}

FeatureMap vit_forward(const ViTConfig& cfg, const WeightStore& w, const Image& img) {
    return vit_forward_full(cfg, w, img).features;
}

ForwardResult vit_forward_scaled(const ViTConfig& cfg, const WeightStore& w, const Image& img,
                                 ForwardTrace* trace) {
    cfg.validate();
    const std::int64_t side = img.height();
    if (side != img.width()) throw ScaleError("scaled forward expects a square image");
    if (side % cfg.patch_size != 0) {
        throw ScaleError("image side " + std::to_string(side) + " is not a multiple of patch size " +
                         std::to_string(cfg.patch_size));
    }
    const Tensor pos = interpolate_pos_embed(w.at("pos_embed"), cfg.token_grid(), side / cfg.patch_size);
    return encode(cfg, w, img, pos, trace);
}

} // namespace s2
