#pragma once

#include "s2/tensor.hpp"

#include <cstddef>
#include <vector>

namespace s2 {

// Normalized image, channel-planar [c, h, w] with c in {1, 3}. Values are
// already in whatever normalization the backbone expects; this layer never
// rescales them.
struct Image {
    Tensor tensor;

    Image() = default;
    explicit Image(Tensor t);

    std::int64_t channels() const { return tensor.dim(0); }
    std::int64_t height() const { return tensor.dim(1); }
    std::int64_t width() const { return tensor.dim(2); }
};

// Spatial grid of token features, [h, w, d] with the feature dimension
// contiguous per cell.
struct FeatureMap {
    Tensor tensor;

    FeatureMap() = default;
    explicit FeatureMap(Tensor t);

    std::int64_t height() const { return tensor.dim(0); }
    std::int64_t width() const { return tensor.dim(1); }
    std::int64_t depth() const { return tensor.dim(2); }
};

// Row-major k x k grid of equally sized square sub-images.
struct ImageGrid {
    std::int64_t k = 0;
    std::vector<Image> cells;

    const Image& at(std::int64_t i, std::int64_t j) const {
        return cells[static_cast<std::size_t>(i * k + j)];
    }
};

// Bilinear resampling with half-pixel centers: the source coordinate for
// output index dst is (dst + 0.5) * (in / out) - 0.5 clamped to
// [0, in - 1]; the four corner samples are blended with weights from the
// fractional part. Channels are treated independently.
Image resize_bilinear(const Image& img, std::int64_t out_h, std::int64_t out_w);

// The same resampling over the spatial dims of a feature map.
FeatureMap resize_bilinear(const FeatureMap& map, std::int64_t out_h, std::int64_t out_w);

// Tiles a square image of side k*base into a k x k grid of base-sized
// sub-images; cell (i, j) covers rows [i*base, (i+1)*base) and columns
// [j*base, (j+1)*base). Throws ScaleError if the image is not square or
// its side is not a multiple of base.
ImageGrid split_into_subimages(const Image& img, std::int64_t base);

// Inverse of the split geometry on feature maps: places cell (i, j) of a
// row-major k x k grid at spatial block (i, j) of the output.
FeatureMap merge_grid(const std::vector<FeatureMap>& cells, std::int64_t k);

// Mean over non-overlapping (h/out_h) x (w/out_w) windows, per channel.
// Throws ScaleError when the window sizes do not divide evenly.
FeatureMap avg_pool_to(const FeatureMap& map, std::int64_t out_h, std::int64_t out_w);

// Channel-wise concatenation of spatially identical maps, in list order.
FeatureMap concat_channels(const std::vector<FeatureMap>& maps);

// Elementwise sum of identically shaped maps, in list order.
FeatureMap add_channels(const std::vector<FeatureMap>& maps);

// Binary PPM ("P6", maxval 255) decoding; pixel values map to v / 255.
Image decode_ppm(std::span<const std::byte> bytes);
std::vector<std::byte> encode_ppm(const Image& img);

} // namespace s2
