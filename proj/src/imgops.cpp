#include "s2/imgops.hpp"

#include "s2/errors.hpp"
#include "s2/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace s2 {

Image::Image(Tensor t) : tensor(std::move(t)) {
    if (tensor.rank() != 3) throw ShapeError("image tensor must be [c,h,w], got " + tensor.shape_str());
    const std::int64_t c = tensor.dim(0);
    if (c != 1 && c != 3) throw ShapeError("image channels must be 1 or 3, got " + std::to_string(c));
}

FeatureMap::FeatureMap(Tensor t) : tensor(std::move(t)) {
    if (tensor.rank() != 3) throw ShapeError("feature map tensor must be [h,w,d], got " + tensor.shape_str());
}

namespace {

struct Tap {
    std::int64_t lo, hi;
    float frac;
};

// Half-pixel source tap for one output index.
Tap tap_for(std::int64_t dst, std::int64_t out_n, std::int64_t in_n) {
    const double s_raw = (static_cast<double>(dst) + 0.5) * (static_cast<double>(in_n) / static_cast<double>(out_n)) - 0.5;
    const double s = std::clamp(s_raw, 0.0, static_cast<double>(in_n - 1));
    const auto lo = static_cast<std::int64_t>(std::floor(s));
    const std::int64_t hi = std::min(lo + 1, in_n - 1);
    return Tap{lo, hi, static_cast<float>(s - static_cast<double>(lo))};
}

std::vector<Tap> taps_for_axis(std::int64_t out_n, std::int64_t in_n) {
    std::vector<Tap> taps(static_cast<std::size_t>(out_n));
    for (std::int64_t i = 0; i < out_n; ++i) taps[static_cast<std::size_t>(i)] = tap_for(i, out_n, in_n);
    return taps;
}

} // namespace

Image resize_bilinear(const Image& img, std::int64_t out_h, std::int64_t out_w) {
    if (out_h < 1 || out_w < 1) throw ShapeError("resize target must be at least 1x1");
    const std::int64_t c = img.channels(), in_h = img.height(), in_w = img.width();
    if (out_h == in_h && out_w == in_w) return img;

    const auto ys = taps_for_axis(out_h, in_h);
    const auto xs = taps_for_axis(out_w, in_w);
    Tensor out({c, out_h, out_w});
    for (std::int64_t ch = 0; ch < c; ++ch) {
        for (std::int64_t y = 0; y < out_h; ++y) {
            const Tap& ty = ys[static_cast<std::size_t>(y)];
            const float wy1 = ty.frac, wy0 = 1.0f - ty.frac;
            for (std::int64_t x = 0; x < out_w; ++x) {
                const Tap& tx = xs[static_cast<std::size_t>(x)];
                const float wx1 = tx.frac, wx0 = 1.0f - tx.frac;
                const float p00 = img.tensor.at(ch, ty.lo, tx.lo);
                const float p01 = img.tensor.at(ch, ty.lo, tx.hi);
                const float p10 = img.tensor.at(ch, ty.hi, tx.lo);
                const float p11 = img.tensor.at(ch, ty.hi, tx.hi);
                out.at(ch, y, x) = ((wy0 * wx0 * p00 + wy0 * wx1 * p01) + wy1 * wx0 * p10) + wy1 * wx1 * p11;
            }
        }
    }
    return Image(std::move(out));
}

FeatureMap resize_bilinear(const FeatureMap& map, std::int64_t out_h, std::int64_t out_w) {
    if (out_h < 1 || out_w < 1) throw ShapeError("resize target must be at least 1x1");
    const std::int64_t in_h = map.height(), in_w = map.width(), d = map.depth();
    if (out_h == in_h && out_w == in_w) return map;

    const auto ys = taps_for_axis(out_h, in_h);
    const auto xs = taps_for_axis(out_w, in_w);
    Tensor out({out_h, out_w, d});
    const float* src = map.tensor.data().data();
    float* dst = out.data().data();
    const auto& ops = kernels::active();
    for (std::int64_t y = 0; y < out_h; ++y) {
        const Tap& ty = ys[static_cast<std::size_t>(y)];
        const float wy1 = ty.frac, wy0 = 1.0f - ty.frac;
        for (std::int64_t x = 0; x < out_w; ++x) {
            const Tap& tx = xs[static_cast<std::size_t>(x)];
            const float wx1 = tx.frac, wx0 = 1.0f - tx.frac;
            const float* p00 = src + (ty.lo * in_w + tx.lo) * d;
            const float* p01 = src + (ty.lo * in_w + tx.hi) * d;
            const float* p10 = src + (ty.hi * in_w + tx.lo) * d;
            const float* p11 = src + (ty.hi * in_w + tx.hi) * d;
            ops.blend4(dst + (y * out_w + x) * d, p00, p01, p10, p11,
                       wy0 * wx0, wy0 * wx1, wy1 * wx0, wy1 * wx1, d);
        }
    }
    return FeatureMap(std::move(out));
}

ImageGrid split_into_subimages(const Image& img, std::int64_t base) {
    if (base < 1) throw ScaleError("split base must be positive");
    const std::int64_t c = img.channels(), h = img.height(), w = img.width();
    if (h != w) throw ScaleError("split requires a square image, got " +
                                 std::to_string(h) + "x" + std::to_string(w));
    if (h % base != 0) throw ScaleError("image side " + std::to_string(h) +
                                        " is not a multiple of base " + std::to_string(base));
    const std::int64_t k = h / base;

    ImageGrid grid;
    grid.k = k;
    grid.cells.reserve(static_cast<std::size_t>(k * k));
    const float* src = img.tensor.data().data();
    for (std::int64_t i = 0; i < k; ++i) {
        for (std::int64_t j = 0; j < k; ++j) {
            Tensor cell({c, base, base});
            float* dst = cell.data().data();
            for (std::int64_t ch = 0; ch < c; ++ch) {
                for (std::int64_t y = 0; y < base; ++y) {
                    const float* row = src + (ch * h + i * base + y) * w + j * base;
                    std::memcpy(dst + (ch * base + y) * base, row,
                                static_cast<std::size_t>(base) * sizeof(float));
                }
            }
            grid.cells.emplace_back(std::move(cell));
        }
    }
    return grid;
}

FeatureMap merge_grid(const std::vector<FeatureMap>& cells, std::int64_t k) {
    if (k < 1 || static_cast<std::int64_t>(cells.size()) != k * k) {
        throw ShapeError("merge_grid expects k*k cells");
    }
    const std::int64_t h = cells[0].height(), w = cells[0].width(), d = cells[0].depth();
    for (const FeatureMap& cell : cells) {
        if (cell.height() != h || cell.width() != w || cell.depth() != d) {
            throw ShapeError("merge_grid cells must share one shape");
        }
    }
    Tensor out({k * h, k * w, d});
    float* dst = out.data().data();
    for (std::int64_t i = 0; i < k; ++i) {
        for (std::int64_t j = 0; j < k; ++j) {
            const float* src = cells[static_cast<std::size_t>(i * k + j)].tensor.data().data();
            for (std::int64_t y = 0; y < h; ++y) {
                std::memcpy(dst + ((i * h + y) * (k * w) + j * w) * d, src + y * w * d,
                            static_cast<std::size_t>(w * d) * sizeof(float));
            }
        }
    }
    return FeatureMap(std::move(out));
}

FeatureMap avg_pool_to(const FeatureMap& map, std::int64_t out_h, std::int64_t out_w) {
    const std::int64_t h = map.height(), w = map.width(), d = map.depth();
    if (out_h < 1 || out_w < 1 || h % out_h != 0 || w % out_w != 0) {
        throw ScaleError("avg_pool_to target " + std::to_string(out_h) + "x" + std::to_string(out_w) +
                         " does not tile " + std::to_string(h) + "x" + std::to_string(w));
    }
    const std::int64_t win_h = h / out_h, win_w = w / out_w;
    if (win_h == 1 && win_w == 1) return map;

    Tensor out({out_h, out_w, d});
    const float* src = map.tensor.data().data();
    float* dst = out.data().data();
    const float inv = 1.0f / static_cast<float>(win_h * win_w);
    const auto& ops = kernels::active();
    for (std::int64_t oy = 0; oy < out_h; ++oy) {
        for (std::int64_t ox = 0; ox < out_w; ++ox) {
            float* cell = dst + (oy * out_w + ox) * d;
            // Window cells accumulate in row-major order.
            for (std::int64_t wy = 0; wy < win_h; ++wy) {
                for (std::int64_t wx = 0; wx < win_w; ++wx) {
                    const float* p = src + ((oy * win_h + wy) * w + ox * win_w + wx) * d;
                    if (wy == 0 && wx == 0) {
                        std::memcpy(cell, p, static_cast<std::size_t>(d) * sizeof(float));
                    } else {
                        ops.vec_add(cell, cell, p, d);
                    }
                }
            }
            ops.vec_scale(cell, cell, inv, d);
        }
    }
    return FeatureMap(std::move(out));
}

FeatureMap concat_channels(const std::vector<FeatureMap>& maps) {
    if (maps.empty()) throw ShapeError("concat_channels needs at least one map");
    const std::int64_t h = maps[0].height(), w = maps[0].width();
    std::int64_t total_d = 0;
    for (const FeatureMap& m : maps) {
        if (m.height() != h || m.width() != w) {
            throw ShapeError("concat_channels spatial mismatch");
        }
        total_d += m.depth();
    }
    Tensor out({h, w, total_d});
    float* dst = out.data().data();
    std::int64_t offset = 0;
    for (const FeatureMap& m : maps) {
        const std::int64_t d = m.depth();
        const float* src = m.tensor.data().data();
        for (std::int64_t cell = 0; cell < h * w; ++cell) {
            std::memcpy(dst + cell * total_d + offset, src + cell * d,
                        static_cast<std::size_t>(d) * sizeof(float));
        }
        offset += d;
    }
    return FeatureMap(std::move(out));
}

FeatureMap add_channels(const std::vector<FeatureMap>& maps) {
    if (maps.empty()) throw ShapeError("add_channels needs at least one map");
    Tensor acc = maps[0].tensor;
    const auto& ops = kernels::active();
    for (std::size_t i = 1; i < maps.size(); ++i) {
        if (!maps[i].tensor.same_shape(acc)) throw ShapeError("add_channels shape mismatch");
        ops.vec_add(acc.data().data(), acc.data().data(), maps[i].tensor.data().data(), acc.size());
    }
    return FeatureMap(std::move(acc));
}

namespace {

// PPM token scanner: skips whitespace and '#' comments between fields.
struct PpmReader {
    std::span<const std::byte> bytes;
    std::size_t pos = 0;

    int peek() const { return pos < bytes.size() ? static_cast<int>(std::to_integer<unsigned char>(bytes[pos])) : -1; }

    void skip_space() {
        while (pos < bytes.size()) {
            const int c = peek();
            if (c == '#') {
                while (pos < bytes.size() && peek() != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::int64_t read_int() {
        skip_space();
        if (pos >= bytes.size() || peek() < '0' || peek() > '9') {
            throw FormatError("ppm: expected integer in header");
        }
        std::int64_t v = 0;
        while (pos < bytes.size() && peek() >= '0' && peek() <= '9') {
            v = v * 10 + (peek() - '0');
            if (v > (1 << 24)) throw FormatError("ppm: header value out of range");
            ++pos;
        }
        return v;
    }
};

} // namespace

Image decode_ppm(std::span<const std::byte> bytes) {
    if (bytes.size() < 2 || std::to_integer<char>(bytes[0]) != 'P' || std::to_integer<char>(bytes[1]) != '6') {
        throw FormatError("ppm: missing P6 magic");
    }
    PpmReader rd{bytes, 2};
    const std::int64_t w = rd.read_int();
    const std::int64_t h = rd.read_int();
    const std::int64_t maxval = rd.read_int();
    if (w < 1 || h < 1) throw FormatError("ppm: bad dimensions");
    if (maxval != 255) throw FormatError("ppm: only maxval 255 is supported");
    // Exactly one whitespace byte separates the header from the payload.
    if (rd.pos >= bytes.size()) throw FormatError("ppm: truncated header");
    ++rd.pos;
    const std::size_t need = static_cast<std::size_t>(w * h * 3);
    if (bytes.size() - rd.pos < need) throw FormatError("ppm: truncated pixel data");

    Tensor t({3, h, w});
    float* dst = t.data().data();
    const std::byte* src = bytes.data() + rd.pos;
    for (std::int64_t y = 0; y < h; ++y) {
        for (std::int64_t x = 0; x < w; ++x) {
            for (std::int64_t c = 0; c < 3; ++c) {
                const auto v = std::to_integer<unsigned char>(src[(y * w + x) * 3 + c]);
                dst[(c * h + y) * w + x] = static_cast<float>(v) / 255.0f;
            }
        }
    }
    return Image(std::move(t));
}

std::vector<std::byte> encode_ppm(const Image& img) {
    if (img.channels() != 3) throw FormatError("ppm: only 3-channel images can be encoded");
    const std::int64_t h = img.height(), w = img.width();
    const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<std::byte> out(header.size() + static_cast<std::size_t>(h * w * 3));
    std::memcpy(out.data(), header.data(), header.size());
    std::byte* px = out.data() + header.size();
    const float* src = img.tensor.data().data();
    for (std::int64_t y = 0; y < h; ++y) {
        for (std::int64_t x = 0; x < w; ++x) {
            for (std::int64_t c = 0; c < 3; ++c) {
                const float v = std::clamp(src[(c * h + y) * w + x], 0.0f, 1.0f);
                px[(y * w + x) * 3 + c] = static_cast<std::byte>(std::lround(v * 255.0f));
            }
        }
    }
    return out;
}

} // namespace s2
