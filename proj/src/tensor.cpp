#include "s2/tensor.hpp"

#include "s2/errors.hpp"
#include "s2/kernels.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace s2 {

namespace {

std::int64_t checked_volume(const std::vector<std::int64_t>& dims) {
    if (dims.empty() || dims.size() > 4) {
        throw ShapeError("tensor rank must be 1..4, got " + std::to_string(dims.size()));
    }
    std::int64_t total = 1;
    for (std::int64_t d : dims) {
        if (d <= 0) throw ShapeError("tensor dims must be positive");
        total *= d;
    }
    return total;
}

} // namespace

Tensor::Tensor(std::vector<std::int64_t> dims)
    : dims_(std::move(dims)), data_(static_cast<std::size_t>(checked_volume(dims_)), 0.0f) {}

Tensor::Tensor(std::vector<std::int64_t> dims, std::vector<float> values) : dims_(std::move(dims)) {
    const std::int64_t total = checked_volume(dims_);
    if (total != static_cast<std::int64_t>(values.size())) {
        throw ShapeError("tensor data length " + std::to_string(values.size()) +
                         " does not match shape volume " + std::to_string(total));
    }
    data_ = std::move(values);
}

Tensor Tensor::full(std::vector<std::int64_t> dims, float value) {
    Tensor t(std::move(dims));
    for (float& v : t.data_) v = value;
    return t;
}

Tensor Tensor::identity(std::int64_t n) {
    Tensor t({n, n});
    for (std::int64_t i = 0; i < n; ++i) t.at(i, i) = 1.0f;
    return t;
}

Tensor Tensor::reshaped(std::vector<std::int64_t> new_dims) const {
    const std::int64_t total = checked_volume(new_dims);
    if (total != size()) {
        throw ShapeError("reshape volume mismatch: " + std::to_string(total) + " vs " + std::to_string(size()));
    }
    return Tensor(std::move(new_dims), data_);
}

bool Tensor::same_bits(const Tensor& other) const {
    return dims_ == other.dims_ &&
           std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i) os << ",";
        os << dims_[i];
    }
    os << "]";
    return os.str();
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw ShapeError("matmul expects rank-2 tensors, got " + a.shape_str() + " x " + b.shape_str());
    }
    if (a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul inner dims differ: " + a.shape_str() + " x " + b.shape_str());
    }
    const std::int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Tensor c({m, n});
    kernels::active().matmul(a.data().data(), b.data().data(), c.data().data(), m, k, n);
    return c;
}

Tensor softmax_rows(const Tensor& a) {
    if (a.rank() != 2) throw ShapeError("softmax_rows expects a rank-2 tensor");
    const std::int64_t m = a.dim(0), n = a.dim(1);
    Tensor out({m, n});
    for (std::int64_t i = 0; i < m; ++i) {
        float rowmax = a.at(i, 0);
        for (std::int64_t j = 0; j < n; ++j) {
            const float v = a.at(i, j);
            if (!std::isfinite(v)) throw NumericError("softmax_rows: non-finite input");
            if (v > rowmax) rowmax = v;
        }
        float sum = 0.0f;
        for (std::int64_t j = 0; j < n; ++j) {
            const float e = std::exp(a.at(i, j) - rowmax);
            out.at(i, j) = e;
            sum += e;
        }
        for (std::int64_t j = 0; j < n; ++j) {
            out.at(i, j) = out.at(i, j) / sum;
        }
    }
    return out;
}

Tensor layernorm(const Tensor& a, const Tensor& gamma, const Tensor& beta, float eps) {
    if (a.rank() != 2) throw ShapeError("layernorm expects a rank-2 tensor");
    const std::int64_t n = a.dim(0), d = a.dim(1);
    if (gamma.rank() != 1 || gamma.dim(0) != d || beta.rank() != 1 || beta.dim(0) != d) {
        throw ShapeError("layernorm affine params must have shape [" + std::to_string(d) + "]");
    }
    Tensor out({n, d});
    for (std::int64_t i = 0; i < n; ++i) {
        float mean = 0.0f;
        for (std::int64_t j = 0; j < d; ++j) mean += a.at(i, j);
        mean /= static_cast<float>(d);
        float var = 0.0f;
        for (std::int64_t j = 0; j < d; ++j) {
            const float delta = a.at(i, j) - mean;
            var += delta * delta;
        }
        var /= static_cast<float>(d);
        const float inv = 1.0f / std::sqrt(var + eps);
        for (std::int64_t j = 0; j < d; ++j) {
            out.at(i, j) = (a.at(i, j) - mean) * inv * gamma.at(j) + beta.at(j);
        }
    }
    return out;
}

Tensor gelu(const Tensor& a) {
    constexpr float kSqrt2OverPi = 0.7978845608028654f;
    Tensor out(a.dims());
    const auto src = a.data();
    auto dst = out.data();
    for (std::int64_t i = 0; i < a.size(); ++i) {
        const float x = src[static_cast<std::size_t>(i)];
        const float inner = kSqrt2OverPi * (x + 0.044715f * x * x * x);
        dst[static_cast<std::size_t>(i)] = 0.5f * x * (1.0f + std::tanh(inner));
    }
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("add shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    }
    Tensor out(a.dims());
    kernels::active().vec_add(out.data().data(), a.data().data(), b.data().data(), a.size());
    return out;
}

Tensor scale(const Tensor& a, float s) {
    Tensor out(a.dims());
    kernels::active().vec_scale(out.data().data(), a.data().data(), s, a.size());
    return out;
}

Tensor add_bias_rows(const Tensor& a, const Tensor& bias) {
    if (a.rank() != 2 || bias.rank() != 1 || bias.dim(0) != a.dim(1)) {
        throw ShapeError("add_bias_rows expects [m,n] and [n], got " + a.shape_str() + " and " + bias.shape_str());
    }
    const std::int64_t m = a.dim(0), n = a.dim(1);
    Tensor out({m, n});
    const auto& ops = kernels::active();
    for (std::int64_t i = 0; i < m; ++i) {
        ops.vec_add(out.data().data() + i * n, a.data().data() + i * n, bias.data().data(), n);
    }
    return out;
}

Tensor transpose2d(const Tensor& a) {
    if (a.rank() != 2) throw ShapeError("transpose2d expects a rank-2 tensor");
    const std::int64_t m = a.dim(0), n = a.dim(1);
    Tensor out({n, m});
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            out.at(j, i) = a.at(i, j);
        }
    }
    return out;
}

} // namespace s2
