#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace s2 {

// Dense row-major array of 32-bit floats, rank 1 to 4.
//
// Arithmetic over Tensors is deterministic by contract: every reduction
// accumulates left to right, so evaluating the same operation on the same
// inputs twice produces byte-identical results. Operations never mutate
// their inputs; treat constructed tensors as immutable and share them
// freely across threads.
class Tensor {
public:
    Tensor() = default;

    // Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::int64_t> dims);

    // Takes ownership of `values`; length must equal the product of dims.
    Tensor(std::vector<std::int64_t> dims, std::vector<float> values);

    static Tensor full(std::vector<std::int64_t> dims, float value);
    static Tensor identity(std::int64_t n);

    const std::vector<std::int64_t>& dims() const { return dims_; }
    std::int64_t rank() const { return static_cast<std::int64_t>(dims_.size()); }
    std::int64_t dim(std::int64_t i) const { return dims_[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

    std::span<const float> data() const { return data_; }
    // Writable view for filling a freshly constructed tensor. Do not
    // mutate a tensor after it has been shared.
    std::span<float> data() { return data_; }

    float at(std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }
    float at(std::int64_t i, std::int64_t j) const {
        return data_[static_cast<std::size_t>(i * dims_[1] + j)];
    }
    float at(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }
    float at(std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t l) const {
        return data_[static_cast<std::size_t>(((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l)];
    }

    float& at(std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    float& at(std::int64_t i, std::int64_t j) {
        return data_[static_cast<std::size_t>(i * dims_[1] + j)];
    }
    float& at(std::int64_t i, std::int64_t j, std::int64_t k) {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }
    float& at(std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t l) {
        return data_[static_cast<std::size_t>(((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l)];
    }

    // Copy with a new shape of equal element count.
    Tensor reshaped(std::vector<std::int64_t> new_dims) const;

    bool same_shape(const Tensor& other) const { return dims_ == other.dims_; }
    // Shape and payload equal byte for byte.
    bool same_bits(const Tensor& other) const;

    std::string shape_str() const;

private:
    std::vector<std::int64_t> dims_;
    std::vector<float> data_;
};

// c[i,j] = sum_t a[i,t] * b[t,j], accumulated t = 0..k-1.
Tensor matmul(const Tensor& a, const Tensor& b);

// Row-wise softmax of a rank-2 tensor, stabilized by row-max subtraction.
// Throws NumericError on non-finite input.
Tensor softmax_rows(const Tensor& a);

// Per-row normalization of a rank-2 tensor to mean 0 / variance 1
// (population variance, divisor d) followed by gamma * x + beta.
Tensor layernorm(const Tensor& a, const Tensor& gamma, const Tensor& beta, float eps);

// Elementwise 0.5 * x * (1 + tanh(sqrt(2/pi) * (x + 0.044715 * x^3))).
Tensor gelu(const Tensor& a);

// Elementwise sum, shapes must match exactly.
Tensor add(const Tensor& a, const Tensor& b);

// Elementwise multiply by a scalar.
Tensor scale(const Tensor& a, float s);

// a[m,n] with bias[n] added to every row.
Tensor add_bias_rows(const Tensor& a, const Tensor& bias);

Tensor transpose2d(const Tensor& a);

} // namespace s2
