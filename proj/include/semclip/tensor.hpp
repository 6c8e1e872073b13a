#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "semclip/errors.hpp"

namespace semclip {

constexpr double kNormEps = 1e-12;

/// Dense fp64 tensor of rank 0..2 with a same-shape gradient accumulator.
/// Copying a Tensor copies the handle; values and grad are shared.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
    static Tensor full(std::vector<int> shape, double value, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);
    static Tensor from_values(std::vector<int> shape, std::vector<double> values,
                              bool requires_grad = false);

    bool defined() const { return impl_ != nullptr; }
    const std::vector<int>& shape() const;
    int rank() const;
    long numel() const;
    bool is_scalar() const;  // exactly one element, any rank
    int rows() const;        // rank-2 only
    int cols() const;        // rank-2 only

    double item() const;  // scalar only
    double at(long i) const;
    double at(int r, int c) const;

    // Reference-semantic handle: storage is shared and stays mutable through
    // const handles, mirroring shared_ptr.
    std::vector<double>& values() const;
    std::vector<double>& grad() const;

    bool requires_grad() const;
    void set_requires_grad(bool v);
    void zero_grad();

    /// Deep copy with fresh storage; grad zeroed, requires_grad preserved.
    Tensor clone() const;
    bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

private:
    struct Impl {
        std::vector<int> shape;
        std::vector<double> values;
        std::vector<double> grad;
        bool requires_grad = false;
    };
    std::shared_ptr<Impl> impl_;
    explicit Tensor(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

    friend class Tape;
};

std::string shape_str(const std::vector<int>& s);

/// Reverse-mode tape. Every op evaluates eagerly and, when some input
/// requires a gradient, records a backward closure. backward() replays the
/// closures in exact reverse execution order; leaf gradients accumulate
/// additively across calls until zero_grad().
class Tape {
public:
    Tensor matmul(const Tensor& a, const Tensor& b);
    Tensor transpose(const Tensor& a);
    Tensor add(const Tensor& a, const Tensor& b);
    Tensor sub(const Tensor& a, const Tensor& b);
    Tensor mul(const Tensor& a, const Tensor& b);
    /// m[i,:] + bias for every row i (the only broadcast supported).
    Tensor add_row_bias(const Tensor& m, const Tensor& bias);
    /// scale*a + shift, elementwise with constant coefficients.
    Tensor affine(const Tensor& a, double scale, double shift);
    /// a scaled by a scalar tensor (used for the learnable temperature).
    Tensor scale_by(const Tensor& a, const Tensor& s);
    Tensor exp(const Tensor& a);
    Tensor tanh(const Tensor& a);
    /// max(0, x); subgradient at exactly 0 is defined as 0.
    Tensor relu(const Tensor& a);
    Tensor l2_normalize(const Tensor& v);
    Tensor l2_normalize_rows(const Tensor& m);
    Tensor cosine_similarity(const Tensor& a, const Tensor& b);
    /// Per-row cosine between matching rows of two equal-shape matrices.
    Tensor rowwise_cosine(const Tensor& a, const Tensor& b);
    /// -log softmax(logits)[target], max-subtraction stabilized.
    Tensor softmax_cross_entropy_row(const Tensor& logits, int target);
    Tensor row(const Tensor& m, int i);
    Tensor col(const Tensor& m, int j);
    /// Rank-1 vector viewed as a 1 x n matrix.
    Tensor as_row(const Tensor& v);
    Tensor sum(const Tensor& a);
    Tensor mean(const Tensor& a);
    Tensor average_scalars(const std::vector<Tensor>& xs);
    /// out[b,:] = mean of table rows selected by sequences[b]. Sequences must
    /// be non-empty and indices in range.
    Tensor embed_mean_pool(const Tensor& table,
                           const std::vector<std::vector<int>>& sequences);

    /// Seeds root with d(root)/d(root) = 1 and replays the recorded closures
    /// in reverse. Gradients of op outputs (intermediates) are cleared after
    /// the sweep; leaf gradients keep accumulating across calls until their
    /// owner resets them.
    void backward(const Tensor& root);

    std::size_t size() const { return records_.size(); }
    void clear() {
        records_.clear();
        outputs_.clear();
    }

private:
    std::vector<std::function<void()>> records_;
    std::vector<Tensor> outputs_;

    void push(std::function<void()> fn) { records_.push_back(std::move(fn)); }
    Tensor make_output(std::vector<int> shape, bool requires_grad);
};

/// Central-difference gradient audit for a scalar function of one tensor.
/// Returns the worst relative error between the analytic gradient (reverse
/// sweep) and the central difference, with denominator
/// max(|analytic|, |numeric|, 1e-8). Any NaN encountered yields +infinity.
using ScalarFn = std::function<Tensor(Tape&, const Tensor&)>;
double finite_difference_check(const ScalarFn& f, const Tensor& x, double step = 1e-5);

}  // namespace semclip
