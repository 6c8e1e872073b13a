#include "semclip/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semclip/kernels.hpp"

namespace semclip {

namespace {

long shape_numel(const std::vector<int>& shape) {
    long n = 1;
    for (int d : shape) n *= d;
    return n;
}

void check_finite_shape(const std::vector<int>& shape) {
    if (shape.size() > 2) {
        throw ShapeError("tensor rank " + std::to_string(shape.size()) + " unsupported (max 2)");
    }
    for (int d : shape) {
        if (d <= 0) throw ShapeError("non-positive dimension in shape " + shape_str(shape));
    }
}

}  // namespace

std::string shape_str(const std::vector<int>& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << 'x';
        os << s[i];
    }
    os << ']';
    return os.str();
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
    check_finite_shape(shape);
    auto impl = std::make_shared<Impl>();
    const long n = shape_numel(shape);
    impl->shape = std::move(shape);
    impl->values.assign(n, value);
    impl->grad.assign(n, 0.0);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return full({}, value, requires_grad);
}

Tensor Tensor::from_values(std::vector<int> shape, std::vector<double> values,
                           bool requires_grad) {
    check_finite_shape(shape);
    if (static_cast<long>(values.size()) != shape_numel(shape)) {
        throw ShapeError("value count " + std::to_string(values.size()) +
                         " does not match shape " + shape_str(shape));
    }
    auto impl = std::make_shared<Impl>();
    impl->shape = std::move(shape);
    impl->grad.assign(values.size(), 0.0);
    impl->values = std::move(values);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

const std::vector<int>& Tensor::shape() const { return impl_->shape; }
int Tensor::rank() const { return static_cast<int>(impl_->shape.size()); }
long Tensor::numel() const { return static_cast<long>(impl_->values.size()); }
bool Tensor::is_scalar() const { return numel() == 1; }

int Tensor::rows() const {
    if (rank() != 2) throw ShapeError("rows() on tensor of shape " + shape_str(shape()));
    return impl_->shape[0];
}

int Tensor::cols() const {
    if (rank() != 2) throw ShapeError("cols() on tensor of shape " + shape_str(shape()));
    return impl_->shape[1];
}

double Tensor::item() const {
    if (!is_scalar()) throw ContractError("item() on non-scalar tensor " + shape_str(shape()));
    return impl_->values[0];
}

double Tensor::at(long i) const { return impl_->values.at(i); }

double Tensor::at(int r, int c) const {
    return impl_->values.at(static_cast<long>(r) * cols() + c);
}

std::vector<double>& Tensor::values() const { return impl_->values; }
std::vector<double>& Tensor::grad() const { return impl_->grad; }

bool Tensor::requires_grad() const { return impl_->requires_grad; }
void Tensor::set_requires_grad(bool v) { impl_->requires_grad = v; }

void Tensor::zero_grad() { std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0); }

Tensor Tensor::clone() const {
    auto impl = std::make_shared<Impl>(*impl_);
    std::fill(impl->grad.begin(), impl->grad.end(), 0.0);
    return Tensor(std::move(impl));
}

Tensor Tape::make_output(std::vector<int> shape, bool requires_grad) {
    Tensor t = Tensor::zeros(std::move(shape), requires_grad);
    if (requires_grad) outputs_.push_back(t);
    return t;
}

namespace {

void require_rank(const Tensor& t, int r, const char* op) {
    if (t.rank() != r) {
        throw ShapeError(std::string(op) + ": expected rank " + std::to_string(r) +
                         ", got shape " + shape_str(t.shape()));
    }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
    }
}

double vec_norm(const double* v, long n) {
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

}  // namespace

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "matmul");
    require_rank(b, 2, "matmul");
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions disagree, " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
    }
    const int m = a.rows(), k = a.cols(), p = b.cols();
    Tensor out = make_output({m, p}, a.requires_grad() || b.requires_grad());
    kernels::gemm_nn(out.values().data(), a.values().data(), b.values().data(), m, k, p);
    if (out.requires_grad()) {
        push([a, b, out, m, k, p]() {
            if (a.requires_grad()) {
                kernels::gemm_nt(a.grad().data(), out.grad().data(), b.values().data(),
                                 m, p, k, /*acc=*/true);
            }
            if (b.requires_grad()) {
                kernels::gemm_tn(b.grad().data(), a.values().data(), out.grad().data(),
                                 k, m, p, /*acc=*/true);
            }
        });
    }
    return out;
}

Tensor Tape::transpose(const Tensor& a) {
    require_rank(a, 2, "transpose");
    const int m = a.rows(), n = a.cols();
    Tensor out = make_output({n, m}, a.requires_grad());
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            out.values()[static_cast<long>(j) * m + i] = a.values()[static_cast<long>(i) * n + j];
        }
    }
    if (out.requires_grad()) {
        push([a, out, m, n]() {
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < n; ++j) {
                    a.grad()[static_cast<long>(i) * n + j] +=
                        out.grad()[static_cast<long>(j) * m + i];
                }
            }
        });
    }
    return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = make_output(a.shape(), a.requires_grad() || b.requires_grad());
    const long n = a.numel();
    for (long i = 0; i < n; ++i) out.values()[i] = a.values()[i] + b.values()[i];
    if (out.requires_grad()) {
        push([a, b, out, n]() {
            if (a.requires_grad()) {
                for (long i = 0; i < n; ++i) a.grad()[i] += out.grad()[i];
            }
            if (b.requires_grad()) {
                for (long i = 0; i < n; ++i) b.grad()[i] += out.grad()[i];
            }
        });
    }
    return out;
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out = make_output(a.shape(), a.requires_grad() || b.requires_grad());
    const long n = a.numel();
    for (long i = 0; i < n; ++i) out.values()[i] = a.values()[i] - b.values()[i];
    if (out.requires_grad()) {
        push([a, b, out, n]() {
            if (a.requires_grad()) {
                for (long i = 0; i < n; ++i) a.grad()[i] += out.grad()[i];
            }
            if (b.requires_grad()) {
                for (long i = 0; i < n; ++i) b.grad()[i] -= out.grad()[i];
            }
        });
    }
    return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out = make_output(a.shape(), a.requires_grad() || b.requires_grad());
    const long n = a.numel();
    for (long i = 0; i < n; ++i) out.values()[i] = a.values()[i] * b.values()[i];
    if (out.requires_grad()) {
        push([a, b, out, n]() {
            if (a.requires_grad()) {
                for (long i = 0; i < n; ++i) a.grad()[i] += b.values()[i] * out.grad()[i];
            }
            if (b.requires_grad()) {
                for (long i = 0; i < n; ++i) b.grad()[i] += a.values()[i] * out.grad()[i];
            }
        });
    }
    return out;
}

Tensor Tape::add_row_bias(const Tensor& m, const Tensor& bias) {
    require_rank(m, 2, "add_row_bias");
    require_rank(bias, 1, "add_row_bias");
    if (m.cols() != bias.shape()[0]) {
        throw ShapeError("add_row_bias: " + shape_str(m.shape()) + " vs bias " +
                         shape_str(bias.shape()));
    }
    const int r = m.rows(), c = m.cols();
    Tensor out = make_output({r, c}, m.requires_grad() || bias.requires_grad());
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) {
            out.values()[static_cast<long>(i) * c + j] =
                m.values()[static_cast<long>(i) * c + j] + bias.values()[j];
        }
    }
    if (out.requires_grad()) {
        push([m, bias, out, r, c]() {
            if (m.requires_grad()) {
                for (long i = 0; i < static_cast<long>(r) * c; ++i) m.grad()[i] += out.grad()[i];
            }
            if (bias.requires_grad()) {
                for (int j = 0; j < c; ++j) {
                    double s = 0.0;
                    for (int i = 0; i < r; ++i) s += out.grad()[static_cast<long>(i) * c + j];
                    bias.grad()[j] += s;
                }
            }
        });
    }
    return out;
}

Tensor Tape::affine(const Tensor& a, double scale, double shift) {
    Tensor out = make_output(a.shape(), a.requires_grad());
    const long n = a.numel();
    for (long i = 0; i < n; ++i) out.values()[i] = scale * a.values()[i] + shift;
    if (out.requires_grad()) {
        push([a, out, scale, n]() {
            for (long i = 0; i < n; ++i) a.grad()[i] += scale * out.grad()[i];
        });
    }
    return out;
}

Tensor Tape::scale_by(const Tensor& a, const Tensor& s) {
    if (!s.is_scalar()) throw ContractError("scale_by: scale must be scalar");
    Tensor out = make_output(a.shape(), a.requires_grad() || s.requires_grad());
    const long n = a.numel();
    const double sv = s.values()[0];
    for (long i = 0; i < n; ++i) out.values()[i] = sv * a.values()[i];
    if (out.requires_grad()) {
        push([a, s, out, sv, n]() {
            if (a.requires_grad()) {
                for (long i = 0; i < n; ++i) a.grad()[i] += sv * out.grad()[i];
            }
            if (s.requires_grad()) {
                double acc = 0.0;
                for (long i = 0; i < n; ++i) acc += a.values()[i] * out.grad()[i];
                s.grad()[0] += acc;
            }
        });
    }
    return out;
}

Tensor Tape::exp(const Tensor& a) {
    Tensor out = make_output(a.shape(), a.requires_grad());
    const long n = a.numel();
    for (long i = 0; i < n; ++i) out.values()[i] = std::exp(a.values()[i]);
    if (out.requires_grad()) {
        push([a, out, n]() {
            for (long i = 0; i < n; ++i) a.grad()[i] += out.values()[i] * out.grad()[i];
        });
    }
    return out;
}

Tensor Tape::tanh(const Tensor& a) {
    Tensor out = make_output(a.shape(), a.requires_grad());
    const long n = a.numel();
    for (long i = 0; i < n; ++i) out.values()[i] = std::tanh(a.values()[i]);
    if (out.requires_grad()) {
        push([a, out, n]() {
            for (long i = 0; i < n; ++i) {
                const double y = out.values()[i];
                a.grad()[i] += (1.0 - y * y) * out.grad()[i];
            }
        });
    }
    return out;
}

Tensor Tape::relu(const Tensor& a) {
    Tensor out = make_output(a.shape(), a.requires_grad());
    const long n = a.numel();
    for (long i = 0; i < n; ++i) out.values()[i] = a.values()[i] > 0.0 ? a.values()[i] : 0.0;
    if (out.requires_grad()) {
        push([a, out, n]() {
            for (long i = 0; i < n; ++i) {
                if (a.values()[i] > 0.0) a.grad()[i] += out.grad()[i];
            }
        });
    }
    return out;
}

Tensor Tape::l2_normalize(const Tensor& v) {
    require_rank(v, 1, "l2_normalize");
    const long n = v.numel();
    const double norm = vec_norm(v.values().data(), n);
    if (norm <= kNormEps) {
        throw DegenerateError("l2_normalize: vector norm " + std::to_string(norm) +
                              " below " + std::to_string(kNormEps));
    }
    Tensor out = make_output(v.shape(), v.requires_grad());
    for (long i = 0; i < n; ++i) out.values()[i] = v.values()[i] / norm;
    if (out.requires_grad()) {
        push([v, out, norm, n]() {
            double dot = 0.0;
            for (long i = 0; i < n; ++i) dot += out.grad()[i] * out.values()[i];
            for (long i = 0; i < n; ++i) {
                v.grad()[i] += (out.grad()[i] - dot * out.values()[i]) / norm;
            }
        });
    }
    return out;
}

Tensor Tape::l2_normalize_rows(const Tensor& m) {
    require_rank(m, 2, "l2_normalize_rows");
    const int r = m.rows(), c = m.cols();
    Tensor out = make_output({r, c}, m.requires_grad());
    std::vector<double> norms(r);
    for (int i = 0; i < r; ++i) {
        const double* row = m.values().data() + static_cast<long>(i) * c;
        const double norm = vec_norm(row, c);
        if (norm <= kNormEps) {
            throw DegenerateError("l2_normalize_rows: row " + std::to_string(i) +
                                  " has near-zero norm");
        }
        norms[i] = norm;
        for (int j = 0; j < c; ++j) out.values()[static_cast<long>(i) * c + j] = row[j] / norm;
    }
    if (out.requires_grad()) {
        push([m, out, norms, r, c]() {
            for (int i = 0; i < r; ++i) {
                const long off = static_cast<long>(i) * c;
                double dot = 0.0;
                for (int j = 0; j < c; ++j) dot += out.grad()[off + j] * out.values()[off + j];
                for (int j = 0; j < c; ++j) {
                    m.grad()[off + j] +=
                        (out.grad()[off + j] - dot * out.values()[off + j]) / norms[i];
                }
            }
        });
    }
    return out;
}

Tensor Tape::cosine_similarity(const Tensor& a, const Tensor& b) {
    require_rank(a, 1, "cosine_similarity");
    require_same_shape(a, b, "cosine_similarity");
    const long n = a.numel();
    const double na = vec_norm(a.values().data(), n);
    const double nb = vec_norm(b.values().data(), n);
    if (na <= kNormEps || nb <= kNormEps) {
        throw DegenerateError("cosine_similarity: near-zero operand norm");
    }
    double dot = 0.0;
    for (long i = 0; i < n; ++i) dot += a.values()[i] * b.values()[i];
    const double cos = dot / (na * nb);
    Tensor out = make_output({}, a.requires_grad() || b.requires_grad());
    out.values()[0] = cos;
    if (out.requires_grad()) {
        push([a, b, out, na, nb, cos, n]() {
            const double g = out.grad()[0];
            if (a.requires_grad()) {
                for (long i = 0; i < n; ++i) {
                    a.grad()[i] += g * (b.values()[i] / (na * nb) -
                                        cos * a.values()[i] / (na * na));
                }
            }
            if (b.requires_grad()) {
                for (long i = 0; i < n; ++i) {
                    b.grad()[i] += g * (a.values()[i] / (na * nb) -
                                        cos * b.values()[i] / (nb * nb));
                }
            }
        });
    }
    return out;
}

Tensor Tape::rowwise_cosine(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "rowwise_cosine");
    require_same_shape(a, b, "rowwise_cosine");
    const int r = a.rows(), c = a.cols();
    Tensor out = make_output({r}, a.requires_grad() || b.requires_grad());
    std::vector<double> nas(r), nbs(r);
    for (int i = 0; i < r; ++i) {
        const long off = static_cast<long>(i) * c;
        const double na = vec_norm(a.values().data() + off, c);
        const double nb = vec_norm(b.values().data() + off, c);
        if (na <= kNormEps || nb <= kNormEps) {
            throw DegenerateError("rowwise_cosine: near-zero norm at row " + std::to_string(i));
        }
        double dot = 0.0;
        for (int j = 0; j < c; ++j) dot += a.values()[off + j] * b.values()[off + j];
        nas[i] = na;
        nbs[i] = nb;
        out.values()[i] = dot / (na * nb);
    }
    if (out.requires_grad()) {
        push([a, b, out, nas, nbs, r, c]() {
            for (int i = 0; i < r; ++i) {
                const long off = static_cast<long>(i) * c;
                const double g = out.grad()[i];
                if (g == 0.0) continue;
                const double cos = out.values()[i];
                const double na = nas[i], nb = nbs[i];
                if (a.requires_grad()) {
                    for (int j = 0; j < c; ++j) {
                        a.grad()[off + j] += g * (b.values()[off + j] / (na * nb) -
                                                  cos * a.values()[off + j] / (na * na));
                    }
                }
                if (b.requires_grad()) {
                    for (int j = 0; j < c; ++j) {
                        b.grad()[off + j] += g * (a.values()[off + j] / (na * nb) -
                                                  cos * b.values()[off + j] / (nb * nb));
                    }
                }
            }
        });
    }
    return out;
}

Tensor Tape::softmax_cross_entropy_row(const Tensor& logits, int target) {
    require_rank(logits, 1, "softmax_cross_entropy_row");
    const long n = logits.numel();
    if (target < 0 || target >= n) {
        throw IndexError("softmax_cross_entropy_row: target " + std::to_string(target) +
                         " outside [0, " + std::to_string(n) + ")");
    }
    double maxv = logits.values()[0];
    for (long i = 1; i < n; ++i) maxv = std::max(maxv, logits.values()[i]);
    double sum = 0.0;
    std::vector<double> probs(n);
    for (long i = 0; i < n; ++i) {
        probs[i] = std::exp(logits.values()[i] - maxv);
        sum += probs[i];
    }
    for (long i = 0; i < n; ++i) probs[i] /= sum;
    const double loss = -(logits.values()[target] - maxv - std::log(sum));
    Tensor out = make_output({}, logits.requires_grad());
    out.values()[0] = loss;
    if (out.requires_grad()) {
        push([logits, out, probs = std::move(probs), target, n]() {
            const double g = out.grad()[0];
            for (long i = 0; i < n; ++i) {
                logits.grad()[i] += g * (probs[i] - (i == target ? 1.0 : 0.0));
            }
        });
    }
    return out;
}

Tensor Tape::row(const Tensor& m, int i) {
    require_rank(m, 2, "row");
    if (i < 0 || i >= m.rows()) {
        throw IndexError("row: index " + std::to_string(i) + " outside [0, " +
                         std::to_string(m.rows()) + ")");
    }
    const int c = m.cols();
    Tensor out = make_output({c}, m.requires_grad());
    const long off = static_cast<long>(i) * c;
    for (int j = 0; j < c; ++j) out.values()[j] = m.values()[off + j];
    if (out.requires_grad()) {
        push([m, out, off, c]() {
            for (int j = 0; j < c; ++j) m.grad()[off + j] += out.grad()[j];
        });
    }
    return out;
}

Tensor Tape::col(const Tensor& m, int j) {
    require_rank(m, 2, "col");
    if (j < 0 || j >= m.cols()) {
        throw IndexError("col: index " + std::to_string(j) + " outside [0, " +
                         std::to_string(m.cols()) + ")");
    }
    const int r = m.rows(), c = m.cols();
    Tensor out = make_output({r}, m.requires_grad());
    for (int i = 0; i < r; ++i) out.values()[i] = m.values()[static_cast<long>(i) * c + j];
    if (out.requires_grad()) {
        push([m, out, r, c, j]() {
            for (int i = 0; i < r; ++i) m.grad()[static_cast<long>(i) * c + j] += out.grad()[i];
        });
    }
    return out;
}

Tensor Tape::as_row(const Tensor& v) {
    require_rank(v, 1, "as_row");
    const int n = static_cast<int>(v.numel());
    Tensor out = make_output({1, n}, v.requires_grad());
    for (int j = 0; j < n; ++j) out.values()[j] = v.values()[j];
    if (out.requires_grad()) {
        push([v, out, n]() {
            for (int j = 0; j < n; ++j) v.grad()[j] += out.grad()[j];
        });
    }
    return out;
}

Tensor Tape::sum(const Tensor& a) {
    Tensor out = make_output({}, a.requires_grad());
    double s = 0.0;
    for (double v : a.values()) s += v;
    out.values()[0] = s;
    if (out.requires_grad()) {
        const long n = a.numel();
        push([a, out, n]() {
            const double g = out.grad()[0];
            for (long i = 0; i < n; ++i) a.grad()[i] += g;
        });
    }
    return out;
}

Tensor Tape::mean(const Tensor& a) {
    const long n = a.numel();
    Tensor out = make_output({}, a.requires_grad());
    double s = 0.0;
    for (double v : a.values()) s += v;
    out.values()[0] = s / static_cast<double>(n);
    if (out.requires_grad()) {
        push([a, out, n]() {
            const double g = out.grad()[0] / static_cast<double>(n);
            for (long i = 0; i < n; ++i) a.grad()[i] += g;
        });
    }
    return out;
}

Tensor Tape::average_scalars(const std::vector<Tensor>& xs) {
    if (xs.empty()) throw ContractError("average_scalars: empty input");
    bool rg = false;
    double s = 0.0;
    for (const Tensor& x : xs) {
        if (!x.is_scalar()) throw ContractError("average_scalars: non-scalar input");
        s += x.values()[0];
        rg = rg || x.requires_grad();
    }
    const double n = static_cast<double>(xs.size());
    Tensor out = make_output({}, rg);
    out.values()[0] = s / n;
    if (rg) {
        push([xs, out, n]() {
            const double g = out.grad()[0] / n;
            for (const Tensor& x : xs) {
                if (x.requires_grad()) x.grad()[0] += g;
            }
        });
    }
    return out;
}

Tensor Tape::embed_mean_pool(const Tensor& table,
                             const std::vector<std::vector<int>>& sequences) {
    require_rank(table, 2, "embed_mean_pool");
    const int rows = static_cast<int>(sequences.size());
    if (rows == 0) throw ContractError("embed_mean_pool: empty batch");
    const int v = table.rows(), c = table.cols();
    for (const auto& seq : sequences) {
        if (seq.empty()) throw ContractError("embed_mean_pool: empty index sequence");
        for (int idx : seq) {
            if (idx < 0 || idx >= v) {
                throw IndexError("embed_mean_pool: index " + std::to_string(idx) +
                                 " outside [0, " + std::to_string(v) + ")");
            }
        }
    }
    Tensor out = make_output({rows, c}, table.requires_grad());
    for (int b = 0; b < rows; ++b) {
        double* dst = out.values().data() + static_cast<long>(b) * c;
        const double inv = 1.0 / static_cast<double>(sequences[b].size());
        for (int idx : sequences[b]) {
            const double* src = table.values().data() + static_cast<long>(idx) * c;
            for (int j = 0; j < c; ++j) dst[j] += src[j];
        }
        for (int j = 0; j < c; ++j) dst[j] *= inv;
    }
    if (out.requires_grad()) {
        push([table, out, sequences, rows, c]() {
            for (int b = 0; b < rows; ++b) {
                const double* g = out.grad().data() + static_cast<long>(b) * c;
                const double inv = 1.0 / static_cast<double>(sequences[b].size());
                for (int idx : sequences[b]) {
                    double* dst = table.grad().data() + static_cast<long>(idx) * c;
                    for (int j = 0; j < c; ++j) dst[j] += inv * g[j];
                }
            }
        });
    }
    return out;
}

void Tape::backward(const Tensor& root) {
    if (!root.defined() || !root.is_scalar()) {
        throw ContractError("backward: root must be a scalar tensor");
    }
    root.grad()[0] += 1.0;
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) (*it)();
    // Clean slate for the next sweep over this tape; leaf accumulators are
    // untouched.
    for (Tensor& t : outputs_) t.zero_grad();
}

double finite_difference_check(const ScalarFn& f, const Tensor& x, double step) {
    const double kInf = std::numeric_limits<double>::infinity();

    Tensor xg = x.clone();
    xg.set_requires_grad(true);
    Tape tape;
    Tensor y = f(tape, xg);
    if (!y.is_scalar()) throw ContractError("finite_difference_check: f must return a scalar");
    if (!std::isfinite(y.item())) return kInf;
    tape.backward(y);
    const std::vector<double> analytic = xg.grad();

    Tensor probe = x.clone();
    probe.set_requires_grad(false);
    double worst = 0.0;
    for (long i = 0; i < probe.numel(); ++i) {
        const double orig = probe.values()[i];
        probe.values()[i] = orig + step;
        Tape tp;
        const double fp = f(tp, probe).item();
        probe.values()[i] = orig - step;
        Tape tm;
        const double fm = f(tm, probe).item();
        probe.values()[i] = orig;
        const double numeric = (fp - fm) / (2.0 * step);
        if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(analytic[i])) return kInf;
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    return worst;
}

}  // namespace semclip
