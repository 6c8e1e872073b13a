#include "semclip/projection.hpp"

#include <cmath>

namespace semclip {

namespace {

constexpr double kResidualEps = 1e-8;

double column_dot(const Tensor& m, int ca, int cb) {
    const int d = m.rows(), n = m.cols();
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        s += m.values()[static_cast<long>(i) * n + ca] * m.values()[static_cast<long>(i) * n + cb];
    }
    return s;
}

}  // namespace

int gram_schmidt_columns(Tensor& m,
                         const std::function<void(int, std::vector<double>&)>& draw_column) {
    const int d = m.rows(), n = m.cols();
    int resampled = 0;
    std::vector<double> fresh(d);
    for (int c = 0; c < n; ++c) {
        for (;;) {
            // Subtract projections on the already-final columns.
            for (int prev = 0; prev < c; ++prev) {
                const double dot = column_dot(m, c, prev);
                for (int i = 0; i < d; ++i) {
                    m.values()[static_cast<long>(i) * n + c] -=
                        dot * m.values()[static_cast<long>(i) * n + prev];
                }
            }
            const double norm = std::sqrt(column_dot(m, c, c));
            if (norm >= kResidualEps) {
                for (int i = 0; i < d; ++i) m.values()[static_cast<long>(i) * n + c] /= norm;
                break;
            }
            draw_column(c, fresh);
            for (int i = 0; i < d; ++i) m.values()[static_cast<long>(i) * n + c] = fresh[i];
            ++resampled;
        }
    }
    return resampled;
}

namespace {

void bank_draw(ProjectionBank& bank, int /*column*/, std::vector<double>& out) {
    Rng rng = make_rng(bank.seed, 0x52455341ULL + bank.resample_counter++);  // "RESA"+k
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : out) v = dist(rng);
}

}  // namespace

ProjectionBank init_projection_bank(int d, int n, uint64_t seed, bool normalize, bool learnable) {
    if (!(n > 0 && n < d)) {
        throw ContractError("init_projection_bank: need 0 < n < d, got n=" + std::to_string(n) +
                            ", d=" + std::to_string(d));
    }
    ProjectionBank bank;
    bank.n = n;
    bank.normalize = normalize;
    bank.learnable = learnable;
    bank.seed = seed;
    bank.v = Tensor::zeros({d, n}, learnable);
    Rng rng = make_rng(seed, 0x50524f4aULL);  // "PROJ" stream
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : bank.v.values()) v = dist(rng);
    gram_schmidt_columns(bank.v, [&bank](int c, std::vector<double>& out) {
        bank_draw(bank, c, out);
    });
    return bank;
}

Tensor project(Tape& tape, const Tensor& t, const ProjectionBank& bank) {
    if (t.rank() != 1 || t.shape()[0] != bank.d()) {
        throw ShapeError("project: embedding shape " + shape_str(t.shape()) +
                         " does not match bank dimension " + std::to_string(bank.d()));
    }
    return tape.row(project_rows(tape, tape.as_row(t), bank), 0);
}

Tensor project_rows(Tape& tape, const Tensor& t_rows, const ProjectionBank& bank) {
    if (t_rows.rank() != 2 || t_rows.cols() != bank.d()) {
        throw ShapeError("project_rows: rows shape " + shape_str(t_rows.shape()) +
                         " does not match bank dimension " + std::to_string(bank.d()));
    }
    Tensor p = tape.matmul(t_rows, bank.v);
    if (bank.normalize) p = tape.l2_normalize_rows(p);
    return p;
}

void reorthonormalize(ProjectionBank& bank) {
    if (!bank.learnable) {
        throw ContractError("reorthonormalize: bank is not learnable");
    }
    gram_schmidt_columns(bank.v, [&bank](int c, std::vector<double>& out) {
        bank_draw(bank, c, out);
    });
}

double orthonormality_defect(const ProjectionBank& bank) {
    double worst = 0.0;
    for (int a = 0; a < bank.n; ++a) {
        for (int b = 0; b < bank.n; ++b) {
            const double want = a == b ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(column_dot(bank.v, a, b) - want));
        }
    }
    return worst;
}

}  // namespace semclip
