#include "semclip/kernels.hpp"

#include <atomic>

namespace semclip::kernels {

namespace {

std::atomic<Mode> g_mode{Mode::Parallel};

// One output row of c = a * b; fixed accumulation order over l.
inline void nn_row(double* c_row, const double* a_row, const double* b,
                   int k, int p, bool acc) {
    if (!acc) {
        for (int j = 0; j < p; ++j) c_row[j] = 0.0;
    }
    for (int l = 0; l < k; ++l) {
        const double s = a_row[l];
        const double* b_row = b + static_cast<long>(l) * p;
        for (int j = 0; j < p; ++j) c_row[j] += s * b_row[j];
    }
}

inline void nt_row(double* c_row, const double* a_row, const double* b,
                   int k, int p, bool acc) {
    for (int j = 0; j < p; ++j) {
        const double* b_row = b + static_cast<long>(j) * k;
        double sum = 0.0;
        for (int l = 0; l < k; ++l) sum += a_row[l] * b_row[l];
        c_row[j] = acc ? c_row[j] + sum : sum;
    }
}

inline void tn_row(double* c_row, const double* a, const double* b,
                   int i, int m, int k, int p, bool acc) {
    if (!acc) {
        for (int j = 0; j < p; ++j) c_row[j] = 0.0;
    }
    for (int l = 0; l < k; ++l) {
        const double s = a[static_cast<long>(l) * m + i];
        const double* b_row = b + static_cast<long>(l) * p;
        for (int j = 0; j < p; ++j) c_row[j] += s * b_row[j];
    }
}

}  // namespace

Mode default_mode() { return g_mode.load(std::memory_order_relaxed); }

void set_default_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }

void gemm_nn(double* c, const double* a, const double* b,
             int m, int k, int p, bool acc, Mode mode) {
    if (mode == Mode::Parallel) {
        #pragma omp parallel for schedule(static)
        for (int i = 0; i < m; ++i) {
            nn_row(c + static_cast<long>(i) * p, a + static_cast<long>(i) * k, b, k, p, acc);
        }
    } else {
        for (int i = 0; i < m; ++i) {
            nn_row(c + static_cast<long>(i) * p, a + static_cast<long>(i) * k, b, k, p, acc);
        }
    }
}

void gemm_nt(double* c, const double* a, const double* b,
             int m, int k, int p, bool acc, Mode mode) {
    if (mode == Mode::Parallel) {
        #pragma omp parallel for schedule(static)
        for (int i = 0; i < m; ++i) {
            nt_row(c + static_cast<long>(i) * p, a + static_cast<long>(i) * k, b, k, p, acc);
        }
    } else {
        for (int i = 0; i < m; ++i) {
            nt_row(c + static_cast<long>(i) * p, a + static_cast<long>(i) * k, b, k, p, acc);
        }
    }
}

void gemm_tn(double* c, const double* a, const double* b,
             int m, int k, int p, bool acc, Mode mode) {
    if (mode == Mode::Parallel) {
        #pragma omp parallel for schedule(static)
        for (int i = 0; i < m; ++i) {
            tn_row(c + static_cast<long>(i) * p, a, b, i, m, k, p, acc);
        }
    } else {
        for (int i = 0; i < m; ++i) {
            tn_row(c + static_cast<long>(i) * p, a, b, i, m, k, p, acc);
        }
    }
}

}  // namespace semclip::kernels
