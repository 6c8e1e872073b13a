#pragma once

namespace semclip::kernels {

enum class Mode { Serial, Parallel };

// Process-wide dispatch for the autodiff layer. Defaults to Parallel.
Mode default_mode();
void set_default_mode(Mode m);

// Row-major GEMM family. Each variant accumulates into c when acc is true and
// overwrites otherwise. The parallel path splits output rows across threads
// and every output element is reduced serially by exactly one thread, so
// Serial and Parallel give bitwise-identical results at any thread count.

// c[m x p] = a[m x k] * b[k x p]
void gemm_nn(double* c, const double* a, const double* b,
             int m, int k, int p, bool acc, Mode mode);

// c[m x p] = a[m x k] * b[p x k]^T
void gemm_nt(double* c, const double* a, const double* b,
             int m, int k, int p, bool acc, Mode mode);

// c[m x p] = a[k x m]^T * b[k x p]
void gemm_tn(double* c, const double* a, const double* b,
             int m, int k, int p, bool acc, Mode mode);

inline void gemm_nn(double* c, const double* a, const double* b,
                    int m, int k, int p, bool acc = false) {
    gemm_nn(c, a, b, m, k, p, acc, default_mode());
}
inline void gemm_nt(double* c, const double* a, const double* b,
                    int m, int k, int p, bool acc = false) {
    gemm_nt(c, a, b, m, k, p, acc, default_mode());
}
inline void gemm_tn(double* c, const double* a, const double* b,
                    int m, int k, int p, bool acc = false) {
    gemm_tn(c, a, b, m, k, p, acc, default_mode());
}

}  // namespace semclip::kernels
