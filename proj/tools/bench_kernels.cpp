// Times the serial reference kernels against the OpenMP path on the matrix
// shapes the training loop actually produces, and checks the two paths agree
// bitwise.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "semclip/kernels.hpp"

using semclip::kernels::Mode;

namespace {

struct Case {
    const char* name;
    int m, k, p;
};

double time_gemm(void (*fn)(double*, const double*, const double*, int, int, int, bool, Mode),
                 std::vector<double>& c, const std::vector<double>& a,
                 const std::vector<double>& b, const Case& cs, Mode mode, int reps) {
    // warmup
    fn(c.data(), a.data(), b.data(), cs.m, cs.k, cs.p, false, mode);
    const double t0 = omp_get_wtime();
    for (int r = 0; r < reps; ++r) {
        fn(c.data(), a.data(), b.data(), cs.m, cs.k, cs.p, false, mode);
    }
    return (omp_get_wtime() - t0) / reps;
}

}  // namespace

int main() {
    const Case cases[] = {
        {"pool_affine (192x32x64)", 192, 32, 64},
        {"hidden_affine (192x64x64)", 192, 64, 64},
        {"similarity (64x64x64)", 64, 64, 64},
        {"retrieval (512x64x512)", 512, 64, 512},
        {"headroom (512x512x512)", 512, 512, 512},
    };

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %12s %12s %9s %8s\n", "case", "serial (ms)", "parallel (ms)", "speedup",
                "bitwise");

    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist(0.0, 1.0);
    int mismatches = 0;
    for (const Case& cs : cases) {
        std::vector<double> a(static_cast<long>(cs.m) * cs.k);
        std::vector<double> b(static_cast<long>(cs.k) * cs.p);
        std::vector<double> c_serial(static_cast<long>(cs.m) * cs.p);
        std::vector<double> c_parallel(c_serial.size());
        for (double& v : a) v = dist(rng);
        for (double& v : b) v = dist(rng);

        const long flops = 2L * cs.m * cs.k * cs.p;
        const int reps = std::max(1, static_cast<int>(2e8 / static_cast<double>(flops)));

        const double ts = time_gemm(semclip::kernels::gemm_nn, c_serial, a, b, cs, Mode::Serial,
                                    reps);
        const double tp = time_gemm(semclip::kernels::gemm_nn, c_parallel, a, b, cs,
                                    Mode::Parallel, reps);

        bool same = true;
        for (std::size_t i = 0; i < c_serial.size(); ++i) {
            if (c_serial[i] != c_parallel[i]) {
                same = false;
                break;
            }
        }
        if (!same) ++mismatches;
        std::printf("%-28s %12.3f %12.3f %8.2fx %8s\n", cs.name, ts * 1e3, tp * 1e3, ts / tp,
                    same ? "yes" : "NO");
    }
    if (mismatches > 0) {
        std::printf("FAIL: %d case(s) diverged between serial and parallel\n", mismatches);
        return 1;
    }
    return 0;
}
