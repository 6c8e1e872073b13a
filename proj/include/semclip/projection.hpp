#pragma once

#include "semclip/tensor.hpp"
#include "semclip/rng.hpp"

namespace semclip {

/// n orthonormal direction vectors in R^d, stored as the columns of a d x n
/// matrix. Directions are drawn standard-normal, orthogonalized by
/// Gram-Schmidt and unit-normalized; columns whose residual collapses are
/// resampled from the bank's seeded stream.
struct ProjectionBank {
    Tensor v;  // d x n; requires_grad == learnable
    int n = 0;
    bool normalize = false;
    bool learnable = false;
    uint64_t seed = 0;
    uint64_t resample_counter = 0;

    int d() const { return v.rows(); }
};

ProjectionBank init_projection_bank(int d, int n, uint64_t seed, bool normalize, bool learnable);

/// Gram-Schmidt over the columns of a d x n matrix, in place. Columns whose
/// residual norm falls below 1e-8 are replaced from draw_column and the pass
/// restarts on that column. Returns the number of resampled columns.
int gram_schmidt_columns(Tensor& m, const std::function<void(int, std::vector<double>&)>& draw_column);

/// p(t) = V^T t, optionally l2-normalized. Gradients flow into t always and
/// into V only when the bank is learnable. A normalized projection whose norm
/// falls below 1e-12 raises DegenerateError rather than being clamped.
Tensor project(Tape& tape, const Tensor& t, const ProjectionBank& bank);

/// Batched projection of unit-norm rows: rows(t) x V -> rows x n.
Tensor project_rows(Tape& tape, const Tensor& t_rows, const ProjectionBank& bank);

/// Reapplies Gram-Schmidt after an optimizer step so the orthonormality
/// invariant holds throughout training. Only meaningful for learnable banks.
void reorthonormalize(ProjectionBank& bank);

/// max |V^T V - I| entry; the orthonormality defect.
double orthonormality_defect(const ProjectionBank& bank);

}  // namespace semclip
