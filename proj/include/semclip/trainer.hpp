#pragma once

#include <string>
#include <vector>

#include "semclip/dataset.hpp"
#include "semclip/model.hpp"

namespace semclip {

struct TrainConfig {
    int epochs = 200;
    double peak_lr = 5e-5;
    int warmup_steps = 50;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double weight_decay = 0.2;
    int accumulation_steps = 2;
    double clip_max_norm = 1.0;
    int batch_size = 64;
    uint64_t seed = 42;
    LossWeights weights{1.0, 1.0, 1.0};
    int proj_n = 2;
    bool proj_normalize = false;
    bool proj_learnable = true;
    int d = 64;
    int d_tok = 32;
    double tau_init = 14.2857;
    double tau_max = 100.0;
    double image_noise_sigma = 1.0;

    void validate() const;
};

/// Per-parameter Adam moment accumulators plus the shared step counter.
struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    long step = 0;

    static AdamState init(const std::vector<Tensor>& params);
};

/// Linear warmup to peak_lr over warmup_steps update steps, then cosine
/// annealing (no restarts) to exactly zero at the final step. Steps beyond
/// the end clamp to the final value.
double lr_schedule(long step, long total_steps, const TrainConfig& cfg);

/// Joint global-norm clipping over every trainable gradient; returns the
/// pre-clip norm.
double clip_gradients(std::vector<Tensor>& params, double max_norm);

/// Bias-corrected Adam update with decoupled weight decay. Throws
/// NumericError on non-finite gradients without touching any parameter.
void adamw_step(std::vector<Tensor>& params, AdamState& state, double lr,
                const TrainConfig& cfg);

struct LossLogRow {
    long step = 0;
    double lr = 0.0;
    double total = 0.0;
    double contrastive = 0.0;
    double paraphrase = 0.0;
    double negation = 0.0;
    double tau = 0.0;
};

struct TrainResult {
    Model model;
    std::vector<LossLogRow> log;
    long total_update_steps = 0;
    bool aborted = false;
    std::string abort_reason;
};

/// Deterministic full training loop: seeded shuffle, gradient accumulation
/// with averaged micro-batch gradients, joint clipping, AdamW, temperature
/// clamp, and re-orthonormalization of a learnable bank after every update.
/// On a non-finite loss the run aborts and the last end-of-epoch snapshot is
/// returned as the model.
TrainResult train(const TrainConfig& cfg, const Dataset& data);

void write_loss_log_csv(const std::vector<LossLogRow>& rows, const std::string& path);

}  // namespace semclip
