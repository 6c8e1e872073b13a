#pragma once

#include "semclip/projection.hpp"
#include "semclip/tensor.hpp"

namespace semclip {

/// Non-negative component weights; their sum must stay positive.
struct LossWeights {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 0.0;
};

/// Learnable log-temperature; tau = exp(theta), clamped to tau_max after
/// each optimizer update.
struct TemperatureParam {
    Tensor theta;  // rank-0, trainable
    double tau_max = 100.0;

    static TemperatureParam init(double tau0 = 14.2857, double tau_max = 100.0);
    double tau() const;
    void clamp();
};

/// Symmetric InfoNCE over the tau-scaled cosine matrix of unit-norm rows:
/// (1/2N) sum_i [CE(S_i,:, i) + CE(S_:,i, i)].
Tensor contrastive_loss(Tape& tape, const Tensor& image_rows, const Tensor& text_rows,
                        const Tensor& theta);

/// 1 - cos(p, p_plus), in [0, 2].
Tensor paraphrase_loss(Tape& tape, const Tensor& p, const Tensor& p_plus);

/// max(0, cos(p, p_minus)), zero for any non-positive cosine.
Tensor negation_loss(Tape& tape, const Tensor& p, const Tensor& p_minus);

/// Unit-norm embeddings for one batch; images are constants, text rows sit on
/// the tape.
struct BatchEmbeddings {
    Tensor images;       // B x d
    Tensor texts;        // B x d
    Tensor paraphrases;  // B x d
    Tensor negations;    // B x d
};

struct LossBreakdown {
    double total = 0.0;
    double contrastive = 0.0;
    double paraphrase = 0.0;
    double negation = 0.0;
    double tau = 0.0;
};

/// (alpha*Lc + beta*Lp + gamma*Ln) / (alpha+beta+gamma), with the paraphrase
/// and negation terms batch-averaged over row projections. All three
/// components are evaluated and reported even when their weight is zero.
Tensor total_loss(Tape& tape, const BatchEmbeddings& batch, const LossWeights& weights,
                  const ProjectionBank& bank, const TemperatureParam& temperature,
                  LossBreakdown* breakdown = nullptr);

}  // namespace semclip
