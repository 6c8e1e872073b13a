#include "semclip/losses.hpp"

#include <cmath>

namespace semclip {

TemperatureParam TemperatureParam::init(double tau0, double tau_max) {
    if (!(tau0 > 0.0) || !(tau_max > 0.0)) {
        throw ContractError("TemperatureParam: tau values must be positive");
    }
    TemperatureParam t;
    t.theta = Tensor::scalar(std::log(tau0), /*requires_grad=*/true);
    t.tau_max = tau_max;
    return t;
}

double TemperatureParam::tau() const { return std::exp(theta.item()); }

void TemperatureParam::clamp() {
    const double cap = std::log(tau_max);
    if (theta.values()[0] > cap) theta.values()[0] = cap;
}

Tensor contrastive_loss(Tape& tape, const Tensor& image_rows, const Tensor& text_rows,
                        const Tensor& theta) {
    if (image_rows.rank() != 2 || text_rows.rank() != 2) {
        throw ShapeError("contrastive_loss: expected rank-2 embedding batches");
    }
    if (image_rows.shape() != text_rows.shape()) {
        throw ShapeError("contrastive_loss: batch shapes disagree, " +
                         shape_str(image_rows.shape()) + " vs " + shape_str(text_rows.shape()));
    }
    const int n = image_rows.rows();
    if (n == 0) throw ContractError("contrastive_loss: empty batch");

    // Unit-norm rows make the matrix product the cosine matrix.
    Tensor tau = tape.exp(theta);
    Tensor s = tape.scale_by(tape.matmul(image_rows, tape.transpose(text_rows)), tau);
    std::vector<Tensor> terms;
    terms.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        terms.push_back(tape.softmax_cross_entropy_row(tape.row(s, i), i));
        terms.push_back(tape.softmax_cross_entropy_row(tape.col(s, i), i));
    }
    return tape.average_scalars(terms);
}

Tensor paraphrase_loss(Tape& tape, const Tensor& p, const Tensor& p_plus) {
    return tape.affine(tape.cosine_similarity(p, p_plus), -1.0, 1.0);
}

Tensor negation_loss(Tape& tape, const Tensor& p, const Tensor& p_minus) {
    return tape.relu(tape.cosine_similarity(p, p_minus));
}

Tensor total_loss(Tape& tape, const BatchEmbeddings& batch, const LossWeights& weights,
                  const ProjectionBank& bank, const TemperatureParam& temperature,
                  LossBreakdown* breakdown) {
    if (weights.alpha < 0.0 || weights.beta < 0.0 || weights.gamma < 0.0) {
        throw ContractError("total_loss: weights must be non-negative");
    }
    const double wsum = weights.alpha + weights.beta + weights.gamma;
    if (!(wsum > 0.0)) throw ContractError("total_loss: weight sum must be positive");

    Tensor contrastive = contrastive_loss(tape, batch.images, batch.texts, temperature.theta);

    Tensor p = project_rows(tape, batch.texts, bank);
    Tensor p_plus = project_rows(tape, batch.paraphrases, bank);
    Tensor p_minus = project_rows(tape, batch.negations, bank);
    Tensor paraphrase = tape.mean(tape.affine(tape.rowwise_cosine(p, p_plus), -1.0, 1.0));
    Tensor negation = tape.mean(tape.relu(tape.rowwise_cosine(p, p_minus)));

    Tensor total;
    auto accumulate = [&](const Tensor& term, double w) {
        if (w == 0.0) return;
        Tensor scaled = tape.affine(term, w / wsum, 0.0);
        total = total.defined() ? tape.add(total, scaled) : scaled;
    };
    accumulate(contrastive, weights.alpha);
    accumulate(paraphrase, weights.beta);
    accumulate(negation, weights.gamma);

    if (breakdown) {
        breakdown->total = total.item();
        breakdown->contrastive = contrastive.item();
        breakdown->paraphrase = paraphrase.item();
        breakdown->negation = negation.item();
        breakdown->tau = temperature.tau();
    }
    return total;
}

}  // namespace semclip
