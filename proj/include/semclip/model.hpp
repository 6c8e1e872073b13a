#pragma once

#include "semclip/encoders.hpp"
#include "semclip/losses.hpp"
#include "semclip/projection.hpp"

namespace semclip {

/// Everything the trainer updates and the evaluator reads, plus the frozen
/// image side. The image encoder and, unless learnable, the projection bank
/// stay outside the trainable set.
struct Model {
    TextEncoderParams text;
    ImageEncoderParams image;
    ProjectionBank bank;
    TemperatureParam temperature;
    int d = 0;
    int d_tok = 0;
    uint64_t seed = 0;
    uint64_t vocab_hash = 0;

    std::vector<Tensor> trainable_parameters();
};

Model init_model(uint64_t seed, int d, int d_tok, int proj_n, bool proj_normalize,
                 bool proj_learnable, double tau_init, double tau_max, double image_sigma,
                 uint64_t vocab_hash);

/// Deep copy; parameter storage is duplicated so snapshots stay immutable.
Model clone_model(const Model& m);

}  // namespace semclip
