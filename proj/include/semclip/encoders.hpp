#pragma once

#include <string>
#include <vector>

#include "semclip/scene.hpp"
#include "semclip/tensor.hpp"

namespace semclip {

/// Trainable text side: token embedding table plus a two-layer tanh MLP from
/// the pooled token space into the shared embedding space.
struct TextEncoderParams {
    Tensor token_table;  // |vocab| x d_tok
    Tensor w1;           // d_tok x d_hidden
    Tensor b1;           // d_hidden
    Tensor w2;           // d_hidden x d
    Tensor b2;           // d

    std::vector<Tensor> parameters() { return {token_table, w1, b1, w2, b2}; }
};

/// Frozen random projection of the one-hot scene features. Never receives
/// gradient updates; optional Gaussian noise is applied per embedding draw.
struct ImageEncoderParams {
    Tensor w_img;  // kSceneFeatureDim x d
    double noise_sigma = 0.0;
};

std::pair<TextEncoderParams, ImageEncoderParams> init_encoders(uint64_t seed, int d, int d_tok);

/// Whitespace tokens mapped through the closed vocabulary, then <eos>.
std::vector<int> tokenize(const std::string& caption, const Vocabulary& vocab);

/// Mean-pool token embeddings, two affine layers with tanh, l2-normalize.
Tensor encode_text(Tape& tape, const std::vector<int>& indices, const TextEncoderParams& p);
Tensor encode_text_batch(Tape& tape, const std::vector<std::vector<int>>& sequences,
                         const TextEncoderParams& p);

/// Unit-norm embedding of the frozen scene-feature projection. Advances rng
/// only when noise_sigma > 0; with sigma = 0 equal scenes embed identically.
Tensor encode_image(const Scene& scene, const ImageEncoderParams& p, Rng& rng);

/// Stack of encode_image results, one row per scene, each drawn from its own
/// stream derived from (seed, row).
Tensor encode_image_batch(const std::vector<Scene>& scenes, const ImageEncoderParams& p,
                          uint64_t seed);

}  // namespace semclip
