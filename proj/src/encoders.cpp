#include "semclip/encoders.hpp"

#include <cmath>
#include <sstream>

#include "semclip/kernels.hpp"

namespace semclip {

namespace {

Tensor scaled_normal(std::vector<int> shape, double stddev, Rng& rng, bool requires_grad) {
    Tensor t = Tensor::zeros(std::move(shape), requires_grad);
    std::normal_distribution<double> dist(0.0, stddev);
    for (double& v : t.values()) v = dist(rng);
    return t;
}

}  // namespace

std::pair<TextEncoderParams, ImageEncoderParams> init_encoders(uint64_t seed, int d, int d_tok) {
    if (d <= 0 || d_tok <= 0) throw ContractError("init_encoders: dimensions must be positive");
    const Vocabulary vocab;
    const int d_hidden = 2 * d;

    Rng rng = make_rng(seed, 0x454e43ULL);  // "ENC" stream
    TextEncoderParams text;
    // Token embeddings start near zero so a token that never receives
    // gradients (e.g. "not" under a contrastive-only objective) barely moves
    // a pooled caption; only trained tokens carry signal.
    text.token_table = scaled_normal({vocab.size(), d_tok}, 1e-3, rng, true);
    text.w1 = scaled_normal({d_tok, d_hidden}, 1.0 / std::sqrt(double(d_tok)), rng, true);
    text.b1 = Tensor::zeros({d_hidden}, true);
    text.w2 = scaled_normal({d_hidden, d}, 1.0 / std::sqrt(double(d_hidden)), rng, true);
    text.b2 = Tensor::zeros({d}, true);

    Rng img_rng = make_rng(seed, 0x494d47ULL);  // "IMG" stream
    ImageEncoderParams image;
    image.w_img = scaled_normal({kSceneFeatureDim, d}, 1.0 / std::sqrt(double(kSceneFeatureDim)),
                                img_rng, false);
    return {std::move(text), std::move(image)};
}

std::vector<int> tokenize(const std::string& caption, const Vocabulary& vocab) {
    std::vector<int> out;
    std::istringstream is(caption);
    std::string tok;
    while (is >> tok) out.push_back(vocab.index_of(tok));
    out.push_back(vocab.eos_index());
    return out;
}

Tensor encode_text(Tape& tape, const std::vector<int>& indices, const TextEncoderParams& p) {
    if (indices.empty()) throw ContractError("encode_text: empty index sequence");
    Tensor batch = encode_text_batch(tape, {indices}, p);
    return tape.row(batch, 0);
}

Tensor encode_text_batch(Tape& tape, const std::vector<std::vector<int>>& sequences,
                         const TextEncoderParams& p) {
    for (const auto& s : sequences) {
        if (s.empty()) throw ContractError("encode_text_batch: empty index sequence");
    }
    // The pooled vector is normalized before the MLP so captions of different
    // lengths enter the map at a common scale; without this, inserting one
    // token shrinks the mean and the nonlinearity turns that into a
    // systematic direction shift unrelated to the token's content.
    Tensor pooled = tape.l2_normalize_rows(tape.embed_mean_pool(p.token_table, sequences));
    Tensor h = tape.relu(tape.add_row_bias(tape.matmul(pooled, p.w1), p.b1));
    Tensor o = tape.add_row_bias(tape.matmul(h, p.w2), p.b2);
    return tape.l2_normalize_rows(o);
}

Tensor encode_image(const Scene& scene, const ImageEncoderParams& p, Rng& rng) {
    const int d = p.w_img.cols();
    const std::vector<double> f = scene.feature_vector();
    Tensor out = Tensor::zeros({d});
    kernels::gemm_nn(out.values().data(), f.data(), p.w_img.values().data(),
                     1, kSceneFeatureDim, d, /*acc=*/false, kernels::Mode::Serial);
    if (p.noise_sigma > 0.0) {
        std::normal_distribution<double> dist(0.0, p.noise_sigma);
        for (double& v : out.values()) v += dist(rng);
    }
    double norm = 0.0;
    for (double v : out.values()) norm += v * v;
    norm = std::sqrt(norm);
    if (norm <= kNormEps) throw DegenerateError("encode_image: degenerate embedding");
    for (double& v : out.values()) v /= norm;
    return out;
}

Tensor encode_image_batch(const std::vector<Scene>& scenes, const ImageEncoderParams& p,
                          uint64_t seed) {
    const int d = p.w_img.cols();
    const int n = static_cast<int>(scenes.size());
    Tensor out = Tensor::zeros({n, d});
    #pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        Rng rng = make_rng(seed, static_cast<uint64_t>(i));
        Tensor e = encode_image(scenes[i], p, rng);
        std::copy(e.values().begin(), e.values().end(),
                  out.values().begin() + static_cast<long>(i) * d);
    }
    return out;
}

}  // namespace semclip
