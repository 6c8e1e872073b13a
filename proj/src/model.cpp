#include "semclip/model.hpp"

namespace semclip {

std::vector<Tensor> Model::trainable_parameters() {
    std::vector<Tensor> params = text.parameters();
    params.push_back(temperature.theta);
    if (bank.learnable) params.push_back(bank.v);
    return params;
}

Model init_model(uint64_t seed, int d, int d_tok, int proj_n, bool proj_normalize,
                 bool proj_learnable, double tau_init, double tau_max, double image_sigma,
                 uint64_t vocab_hash) {
    Model m;
    auto [text, image] = init_encoders(seed, d, d_tok);
    m.text = std::move(text);
    m.image = std::move(image);
    m.image.noise_sigma = image_sigma;
    m.bank = init_projection_bank(d, proj_n, seed, proj_normalize, proj_learnable);
    m.temperature = TemperatureParam::init(tau_init, tau_max);
    m.d = d;
    m.d_tok = d_tok;
    m.seed = seed;
    m.vocab_hash = vocab_hash;
    return m;
}

Model clone_model(const Model& m) {
    Model c = m;
    c.text.token_table = m.text.token_table.clone();
    c.text.w1 = m.text.w1.clone();
    c.text.b1 = m.text.b1.clone();
    c.text.w2 = m.text.w2.clone();
    c.text.b2 = m.text.b2.clone();
    c.image.w_img = m.image.w_img.clone();
    c.bank.v = m.bank.v.clone();
    c.temperature.theta = m.temperature.theta.clone();
    return c;
}

}  // namespace semclip
