#include "semclip/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace semclip {

void TrainConfig::validate() const {
    if (epochs <= 0) throw ContractError("config: epochs must be positive");
    if (!(peak_lr > 0.0)) throw ContractError("config: peak_lr must be positive");
    if (warmup_steps < 0) throw ContractError("config: warmup_steps must be non-negative");
    if (accumulation_steps < 1) throw ContractError("config: accumulation_steps must be >= 1");
    if (batch_size <= 0) throw ContractError("config: batch_size must be positive");
    if (!(clip_max_norm > 0.0)) throw ContractError("config: clip_max_norm must be positive");
    if (!(adam_eps > 0.0)) throw ContractError("config: adam_eps must be positive");
    if (weights.alpha < 0.0 || weights.beta < 0.0 || weights.gamma < 0.0 ||
        !(weights.alpha + weights.beta + weights.gamma > 0.0)) {
        throw ContractError("config: loss weights must be non-negative with positive sum");
    }
    if (proj_n <= 0 || proj_n >= d) throw ContractError("config: need 0 < proj_n < d");
    if (d <= 0 || d_tok <= 0) throw ContractError("config: dimensions must be positive");
}

AdamState AdamState::init(const std::vector<Tensor>& params) {
    AdamState st;
    st.m.reserve(params.size());
    st.v.reserve(params.size());
    for (const Tensor& p : params) {
        st.m.emplace_back(p.numel(), 0.0);
        st.v.emplace_back(p.numel(), 0.0);
    }
    return st;
}

double lr_schedule(long step, long total_steps, const TrainConfig& cfg) {
    if (step < 0) throw ContractError("lr_schedule: negative step");
    if (total_steps <= 0) throw ContractError("lr_schedule: total_steps must be positive");
    const long last = total_steps - 1;
    if (step > last) step = last;
    const long warmup = cfg.warmup_steps;
    if (warmup > 0 && step < warmup) {
        return cfg.peak_lr * static_cast<double>(step) / static_cast<double>(warmup);
    }
    if (last <= warmup) return cfg.peak_lr;  // run ends inside warmup: hold peak
    const double progress =
        static_cast<double>(step - warmup) / static_cast<double>(last - warmup);
    return cfg.peak_lr * 0.5 * (1.0 + std::cos(M_PI * progress));
}

double clip_gradients(std::vector<Tensor>& params, double max_norm) {
    double sq = 0.0;
    for (const Tensor& p : params) {
        for (double g : p.grad()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (Tensor& p : params) {
            for (double& g : p.grad()) g *= scale;
        }
    }
    return norm;
}

void adamw_step(std::vector<Tensor>& params, AdamState& state, double lr,
                const TrainConfig& cfg) {
    if (params.size() != state.m.size()) {
        throw ContractError("adamw_step: state does not match parameter list");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (double g : params[i].grad()) {
            if (!std::isfinite(g)) {
                throw NumericError("adamw_step: non-finite gradient in parameter " +
                                   std::to_string(i));
            }
        }
    }
    state.step += 1;
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& m = state.m[i];
        auto& v = state.v[i];
        auto& val = params[i].values();
        const auto& grad = params[i].grad();
        for (std::size_t j = 0; j < val.size(); ++j) {
            m[j] = b1 * m[j] + (1.0 - b1) * grad[j];
            v[j] = b2 * v[j] + (1.0 - b2) * grad[j] * grad[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            val[j] -= lr * (mhat / (std::sqrt(vhat) + cfg.adam_eps) +
                            cfg.weight_decay * val[j]);
        }
    }
}

namespace {

Tensor gather_rows(const Tensor& source, const std::vector<long>& rows, int begin, int end) {
    const int c = source.cols();
    Tensor out = Tensor::zeros({end - begin, c});
    for (int i = begin; i < end; ++i) {
        const double* src = source.values().data() + rows[i] * c;
        std::copy(src, src + c, out.values().data() + static_cast<long>(i - begin) * c);
    }
    return out;
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const Dataset& data) {
    cfg.validate();
    if (data.train.empty()) throw DataError("train: dataset has no training records");

    const Vocabulary& vocab = data.vocab;
    Model model = init_model(cfg.seed, cfg.d, cfg.d_tok, cfg.proj_n, cfg.proj_normalize,
                             cfg.proj_learnable, cfg.tau_init, cfg.tau_max,
                             cfg.image_noise_sigma, vocab.hash());

    const long n_train = static_cast<long>(data.train.size());
    std::vector<std::vector<int>> tok_orig(n_train), tok_para(n_train), tok_neg(n_train);
    std::vector<Scene> scenes(n_train);
    for (long i = 0; i < n_train; ++i) {
        tok_orig[i] = tokenize(data.train[i].triple.original, vocab);
        tok_para[i] = tokenize(data.train[i].triple.paraphrase, vocab);
        tok_neg[i] = tokenize(data.train[i].triple.negation, vocab);
        scenes[i] = data.train[i].scene;
    }
    // Frozen encoder: image embeddings never change during training.
    const Tensor image_rows =
        encode_image_batch(scenes, model.image, derive_seed(cfg.seed, 0x494d42ULL));

    std::vector<Tensor> params = model.trainable_parameters();
    AdamState opt = AdamState::init(params);

    const long micro_per_epoch = (n_train + cfg.batch_size - 1) / cfg.batch_size;
    const long total_micro = micro_per_epoch * cfg.epochs;
    const long total_updates = (total_micro + cfg.accumulation_steps - 1) / cfg.accumulation_steps;

    TrainResult result;
    result.total_update_steps = total_updates;

    Model last_good = clone_model(model);
    Rng shuffle_rng = make_rng(cfg.seed, 0x53485546ULL);  // "SHUF" stream

    std::vector<long> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    long update_step = 0;
    int pending = 0;
    LossBreakdown window{};  // sums over the accumulation window

    auto apply_update = [&]() {
        for (Tensor& p : params) {
            for (double& g : p.grad()) g /= static_cast<double>(pending);
        }
        clip_gradients(params, cfg.clip_max_norm);
        const double lr = lr_schedule(update_step, total_updates, cfg);
        adamw_step(params, opt, lr, cfg);
        model.temperature.clamp();
        if (model.bank.learnable) reorthonormalize(model.bank);

        const double inv = 1.0 / static_cast<double>(pending);
        result.log.push_back({update_step, lr, window.total * inv, window.contrastive * inv,
                              window.paraphrase * inv, window.negation * inv,
                              model.temperature.tau()});
        for (Tensor& p : params) p.zero_grad();
        window = {};
        pending = 0;
        ++update_step;
    };

    for (int epoch = 0; epoch < cfg.epochs && !result.aborted; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (long b = 0; b < micro_per_epoch && !result.aborted; ++b) {
            const int begin = static_cast<int>(b * cfg.batch_size);
            const int end = static_cast<int>(std::min<long>(n_train, begin + cfg.batch_size));

            BatchEmbeddings batch;
            batch.images = gather_rows(image_rows, order, begin, end);
            std::vector<std::vector<int>> so, sp, sn;
            so.reserve(end - begin);
            sp.reserve(end - begin);
            sn.reserve(end - begin);
            for (int i = begin; i < end; ++i) {
                so.push_back(tok_orig[order[i]]);
                sp.push_back(tok_para[order[i]]);
                sn.push_back(tok_neg[order[i]]);
            }

            Tape tape;
            batch.texts = encode_text_batch(tape, so, model.text);
            batch.paraphrases = encode_text_batch(tape, sp, model.text);
            batch.negations = encode_text_batch(tape, sn, model.text);

            LossBreakdown bd;
            Tensor loss = total_loss(tape, batch, cfg.weights, model.bank, model.temperature, &bd);
            if (!std::isfinite(bd.total)) {
                result.aborted = true;
                result.abort_reason = "non-finite loss at epoch " + std::to_string(epoch) +
                                      ", micro-batch " + std::to_string(b);
                break;
            }
            tape.backward(loss);
            window.total += bd.total;
            window.contrastive += bd.contrastive;
            window.paraphrase += bd.paraphrase;
            window.negation += bd.negation;
            ++pending;
            if (pending == cfg.accumulation_steps) apply_update();
        }
        if (!result.aborted) last_good = clone_model(model);
    }
    if (!result.aborted && pending > 0) apply_update();  // flush a trailing partial window

    result.model = result.aborted ? std::move(last_good) : std::move(model);
    return result;
}

void write_loss_log_csv(const std::vector<LossLogRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write loss log: " + path);
    out << "step,lr,total,contrastive,paraphrase,negation,tau\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step,
                      r.lr, r.total, r.contrastive, r.paraphrase, r.negation, r.tau);
        out << buf;
    }
    if (!out) throw DataError("loss log write failed: " + path);
}

}  // namespace semclip
