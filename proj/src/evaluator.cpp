#include "semclip/evaluator.hpp"

#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "semclip/kernels.hpp"

namespace semclip {

namespace {

// Row-wise argmax with lowest-index tie break.
int argmax_row(const double* row, int n) {
    int best = 0;
    for (int j = 1; j < n; ++j) {
        if (row[j] > row[best]) best = j;
    }
    return best;
}

void require_pct(double v, const char* name) {
    if (!(v >= 0.0 && v <= 100.0)) {
        throw ContractError(std::string(name) + " must lie in [0, 100], got " +
                            std::to_string(v));
    }
}

Tensor encode_captions(const std::vector<std::string>& captions, const Model& model,
                       const Vocabulary& vocab) {
    std::vector<std::vector<int>> seqs;
    seqs.reserve(captions.size());
    for (const auto& c : captions) seqs.push_back(tokenize(c, vocab));
    Tape tape;
    return encode_text_batch(tape, seqs, model.text);
}

}  // namespace

double top1_retrieval_accuracy(const Tensor& queries, const Tensor& gallery,
                               const std::vector<int>& matched_index) {
    if (gallery.rank() != 2 || gallery.rows() == 0) {
        throw ContractError("top1_retrieval_accuracy: empty gallery");
    }
    if (queries.rank() != 2 || queries.cols() != gallery.cols()) {
        throw ShapeError("top1_retrieval_accuracy: query shape " + shape_str(queries.shape()) +
                         " vs gallery " + shape_str(gallery.shape()));
    }
    const int m = queries.rows(), g = gallery.rows(), d = gallery.cols();
    if (static_cast<int>(matched_index.size()) != m) {
        throw ContractError("top1_retrieval_accuracy: one matched index per query required");
    }
    for (int q = 0; q < m; ++q) {
        if (matched_index[q] < 0 || matched_index[q] >= g) {
            throw IndexError("top1_retrieval_accuracy: matched index out of gallery range");
        }
    }
    // Unit-norm rows: scores are cosines.
    Tensor scores = Tensor::zeros({m, g});
    kernels::gemm_nt(scores.values().data(), queries.values().data(), gallery.values().data(),
                     m, d, g, /*acc=*/false);
    std::vector<unsigned char> hit(m, 0);
    #pragma omp parallel for schedule(static)
    for (int q = 0; q < m; ++q) {
        const double* row = scores.values().data() + static_cast<long>(q) * g;
        hit[q] = argmax_row(row, g) == matched_index[q] ? 1 : 0;
    }
    long hits = 0;
    for (unsigned char h : hit) hits += h;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(m);
}

double original_over_negation_accuracy(const Tensor& images, const Tensor& originals,
                                       const Tensor& negations) {
    if (images.rank() != 2 || images.shape() != originals.shape() ||
        images.shape() != negations.shape()) {
        throw ShapeError("original_over_negation_accuracy: embedding batches must share shape");
    }
    const int n = images.rows(), d = images.cols();
    if (n == 0) throw ContractError("original_over_negation_accuracy: empty batch");
    long wins = 0;
    for (int i = 0; i < n; ++i) {
        const double* im = images.values().data() + static_cast<long>(i) * d;
        const double* orig = originals.values().data() + static_cast<long>(i) * d;
        const double* neg = negations.values().data() + static_cast<long>(i) * d;
        double so = 0.0, sn = 0.0;
        for (int j = 0; j < d; ++j) {
            so += im[j] * orig[j];
            sn += im[j] * neg[j];
        }
        if (so > sn) ++wins;  // exact ties count as failure
    }
    return 100.0 * static_cast<double>(wins) / static_cast<double>(n);
}

double rescale_negation_accuracy(double acc_neg) {
    require_pct(acc_neg, "acc_neg");
    return std::max(0.0, 2.0 * (acc_neg - 50.0));
}

double composite_score(double acc_orig, double acc_para, double acc_neg) {
    require_pct(acc_orig, "acc_orig");
    require_pct(acc_para, "acc_para");
    return (acc_orig + acc_para + rescale_negation_accuracy(acc_neg)) / 3.0;
}

double negation_delta(double standard_acc, double negated_acc) {
    require_pct(standard_acc, "standard_acc");
    require_pct(negated_acc, "negated_acc");
    return standard_acc - negated_acc;
}

double zero_shot_classify(const Tensor& images, const std::vector<int>& labels,
                          const std::vector<std::string>& class_names, const Model& model,
                          const Vocabulary& vocab, bool negated) {
    const int k = static_cast<int>(class_names.size());
    if (k < 2) throw ContractError("zero_shot_classify: need at least 2 classes");
    const int n = images.rows(), d = images.cols();
    if (static_cast<int>(labels.size()) != n) {
        throw ContractError("zero_shot_classify: one label per image required");
    }

    std::vector<std::string> prompts;
    prompts.reserve(k);
    for (const auto& name : class_names) {
        prompts.push_back(negated ? "this is not a photo of a " + name
                                  : "this is a photo of a " + name);
    }
    Tensor prompt_embs = encode_captions(prompts, model, vocab);

    Tensor scores = Tensor::zeros({n, k});
    kernels::gemm_nt(scores.values().data(), images.values().data(),
                     prompt_embs.values().data(), n, d, k, /*acc=*/false);
    long correct = 0;
    for (int i = 0; i < n; ++i) {
        if (argmax_row(scores.values().data() + static_cast<long>(i) * k, k) == labels[i]) {
            ++correct;
        }
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(n);
}

EvalReport evaluate(const Model& model, const std::vector<DatasetRecord>& test,
                    const Vocabulary& vocab, const EvalOptions& opts) {
    if (test.empty()) throw DataError("evaluate: empty test split");

    // One gallery image per distinct scene; captions are deterministic per
    // scene, so queries collapse with it.
    std::vector<Scene> unique_scenes;
    std::vector<std::string> orig_captions, para_captions;
    std::unordered_map<std::string, int> scene_row;
    for (const auto& r : test) {
        if (scene_row.emplace(r.triple.scene_id, static_cast<int>(unique_scenes.size())).second) {
            unique_scenes.push_back(r.scene);
            orig_captions.push_back(r.triple.original);
            para_captions.push_back(r.triple.paraphrase);
        }
    }
    const Tensor gallery =
        encode_image_batch(unique_scenes, model.image, derive_seed(opts.seed, 0x47414cULL));
    std::vector<int> identity(unique_scenes.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);

    EvalReport rep;
    rep.variant = opts.variant;
    rep.acc_orig =
        top1_retrieval_accuracy(encode_captions(orig_captions, model, vocab), gallery, identity);
    rep.acc_para =
        top1_retrieval_accuracy(encode_captions(para_captions, model, vocab), gallery, identity);

    // Original-over-negation runs over every record so both negation
    // strategies stay represented.
    std::vector<Scene> record_scenes;
    std::vector<std::string> record_orig, record_neg;
    record_scenes.reserve(test.size());
    for (const auto& r : test) {
        record_scenes.push_back(r.scene);
        record_orig.push_back(r.triple.original);
        record_neg.push_back(r.triple.negation);
    }
    const Tensor oon_images =
        encode_image_batch(record_scenes, model.image, derive_seed(opts.seed, 0x4f4f4eULL));
    rep.acc_neg = original_over_negation_accuracy(
        oon_images, encode_captions(record_orig, model, vocab),
        encode_captions(record_neg, model, vocab));
    rep.acc_neg_rescaled = rescale_negation_accuracy(rep.acc_neg);
    rep.composite = composite_score(rep.acc_orig, rep.acc_para, rep.acc_neg);

    if (opts.zero_shot) {
        std::vector<std::string> class_names;
        for (int r = 0; r < kNumRelations; ++r) {
            class_names.push_back(relation_words(static_cast<Relation>(r)));
        }
        std::vector<int> labels;
        labels.reserve(unique_scenes.size());
        for (const auto& s : unique_scenes) labels.push_back(static_cast<int>(s.relation));
        rep.has_zero_shot = true;
        rep.zero_shot.standard_acc =
            zero_shot_classify(gallery, labels, class_names, model, vocab, false);
        rep.zero_shot.negated_acc =
            zero_shot_classify(gallery, labels, class_names, model, vocab, true);
        rep.zero_shot.delta =
            negation_delta(rep.zero_shot.standard_acc, rep.zero_shot.negated_acc);
    }

    nlohmann::json snapshot{{"variant", opts.variant},
                            {"seed", opts.seed},
                            {"d", model.d},
                            {"d_tok", model.d_tok},
                            {"proj_n", model.bank.n},
                            {"proj_normalize", model.bank.normalize},
                            {"proj_learnable", model.bank.learnable},
                            {"gallery_size", unique_scenes.size()},
                            {"oon_samples", test.size()}};
    rep.config_snapshot = snapshot.dump();
    return rep;
}

const std::vector<std::string>& variant_names() {
    static const std::vector<std::string> names{"baseline", "paraphrase", "negation", "semclip"};
    return names;
}

LossWeights variant_weights(const std::string& variant) {
    if (variant == "baseline") return {1.0, 0.0, 0.0};
    if (variant == "paraphrase") return {1.0, 1.0, 0.0};
    if (variant == "negation") return {1.0, 0.0, 1.0};
    if (variant == "semclip") return {1.0, 1.0, 1.0};
    throw ContractError("unknown variant: " + variant +
                        " (expected baseline|paraphrase|negation|semclip)");
}

std::vector<AblationCell> ablation_sweep(const TrainConfig& base, const Dataset& data,
                                         bool zero_shot) {
    std::vector<AblationCell> rows;
    for (const std::string& variant : variant_names()) {
        for (int n : {1, 2}) {
            for (bool learnable : {false, true}) {
                for (bool normalize : {false, true}) {
                    AblationCell cell;
                    cell.variant = variant;
                    cell.n = n;
                    cell.learnable = learnable;
                    cell.normalize = normalize;
                    try {
                        TrainConfig cfg = base;
                        cfg.weights = variant_weights(variant);
                        cfg.proj_n = n;
                        cfg.proj_learnable = learnable;
                        cfg.proj_normalize = normalize;
                        TrainResult tr = train(cfg, data);
                        if (tr.aborted) throw NumericError(tr.abort_reason);
                        EvalOptions opts;
                        opts.zero_shot = zero_shot;
                        opts.seed = cfg.seed;
                        opts.variant = variant;
                        cell.report = evaluate(tr.model, data.test, data.vocab, opts);
                        cell.status = "ok";
                    } catch (const std::exception& e) {
                        cell.status = e.what();
                    }
                    rows.push_back(std::move(cell));
                }
            }
        }
    }
    return rows;
}

}  // namespace semclip
