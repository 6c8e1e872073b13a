#pragma once

#include <string>
#include <vector>

#include "semclip/dataset.hpp"
#include "semclip/model.hpp"
#include "semclip/trainer.hpp"

namespace semclip {

struct ZeroShotResult {
    double standard_acc = 0.0;
    double negated_acc = 0.0;
    double delta = 0.0;  // standard - negated; raw signed value
};

struct EvalReport {
    double acc_orig = 0.0;          // Top-1 retrieval, original captions (%)
    double acc_para = 0.0;          // Top-1 retrieval, paraphrased captions (%)
    double acc_neg = 0.0;           // original-over-negation (%)
    double acc_neg_rescaled = 0.0;  // max(0, 2*(acc_neg - 50))
    double composite = 0.0;
    bool has_zero_shot = false;
    ZeroShotResult zero_shot;
    std::string variant;
    std::string config_snapshot;  // JSON
};

/// Percentage of queries whose true gallery item attains the strict maximum
/// cosine; ties resolve to the lowest gallery index (so a tied true item at a
/// higher index counts as a miss).
double top1_retrieval_accuracy(const Tensor& queries, const Tensor& gallery,
                               const std::vector<int>& matched_index);

/// Percentage of samples with cos(image, original) strictly greater than
/// cos(image, negation); exact ties count as failures.
double original_over_negation_accuracy(const Tensor& images, const Tensor& originals,
                                       const Tensor& negations);

/// Mean of acc_orig, acc_para and the rescaled negation accuracy
/// max(0, 2*(acc_neg - 50)); every input is a percentage in [0, 100].
double composite_score(double acc_orig, double acc_para, double acc_neg);

double rescale_negation_accuracy(double acc_neg);

/// standard_acc - negated_acc; negative values are preserved here and only
/// clamped at plot time.
double negation_delta(double standard_acc, double negated_acc);

/// Prompt-based classification: predicted class maximizes cosine between the
/// image embedding and the embedded prompt "this is a photo of a <class>"
/// (with "not" inserted when negated). Returns Top-1 accuracy in percent.
double zero_shot_classify(const Tensor& images, const std::vector<int>& labels,
                          const std::vector<std::string>& class_names, const Model& model,
                          const Vocabulary& vocab, bool negated);

struct EvalOptions {
    bool zero_shot = true;
    uint64_t seed = 42;  // stream for image-noise draws; unused when sigma = 0
    std::string variant = "unnamed";
};

/// Full metric suite over the test split. The retrieval gallery holds one
/// image per distinct scene; original-over-negation runs over every record.
/// The zero-shot task classifies the relation word of held-out scenes.
EvalReport evaluate(const Model& model, const std::vector<DatasetRecord>& test,
                    const Vocabulary& vocab, const EvalOptions& opts);

/// Variant name -> (alpha, beta, gamma); names: baseline, paraphrase,
/// negation, semclip.
LossWeights variant_weights(const std::string& variant);
const std::vector<std::string>& variant_names();

struct AblationCell {
    std::string variant;
    int n = 0;
    bool learnable = false;
    bool normalize = false;
    std::string status;  // "ok" or the failure message
    EvalReport report;
};

/// Trains and evaluates every loss variant over the n/learnable/normalize
/// grid. Individual failures are recorded in the row status and the sweep
/// continues.
std::vector<AblationCell> ablation_sweep(const TrainConfig& base, const Dataset& data,
                                         bool zero_shot);

}  // namespace semclip
