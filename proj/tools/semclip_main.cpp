#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "semclip/checkpoint.hpp"
#include "semclip/dataset.hpp"
#include "semclip/evaluator.hpp"
#include "semclip/report.hpp"
#include "semclip/svg.hpp"
#include "semclip/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace semclip;

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

std::string default_run_dir(const std::string& command, uint64_t seed) {
    const std::string stamp = utc_timestamp();
    const uint64_t h = fnv1a(command.data(), command.size(), splitmix64(seed));
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
    return (fs::path("runs") / (stamp + "-" + suffix)).string();
}

// Simple key=value overrides; '#' starts a comment. Flags given on the
// command line take precedence, config file values beat built-in defaults.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::map<std::string, std::string> kv;
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

template <typename T>
void config_override(CLI::App* cmd, const std::map<std::string, std::string>& kv,
                     const std::string& flag, const std::string& key, T& var) {
    if (cmd->count(flag) > 0) return;
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    if constexpr (std::is_same_v<T, bool>) {
        var = it->second == "1" || it->second == "true" || it->second == "yes";
    } else if constexpr (std::is_same_v<T, std::string>) {
        var = it->second;
    } else {
        std::istringstream is(it->second);
        is >> var;
        if (!is) throw DataError("config value for " + key + " is not parseable: " + it->second);
    }
}

void write_manifest(const json& extra, const std::string& dir) {
    json j = extra;
    j["tool_version"] = kToolVersion;
    j["timestamp_utc"] = utc_timestamp();
    std::ofstream out(fs::path(dir) / "run.json", std::ios::binary);
    if (!out) throw DataError("cannot write run manifest under " + dir);
    out << j.dump(2) << '\n';
}

void require_artifacts(const std::vector<std::string>& paths) {
    for (const auto& p : paths) {
        std::error_code ec;
        if (!fs::exists(p, ec) || fs::file_size(p, ec) == 0) {
            throw DataError("artifact missing or empty: " + p);
        }
    }
}

json config_to_json(const TrainConfig& c) {
    return json{{"epochs", c.epochs},
                {"peak_lr", c.peak_lr},
                {"warmup_steps", c.warmup_steps},
                {"adam_beta1", c.adam_beta1},
                {"adam_beta2", c.adam_beta2},
                {"adam_eps", c.adam_eps},
                {"weight_decay", c.weight_decay},
                {"accumulation_steps", c.accumulation_steps},
                {"clip_max_norm", c.clip_max_norm},
                {"batch_size", c.batch_size},
                {"seed", c.seed},
                {"alpha", c.weights.alpha},
                {"beta", c.weights.beta},
                {"gamma", c.weights.gamma},
                {"proj_n", c.proj_n},
                {"proj_normalize", c.proj_normalize},
                {"proj_learnable", c.proj_learnable},
                {"d", c.d},
                {"d_tok", c.d_tok},
                {"tau_init", c.tau_init},
                {"tau_max", c.tau_max},
                {"image_noise_sigma", c.image_noise_sigma}};
}

struct GenDataArgs {
    long count = 2000;
    uint64_t seed = 42;
    double split = 0.8;
    std::string out;
    std::string config_file;
};

int run_gen_data(const GenDataArgs& a) {
    Dataset ds = generate_dataset(a.count, a.seed, a.split);
    write_dataset(ds, a.out);
    const std::string train_path = (fs::path(a.out) / "train.jsonl").string();
    const std::string test_path = (fs::path(a.out) / "test.jsonl").string();
    require_artifacts({train_path, test_path, dataset_manifest_path(a.out)});
    std::cout << "generated " << ds.count << " triples (train " << ds.train.size() << ", test "
              << ds.test.size() << ") under " << a.out << "\n";
    return kExitOk;
}

struct TrainArgs {
    std::string dataset;
    std::string variant = "semclip";
    std::string out;
    std::string config_file;
    TrainConfig cfg;
};

int run_train(TrainArgs& a, CLI::App* cmd) {
    a.cfg.weights = variant_weights(a.variant);
    if (!fs::exists(a.dataset)) throw DataError("dataset directory not found: " + a.dataset);
    Dataset ds = load_dataset(a.dataset);
    if (a.out.empty()) a.out = default_run_dir("train", a.cfg.seed);
    fs::create_directories(a.out);

    TrainResult result = train(a.cfg, ds);

    const std::string ckpt = (fs::path(a.out) / "checkpoint.bin").string();
    const std::string log_path = (fs::path(a.out) / "loss_log.csv").string();
    save_checkpoint(result.model, ckpt);
    write_loss_log_csv(result.log, log_path);

    json manifest{{"command", "train"},
                  {"variant", a.variant},
                  {"config", config_to_json(a.cfg)},
                  {"seed", a.cfg.seed},
                  {"dataset", json{{"path", a.dataset},
                                   {"train_hash", file_hash((fs::path(a.dataset) / "train.jsonl").string())},
                                   {"test_hash", file_hash((fs::path(a.dataset) / "test.jsonl").string())}}},
                  {"artifacts", json{{"checkpoint", ckpt}, {"loss_log", log_path}}},
                  {"total_update_steps", result.total_update_steps},
                  {"aborted", result.aborted},
                  {"abort_reason", result.abort_reason}};
    write_manifest(manifest, a.out);
    require_artifacts({ckpt, log_path});

    if (result.aborted) {
        std::cerr << "training aborted (" << result.abort_reason
                  << "); last-good checkpoint written to " << ckpt << "\n";
        return kExitNumeric;
    }
    std::cout << "trained " << a.variant << " for " << result.total_update_steps
              << " update steps; artifacts under " << a.out << "\n";
    (void)cmd;
    return kExitOk;
}

struct EvalArgs {
    std::string checkpoint;
    std::string dataset;
    std::string out;
    std::string variant = "unnamed";
    bool zero_shot = true;
    uint64_t seed = 42;
    std::string config_file;
};

int run_eval(const EvalArgs& a) {
    Model model = load_checkpoint(a.checkpoint);
    Dataset ds = load_dataset(a.dataset);
    if (model.vocab_hash != ds.vocab.hash()) {
        throw CheckpointError("checkpoint vocabulary hash " + std::to_string(model.vocab_hash) +
                              " does not match dataset vocabulary " +
                              std::to_string(ds.vocab.hash()));
    }
    std::string out = a.out.empty() ? default_run_dir("eval", a.seed) : a.out;
    fs::create_directories(out);

    EvalOptions opts;
    opts.zero_shot = a.zero_shot;
    opts.seed = a.seed;
    opts.variant = a.variant;
    EvalReport rep = evaluate(model, ds.test, ds.vocab, opts);

    const std::string report_path = (fs::path(out) / "eval_report.csv").string();
    write_eval_csv(rep, a.dataset, report_path);
    std::vector<std::string> artifacts{report_path};
    if (a.zero_shot) {
        const std::string zs_path = (fs::path(out) / "zero_shot.csv").string();
        write_zero_shot_csv({rep}, zs_path);
        artifacts.push_back(zs_path);
    }
    json manifest{{"command", "eval"},
                  {"checkpoint", a.checkpoint},
                  {"dataset", json{{"path", a.dataset},
                                   {"test_hash", file_hash((fs::path(a.dataset) / "test.jsonl").string())}}},
                  {"seed", a.seed},
                  {"variant", a.variant},
                  {"zero_shot", a.zero_shot},
                  {"report", json::parse(rep.config_snapshot)},
                  {"artifacts", artifacts}};
    write_manifest(manifest, out);
    require_artifacts(artifacts);

    std::printf("original_top1 %.2f | paraphrase_top1 %.2f | original_over_negation %.2f | composite %.2f\n",
                rep.acc_orig, rep.acc_para, rep.acc_neg, rep.composite);
    if (rep.has_zero_shot) {
        std::printf("zero_shot standard %.2f | negated %.2f | delta %.2f\n",
                    rep.zero_shot.standard_acc, rep.zero_shot.negated_acc, rep.zero_shot.delta);
    }
    return kExitOk;
}

struct AblateArgs {
    std::string dataset;
    std::string out;
    bool zero_shot = true;
    std::string config_file;
    TrainConfig cfg;
};

int run_ablate(AblateArgs& a) {
    Dataset ds = load_dataset(a.dataset);
    if (a.out.empty()) a.out = default_run_dir("ablate", a.cfg.seed);
    fs::create_directories(a.out);

    std::vector<AblationCell> cells = ablation_sweep(a.cfg, ds, a.zero_shot);

    const std::string sweep_path = (fs::path(a.out) / "sweep_table.csv").string();
    const std::string table_path = (fs::path(a.out) / "table1.csv").string();
    const std::string zs_path = (fs::path(a.out) / "zero_shot.csv").string();
    write_ablation_csv(cells, sweep_path);
    write_table1_csv(cells, a.cfg, a.dataset, table_path);
    std::vector<EvalReport> zs_reports;
    for (const auto& c : cells) {
        if (c.status == "ok" && c.n == a.cfg.proj_n && c.learnable == a.cfg.proj_learnable &&
            c.normalize == a.cfg.proj_normalize) {
            zs_reports.push_back(c.report);
        }
    }
    write_zero_shot_csv(zs_reports, zs_path);

    long failures = 0;
    for (const auto& c : cells) {
        if (c.status != "ok") ++failures;
    }
    json manifest{{"command", "ablate"},
                  {"config", config_to_json(a.cfg)},
                  {"dataset", json{{"path", a.dataset}}},
                  {"cells", cells.size()},
                  {"failures", failures},
                  {"artifacts", json::array({sweep_path, table_path, zs_path})}};
    write_manifest(manifest, a.out);
    require_artifacts({sweep_path, table_path, zs_path});
    std::cout << "swept " << cells.size() << " cells (" << failures << " failures); results under "
              << a.out << "\n";
    return kExitOk;
}

struct PlotArgs {
    std::string results;
    std::string out;
};

int run_plot(const PlotArgs& a) {
    const std::string sweep_path = (fs::path(a.results) / "sweep_table.csv").string();
    if (!fs::exists(sweep_path)) {
        throw DataError("no sweep results found (expected " + sweep_path + ")");
    }
    const std::string out = a.out.empty() ? a.results : a.out;
    fs::create_directories(out);
    std::vector<AblationCell> cells = read_ablation_csv(sweep_path);

    // Best composite per variant, first row winning ties.
    std::vector<const AblationCell*> picked;
    for (const std::string& variant : variant_names()) {
        const AblationCell* best = nullptr;
        for (const auto& c : cells) {
            if (c.variant != variant || c.status != "ok") continue;
            if (!best || c.report.composite > best->report.composite) best = &c;
        }
        if (best) picked.push_back(best);
    }
    if (picked.empty()) throw DataError("sweep table has no successful cells: " + sweep_path);

    std::vector<BarGroup> acc_groups, delta_groups;
    for (const auto* c : picked) {
        acc_groups.push_back({c->variant,
                              {c->report.acc_orig, c->report.acc_para, c->report.acc_neg}});
        delta_groups.push_back({c->variant, {c->report.zero_shot.delta}});
    }
    const std::string acc_svg = (fs::path(out) / "accuracies.svg").string();
    const std::string delta_svg = (fs::path(out) / "deltas.svg").string();
    write_grouped_bar_svg("Matching accuracy by variant",
                          {"original_top1", "paraphrase_top1", "original_over_negation"},
                          acc_groups, 100.0, false, acc_svg);
    // Fig-style delta chart: negatives render as zero, CSV keeps the sign.
    write_grouped_bar_svg("Zero-shot accuracy delta by variant", {"delta"}, delta_groups, 100.0,
                          true, delta_svg);

    const std::string data_path = (fs::path(out) / "plot_data.csv").string();
    {
        std::ofstream data(data_path, std::ios::binary);
        if (!data) throw DataError("cannot write " + data_path);
        data << "variant,n,learnable,normalize,original_top1,paraphrase_top1,"
                "original_over_negation,composite,zs_standard,zs_negated,zs_delta\n";
        char buf[512];
        for (const auto* c : picked) {
            std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          c->variant.c_str(), c->n, c->learnable ? 1 : 0, c->normalize ? 1 : 0,
                          c->report.acc_orig, c->report.acc_para, c->report.acc_neg,
                          c->report.composite, c->report.zero_shot.standard_acc,
                          c->report.zero_shot.negated_acc, c->report.zero_shot.delta);
            data << buf;
        }
    }
    require_artifacts({acc_svg, delta_svg, data_path});
    std::cout << "plots written under " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contrastive image-text training with paraphrase/negation projection losses"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    GenDataArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic caption dataset");
    gen_cmd->add_option("--count", gen.count, "Number of caption triples")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--split", gen.split, "Train fraction of distinct scenes")
        ->check(CLI::Range(1e-6, 1.0 - 1e-6));
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();
    gen_cmd->add_option("--config", gen.config_file, "key=value config file");

    TrainArgs tr;
    CLI::App* train_cmd = app.add_subcommand("train", "Train one loss variant");
    train_cmd->add_option("--dataset", tr.dataset, "Dataset directory")->required();
    train_cmd->add_option("--variant", tr.variant, "baseline|paraphrase|negation|semclip");
    train_cmd->add_option("--out", tr.out, "Run directory (default runs/<stamp>-<hash>)");
    train_cmd->add_option("--epochs", tr.cfg.epochs, "Training epochs");
    train_cmd->add_option("--batch", tr.cfg.batch_size, "Batch size");
    train_cmd->add_option("--seed", tr.cfg.seed, "Training seed");
    train_cmd->add_option("--lr", tr.cfg.peak_lr, "Peak learning rate");
    train_cmd->add_option("--warmup", tr.cfg.warmup_steps, "Warmup update steps");
    train_cmd->add_option("--accum", tr.cfg.accumulation_steps, "Gradient accumulation steps");
    train_cmd->add_option("--clip", tr.cfg.clip_max_norm, "Max global gradient norm");
    train_cmd->add_option("--weight-decay", tr.cfg.weight_decay, "Decoupled weight decay");
    train_cmd->add_option("--n", tr.cfg.proj_n, "Projection vector count");
    train_cmd->add_option("--learnable", tr.cfg.proj_learnable, "Learnable projections");
    train_cmd->add_option("--normalize", tr.cfg.proj_normalize, "Normalize projections");
    train_cmd->add_option("--d", tr.cfg.d, "Embedding dimension");
    train_cmd->add_option("--d-tok", tr.cfg.d_tok, "Token embedding dimension");
    train_cmd->add_option("--sigma", tr.cfg.image_noise_sigma, "Image embedding noise");
    train_cmd->add_option("--config", tr.config_file, "key=value config file");

    EvalArgs ev;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
    eval_cmd->add_option("--dataset", ev.dataset, "Dataset directory")->required();
    eval_cmd->add_option("--out", ev.out, "Output directory");
    eval_cmd->add_option("--variant", ev.variant, "Label recorded in reports");
    eval_cmd->add_option("--zero-shot", ev.zero_shot, "Also run zero-shot classification");
    eval_cmd->add_option("--seed", ev.seed, "Evaluation stream seed");
    eval_cmd->add_option("--config", ev.config_file, "key=value config file");

    AblateArgs ab;
    CLI::App* ablate_cmd = app.add_subcommand("ablate", "Run the variant x projection grid");
    ablate_cmd->add_option("--dataset", ab.dataset, "Dataset directory")->required();
    ablate_cmd->add_option("--out", ab.out, "Output directory");
    ablate_cmd->add_option("--epochs", ab.cfg.epochs, "Training epochs per cell");
    ablate_cmd->add_option("--batch", ab.cfg.batch_size, "Batch size");
    ablate_cmd->add_option("--seed", ab.cfg.seed, "Training seed");
    ablate_cmd->add_option("--zero-shot", ab.zero_shot, "Include zero-shot metrics");
    ablate_cmd->add_option("--config", ab.config_file, "key=value config file");

    PlotArgs pl;
    CLI::App* plot_cmd = app.add_subcommand("plot", "Render sweep results to SVG");
    plot_cmd->add_option("--results", pl.results, "Directory containing sweep_table.csv")
        ->required();
    plot_cmd->add_option("--out", pl.out, "Output directory (default: results dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) {
            if (!gen.config_file.empty()) {
                auto kv = parse_config_file(gen.config_file);
                config_override(gen_cmd, kv, "--count", "count", gen.count);
                config_override(gen_cmd, kv, "--seed", "seed", gen.seed);
                config_override(gen_cmd, kv, "--split", "split", gen.split);
                if (gen.count <= 0) throw ContractError("count must be positive");
            }
            return run_gen_data(gen);
        }
        if (train_cmd->parsed()) {
            if (!tr.config_file.empty()) {
                auto kv = parse_config_file(tr.config_file);
                config_override(train_cmd, kv, "--variant", "variant", tr.variant);
                config_override(train_cmd, kv, "--epochs", "epochs", tr.cfg.epochs);
                config_override(train_cmd, kv, "--batch", "batch", tr.cfg.batch_size);
                config_override(train_cmd, kv, "--seed", "seed", tr.cfg.seed);
                config_override(train_cmd, kv, "--lr", "lr", tr.cfg.peak_lr);
                config_override(train_cmd, kv, "--warmup", "warmup", tr.cfg.warmup_steps);
                config_override(train_cmd, kv, "--accum", "accum", tr.cfg.accumulation_steps);
                config_override(train_cmd, kv, "--clip", "clip", tr.cfg.clip_max_norm);
                config_override(train_cmd, kv, "--weight-decay", "weight_decay",
                                tr.cfg.weight_decay);
                config_override(train_cmd, kv, "--n", "n", tr.cfg.proj_n);
                config_override(train_cmd, kv, "--learnable", "learnable", tr.cfg.proj_learnable);
                config_override(train_cmd, kv, "--normalize", "normalize", tr.cfg.proj_normalize);
                config_override(train_cmd, kv, "--d", "d", tr.cfg.d);
                config_override(train_cmd, kv, "--d-tok", "d_tok", tr.cfg.d_tok);
                config_override(train_cmd, kv, "--sigma", "sigma", tr.cfg.image_noise_sigma);
            }
            return run_train(tr, train_cmd);
        }
        if (eval_cmd->parsed()) return run_eval(ev);
        if (ablate_cmd->parsed()) {
            if (!ab.config_file.empty()) {
                auto kv = parse_config_file(ab.config_file);
                config_override(ablate_cmd, kv, "--epochs", "epochs", ab.cfg.epochs);
                config_override(ablate_cmd, kv, "--batch", "batch", ab.cfg.batch_size);
                config_override(ablate_cmd, kv, "--seed", "seed", ab.cfg.seed);
            }
            return run_ablate(ab);
        }
        if (plot_cmd->parsed()) return run_plot(pl);
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ContractError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
