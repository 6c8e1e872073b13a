#include "semclip/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace semclip {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json scene_to_json(const Scene& s) {
    return json{{"color_a", to_word(s.a.color)},
                {"shape_a", to_word(s.a.shape)},
                {"relation", relation_name(s.relation)},
                {"color_b", to_word(s.b.color)},
                {"shape_b", to_word(s.b.shape)}};
}

Scene scene_from_json(const json& j) {
    Scene s;
    s.a = {color_from_word(j.at("color_a").get<std::string>()),
           shape_from_word(j.at("shape_a").get<std::string>())};
    s.relation = relation_from_name(j.at("relation").get<std::string>());
    s.b = {color_from_word(j.at("color_b").get<std::string>()),
           shape_from_word(j.at("shape_b").get<std::string>())};
    return s;
}

void write_records(const std::string& path, const std::vector<DatasetRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    for (const auto& r : records) {
        json line{{"scene_id", r.triple.scene_id},
                  {"scene", scene_to_json(r.scene)},
                  {"original", r.triple.original},
                  {"paraphrase", r.triple.paraphrase},
                  {"negation", r.triple.negation},
                  {"strategy", to_string(r.triple.strategy)}};
        out << line.dump() << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

std::vector<DatasetRecord> read_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::vector<DatasetRecord> records;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        DatasetRecord r;
        r.scene = scene_from_json(j.at("scene"));
        r.triple.scene_id = j.at("scene_id").get<std::string>();
        r.triple.original = j.at("original").get<std::string>();
        r.triple.paraphrase = j.at("paraphrase").get<std::string>();
        r.triple.negation = j.at("negation").get<std::string>();
        r.triple.strategy = negation_strategy_from_string(j.at("strategy").get<std::string>());
        std::string reason;
        if (r.triple.scene_id != r.scene.id()) {
            throw DataError(path + ":" + std::to_string(lineno) + ": scene_id mismatch");
        }
        if (!validate_triple(r.triple, r.scene, &reason)) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + reason);
        }
        r.triple.validated = true;
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

Dataset generate_dataset(long count, uint64_t seed, double split_fraction) {
    if (count <= 0) throw ContractError("generate_dataset: count must be positive");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
        throw ContractError("generate_dataset: split_fraction must lie in (0, 1)");
    }

    std::vector<DatasetRecord> all(count);
    // Each record draws from its own derived stream, so generation order (and
    // any per-record parallelism) cannot change the output.
    #pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) {
        Rng rng = make_rng(seed, static_cast<uint64_t>(i));
        std::uniform_int_distribution<int> coin(0, 1);
        DatasetRecord rec;
        // Generate-then-validate; failed candidates are replaced.
        for (;;) {
            Scene s = sample_scene(rng);
            NegationStrategy strategy =
                coin(rng) == 0 ? NegationStrategy::LexicalNot : NegationStrategy::RelationFlip;
            CaptionTriple t = make_triple(s, strategy);
            if (t.validated) {
                rec = {s, std::move(t)};
                break;
            }
        }
        all[i] = std::move(rec);
    }

    // Distinct scenes in first-appearance order, then a seeded shuffle fixes
    // the train/test partition of scene identifiers.
    std::vector<std::string> distinct;
    std::unordered_set<std::string> seen;
    for (const auto& r : all) {
        if (seen.insert(r.triple.scene_id).second) distinct.push_back(r.triple.scene_id);
    }
    Rng split_rng = make_rng(seed, 0x53504c4954ULL);  // "SPLIT" stream
    std::shuffle(distinct.begin(), distinct.end(), split_rng);
    long n_train_scenes = std::lround(split_fraction * static_cast<double>(distinct.size()));
    n_train_scenes = std::clamp<long>(n_train_scenes, 1, static_cast<long>(distinct.size()) - 1);
    std::unordered_map<std::string, bool> is_train;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
        is_train[distinct[i]] = static_cast<long>(i) < n_train_scenes;
    }

    Dataset ds;
    ds.count = count;
    ds.seed = seed;
    ds.split_fraction = split_fraction;
    for (auto& r : all) {
        (is_train.at(r.triple.scene_id) ? ds.train : ds.test).push_back(std::move(r));
    }
    return ds;
}

void write_dataset(const Dataset& ds, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create directory " + out_dir + ": " + ec.message());

    const std::string train_path = (fs::path(out_dir) / "train.jsonl").string();
    const std::string test_path = (fs::path(out_dir) / "test.jsonl").string();
    write_records(train_path, ds.train);
    write_records(test_path, ds.test);

    json manifest{{"count", ds.count},
                  {"seed", ds.seed},
                  {"split_fraction", ds.split_fraction},
                  {"vocab_hash", ds.vocab.hash()},
                  {"train_count", ds.train.size()},
                  {"test_count", ds.test.size()},
                  {"files", json{{"train", "train.jsonl"}, {"test", "test.jsonl"}}}};
    std::ofstream out(dataset_manifest_path(out_dir), std::ios::binary);
    if (!out) throw DataError("cannot write manifest under " + out_dir);
    out << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::string& dir) {
    const std::string manifest_path = dataset_manifest_path(dir);
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw DataError("dataset manifest not found: " + manifest_path);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw DataError(manifest_path + ": " + e.what());
    }

    Dataset ds;
    ds.count = manifest.at("count").get<long>();
    ds.seed = manifest.at("seed").get<uint64_t>();
    ds.split_fraction = manifest.at("split_fraction").get<double>();
    const uint64_t vocab_hash = manifest.at("vocab_hash").get<uint64_t>();
    if (vocab_hash != ds.vocab.hash()) {
        throw DataError("vocabulary hash mismatch for dataset " + dir);
    }
    ds.train = read_records((fs::path(dir) / manifest.at("files").at("train").get<std::string>()).string());
    ds.test = read_records((fs::path(dir) / manifest.at("files").at("test").get<std::string>()).string());
    return ds;
}

uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot hash missing file: " + path);
    char buf[1 << 14];
    uint64_t h = 0xcbf29ce484222325ULL;
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        h = fnv1a(buf, static_cast<std::size_t>(in.gcount()), h);
    }
    return h;
}

std::string dataset_manifest_path(const std::string& dir) {
    return (fs::path(dir) / "manifest.json").string();
}

}  // namespace semclip
