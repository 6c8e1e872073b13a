#pragma once

#include <string>
#include <vector>

#include "semclip/scene.hpp"

namespace semclip {

struct DatasetRecord {
    Scene scene;
    CaptionTriple triple;
};

struct Dataset {
    std::vector<DatasetRecord> train;
    std::vector<DatasetRecord> test;
    long count = 0;
    uint64_t seed = 0;
    double split_fraction = 0.0;
    Vocabulary vocab;
};

/// Generate-then-validate: candidate triples that fail the symbolic validator
/// are regenerated. Distinct scenes are partitioned between train and test by
/// a seeded shuffle, so scene identifiers never cross the split.
Dataset generate_dataset(long count, uint64_t seed, double split_fraction);

/// Writes train.jsonl, test.jsonl and manifest.json under out_dir. Output is
/// byte-stable for a given (count, seed, split_fraction).
void write_dataset(const Dataset& ds, const std::string& out_dir);

/// Loads and re-validates a dataset directory written by write_dataset.
Dataset load_dataset(const std::string& dir);

uint64_t file_hash(const std::string& path);

std::string dataset_manifest_path(const std::string& dir);

}  // namespace semclip
