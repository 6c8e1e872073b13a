#include "semclip/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace semclip {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Status strings may carry arbitrary error text; keep the CSV single-line
// and comma-free.
std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write report: " + path);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) fields.push_back(cur);
    return fields;
}

}  // namespace

void write_eval_csv(const EvalReport& report, const std::string& dataset_name,
                    const std::string& path) {
    auto out = open_out(path);
    out << "metric,dataset,variant,value\n";
    const auto row = [&](const char* metric, double v) {
        out << metric << ',' << sanitize(dataset_name) << ',' << sanitize(report.variant) << ','
            << fmt(v) << '\n';
    };
    row("original_top1", report.acc_orig);
    row("paraphrase_top1", report.acc_para);
    row("original_over_negation", report.acc_neg);
    row("negation_rescaled", report.acc_neg_rescaled);
    row("composite", report.composite);
    if (!out) throw DataError("report write failed: " + path);
}

void write_zero_shot_csv(const std::vector<EvalReport>& reports, const std::string& path) {
    auto out = open_out(path);
    out << "task,variant,standard_acc,negated_acc,delta\n";
    for (const auto& r : reports) {
        if (!r.has_zero_shot) continue;
        out << "relation_classification," << sanitize(r.variant) << ','
            << fmt(r.zero_shot.standard_acc) << ',' << fmt(r.zero_shot.negated_acc) << ','
            << fmt(r.zero_shot.delta) << '\n';
    }
    if (!out) throw DataError("report write failed: " + path);
}

void write_ablation_csv(const std::vector<AblationCell>& cells, const std::string& path) {
    auto out = open_out(path);
    out << "variant,n,learnable,normalize,status,original_top1,paraphrase_top1,"
           "original_over_negation,composite,zs_standard,zs_negated,zs_delta\n";
    for (const auto& c : cells) {
        out << sanitize(c.variant) << ',' << c.n << ',' << (c.learnable ? 1 : 0) << ','
            << (c.normalize ? 1 : 0) << ',' << sanitize(c.status) << ',';
        if (c.status == "ok") {
            out << fmt(c.report.acc_orig) << ',' << fmt(c.report.acc_para) << ','
                << fmt(c.report.acc_neg) << ',' << fmt(c.report.composite) << ',';
            if (c.report.has_zero_shot) {
                out << fmt(c.report.zero_shot.standard_acc) << ','
                    << fmt(c.report.zero_shot.negated_acc) << ','
                    << fmt(c.report.zero_shot.delta);
            } else {
                out << ",,";
            }
        } else {
            out << ",,,,,,";
        }
        out << '\n';
    }
    if (!out) throw DataError("report write failed: " + path);
}

void write_table1_csv(const std::vector<AblationCell>& cells, const TrainConfig& base,
                      const std::string& dataset_name, const std::string& path) {
    auto out = open_out(path);
    out << "metric,dataset,variant,value\n";
    for (const std::string& variant : variant_names()) {
        const AblationCell* picked = nullptr;
        for (const auto& c : cells) {
            if (c.variant == variant && c.n == base.proj_n &&
                c.learnable == base.proj_learnable && c.normalize == base.proj_normalize &&
                c.status == "ok") {
                picked = &c;
                break;
            }
        }
        if (!picked) continue;
        const auto row = [&](const char* metric, double v) {
            out << metric << ',' << sanitize(dataset_name) << ',' << variant << ',' << fmt(v)
                << '\n';
        };
        row("original_top1", picked->report.acc_orig);
        row("paraphrase_top1", picked->report.acc_para);
        row("original_over_negation", picked->report.acc_neg);
        row("composite", picked->report.composite);
    }
    if (!out) throw DataError("report write failed: " + path);
}

std::vector<AblationCell> read_ablation_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open sweep table: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty sweep table: " + path);
    std::vector<AblationCell> cells;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() < 12) f.resize(12);
        AblationCell c;
        c.variant = f[0];
        try {
            c.n = std::stoi(f[1]);
            c.learnable = f[2] == "1";
            c.normalize = f[3] == "1";
            c.status = f[4];
            if (c.status == "ok") {
                c.report.variant = c.variant;
                c.report.acc_orig = std::stod(f[5]);
                c.report.acc_para = std::stod(f[6]);
                c.report.acc_neg = std::stod(f[7]);
                c.report.acc_neg_rescaled = rescale_negation_accuracy(c.report.acc_neg);
                c.report.composite = std::stod(f[8]);
                if (!f[9].empty()) {
                    c.report.has_zero_shot = true;
                    c.report.zero_shot.standard_acc = std::stod(f[9]);
                    c.report.zero_shot.negated_acc = std::stod(f[10]);
                    c.report.zero_shot.delta = std::stod(f[11]);
                }
            }
        } catch (const std::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        cells.push_back(std::move(c));
    }
    return cells;
}

}  // namespace semclip
