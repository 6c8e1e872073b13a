#pragma once

#include <string>
#include <vector>

#include "semclip/evaluator.hpp"

namespace semclip {

/// metric,dataset,variant,value rows; values printed with full precision so
/// downstream checks can recompute the composite exactly.
void write_eval_csv(const EvalReport& report, const std::string& dataset_name,
                    const std::string& path);

/// task,variant,standard_acc,negated_acc,delta; the delta keeps its sign.
void write_zero_shot_csv(const std::vector<EvalReport>& reports, const std::string& path);

/// One row per (variant x grid cell) with status and metrics.
void write_ablation_csv(const std::vector<AblationCell>& cells, const std::string& path);

/// Table-style summary of the sweep at the base config's grid cell.
void write_table1_csv(const std::vector<AblationCell>& cells, const TrainConfig& base,
                      const std::string& dataset_name, const std::string& path);

std::vector<AblationCell> read_ablation_csv(const std::string& path);

}  // namespace semclip
