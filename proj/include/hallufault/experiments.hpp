#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hallufault/engine.hpp"

namespace hallufault {

struct Condition {
    int condition_id = 0;  // 0 is the baseline (HI OFF)
    HIConfig hi;
};

struct RunRecord {
    long run_id = 0;
    int condition_id = 0;
    bool module_activation = false;
    std::string hallucination_type;  // empty for baseline
    std::string affected_domain;
    std::string configuration;
    std::optional<double> probability;
    std::string persistence = "Baseline";
    std::string outcome;
    bool accident = false;
    std::optional<double> min_distance;
    std::uint64_t seed = 0;
    bool valid = true;
};

struct BatchParams {
    int runs_per_condition = 50;
    int baseline_runs = 1000;
    std::uint64_t base_seed = 0x48414c4c55ULL;
    int jobs = 1;
    int retry_budget = 10;  // per (condition, run) slot, fresh derived seed each retry
};

std::string batch_params_to_json(const BatchParams& p);
BatchParams batch_params_from_json(const std::string& text);

// Baseline plus the full cross product of the 20 configuration labels,
// 5 probabilities and 2 persistences: 201 conditions.
std::vector<Condition> condition_matrix();

// Optional sink invoked for every valid run, e.g. to write the log files.
using LogSink = std::function<void(const Condition&, const RunRecord&, const RunResult&)>;

// Executes the batch. Output order is (condition_id, run_index) regardless of
// the number of workers.
std::vector<RunRecord> run_batch(const std::vector<Condition>& matrix,
                                 const ScenarioConfig& scenario, const BatchParams& params,
                                 const ControllerParams& controller = {},
                                 const LogSink& sink = nullptr);

std::string dataset_header();
std::string record_to_csv_row(const RunRecord& r);
std::string dataset_to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> dataset_from_csv(const std::string& text);

struct ConsolidateStats {
    size_t files_seen = 0;
    size_t files_skipped = 0;
    size_t invalid_runs = 0;
    size_t records_on = 0;
    size_t records_off = 0;
};

// Scans a directory of sidecar JSON files into the analysis dataset.
std::vector<RunRecord> consolidate(const std::string& log_dir, ConsolidateStats* stats = nullptr);

}  // namespace hallufault
