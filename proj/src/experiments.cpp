#include "hallufault/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hallufault {

namespace {

const double kProbabilities[] = {0.01, 0.05, 0.10, 0.25, 0.50};
const Persistence kPersistences[] = {Persistence::Intermittent, Persistence::Permanent};

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string format_probability(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

std::string batch_params_to_json(const BatchParams& p) {
    nlohmann::json j{{"runs_per_condition", p.runs_per_condition},
                     {"baseline_runs", p.baseline_runs},
                     {"base_seed", p.base_seed},
                     {"jobs", p.jobs},
                     {"retry_budget", p.retry_budget}};
    return j.dump(2);
}

BatchParams batch_params_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("batch params: invalid JSON: ") + e.what());
    }
    BatchParams p;
    if (j.contains("runs_per_condition")) p.runs_per_condition = j.at("runs_per_condition");
    if (j.contains("baseline_runs")) p.baseline_runs = j.at("baseline_runs");
    if (j.contains("base_seed")) p.base_seed = j.at("base_seed");
    if (j.contains("jobs")) p.jobs = j.at("jobs");
    if (j.contains("retry_budget")) p.retry_budget = j.at("retry_budget");
    if (p.runs_per_condition < 1 || p.baseline_runs < 1)
        throw ConfigError("batch params: run counts must be >= 1");
    return p;
}

std::vector<Condition> condition_matrix() {
    std::vector<std::pair<HallucinationType, HallucinationConfiguration>> configs;
    configs.emplace_back(HallucinationType::LinDrift, LocationCfg{});
    for (int car = 1; car <= 3; ++car)
        configs.emplace_back(HallucinationType::Missed, TargetCarCfg{car});
    for (int car = 1; car <= 3; ++car)
        configs.emplace_back(HallucinationType::Phant, TargetCarCfg{car});
    for (Side side : {Side::L, Side::R})
        for (double mag : {5.0, 10.0, 20.0, 25.0})
            configs.emplace_back(HallucinationType::AngDrift, AngleCfg{mag, side});
    for (double center : {40.0, 50.0, 60.0})
        configs.emplace_back(HallucinationType::Blind, BlindCfg{center, Side::L});
    for (int cycles : {20, 40})
        configs.emplace_back(HallucinationType::Latency, LatencyCfg{cycles});

    std::vector<Condition> matrix;
    matrix.push_back(Condition{0, HIConfig{}});  // baseline, HI OFF
    int id = 1;
    for (const auto& [type, cfg] : configs)
        for (double prob : kProbabilities)
            for (Persistence pers : kPersistences) {
                HIConfig hi;
                hi.module_activation = true;
                hi.type = type;
                hi.configuration = cfg;
                hi.probability = prob;
                hi.persistence = pers;
                matrix.push_back(Condition{id++, hi});
            }
    return matrix;
}

std::vector<RunRecord> run_batch(const std::vector<Condition>& matrix,
                                 const ScenarioConfig& scenario, const BatchParams& params,
                                 const ControllerParams& controller, const LogSink& sink) {
    if (params.runs_per_condition < 1 || params.baseline_runs < 1)
        throw ConfigError("run_batch: run counts must be >= 1");
    scenario.validate();

    struct Slot {
        size_t cond_index;
        int run_index;
        long run_id;
    };
    std::vector<Slot> slots;
    long run_id = 0;
    for (size_t c = 0; c < matrix.size(); ++c) {
        int n = matrix[c].condition_id == 0 ? params.baseline_runs : params.runs_per_condition;
        for (int r = 0; r < n; ++r) slots.push_back(Slot{c, r, run_id++});
    }

    std::vector<RunRecord> records(slots.size());
    std::string failure;

#ifdef _OPENMP
    int jobs = std::max(1, params.jobs);
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs)
#endif
    for (long i = 0; i < static_cast<long>(slots.size()); ++i) {
        const Slot& slot = slots[i];
        const Condition& cond = matrix[slot.cond_index];
        RunRecord rec;
        rec.run_id = slot.run_id;
        rec.condition_id = cond.condition_id;
        rec.module_activation = cond.hi.module_activation;
        if (cond.hi.module_activation) {
            rec.hallucination_type = to_label(cond.hi.type);
            rec.affected_domain = to_label(cond.hi.domain());
            rec.configuration = configuration_label(cond.hi.type, cond.hi.configuration);
            rec.probability = cond.hi.probability;
        }
        rec.persistence = to_label(cond.hi.persistence);

        bool ok = false;
        for (int retry = 0; retry <= params.retry_budget; ++retry) {
            std::uint64_t seed =
                derive_seed(params.base_seed, static_cast<std::uint64_t>(cond.condition_id),
                            static_cast<std::uint64_t>(slot.run_index) * 64 + retry);
            RunResult result = run(scenario, cond.hi, seed, controller);
            rec.seed = seed;
            rec.outcome = to_label(result.outcome);
            rec.accident = result.outcome == Outcome::Collision;
            rec.valid = result.valid;
            if (std::isfinite(result.min_distance))
                rec.min_distance = result.min_distance;
            else
                rec.min_distance = std::nullopt;
            if (sink) sink(cond, rec, result);
            if (result.valid) {
                ok = true;
                break;
            }
        }
        if (!ok) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                if (failure.empty())
                    failure = "run_batch: retry budget exhausted for condition " +
                              std::to_string(cond.condition_id);
            }
        }
        records[i] = std::move(rec);
    }

    if (!failure.empty()) throw std::runtime_error(failure);
    return records;
}

std::string dataset_header() {
    return "run_id,condition_id,module_activation,hallucination_type,affected_domain,"
           "configuration,probability,persistence,outcome,accident,min_distance_m,seed,valid";
}

std::string record_to_csv_row(const RunRecord& r) {
    std::string out;
    out += std::to_string(r.run_id);
    out += ',' + std::to_string(r.condition_id);
    out += r.module_activation ? ",ON" : ",OFF";
    out += ',' + r.hallucination_type;
    out += ',' + r.affected_domain;
    out += ',' + r.configuration;
    out += ',';
    if (r.probability) out += format_probability(*r.probability);
    out += ',' + r.persistence;
    out += ',' + r.outcome;
    out += r.accident ? ",true" : ",false";
    out += ',';
    if (r.min_distance) out += format_double(*r.min_distance);
    out += ',' + std::to_string(r.seed);
    out += r.valid ? ",true" : ",false";
    return out;
}

std::string dataset_to_csv(const std::vector<RunRecord>& records) {
    std::string out = dataset_header() + "\n";
    for (const auto& r : records) out += record_to_csv_row(r) + "\n";
    return out;
}

std::vector<RunRecord> dataset_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("dataset: empty file");
    if (line != dataset_header()) throw std::runtime_error("dataset: unexpected header");
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream row(line);
        while (std::getline(row, field, ',')) fields.push_back(field);
        // Split drops a trailing empty field; the row has 13 columns.
        while (fields.size() < 13) fields.emplace_back();
        if (fields.size() != 13) throw std::runtime_error("dataset: malformed row: " + line);
        RunRecord r;
        r.run_id = std::stol(fields[0]);
        r.condition_id = std::stoi(fields[1]);
        r.module_activation = fields[2] == "ON";
        r.hallucination_type = fields[3];
        r.affected_domain = fields[4];
        r.configuration = fields[5];
        if (!fields[6].empty()) r.probability = std::stod(fields[6]);
        r.persistence = fields[7];
        r.outcome = fields[8];
        r.accident = fields[9] == "true";
        if (!fields[10].empty()) r.min_distance = std::stod(fields[10]);
        r.seed = std::stoull(fields[11]);
        r.valid = fields[12] == "true";
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<RunRecord> consolidate(const std::string& log_dir, ConsolidateStats* stats) {
    namespace fs = std::filesystem;
    ConsolidateStats local;
    std::vector<RunRecord> records;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(log_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto& path : files) {
        ++local.files_seen;
        try {
            std::ifstream in(path);
            nlohmann::json j = nlohmann::json::parse(in);
            if (!j.at("valid").get<bool>()) {
                ++local.invalid_runs;
                continue;
            }
            RunRecord r;
            r.run_id = j.at("run_id").get<long>();
            r.condition_id = j.at("condition_id").get<int>();
            HIConfig hi = hi_from_json(j.at("hi").dump());
            r.module_activation = hi.module_activation;
            if (hi.module_activation) {
                r.hallucination_type = to_label(hi.type);
                r.affected_domain = to_label(hi.domain());
                r.configuration = configuration_label(hi.type, hi.configuration);
                r.probability = hi.probability;
            }
            r.persistence = to_label(hi.persistence);
            r.outcome = j.at("outcome").get<std::string>();
            r.accident = r.outcome == "Collision";
            if (!j.at("min_distance").is_null())
                r.min_distance = j.at("min_distance").get<double>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.valid = true;
            records.push_back(std::move(r));
        } catch (const std::exception& e) {
            ++local.files_skipped;
            std::fprintf(stderr, "consolidate: skipping %s: %s\n", path.c_str(), e.what());
        }
    }

    std::sort(records.begin(), records.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.run_id < b.run_id; });
    for (const auto& r : records)
        r.module_activation ? ++local.records_on : ++local.records_off;
    if (stats) *stats = local;
    return records;
}

}  // namespace hallufault
