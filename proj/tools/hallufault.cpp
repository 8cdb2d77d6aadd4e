#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hallufault/engine.hpp"
#include "hallufault/experiments.hpp"
#include "hallufault/stats/battery.hpp"

namespace fs = std::filesystem;
using namespace hallufault;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::uint64_t default_base_seed() {
    if (const char* env = std::getenv("HALLUFAULT_BASE_SEED"))
        return std::stoull(env);
    return BatchParams{}.base_seed;
}

int cmd_run(const std::string& scenario_file, const std::string& hi_file, std::uint64_t seed,
            const std::string& out_prefix) {
    std::string scenario_text = slurp(scenario_file);
    ScenarioConfig scenario = scenario_from_json(scenario_text);
    ControllerParams params = controller_params_from_scenario_json(scenario_text);
    HIConfig hi = hi_from_json(slurp(hi_file));

    RunResult result = run(scenario, hi, seed, params);
    spit(out_prefix + ".csv", result.log.to_csv());
    spit(out_prefix + ".json", sidecar_json(result, scenario, hi) + "\n");
    std::printf("outcome=%s min_distance=%s valid=%s\n", to_label(result.outcome).c_str(),
                std::isfinite(result.min_distance)
                    ? std::to_string(result.min_distance).c_str()
                    : "n/a",
                result.valid ? "true" : "false");
    return result.valid ? 0 : 2;
}

int cmd_batch(const std::string& scenario_file, const std::string& params_file,
              const std::string& out_dir, int runs, int baseline_runs, long long base_seed,
              int jobs) {
    ScenarioConfig scenario;
    ControllerParams controller;
    if (!scenario_file.empty()) {
        std::string text = slurp(scenario_file);
        scenario = scenario_from_json(text);
        controller = controller_params_from_scenario_json(text);
    }
    BatchParams params;
    params.base_seed = default_base_seed();
    if (!params_file.empty()) params = batch_params_from_json(slurp(params_file));
    if (runs > 0) params.runs_per_condition = runs;
    if (baseline_runs > 0) params.baseline_runs = baseline_runs;
    if (base_seed >= 0) params.base_seed = static_cast<std::uint64_t>(base_seed);
    if (jobs > 0) params.jobs = jobs;

    fs::create_directories(out_dir);
    auto sink = [&](const Condition& cond, const RunRecord& rec, const RunResult& result) {
        char name[64];
        std::snprintf(name, sizeof(name), "run_%06ld", rec.run_id);
        std::string stem = (fs::path(out_dir) / name).string();
        if (!rec.valid) stem += "_invalid_" + std::to_string(rec.seed);
        nlohmann::json j = nlohmann::json::parse(sidecar_json(result, scenario, cond.hi));
        j["run_id"] = rec.run_id;
        j["condition_id"] = rec.condition_id;
        spit(stem + ".csv", result.log.to_csv());
        spit(stem + ".json", j.dump(2) + "\n");
    };

    auto records = run_batch(condition_matrix(), scenario, params, controller, sink);
    std::printf("batch: %zu valid runs written to %s\n", records.size(), out_dir.c_str());
    return 0;
}

int cmd_consolidate(const std::string& log_dir, const std::string& out_file) {
    ConsolidateStats stats;
    auto records = consolidate(log_dir, &stats);
    if (records.empty())
        std::fprintf(stderr, "consolidate: warning: no valid runs found in %s\n",
                     log_dir.c_str());
    spit(out_file, dataset_to_csv(records));
    std::printf("consolidate: %zu files, %zu skipped, %zu invalid; dataset rows: %zu "
                "(%zu OFF, %zu ON)\n",
                stats.files_seen, stats.files_skipped, stats.invalid_runs, records.size(),
                stats.records_off, stats.records_on);
    return 0;
}

int cmd_analyze(const std::string& dataset_file, const std::string& out_dir, bool tables,
                bool summary) {
    auto records = dataset_from_csv(slurp(dataset_file));
    auto report = stats::hypothesis_battery(records);
    stats::write_report(report, out_dir, tables, summary);
    for (const auto& fa : report.factors) {
        if (fa.skipped) {
            std::printf("H%d (%s): skipped: %s\n", fa.hypothesis,
                        stats::factor_name(fa.factor).c_str(), fa.skip_reason.c_str());
        } else {
            std::printf("H%d (%s): H%d.1 %s, H%d.2 %s\n", fa.hypothesis,
                        stats::factor_name(fa.factor).c_str(), fa.hypothesis,
                        fa.accident_significant ? "accepted" : "rejected", fa.hypothesis,
                        fa.distance_significant ? "accepted" : "rejected");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hallucination-injection test bench for AV perception safety"};
    app.require_subcommand(1);

    std::string scenario_file, hi_file, out_prefix, out_dir, log_dir, dataset_file, params_file;
    std::uint64_t seed = 0;
    int runs = -1, baseline_runs = -1, jobs = -1;
    long long base_seed = -1;

    auto* run_cmd = app.add_subcommand("run", "Execute a single simulation run");
    run_cmd->add_option("--scenario", scenario_file, "Scenario JSON file")->required();
    run_cmd->add_option("--hi", hi_file, "Hallucination-injection JSON file")->required();
    run_cmd->add_option("--seed", seed, "Run seed")->required();
    run_cmd->add_option("--out", out_prefix, "Output prefix (.csv and .json)")->required();

    auto* batch_cmd = app.add_subcommand("batch", "Run the 201-condition experiment matrix");
    batch_cmd->add_option("--scenario", scenario_file, "Scenario JSON file (defaults apply)");
    batch_cmd->add_option("--params", params_file, "Batch parameters JSON file");
    batch_cmd->add_option("--runs", runs, "Runs per HI condition");
    batch_cmd->add_option("--baseline-runs", baseline_runs, "Runs for the baseline condition");
    batch_cmd->add_option("--base-seed", base_seed, "Base seed");
    batch_cmd->add_option("--jobs", jobs, "Worker threads");
    batch_cmd->add_option("--out", out_dir, "Log output directory")->required();

    auto* cons_cmd = app.add_subcommand("consolidate", "Merge run logs into the dataset");
    cons_cmd->add_option("--logs", log_dir, "Log directory")->required();
    cons_cmd->add_option("--out", dataset_file, "Output dataset CSV")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "Fit the hypothesis battery, emit tables");
    analyze_cmd->add_option("--dataset", dataset_file, "Dataset CSV")->required();
    analyze_cmd->add_option("--out", out_dir, "Output directory")->required();

    auto* report_cmd = app.add_subcommand("report", "Emit Markdown summary and plot series");
    report_cmd->add_option("--dataset", dataset_file, "Dataset CSV")->required();
    report_cmd->add_option("--out", out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(scenario_file, hi_file, seed, out_prefix);
        if (batch_cmd->parsed())
            return cmd_batch(scenario_file, params_file, out_dir, runs, baseline_runs,
                             base_seed, jobs);
        if (cons_cmd->parsed()) return cmd_consolidate(log_dir, dataset_file);
        if (analyze_cmd->parsed()) return cmd_analyze(dataset_file, out_dir, true, false);
        if (report_cmd->parsed()) return cmd_analyze(dataset_file, out_dir, false, true);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
