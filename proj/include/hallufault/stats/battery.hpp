#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hallufault/experiments.hpp"
#include "hallufault/stats/models.hpp"

namespace hallufault::stats {

// The six factors tested against the baseline reference, two hypotheses each
// (accident likelihood via logistic regression, minimum distance via OLS).
enum class Factor {
    ModuleActivation,
    HallucinationType,
    AffectedDomain,
    Configuration,
    Probability,
    Persistence,
};

std::string factor_name(Factor f);

// Level label of one record under a factor; baseline rows collapse to the
// reference level.
std::string factor_level(Factor f, const RunRecord& record);
std::string factor_reference(Factor f);

struct FactorAnalysis {
    Factor factor = Factor::ModuleActivation;
    int hypothesis = 1;  // H<index>
    bool skipped = false;
    std::string skip_reason;

    std::optional<LogisticFit> logistic;  // H<i>.1
    LrTestResult lr;
    std::optional<OlsFit> ols;            // H<i>.2
    bool accident_significant = false;    // LR p < alpha
    bool distance_significant = false;    // F p < alpha
};

struct BatteryReport {
    double alpha = 0.05;
    std::vector<FactorAnalysis> factors;
    long n_total = 0, n_on = 0, n_off = 0;
};

// Runs all twelve tests H1.1..H6.2 on the consolidated dataset. Records with
// no minimum distance are excluded from the OLS side only.
BatteryReport hypothesis_battery(const std::vector<RunRecord>& dataset, double alpha = 0.05);

// Appendix-style tables (CSV, one per table), plot-ready series, and a
// Markdown summary, written into the output directory. `tables` selects the
// per-factor regression/ANOVA CSVs, `summary` the Markdown narrative plus the
// plot-ready series.
void write_report(const BatteryReport& report, const std::string& out_dir,
                  bool tables = true, bool summary = true);

}  // namespace hallufault::stats
