#include "hallufault/stats/battery.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace hallufault::stats {

namespace {

std::string fmt(double v, int prec = 6) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_report: cannot open " + path);
    out << content;
}

const Factor kFactors[] = {Factor::ModuleActivation, Factor::HallucinationType,
                           Factor::AffectedDomain,   Factor::Configuration,
                           Factor::Probability,      Factor::Persistence};

std::string table_stem(Factor f) {
    switch (f) {
        case Factor::ModuleActivation: return "module_activation";
        case Factor::HallucinationType: return "type";
        case Factor::AffectedDomain: return "domain";
        case Factor::Configuration: return "configuration";
        case Factor::Probability: return "probability";
        case Factor::Persistence: return "persistence";
    }
    return "?";
}

}  // namespace

std::string factor_name(Factor f) {
    switch (f) {
        case Factor::ModuleActivation: return "Module Activation";
        case Factor::HallucinationType: return "Hallucination Type";
        case Factor::AffectedDomain: return "Affected Domain";
        case Factor::Configuration: return "Hallucination Configuration";
        case Factor::Probability: return "Hallucination Probability";
        case Factor::Persistence: return "Hallucination Persistence";
    }
    return "?";
}

std::string factor_reference(Factor f) {
    return f == Factor::ModuleActivation ? "OFF" : "Baseline";
}

std::string factor_level(Factor f, const RunRecord& r) {
    if (f == Factor::ModuleActivation) return r.module_activation ? "ON" : "OFF";
    if (!r.module_activation) return "Baseline";
    switch (f) {
        case Factor::HallucinationType: return r.hallucination_type;
        case Factor::AffectedDomain: return r.affected_domain;
        case Factor::Configuration: return r.configuration;
        case Factor::Probability: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", r.probability.value_or(0.0));
            return buf;
        }
        case Factor::Persistence: return r.persistence;
        case Factor::ModuleActivation: break;
    }
    return "?";
}

BatteryReport hypothesis_battery(const std::vector<RunRecord>& dataset, double alpha) {
    BatteryReport report;
    report.alpha = alpha;
    for (const auto& r : dataset) {
        if (!r.valid) continue;
        ++report.n_total;
        r.module_activation ? ++report.n_on : ++report.n_off;
    }

    int hypothesis = 1;
    for (Factor f : kFactors) {
        FactorAnalysis fa;
        fa.factor = f;
        fa.hypothesis = hypothesis++;

        Design logit_design, ols_design;
        logit_design.reference = ols_design.reference = factor_reference(f);
        std::set<std::string> levels;
        for (const auto& r : dataset) {
            if (!r.valid) continue;
            std::string level = factor_level(f, r);
            levels.insert(level);
            logit_design.response.push_back(r.accident ? 1.0 : 0.0);
            logit_design.labels.push_back(level);
            if (r.min_distance) {
                ols_design.response.push_back(*r.min_distance);
                ols_design.labels.push_back(level);
            }
        }

        if (levels.size() < 2 || !levels.count(factor_reference(f))) {
            fa.skipped = true;
            fa.skip_reason = "factor has fewer than two observed levels "
                             "(reference '" + factor_reference(f) + "' plus at least one more "
                             "is required)";
            report.factors.push_back(std::move(fa));
            continue;
        }

        try {
            fa.logistic = fit_logistic(logit_design);
            fa.lr = lr_test(*fa.logistic);
            fa.accident_significant = fa.lr.p < alpha;
        } catch (const std::exception& e) {
            fa.skipped = true;
            fa.skip_reason = std::string("logistic fit failed: ") + e.what();
        }
        try {
            fa.ols = fit_ols(ols_design);
            fa.distance_significant = fa.ols->anova.p < alpha;
        } catch (const std::exception& e) {
            if (!fa.skipped) {
                fa.skipped = true;
                fa.skip_reason = std::string("OLS fit failed: ") + e.what();
            }
        }
        report.factors.push_back(std::move(fa));
    }
    return report;
}

void write_report(const BatteryReport& report, const std::string& out_dir,
                  bool tables, bool summary) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

    const std::string table_header = "parameter,estimate,se,ci_low,ci_high,stat,p\n";

    std::string anova_acc = "predictor,lr_chi2,wald_chi2,df,p\n";
    std::string anova_dist = "predictor,ss,df,ms,f,p,partial_eta_sq,eta_ci_low,eta_ci_high\n";
    std::string plot_or = "factor,level,odds_ratio,ci_low,ci_high\n";
    std::string plot_beta = "factor,level,beta,ci_low,ci_high\n";

    std::string md = "# Hypothesis test report\n\n";
    md += "Dataset: " + std::to_string(report.n_total) + " valid runs (" +
          std::to_string(report.n_off) + " HI OFF, " + std::to_string(report.n_on) +
          " HI ON). Significance threshold alpha = " + fmt(report.alpha) + ".\n\n";

    for (const auto& fa : report.factors) {
        std::string stem = table_stem(fa.factor);
        std::string h = "H" + std::to_string(fa.hypothesis);
        md += "## " + h + ": " + factor_name(fa.factor) + "\n\n";

        if (fa.skipped) {
            md += "Skipped: " + fa.skip_reason + "\n\n";
            continue;
        }

        if (fa.logistic) {
            std::string csv = table_header;
            for (const auto& t : fa.logistic->terms) {
                double odds = std::exp(t.coef);
                csv += t.name + ',' + fmt(odds) + ',' + fmt(odds * t.se) + ',' +
                       fmt(std::exp(t.ci_low)) + ',' + fmt(std::exp(t.ci_high)) + ',' +
                       fmt(t.stat) + ',' + fmt(t.p) + "\n";
                if (t.name != "(Intercept)")
                    plot_or += stem + ',' + t.name + ',' + fmt(odds) + ',' +
                               fmt(std::exp(t.ci_low)) + ',' + fmt(std::exp(t.ci_high)) + "\n";
            }
            if (tables) write_file(path("odds_ratio_" + stem + ".csv"), csv);
            anova_acc += factor_name(fa.factor) + ',' + fmt(fa.lr.chi2) + ',' +
                         fmt(fa.logistic->wald_chi2) + ',' + std::to_string(fa.lr.df) + ',' +
                         fmt(fa.lr.p) + "\n";
            md += "- " + h + ".1 (accident likelihood): LR chi2 = " + fmt(fa.lr.chi2, 5) +
                  ", df = " + std::to_string(fa.lr.df) + ", p = " + fmt(fa.lr.p, 3) +
                  " -> " + (fa.accident_significant ? "accepted" : "rejected") + ". (Wald chi2 = " +
                  fmt(fa.logistic->wald_chi2, 5) + ", reported for comparison; decisions use LR.)\n";
        }
        if (fa.ols) {
            std::string csv = table_header;
            for (const auto& t : fa.ols->terms) {
                csv += t.name + ',' + fmt(t.coef) + ',' + fmt(t.se) + ',' + fmt(t.ci_low) + ',' +
                       fmt(t.ci_high) + ',' + fmt(t.stat) + ',' + fmt(t.p) + "\n";
                if (t.name != "(Intercept)")
                    plot_beta += stem + ',' + t.name + ',' + fmt(t.coef) + ',' + fmt(t.ci_low) +
                                 ',' + fmt(t.ci_high) + "\n";
            }
            if (tables) write_file(path("linear_" + stem + ".csv"), csv);
            const auto& a = fa.ols->anova;
            anova_dist += factor_name(fa.factor) + ',' + fmt(a.ss_effect) + ',' +
                          std::to_string(a.df1) + ',' + fmt(a.ms) + ',' + fmt(a.f) + ',' +
                          fmt(a.p) + ',' + fmt(a.partial_eta_sq) + ',' + fmt(a.eta_ci_low) +
                          ',' + fmt(a.eta_ci_high) + "\n";
            md += "- " + h + ".2 (minimum distance): F(" + std::to_string(a.df1) + ", " +
                  std::to_string(fa.ols->df_resid) + ") = " + fmt(a.f, 5) + ", p = " +
                  fmt(a.p, 3) + ", partial eta^2 = " + fmt(a.partial_eta_sq, 3) + " [" +
                  fmt(a.eta_ci_low, 3) + ", " + fmt(a.eta_ci_high, 3) + "] -> " +
                  (fa.distance_significant ? "accepted" : "rejected") + ".\n";
        }
        md += "\n";
    }

    if (tables) {
        write_file(path("anova_accident.csv"), anova_acc);
        write_file(path("anova_min_distance.csv"), anova_dist);
    }
    if (summary) {
        write_file(path("plot_odds_ratio.csv"), plot_or);
        write_file(path("plot_beta.csv"), plot_beta);
        write_file(path("report.md"), md);
    }
}

}  // namespace hallufault::stats
