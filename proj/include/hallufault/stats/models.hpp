#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hallufault::stats {

// One-categorical-predictor design with a designated reference level; the
// model matrix is intercept + reference-coded indicators.
struct Design {
    std::vector<double> response;
    std::vector<std::string> labels;  // one per observation
    std::string reference;

    // Reference level first, remaining levels in first-appearance order.
    std::vector<std::string> levels() const;
    void validate() const;
};

struct TermStat {
    std::string name;  // "(Intercept)" or the level label
    double coef = 0.0;
    double se = 0.0;
    double stat = 0.0;  // z for logistic, t for OLS
    double p = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct LogisticFit {
    std::vector<TermStat> terms;  // log-odds scale
    double deviance = 0.0;
    double null_deviance = 0.0;
    long n = 0;
    int df_model = 0;       // non-intercept parameters
    double wald_chi2 = 0.0; // joint Wald statistic for the factor block
    double wald_p = 1.0;
};

struct AnovaRow {
    double ss_effect = 0.0;
    int df1 = 0;
    double ms = 0.0;
    double f = 0.0;
    double p = 1.0;
    double partial_eta_sq = 0.0;
    double eta_ci_low = 0.0;
    double eta_ci_high = 0.0;
};

struct OlsFit {
    std::vector<TermStat> terms;
    double rss = 0.0;
    long df_resid = 0;
    long n = 0;
    AnovaRow anova;
};

struct SeparationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binomial GLM by IRLS; convergence when max |delta coef| < 1e-10 or 50
// iterations. Standard errors from the inverse Fisher information.
LogisticFit fit_logistic(const Design& design);

struct LrTestResult {
    double chi2 = 0.0;
    int df = 0;
    double p = 1.0;
};

// Likelihood-ratio test of the factor model against its intercept-only null.
LrTestResult lr_test(const LogisticFit& fit);
// General nested comparison; the null must have fewer parameters and no
// smaller deviance support.
LrTestResult lr_test(const LogisticFit& full, const LogisticFit& nested_null);

// OLS via Householder QR with ANOVA F-test and partial eta squared.
OlsFit fit_ols(const Design& design);

// Confidence interval for partial eta squared by pivoting the noncentral-F
// distribution.
std::pair<double, double> partial_eta_sq_ci(double f, double df1, double df2,
                                            double level = 0.90);

}  // namespace hallufault::stats
