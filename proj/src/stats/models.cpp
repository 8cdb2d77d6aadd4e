#include "hallufault/stats/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "hallufault/stats/special.hpp"

namespace hallufault::stats {

namespace {

constexpr double kZ95 = 1.959963984540054;  // Phi^-1(0.975)

// Dense column-major model matrix for a reference-coded design.
struct ModelMatrix {
    long n = 0;
    int p = 0;
    std::vector<int> level_index;     // per observation, 0 = reference
    std::vector<std::string> levels;  // levels[0] = reference

    double entry(long i, int j) const {
        if (j == 0) return 1.0;
        return level_index[i] == j ? 1.0 : 0.0;
    }
};

ModelMatrix build_matrix(const Design& design) {
    design.validate();
    ModelMatrix m;
    m.levels = design.levels();
    m.n = static_cast<long>(design.response.size());
    m.p = static_cast<int>(m.levels.size());
    std::map<std::string, int> index;
    for (size_t i = 0; i < m.levels.size(); ++i) index[m.levels[i]] = static_cast<int>(i);
    m.level_index.reserve(m.n);
    for (const auto& label : design.labels) m.level_index.push_back(index.at(label));
    return m;
}

// Cholesky solve of the SPD system A x = b; A is p x p row-major.
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b, int p) {
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = a[i * p + j];
            for (int k = 0; k < j; ++k) sum -= a[i * p + k] * a[j * p + k];
            if (i == j) {
                if (sum <= 0.0) throw RankError("cholesky: matrix not positive definite");
                a[i * p + i] = std::sqrt(sum);
            } else {
                a[i * p + j] = sum / a[j * p + j];
            }
        }
    }
    for (int i = 0; i < p; ++i) {
        double sum = b[i];
        for (int k = 0; k < i; ++k) sum -= a[i * p + k] * b[k];
        b[i] = sum / a[i * p + i];
    }
    for (int i = p - 1; i >= 0; --i) {
        double sum = b[i];
        for (int k = i + 1; k < p; ++k) sum -= a[k * p + i] * b[k];
        b[i] = sum / a[i * p + i];
    }
    return b;
}

// Inverse of an SPD matrix via Cholesky; row-major in and out.
std::vector<double> spd_inverse(std::vector<double> a, int p) {
    std::vector<double> inv(p * p, 0.0);
    for (int col = 0; col < p; ++col) {
        std::vector<double> e(p, 0.0);
        e[col] = 1.0;
        std::vector<double> x = cholesky_solve(a, e, p);
        for (int row = 0; row < p; ++row) inv[row * p + col] = x[row];
    }
    return inv;
}

double binomial_deviance(const std::vector<double>& y, const std::vector<double>& mu) {
    double dev = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        double m = std::clamp(mu[i], 1e-15, 1.0 - 1e-15);
        dev += y[i] > 0.5 ? -2.0 * std::log(m) : -2.0 * std::log1p(-m);
    }
    return dev;
}

}  // namespace

std::vector<std::string> Design::levels() const {
    std::vector<std::string> out{reference};
    for (const auto& label : labels)
        if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(label);
    return out;
}

void Design::validate() const {
    if (response.size() != labels.size())
        throw std::invalid_argument("design: response/labels size mismatch");
    if (response.empty()) throw std::invalid_argument("design: empty");
    if (std::find(labels.begin(), labels.end(), reference) == labels.end())
        throw std::invalid_argument("design: reference level '" + reference +
                                    "' has no observations");
}

LogisticFit fit_logistic(const Design& design) {
    ModelMatrix m = build_matrix(design);
    const auto& y = design.response;
    for (double v : y)
        if (v != 0.0 && v != 1.0)
            throw std::invalid_argument("fit_logistic: response must be binary");

    // Perfect separation in a saturated one-factor model shows up as a level
    // whose outcomes are all 0 or all 1.
    {
        std::vector<long> count(m.p, 0);
        std::vector<double> sum(m.p, 0.0);
        for (long i = 0; i < m.n; ++i) {
            ++count[m.level_index[i]];
            sum[m.level_index[i]] += y[i];
        }
        for (int j = 0; j < m.p; ++j)
            if (count[j] > 0 && (sum[j] == 0.0 || sum[j] == static_cast<double>(count[j])))
                throw SeparationError("fit_logistic: level '" + m.levels[j] +
                                      "' is perfectly separated");
    }

    int p = m.p;
    std::vector<double> beta(p, 0.0);
    std::vector<double> eta(m.n, 0.0), mu(m.n, 0.5);
    std::vector<double> info(p * p, 0.0);
    double prev_dev = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 50; ++iter) {
        std::fill(info.begin(), info.end(), 0.0);
        std::vector<double> rhs(p, 0.0);
        for (long i = 0; i < m.n; ++i) {
            double w = mu[i] * (1.0 - mu[i]);
            double z = eta[i] + (y[i] - mu[i]) / std::max(w, 1e-15);
            int j = m.level_index[i];
            // X row is (1, e_j); accumulate the weighted normal equations.
            info[0] += w;
            rhs[0] += w * z;
            if (j > 0) {
                info[0 * p + j] += w;
                info[j * p + 0] += w;
                info[j * p + j] += w;
                rhs[j] += w * z;
            }
        }
        std::vector<double> next = cholesky_solve(info, rhs, p);
        double max_delta = 0.0;
        for (int j = 0; j < p; ++j) max_delta = std::max(max_delta, std::abs(next[j] - beta[j]));
        beta = std::move(next);
        for (long i = 0; i < m.n; ++i) {
            int j = m.level_index[i];
            eta[i] = beta[0] + (j > 0 ? beta[j] : 0.0);
            mu[i] = 1.0 / (1.0 + std::exp(-eta[i]));
        }
        double dev = binomial_deviance(y, mu);
        if (dev > prev_dev + 1e-8)
            throw std::runtime_error("fit_logistic: deviance increased, fit diverging");
        prev_dev = dev;
        if (max_delta < 1e-10) break;
    }

    LogisticFit fit;
    fit.n = m.n;
    fit.df_model = p - 1;
    fit.deviance = binomial_deviance(y, mu);
    double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m.n);
    std::vector<double> mu0(m.n, ybar);
    fit.null_deviance = binomial_deviance(y, mu0);

    std::vector<double> cov = spd_inverse(info, p);
    fit.terms.reserve(p);
    for (int j = 0; j < p; ++j) {
        TermStat t;
        t.name = j == 0 ? "(Intercept)" : m.levels[j];
        t.coef = beta[j];
        t.se = std::sqrt(cov[j * p + j]);
        t.stat = t.coef / t.se;
        t.p = 2.0 * normal_sf(std::abs(t.stat));
        t.ci_low = t.coef - kZ95 * t.se;
        t.ci_high = t.coef + kZ95 * t.se;
        fit.terms.push_back(t);
    }

    // Joint Wald chi^2 over the non-intercept block.
    if (p > 1) {
        int q = p - 1;
        std::vector<double> block(q * q);
        std::vector<double> b(q);
        for (int r = 0; r < q; ++r) {
            b[r] = beta[r + 1];
            for (int c = 0; c < q; ++c) block[r * q + c] = cov[(r + 1) * p + (c + 1)];
        }
        std::vector<double> x = cholesky_solve(block, b, q);
        fit.wald_chi2 = std::inner_product(b.begin(), b.end(), x.begin(), 0.0);
        fit.wald_p = chisq_sf(fit.wald_chi2, q);
    }
    return fit;
}

LrTestResult lr_test(const LogisticFit& fit) {
    LrTestResult r;
    r.chi2 = fit.null_deviance - fit.deviance;
    r.df = fit.df_model;
    r.p = r.df > 0 ? chisq_sf(std::max(r.chi2, 0.0), r.df) : 1.0;
    return r;
}

LrTestResult lr_test(const LogisticFit& full, const LogisticFit& nested_null) {
    if (nested_null.df_model >= full.df_model || nested_null.n != full.n)
        throw std::invalid_argument("lr_test: models are not nested");
    LrTestResult r;
    r.chi2 = nested_null.deviance - full.deviance;
    r.df = full.df_model - nested_null.df_model;
    if (r.chi2 < -1e-6) throw std::invalid_argument("lr_test: null fits better than full model");
    r.p = chisq_sf(std::max(r.chi2, 0.0), r.df);
    return r;
}

OlsFit fit_ols(const Design& design) {
    ModelMatrix m = build_matrix(design);
    int p = m.p;
    if (m.n <= p) throw std::invalid_argument("fit_ols: need n > number of parameters");

    // Householder QR on the dense model matrix.
    std::vector<double> a(m.n * p);
    for (long i = 0; i < m.n; ++i)
        for (int j = 0; j < p; ++j) a[i * p + j] = m.entry(i, j);
    std::vector<double> qty = design.response;

    for (int k = 0; k < p; ++k) {
        double norm = 0.0;
        for (long i = k; i < m.n; ++i) norm += a[i * p + k] * a[i * p + k];
        norm = std::sqrt(norm);
        if (norm < 1e-10)
            throw RankError("fit_ols: column '" + m.levels[k] + "' is aliased (rank deficient)");
        double akk = a[k * p + k];
        double alpha = akk >= 0.0 ? -norm : norm;
        std::vector<double> v(m.n - k);
        v[0] = akk - alpha;
        for (long i = k + 1; i < m.n; ++i) v[i - k] = a[i * p + k];
        double vtv = 0.0;
        for (double x : v) vtv += x * x;
        if (vtv < 1e-300) continue;
        for (int j = k; j < p; ++j) {
            double dot = 0.0;
            for (long i = k; i < m.n; ++i) dot += v[i - k] * a[i * p + j];
            double scale = 2.0 * dot / vtv;
            for (long i = k; i < m.n; ++i) a[i * p + j] -= scale * v[i - k];
        }
        double dot = 0.0;
        for (long i = k; i < m.n; ++i) dot += v[i - k] * qty[i];
        double scale = 2.0 * dot / vtv;
        for (long i = k; i < m.n; ++i) qty[i] -= scale * v[i - k];
    }

    for (int k = 0; k < p; ++k)
        if (std::abs(a[k * p + k]) < 1e-10)
            throw RankError("fit_ols: column '" + m.levels[k] + "' is aliased (rank deficient)");

    std::vector<double> beta(p);
    for (int i = p - 1; i >= 0; --i) {
        double sum = qty[i];
        for (int j = i + 1; j < p; ++j) sum -= a[i * p + j] * beta[j];
        beta[i] = sum / a[i * p + i];
    }

    double rss = 0.0;
    for (long i = p; i < m.n; ++i) rss += qty[i] * qty[i];

    OlsFit fit;
    fit.n = m.n;
    fit.df_resid = m.n - p;
    fit.rss = rss;
    double sigma2 = rss / static_cast<double>(fit.df_resid);

    // (R^T R)^-1 from the triangular factor.
    std::vector<double> rinv(p * p, 0.0);
    for (int col = 0; col < p; ++col) {
        std::vector<double> e(p, 0.0);
        e[col] = 1.0;
        for (int i = p - 1; i >= 0; --i) {
            double sum = e[i];
            for (int j = i + 1; j < p; ++j) sum -= a[i * p + j] * rinv[j * p + col];
            rinv[i * p + col] = sum / a[i * p + i];
        }
    }
    auto cov = [&](int r, int c) {
        double sum = 0.0;
        for (int k = 0; k < p; ++k) sum += rinv[r * p + k] * rinv[c * p + k];
        return sigma2 * sum;
    };

    constexpr double kTCritLevel = 0.975;
    // t critical value by bisection on the survival function.
    double t_crit;
    {
        double lo = 0.0, hi = 100.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (student_t_sf(mid, fit.df_resid) > 1.0 - kTCritLevel ? lo : hi) = mid;
        }
        t_crit = 0.5 * (lo + hi);
    }

    fit.terms.reserve(p);
    for (int j = 0; j < p; ++j) {
        TermStat t;
        t.name = j == 0 ? "(Intercept)" : m.levels[j];
        t.coef = beta[j];
        t.se = std::sqrt(cov(j, j));
        if (t.se > 0.0) {
            t.stat = t.coef / t.se;
            t.p = 2.0 * student_t_sf(std::abs(t.stat), fit.df_resid);
        } else {
            // zero residual variance: the coefficient is known exactly
            bool zero = t.coef == 0.0;
            t.stat = zero ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), t.coef);
            t.p = zero ? 1.0 : 0.0;
        }
        t.ci_low = t.coef - t_crit * t.se;
        t.ci_high = t.coef + t_crit * t.se;
        fit.terms.push_back(t);
    }

    // One-way ANOVA of the factor against the intercept-only null.
    double ybar =
        std::accumulate(design.response.begin(), design.response.end(), 0.0) / fit.n;
    double tss = 0.0;
    for (double v : design.response) tss += (v - ybar) * (v - ybar);
    AnovaRow row;
    row.df1 = p - 1;
    row.ss_effect = std::max(tss - rss, 0.0);
    if (row.df1 > 0) {
        row.ms = row.ss_effect / row.df1;
        // Guard against an exact (or numerically exact) fit, where F degenerates.
        if (rss > tss * 1e-12 && sigma2 > 0.0) {
            row.f = row.ms / sigma2;
            row.p = f_sf(row.f, row.df1, fit.df_resid);
            row.partial_eta_sq = row.ss_effect / (row.ss_effect + rss);
            auto [lo, hi] = partial_eta_sq_ci(row.f, row.df1, fit.df_resid, 0.90);
            row.eta_ci_low = lo;
            row.eta_ci_high = hi;
        } else {
            // Degenerate perfect fit: the factor explains everything (or the
            // response is constant and nothing is left to explain).
            bool any_effect = row.ss_effect > 0.0;
            row.f = any_effect ? std::numeric_limits<double>::infinity() : 0.0;
            row.p = any_effect ? 0.0 : 1.0;
            row.partial_eta_sq = any_effect ? 1.0 : 0.0;
            row.eta_ci_low = row.eta_ci_high = row.partial_eta_sq;
        }
    }
    fit.anova = row;
    return fit;
}

std::pair<double, double> partial_eta_sq_ci(double f, double df1, double df2, double level) {
    if (!(f >= 0.0) || !std::isfinite(f))
        throw std::invalid_argument("partial_eta_sq_ci: F must be finite and >= 0");
    if (!(df1 >= 1.0) || !(df2 >= 1.0))
        throw std::invalid_argument("partial_eta_sq_ci: df must be >= 1");
    double alpha = (1.0 - level) / 2.0;

    auto lambda_to_eta = [&](double lambda) { return lambda / (lambda + df1 + df2 + 1.0); };

    // noncentral_f_cdf is decreasing in lambda; find lambda with cdf == target.
    auto solve = [&](double target) {
        double lo = 0.0;
        double hi = std::max(10.0, 2.0 * f * df1);
        int expand = 0;
        while (noncentral_f_cdf(f, df1, df2, hi) > target) {
            hi *= 2.0;
            if (++expand > 200)
                throw std::runtime_error("partial_eta_sq_ci: bracket expansion failed (F=" +
                                         std::to_string(f) + ")");
        }
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (noncentral_f_cdf(f, df1, df2, mid) > target ? lo : hi) = mid;
            if (hi - lo < 1e-9 * (1.0 + hi)) break;
        }
        return 0.5 * (lo + hi);
    };

    double ul = lambda_to_eta(solve(alpha));
    double ll = 0.0;
    if (noncentral_f_cdf(f, df1, df2, 0.0) >= 1.0 - alpha) ll = lambda_to_eta(solve(1.0 - alpha));
    return {ll, ul};
}

}  // namespace hallufault::stats
