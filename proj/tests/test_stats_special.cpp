#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <utility>

#include "hallufault/rng.hpp"
#include "hallufault/stats/special.hpp"

using namespace hallufault;
using namespace hallufault::stats;

namespace {
void check_abs(double got, double want, double tol = 1e-12) {
    CHECK(std::abs(got - want) <= tol);
}
}  // namespace

TEST_CASE("incomplete beta against a high-precision table") {
    // Reference values computed to 20+ digits with arbitrary-precision
    // arithmetic and frozen here.
    check_abs(incomplete_beta(0.5, 0.5, 0.25), 0.33333333333333333);
    check_abs(incomplete_beta(2, 3, 0.5), 0.6875);
    check_abs(incomplete_beta(5, 1, 0.9), 0.59049000000000007);
    check_abs(incomplete_beta(10, 10, 0.5), 0.5);
    check_abs(incomplete_beta(1, 1, 0.3), 0.3);
    check_abs(incomplete_beta(3.5, 2.5, 0.7), 0.70324701070433352);
    // extreme shapes matching the experiment's sample sizes
    check_abs(incomplete_beta(9177, 0.5, 0.999), 1.8259941078370021e-5, 1e-15);
    check_abs(incomplete_beta(0.5, 9177, 0.0001), 0.82451385986179873, 1e-11);
}

TEST_CASE("incomplete beta structural identities") {
    CHECK(incomplete_beta(2.5, 3.5, 0.0) == 0.0);
    CHECK(incomplete_beta(2.5, 3.5, 1.0) == 1.0);
    SplitMix64 rng(55);
    for (int trial = 0; trial < 500; ++trial) {
        double a = rng.next_uniform(0.2, 50);
        double b = rng.next_uniform(0.2, 50);
        double x = rng.next_uniform(0.001, 0.999);
        double direct = incomplete_beta(a, b, x);
        CHECK(direct >= 0.0);
        CHECK(direct <= 1.0);
        check_abs(direct, 1.0 - incomplete_beta(b, a, 1.0 - x), 1e-11);
        // monotone in x
        CHECK(incomplete_beta(a, b, std::min(x + 0.001, 1.0)) >= direct - 1e-13);
    }
}

TEST_CASE("upper incomplete gamma closed forms") {
    check_abs(upper_gamma_q(1.0, 2.0), std::exp(-2.0));
    check_abs(upper_gamma_q(1.0, 0.5), std::exp(-0.5));
    check_abs(upper_gamma_q(0.5, 2.0), std::erfc(std::sqrt(2.0)));
    check_abs(upper_gamma_q(2.0, 3.0), std::exp(-3.0) * 4.0);  // (1 + x) e^-x
    CHECK(upper_gamma_q(3.0, 0.0) == 1.0);
}

TEST_CASE("normal survival function") {
    check_abs(normal_sf(0.0), 0.5);
    check_abs(normal_sf(1.959963984540054), 0.025, 1e-12);
    check_abs(normal_sf(-1.959963984540054), 0.975, 1e-12);
    CHECK(normal_sf(10.0) < 1e-20);
}

TEST_CASE("chi-squared survival function") {
    check_abs(chisq_sf(3.841, 1), 0.050013683763956699);
    check_abs(chisq_sf(10, 4), 0.040427681994512803);
    check_abs(chisq_sf(0.0, 3), 1.0);
    // k=2 closed form: exp(-x/2)
    check_abs(chisq_sf(5.0, 2), std::exp(-2.5));
}

TEST_CASE("F survival function") {
    check_abs(f_sf(2.5, 3, 10), 0.11903956265827815);
    // F(1, d, d) has median exactly 1
    for (double d : {1.0, 2.0, 7.0, 30.0, 500.0}) check_abs(f_sf(1.0, d, d), 0.5, 1e-12);
    CHECK(f_sf(0.0, 3, 10) == doctest::Approx(1.0));
}

TEST_CASE("t-squared equals F(1, df)") {
    for (double t : {0.5, 1.0, 1.96, 3.2, 5.0})
        for (double df : {1.0, 4.0, 17.0, 120.0, 18354.0}) {
            CAPTURE(t);
            CAPTURE(df);
            CHECK(std::abs(2.0 * student_t_sf(t, df) - f_sf(t * t, 1.0, df)) < 1e-9);
        }
    check_abs(student_t_sf(0.0, 10), 0.5);
}

TEST_CASE("noncentral F reduces to central at lambda zero") {
    for (double x : {0.3, 1.0, 2.5, 6.0})
        for (auto [d1, d2] : {std::pair{1.0, 10.0}, {3.0, 20.0}, {1.0, 18354.0}}) {
            CAPTURE(x);
            CAPTURE(d1);
            check_abs(noncentral_f_cdf(x, d1, d2, 0.0), 1.0 - f_sf(x, d1, d2), 1e-11);
        }
}

TEST_CASE("noncentral F is monotone in x and in lambda") {
    SplitMix64 rng(66);
    for (int trial = 0; trial < 200; ++trial) {
        double d1 = rng.next_uniform(1, 10);
        double d2 = rng.next_uniform(2, 500);
        double lambda = rng.next_uniform(0, 50);
        double x = rng.next_uniform(0.1, 8);
        double base = noncentral_f_cdf(x, d1, d2, lambda);
        CHECK(base >= 0.0);
        CHECK(base <= 1.0);
        CHECK(noncentral_f_cdf(x * 1.2, d1, d2, lambda) >= base - 1e-12);
        // more noncentrality pushes mass to the right: CDF decreases
        CHECK(noncentral_f_cdf(x, d1, d2, lambda + 5.0) <= base + 1e-12);
    }
}

TEST_CASE("noncentral F at the experiment's scale") {
    // With d1=1 the noncentral F is a squared noncentral normal ratio; at
    // lambda = z^2 the CDF at x = z^2 is close to 0.5 for large d2.
    double z = 2.0;
    double v = noncentral_f_cdf(z * z, 1.0, 18354.0, z * z);
    CHECK(v > 0.45);
    CHECK(v < 0.55);
    // huge noncentrality far above x drives the CDF to zero
    CHECK(noncentral_f_cdf(10.0, 1.0, 18354.0, 7000.0) < 1e-10);
    // and lambda far below x drives it to one
    CHECK(noncentral_f_cdf(7000.0, 1.0, 18354.0, 10.0) > 1.0 - 1e-10);
}
