#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "evplan/forecast.hpp"

using namespace evplan;

namespace {

std::vector<double> gaussian_noise(size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = g(rng);
    return out;
}

/// x_t = eps_t - theta * eps_{t-1}, integrated twice: an IMA(2,1) path.
PriceSeries ima21(size_t n, double theta, std::uint64_t seed) {
    auto eps = gaussian_noise(n + 1, seed);
    std::vector<double> x(n);
    double c1 = 0, c2 = 0;
    for (size_t t = 0; t < n; ++t) {
        double w = eps[t + 1] - theta * eps[t];
        c1 += w;   // first integration
        c2 += c1;  // second integration
        x[t] = c2;
    }
    return {x, 0};
}

PriceSeries ar1(size_t n, double phi, std::uint64_t seed) {
    auto eps = gaussian_noise(n, seed);
    std::vector<double> x(n);
    double prev = 0;
    for (size_t t = 0; t < n; ++t) {
        prev = phi * prev + eps[t];
        x[t] = prev;
    }
    return {x, 0};
}

PriceSeries ma1(size_t n, double theta, std::uint64_t seed) {
    auto eps = gaussian_noise(n + 1, seed);
    std::vector<double> x(n);
    for (size_t t = 0; t < n; ++t) x[t] = eps[t + 1] - theta * eps[t];
    return {x, 0};
}

}  // namespace

TEST_CASE("differencing") {
    CHECK(difference({{1, 3, 6, 10}, 0}, 1).values == std::vector<double>{2, 3, 4});
    CHECK(difference({{1, 3, 6, 10}, 0}, 0).values == std::vector<double>{1, 3, 6, 10});

    SECTION("second difference of t^2 is the constant 2") {
        std::vector<double> sq;
        for (int t = 0; t < 20; ++t) sq.push_back(static_cast<double>(t) * t);
        auto dd = difference({sq, 0}, 2);
        REQUIRE(dd.values.size() == 18);
        for (double v : dd.values) CHECK(v == 2.0);
    }
    SECTION("too short") {
        CHECK_THROWS_AS(difference({{1, 2}, 0}, 2), std::invalid_argument);
    }
    SECTION("undifference inverts exactly") {
        auto x = ima21(300, 0.4, 5);
        for (int d = 0; d <= 3; ++d) {
            auto w = difference(x, d);
            std::span<const double> head(x.values.data(), d);
            auto back = undifference(head, w.values);
            REQUIRE(back.size() == x.values.size());
            for (size_t i = 0; i < back.size(); ++i)
                CHECK(back[i] == Catch::Approx(x.values[i]).margin(1e-9));
        }
    }
}

TEST_CASE("acf and pacf") {
    SECTION("lag zero is one") {
        auto x = gaussian_noise(500, 3);
        CHECK(acf(x, 10)[0] == 1.0);
        CHECK(pacf(x, 10)[0] == 1.0);
    }
    SECTION("white noise stays inside the Bartlett band at ~95% of lags") {
        auto x = gaussian_noise(5000, 12);
        auto r = acf(x, 40);
        double band = 2.0 / std::sqrt(5000.0);
        int violations = 0;
        for (int k = 1; k <= 40; ++k) violations += std::abs(r[k]) >= band;
        CHECK(violations <= 5);  // binomial(40, ~0.05) upper tail
    }
    SECTION("AR(1) geometric decay and pacf cutoff at lag 1") {
        auto x = ar1(5000, 0.8, 21);
        auto r = acf(x.values, 6);
        for (int k = 1; k <= 5; ++k)
            CHECK(r[k] == Catch::Approx(std::pow(0.8, k)).margin(0.05));
        auto pr = pacf(x.values, 6);
        CHECK(pr[1] == Catch::Approx(0.8).margin(0.05));
        for (int k = 2; k <= 5; ++k) CHECK(std::abs(pr[k]) < 0.05);
    }
    SECTION("zero variance is an error") {
        std::vector<double> flat(100, 2.5);
        CHECK_THROWS_AS(acf(flat, 5), std::domain_error);
    }
}

TEST_CASE("adf unit-root test") {
    SECTION("a pure random walk keeps the null") {
        auto eps = gaussian_noise(2000, 31);
        std::vector<double> walk(eps.size());
        std::partial_sum(eps.begin(), eps.end(), walk.begin());
        auto res = adf_test(walk, 10);
        REQUIRE(res.valid);
        CHECK_FALSE(res.reject_unit_root_5pct);
    }
    SECTION("white noise rejects the unit root") {
        auto x = gaussian_noise(2000, 32);
        auto res = adf_test(x, 10);
        REQUIRE(res.valid);
        CHECK(res.reject_unit_root_5pct);
        CHECK(res.statistic < -10);  // far in the rejection region
    }
    SECTION("constant series is flagged undefined") {
        std::vector<double> flat(500, 1.0);
        auto res = adf_test(flat, 4);
        CHECK_FALSE(res.valid);
    }
}

TEST_CASE("polynomial stability helper") {
    // roots of 1 - a z: z = 1/a
    CHECK(detail::min_root_modulus(std::vector<double>{0.5}) == Catch::Approx(2.0));
    CHECK(detail::min_root_modulus(std::vector<double>{1.25}) == Catch::Approx(0.8));
    CHECK(detail::min_root_modulus(std::vector<double>{}) ==
          std::numeric_limits<double>::infinity());
    // 1 - 0.5z - 0.4z^2 has both roots outside the unit circle? factor check:
    // f(1) = 0.1 > 0, f(-1) = 1.1 > 0, f(1.2) = 1 - .6 - .576 < 0 -> root in (1, 1.2)
    double m = detail::min_root_modulus(std::vector<double>{0.5, 0.4});
    CHECK(m > 1.0);
    CHECK(m < 1.2);
}

TEST_CASE("order selection") {
    SECTION("white noise selects (0,0,0)") {
        PriceSeries x{gaussian_noise(4000, 41), 0};
        auto [p, d, q] = select_order(x, 5, 2, 5);
        CHECK(p == 0);
        CHECK(d == 0);
        CHECK(q == 0);
    }
    SECTION("IMA(2,1) re-identifies as (0,2,1)") {
        auto x = ima21(5832, 0.5, 1);
        auto [p, d, q] = select_order(x, 5, 2, 5);
        CHECK(p == 0);
        CHECK(d == 2);
        CHECK(q == 1);
    }
    SECTION("AR(1) re-identifies with p = 1, q = 0") {
        auto x = ar1(5000, 0.7, 43);
        auto [p, d, q] = select_order(x, 5, 2, 5);
        CHECK(p == 1);
        CHECK(d == 0);
        CHECK(q == 0);
    }
}

TEST_CASE("css fitting") {
    SECTION("MA(1) parameter recovery within 0.05") {
        auto x = ma1(5000, 0.6, 51);
        auto m = fit(x, 0, 0, 1);
        REQUIRE(m.theta.size() == 1);
        CHECK(m.theta[0] == Catch::Approx(0.6).margin(0.05));
        CHECK(detail::min_root_modulus(m.theta) > 1.0);
    }
    SECTION("AR(1) parameter recovery within 0.05") {
        auto x = ar1(5000, 0.7, 52);
        auto m = fit(x, 1, 0, 0);
        REQUIRE(m.phi.size() == 1);
        CHECK(m.phi[0] == Catch::Approx(0.7).margin(0.05));
    }
    SECTION("(0,1,0) has no parameters and first-difference residuals") {
        PriceSeries x{{4, 7, 6, 9, 14, 13}, 0};
        auto m = fit(x, 0, 1, 0);
        CHECK(m.phi.empty());
        CHECK(m.theta.empty());
        CHECK_FALSE(m.mean_adjusted);
        auto w = difference(x, 1);
        auto eps = detail::css_residuals(w.values, m.phi, m.theta);
        CHECK(eps == w.values);
        double sse = 0;
        for (double e : eps) sse += e * e;
        CHECK(m.sigma2 == Catch::Approx(sse / w.values.size()));
    }
    SECTION("fitted CSS never exceeds the (0,d,0) null") {
        auto x = ima21(2000, 0.5, 53);
        auto m_null = fit(x, 0, 2, 0);
        auto m_fit = fit(x, 1, 2, 1);
        CHECK(m_fit.sigma2 <= m_null.sigma2 + 1e-12);
    }
    SECTION("series shorter than the orders") {
        PriceSeries x{{1, 2, 3}, 0};
        CHECK_THROWS_AS(fit(x, 2, 0, 2), std::invalid_argument);
    }
}

TEST_CASE("multi-step forecasting") {
    SECTION("(0,1,0) forecasts flat at the last value") {
        PriceSeries x{{3, 5, 4, 8, 7}, 0};
        auto m = fit(x, 0, 1, 0);
        auto f = forecast(m, x, 5);
        for (double v : f) CHECK(v == 7.0);
    }
    SECTION("(0,2,0) extrapolates the last two points linearly") {
        PriceSeries x{{1, 2, 4, 9, 11}, 0};
        auto m = fit(x, 0, 2, 0);
        auto f = forecast(m, x, 4);
        REQUIRE(f.size() == 4);
        CHECK(f[0] == Catch::Approx(13.0));
        CHECK(f[1] == Catch::Approx(15.0));
        CHECK(f[2] == Catch::Approx(17.0));
        CHECK(f[3] == Catch::Approx(19.0));
    }
    SECTION("(0,2,0) on a noiseless quadratic is exact to 1e-9") {
        // the second difference of a quadratic is a constant, carried by the
        // mean-adjusted variant of the model
        std::vector<double> sq;
        for (int t = 0; t < 60; ++t) sq.push_back(0.5 * t * t - 3.0 * t + 2.0);
        PriceSeries x{sq, 0};
        auto m = fit(x, 0, 2, 0, MeanAdjust::on);
        CHECK(m.mean == Catch::Approx(1.0));  // curvature of 0.5 t^2
        auto f = forecast(m, x, 20);
        for (int h = 1; h <= 20; ++h) {
            double t = 59.0 + h;
            CHECK(f[h - 1] == Catch::Approx(0.5 * t * t - 3.0 * t + 2.0).margin(1e-9));
        }
    }
    SECTION("IMA(2,1) matches the closed-form forecast path to 1e-6") {
        const double theta = 0.5;
        auto x = ima21(800, theta, 61);
        ArimaModel m;
        m.d = 2;
        m.q = 1;
        m.theta = {theta};

        auto f = forecast(m, x, 168);

        // independent route: eps_T from the defining recursion, then the
        // closed form x(T+h) = x_T + h * (x_T - x_{T-1} - theta * eps_T)
        auto w = difference(x, 2);
        double eps = 0;
        for (double v : w.values) eps = v + theta * eps;
        const size_t n = x.values.size();
        double slope = x.values[n - 1] - x.values[n - 2] - theta * eps;
        for (int h = 1; h <= 168; ++h) {
            double expected = x.values[n - 1] + h * slope;
            CHECK(f[h - 1] == Catch::Approx(expected).margin(1e-6 * std::max(1.0, std::abs(expected))));
        }
    }
}

TEST_CASE("one-step predictions agree with the one-step forecast at the end") {
    auto x = ima21(600, 0.5, 71);
    auto m = fit(x, 0, 2, 1);
    auto f1 = forecast(m, x, 1);

    PriceSeries extended = x;
    extended.values.push_back(f1[0]);
    auto preds = one_step_predictions(m, extended, static_cast<int>(x.values.size()));
    REQUIRE(preds.size() == 1);
    CHECK(preds[0] == Catch::Approx(f1[0]).margin(1e-9));
}

TEST_CASE("scores") {
    std::vector<double> x{1, 2, 3, 4, 5};
    SECTION("perfect prediction scores (0, 1, 0)") {
        auto s = score(x, x);
        CHECK(s.rmse == 0.0);
        CHECK(s.r2 == 1.0);
        CHECK(s.mae == 0.0);
        CHECK(s.r2_defined);
    }
    SECTION("constant offset: rmse = mae = 1") {
        std::vector<double> shifted{2, 3, 4, 5, 6};
        auto s = score(shifted, x);
        CHECK(s.rmse == Catch::Approx(1.0));
        CHECK(s.mae == Catch::Approx(1.0));
    }
    SECTION("rmse >= mae always") {
        std::mt19937_64 rng(81);
        std::uniform_real_distribution<double> uni(-5, 5);
        for (int round = 0; round < 100; ++round) {
            std::vector<double> a(20), b(20);
            for (int i = 0; i < 20; ++i) {
                a[i] = uni(rng);
                b[i] = uni(rng);
            }
            auto s = score(a, b);
            CHECK(s.rmse >= s.mae - 1e-12);
            CHECK(s.r2 <= 1.0);
        }
    }
    SECTION("constant actual flags r2 undefined") {
        std::vector<double> flat(5, 2.0);
        auto s = score(x, flat);
        CHECK_FALSE(s.r2_defined);
    }
    SECTION("length mismatch") {
        std::vector<double> small{1, 2};
        CHECK_THROWS_AS(score(small, x), std::invalid_argument);
    }
}

TEST_CASE("residual normality") {
    SECTION("gaussian residuals pass") {
        PriceSeries x{gaussian_noise(5000, 91), 0};
        auto m = fit(x, 0, 0, 0);
        auto res = residual_normality(m, x);
        REQUIRE(res.valid);
        CHECK(res.gaussian_5pct);
    }
    SECTION("heavy-tailed residuals fail") {
        std::mt19937_64 rng(92);
        std::student_t_distribution<double> t2(2.0);
        std::vector<double> heavy(5000);
        for (auto& v : heavy) v = t2(rng);
        PriceSeries x{heavy, 0};
        auto m = fit(x, 0, 0, 0);
        auto res = residual_normality(m, x);
        REQUIRE(res.valid);
        CHECK_FALSE(res.gaussian_5pct);
    }
    SECTION("all-zero residuals are flagged") {
        PriceSeries x{std::vector<double>(50, 3.0), 0};
        auto m = fit(x, 0, 0, 0);
        auto res = residual_normality(m, x);
        CHECK_FALSE(res.valid);
    }
    SECTION("fewer than 8 residuals is an error") {
        PriceSeries x{{1, 2, 3, 4, 5}, 0};
        ArimaModel m;
        CHECK_THROWS_AS(residual_normality(m, x), std::invalid_argument);
    }
}
