#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace evplan {

struct PriceSeries {
    std::vector<double> values;  // currency/kWh
    int start_hour = 0;

    void validate() const {
        if (values.empty()) throw std::invalid_argument("price series: empty");
        for (double v : values)
            if (!std::isfinite(v)) throw std::invalid_argument("price series: non-finite value");
    }
};

namespace detail {

inline std::vector<double> diff_vec(std::vector<double> x, int d) {
    for (int k = 0; k < d; ++k) {
        for (size_t i = 0; i + 1 < x.size(); ++i) x[i] = x[i + 1] - x[i];
        x.pop_back();
    }
    return x;
}

}  // namespace detail

/// d-th difference; the result is d entries shorter and aligned to the later
/// hours.
inline PriceSeries difference(const PriceSeries& x, int d) {
    if (d < 0) throw std::invalid_argument("difference: d must be >= 0");
    if (static_cast<int>(x.values.size()) <= d)
        throw std::invalid_argument("difference: series too short for order " + std::to_string(d));
    return {detail::diff_vec(x.values, d), x.start_hour + d};
}

/// Inverse of difference given the d retained leading values of the original
/// series: undifference(x.values[0..d), difference(x, d)) reproduces x.
inline std::vector<double> undifference(std::span<const double> head,
                                        std::vector<double> diffs) {
    const int d = static_cast<int>(head.size());
    std::vector<double> h(head.begin(), head.end());
    for (int k = d - 1; k >= 0; --k) {
        double init = detail::diff_vec(h, k)[0];
        std::vector<double> lvl(diffs.size() + 1);
        lvl[0] = init;
        for (size_t i = 0; i < diffs.size(); ++i) lvl[i + 1] = lvl[i] + diffs[i];
        diffs = std::move(lvl);
    }
    return diffs;
}

/// Sample autocorrelations for lags 0..max_lag (acf[0] == 1).
inline std::vector<double> acf(std::span<const double> x, int max_lag) {
    const size_t n = x.size();
    if (max_lag < 0 || static_cast<size_t>(max_lag) >= n)
        throw std::invalid_argument("acf: max_lag must be < series length");
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double c0 = 0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    if (c0 == 0) throw std::domain_error("acf: zero-variance series");
    std::vector<double> r(max_lag + 1);
    r[0] = 1.0;
    for (int k = 1; k <= max_lag; ++k) {
        double ck = 0;
        for (size_t i = 0; i + k < n; ++i) ck += (x[i] - mean) * (x[i + k] - mean);
        r[k] = ck / c0;
    }
    return r;
}

/// Partial autocorrelations via the Durbin-Levinson recursion.
inline std::vector<double> pacf(std::span<const double> x, int max_lag) {
    auto r = acf(x, max_lag);
    std::vector<double> out(max_lag + 1, 0.0);
    out[0] = 1.0;
    if (max_lag < 1) return out;
    std::vector<double> prev(max_lag + 1, 0.0), cur(max_lag + 1, 0.0);
    prev[1] = r[1];
    out[1] = r[1];
    for (int k = 2; k <= max_lag; ++k) {
        double num = r[k], den = 1.0;
        for (int j = 1; j < k; ++j) {
            num -= prev[j] * r[k - j];
            den -= prev[j] * r[j];
        }
        cur[k] = std::abs(den) > 1e-14 ? num / den : 0.0;
        for (int j = 1; j < k; ++j) cur[j] = prev[j] - cur[k] * prev[k - j];
        out[k] = cur[k];
        prev = cur;
    }
    return out;
}

struct AdfResult {
    double statistic = 0;
    bool reject_unit_root_5pct = false;
    bool valid = false;  // false for degenerate (constant) input
};

namespace detail {

/// OLS via normal equations (k is tiny here); returns beta and the
/// covariance diagonal entry for column `col`.
inline std::pair<std::vector<double>, double> ols(const std::vector<std::vector<double>>& cols,
                                                  std::span<const double> y, size_t col) {
    const size_t k = cols.size(), n = y.size();
    std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
    std::vector<double> b(k, 0.0);
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = i; j < k; ++j) {
            double s = 0;
            for (size_t t = 0; t < n; ++t) s += cols[i][t] * cols[j][t];
            a[i][j] = a[j][i] = s;
        }
        double s = 0;
        for (size_t t = 0; t < n; ++t) s += cols[i][t] * y[t];
        b[i] = s;
    }
    // solve a * beta = b and a * u = e_col by Gaussian elimination
    std::vector<double> u(k, 0.0);
    u[col] = 1.0;
    for (size_t i = 0; i < k; ++i) {
        size_t piv = i;
        for (size_t r = i + 1; r < k; ++r)
            if (std::abs(a[r][i]) > std::abs(a[piv][i])) piv = r;
        std::swap(a[i], a[piv]);
        std::swap(b[i], b[piv]);
        std::swap(u[i], u[piv]);
        if (std::abs(a[i][i]) < 1e-300) throw std::domain_error("ols: singular design");
        for (size_t r = i + 1; r < k; ++r) {
            double f = a[r][i] / a[i][i];
            for (size_t c = i; c < k; ++c) a[r][c] -= f * a[i][c];
            b[r] -= f * b[i];
            u[r] -= f * u[i];
        }
    }
    std::vector<double> beta(k), inv_col(k);
    for (size_t i = k; i-- > 0;) {
        double sb = b[i], su = u[i];
        for (size_t c = i + 1; c < k; ++c) {
            sb -= a[i][c] * beta[c];
            su -= a[i][c] * inv_col[c];
        }
        beta[i] = sb / a[i][i];
        inv_col[i] = su / a[i][i];
    }
    return {beta, inv_col[col]};
}

}  // namespace detail

/// Augmented Dickey-Fuller test with constant and `lags` difference lags.
/// The statistic is compared to the MacKinnon (2010) 5% response-surface
/// critical value for the constant-only case,
///   tau5(T) = -2.86154 - 2.8903/T - 4.234/T^2 - 40.04/T^3.
inline AdfResult adf_test(std::span<const double> x, int lags) {
    AdfResult res;
    const int n = static_cast<int>(x.size());
    if (lags < 0) lags = 0;
    if (n < lags + 12) throw std::invalid_argument("adf_test: series too short");

    double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    if (var == 0) return res;  // constant series: statistic undefined
    double sd = std::sqrt(var / n);

    std::vector<double> z(x.begin(), x.end());
    for (auto& v : z) v /= sd;  // t-statistic is scale invariant; this tames the numerics
    std::vector<double> dz(n - 1);
    for (int i = 0; i + 1 < n; ++i) dz[i] = z[i + 1] - z[i];

    const int rows = n - 1 - lags;
    std::vector<double> y(rows);
    std::vector<std::vector<double>> cols(2 + lags, std::vector<double>(rows));
    for (int t = 0; t < rows; ++t) {
        y[t] = dz[t + lags];
        cols[0][t] = 1.0;
        cols[1][t] = z[t + lags];
        for (int i = 1; i <= lags; ++i) cols[1 + i][t] = dz[t + lags - i];
    }
    auto [beta, inv11] = detail::ols(cols, y, 1);
    double rss = 0;
    for (int t = 0; t < rows; ++t) {
        double fit = 0;
        for (size_t j = 0; j < cols.size(); ++j) fit += beta[j] * cols[j][t];
        rss += (y[t] - fit) * (y[t] - fit);
    }
    double s2 = rss / (rows - static_cast<int>(cols.size()));
    double se = std::sqrt(s2 * inv11);
    res.statistic = beta[1] / se;
    double T = rows;
    double crit5 = -2.86154 - 2.8903 / T - 4.234 / (T * T) - 40.04 / (T * T * T);
    res.reject_unit_root_5pct = res.statistic < crit5;
    res.valid = true;
    return res;
}

namespace detail {

/// Smallest root modulus of 1 - a1 z - ... - am z^m (Durand-Kerner);
/// +inf when the polynomial is constant. Stationarity/invertibility needs
/// every root outside the unit circle.
inline double min_root_modulus(std::span<const double> a) {
    std::vector<std::complex<double>> c;  // c[0] + c[1] z + ...
    c.push_back({1.0, 0.0});
    for (double v : a) c.push_back({-v, 0.0});
    while (c.size() > 1 && std::abs(c.back()) < 1e-12) c.pop_back();
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg == 0) return std::numeric_limits<double>::infinity();
    for (auto& v : c) v /= c.back();
    std::vector<std::complex<double>> r(deg);
    std::complex<double> seed(0.4, 0.9);
    r[0] = seed;
    for (int i = 1; i < deg; ++i) r[i] = r[i - 1] * seed;
    auto eval = [&](std::complex<double> z) {
        std::complex<double> v = c.back();
        for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) v = v * z + c[i];
        return v;
    };
    for (int it = 0; it < 120; ++it) {
        double moved = 0;
        for (int i = 0; i < deg; ++i) {
            std::complex<double> denom(1.0, 0.0);
            for (int j = 0; j < deg; ++j)
                if (j != i) denom *= (r[i] - r[j]);
            std::complex<double> delta = eval(r[i]) / denom;
            r[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-13) break;
    }
    double m = std::numeric_limits<double>::infinity();
    for (const auto& z : r) m = std::min(m, std::abs(z));
    return m;
}

/// Conditional-sum-of-squares residuals with zero pre-sample values:
///   eps_t = w_t - sum_i phi_i w_{t-i} + sum_j theta_j eps_{t-j}
/// (AR and MA polynomials in the 1 - a1 B - ... convention).
inline std::vector<double> css_residuals(std::span<const double> w,
                                         std::span<const double> phi,
                                         std::span<const double> theta) {
    const int n = static_cast<int>(w.size());
    const int p = static_cast<int>(phi.size());
    const int q = static_cast<int>(theta.size());
    std::vector<double> eps(n);
    for (int t = 0; t < n; ++t) {
        double v = w[t];
        for (int i = 1; i <= p && t - i >= 0; ++i) v -= phi[i - 1] * w[t - i];
        for (int j = 1; j <= q && t - j >= 0; ++j) v += theta[j - 1] * eps[t - j];
        eps[t] = v;
    }
    return eps;
}

/// Nelder-Mead with one restart; deterministic. Returns the best point.
inline std::vector<double> nelder_mead(std::function<double(std::span<const double>)> f,
                                       std::vector<double> x0, double step, int max_eval) {
    const int m = static_cast<int>(x0.size());
    struct Vertex {
        std::vector<double> x;
        double fx;
    };
    int evals = 0;
    auto feval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    auto run = [&](std::vector<double> start, double h) {
        std::vector<Vertex> s;
        s.push_back({start, feval(start)});
        for (int i = 0; i < m; ++i) {
            auto x = start;
            x[i] += h;
            s.push_back({x, feval(x)});
        }
        while (evals < max_eval) {
            std::stable_sort(s.begin(), s.end(),
                             [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
            if (std::abs(s.back().fx - s.front().fx) <
                1e-12 * (1.0 + std::abs(s.front().fx)))
                break;
            std::vector<double> centroid(m, 0.0);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) centroid[j] += s[i].x[j];
            }
            for (auto& c : centroid) c /= m;
            auto mix = [&](double coef) {
                std::vector<double> x(m);
                for (int j = 0; j < m; ++j)
                    x[j] = centroid[j] + coef * (s.back().x[j] - centroid[j]);
                return x;
            };
            auto xr = mix(-1.0);
            double fr = feval(xr);
            if (fr < s.front().fx) {
                auto xe = mix(-2.0);
                double fe = feval(xe);
                s.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
            } else if (fr < s[m - 1].fx) {
                s.back() = {xr, fr};
            } else {
                auto xc = mix(fr < s.back().fx ? -0.5 : 0.5);
                double fc = feval(xc);
                if (fc < std::min(fr, s.back().fx)) {
                    s.back() = {xc, fc};
                } else {
                    for (int i = 1; i <= m; ++i) {
                        for (int j = 0; j < m; ++j)
                            s[i].x[j] = s[0].x[j] + 0.5 * (s[i].x[j] - s[0].x[j]);
                        s[i].fx = feval(s[i].x);
                    }
                }
            }
        }
        std::stable_sort(s.begin(), s.end(),
                         [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
        return s.front();
    };

    auto best = run(x0, step);
    auto again = run(best.x, step * 0.2);  // restart tightens the optimum
    return again.fx < best.fx ? again.x : best.x;
}

}  // namespace detail

/// ARIMA(p,d,q) in the Box-Jenkins convention
///   (1 - phi_1 B - ... - phi_p B^p) (1-B)^d X_t
///     = (1 - theta_1 B - ... - theta_q B^q) eps_t,
/// fitted by conditional sum of squares. When d == 0 the differenced series
/// is mean-adjusted and the mean stored.
struct ArimaModel {
    int p = 0, d = 0, q = 0;
    std::vector<double> phi;
    std::vector<double> theta;
    double sigma2 = 0;
    double mean = 0;
    bool mean_adjusted = false;
};

namespace detail {

inline double css_objective(std::span<const double> w, std::span<const double> par, int p) {
    std::span<const double> phi = par.subspan(0, p);
    std::span<const double> theta = par.subspan(p);
    // keep the search strictly inside the stationary/invertible region
    double mp = std::min(min_root_modulus(phi), min_root_modulus(theta));
    if (mp < 1.001) return 1e12 * (1.0 + (1.001 - mp));
    auto eps = css_residuals(w, phi, theta);
    double sse = 0;
    for (double e : eps) sse += e * e;
    return std::isfinite(sse) ? sse : 1e30;
}

}  // namespace detail

enum class MeanAdjust { automatic, on, off };

/// Fits by CSS. Mean adjustment: `automatic` demeans only when d == 0 (an
/// undifferenced series has a level; a differenced one is modeled as
/// drift-free, so (0,1,0) forecasts flat). Forcing `on` with d > 0 keeps the
/// mean of the differenced series as a drift/curvature constant.
inline ArimaModel fit(const PriceSeries& x, int p, int d, int q,
                      MeanAdjust adjust = MeanAdjust::automatic) {
    if (p < 0 || d < 0 || q < 0) throw std::invalid_argument("fit: negative order");
    x.validate();
    auto w = detail::diff_vec(x.values, d);
    if (static_cast<int>(w.size()) <= p + q + 1)
        throw std::invalid_argument("fit: series too short for the requested orders");

    ArimaModel m;
    m.p = p;
    m.d = d;
    m.q = q;
    if (adjust == MeanAdjust::on || (adjust == MeanAdjust::automatic && d == 0)) {
        m.mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
        m.mean_adjusted = true;
        for (auto& v : w) v -= m.mean;
    }
    if (p + q > 0) {
        auto par = detail::nelder_mead(
            [&](std::span<const double> par) { return detail::css_objective(w, par, p); },
            std::vector<double>(p + q, 0.0), 0.1, 4000 * (p + q));
        m.phi.assign(par.begin(), par.begin() + p);
        m.theta.assign(par.begin() + p, par.end());
    }
    auto eps = detail::css_residuals(w, m.phi, m.theta);
    double sse = 0;
    for (double e : eps) sse += e * e;
    m.sigma2 = sse / w.size();
    return m;
}

/// Differencing order, then AR/MA orders from the ACF/PACF significant-lag
/// runs (whichever function cuts off earlier fixes its order, the tailing
/// one gets 0; equal runs set both), refined by minimum AIC over the
/// {p, p+-1} x {q, q+-1} neighborhood. Deterministic throughout.
inline std::tuple<int, int, int> select_order(const PriceSeries& x, int max_p = 5,
                                              int max_d = 2, int max_q = 5) {
    x.validate();
    int d = -1;
    for (int dd = 0; dd <= max_d; ++dd) {
        if (static_cast<int>(x.values.size()) <= dd + 30)
            throw std::invalid_argument("select_order: series too short");
        auto w = detail::diff_vec(x.values, dd);
        int lag = static_cast<int>(std::floor(12.0 * std::pow(w.size() / 100.0, 0.25)));
        auto adf = adf_test(w, std::max(1, lag));
        if (adf.valid && adf.reject_unit_root_5pct) {
            d = dd;
            break;
        }
    }
    if (d < 0)
        throw std::runtime_error("select_order: no differencing order up to " +
                                 std::to_string(max_d) + " achieves stationarity");

    auto w = detail::diff_vec(x.values, d);
    const int n = static_cast<int>(w.size());
    const double band = 1.96 / std::sqrt(static_cast<double>(n));
    auto run_len = [&](const std::vector<double>& vals, int maxo) {
        int k = 0;
        while (k < maxo && std::abs(vals[k + 1]) > band) ++k;
        return k;
    };
    int la = run_len(acf(w, max_q), max_q);
    int lp = run_len(pacf(w, max_p), max_p);
    int p0, q0;
    if (la < lp) {
        p0 = 0;
        q0 = la;
    } else if (lp < la) {
        p0 = lp;
        q0 = 0;
    } else {
        p0 = lp;
        q0 = la;
    }

    std::set<int> ps{std::max(0, p0 - 1), p0, std::min(max_p, p0 + 1)};
    std::set<int> qs{std::max(0, q0 - 1), q0, std::min(max_q, q0 + 1)};
    double best_aic = 0;
    int bp = -1, bq = -1;
    for (int p : ps) {
        for (int q : qs) {
            auto m = fit(x, p, d, q);
            double css = m.sigma2 * n;
            double aic = n * std::log(css / n) + 2.0 * (p + q + 1);
            if (bp < 0 || aic < best_aic) {
                best_aic = aic;
                bp = p;
                bq = q;
            }
        }
    }
    return {bp, d, bq};
}

/// Iterated multi-step forecast: one-step predictions in differenced space
/// with future shocks zero, integrated back to levels with the retained
/// history tail.
inline std::vector<double> forecast(const ArimaModel& m, const PriceSeries& history,
                                    int steps) {
    history.validate();
    if (steps < 0) throw std::invalid_argument("forecast: negative steps");
    const int n_level = static_cast<int>(history.values.size());
    if (n_level < m.p + m.d + m.q || n_level < m.d + 1)
        throw std::invalid_argument("forecast: history shorter than model orders");

    auto w = detail::diff_vec(history.values, m.d);
    for (auto& v : w) v -= m.mean;
    auto eps = detail::css_residuals(w, m.phi, m.theta);
    const int n = static_cast<int>(w.size());

    std::vector<double> wx = w;  // extended with predictions (centered)
    wx.reserve(n + steps);
    for (int h = 0; h < steps; ++h) {
        int t = n + h;
        double v = 0;
        for (int i = 1; i <= m.p; ++i)
            if (t - i >= 0) v += m.phi[i - 1] * wx[t - i];
        for (int j = 1; j <= m.q; ++j)
            if (t - j >= 0 && t - j < n) v -= m.theta[j - 1] * eps[t - j];
        wx.push_back(v);
    }

    // integrate d times from the history tail
    std::vector<double> tails(m.d);
    {
        std::vector<double> lvl = history.values;
        for (int k = 0; k < m.d; ++k) {
            tails[k] = lvl.back();
            lvl = detail::diff_vec(lvl, 1);
        }
    }
    std::vector<double> out;
    out.reserve(steps);
    for (int h = 0; h < steps; ++h) {
        double cur = wx[n + h] + m.mean;
        for (int k = m.d - 1; k >= 0; --k) {
            cur += tails[k];
            tails[k] = cur;
        }
        out.push_back(cur);
    }
    return out;
}

/// Rolling one-step-ahead predictions of series[t] for t in [from, n),
/// conditioning on the actual values through t-1 with the model fixed.
inline std::vector<double> one_step_predictions(const ArimaModel& m, const PriceSeries& series,
                                                int from) {
    series.validate();
    const int n = static_cast<int>(series.values.size());
    if (from < m.d + std::max(m.p, m.q) || from >= n)
        throw std::invalid_argument("one_step_predictions: bad start index");
    auto w = detail::diff_vec(series.values, m.d);
    for (auto& v : w) v -= m.mean;
    auto eps = detail::css_residuals(w, m.phi, m.theta);

    // binomial weights of (1-B)^d reconstruct the level from the difference
    std::vector<double> binom(m.d + 1);
    binom[0] = 1;
    for (int j = 1; j <= m.d; ++j) binom[j] = binom[j - 1] * (m.d - j + 1) / j;

    std::vector<double> preds;
    preds.reserve(n - from);
    for (int t = from; t < n; ++t) {
        double w_pred = (w[t - m.d] - eps[t - m.d]) + m.mean;
        double level = w_pred;
        for (int j = 1; j <= m.d; ++j)
            level -= (j % 2 ? -1.0 : 1.0) * binom[j] * series.values[t - j];
        preds.push_back(level);
    }
    return preds;
}

struct ForecastScores {
    double rmse = 0;
    double r2 = 0;
    double mae = 0;
    bool r2_defined = true;  // false when the actual series is constant
};

inline ForecastScores score(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size() || pred.size() < 2)
        throw std::invalid_argument("score: need equal-length series with >= 2 points");
    ForecastScores s;
    double ssres = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        double e = pred[i] - actual[i];
        ssres += e * e;
        s.mae += std::abs(e);
    }
    s.mae /= pred.size();
    s.rmse = std::sqrt(ssres / pred.size());
    double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / actual.size();
    double sstot = 0;
    for (double v : actual) sstot += (v - mean) * (v - mean);
    if (sstot == 0) {
        s.r2_defined = false;
        s.r2 = 0;
    } else {
        s.r2 = 1.0 - ssres / sstot;
    }
    return s;
}

struct NormalityResult {
    double jb_statistic = 0;
    bool gaussian_5pct = false;
    bool valid = false;
};

/// Jarque-Bera test on the model's in-sample residuals (chi^2_2 5% critical
/// value 5.9915). Degenerate residuals are flagged, not scored.
inline NormalityResult residual_normality(const ArimaModel& m, const PriceSeries& x) {
    x.validate();
    auto w = detail::diff_vec(x.values, m.d);
    for (auto& v : w) v -= m.mean;
    auto eps = detail::css_residuals(w, m.phi, m.theta);
    const size_t n = eps.size();
    if (n < 8) throw std::invalid_argument("residual_normality: fewer than 8 residuals");

    NormalityResult res;
    double mean = std::accumulate(eps.begin(), eps.end(), 0.0) / n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double e : eps) {
        double d1 = e - mean;
        m2 += d1 * d1;
        m3 += d1 * d1 * d1;
        m4 += d1 * d1 * d1 * d1;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 == 0) return res;  // all-zero residuals
    double skew = m3 / std::pow(m2, 1.5);
    double kurt = m4 / (m2 * m2);
    res.jb_statistic = n * (skew * skew / 6.0 + (kurt - 3.0) * (kurt - 3.0) / 24.0);
    res.gaussian_5pct = res.jb_statistic < 5.991464547107979;
    res.valid = true;
    return res;
}

}  // namespace evplan
