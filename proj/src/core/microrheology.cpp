#include "core/microrheology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/quantum.hpp"

namespace sqz::microrheology {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char *msg) {
    if (!ok) throw domain_error(msg);
}

} // namespace

double pairwise_sum(const double *data, size_t n) {
    if (n <= 128) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double> &data) {
    return pairwise_sum(data.data(), data.size());
}

void MsdCurve::validate() const {
    require(lags.size() == msd.size() && lags.size() == stderr_m2.size() &&
                lags.size() == n_pairs.size(),
            "MsdCurve: ragged arrays");
    for (size_t i = 1; i < lags.size(); ++i)
        require(lags[i] > lags[i - 1], "MsdCurve: lags must ascend");
    for (size_t i = 0; i < msd.size(); ++i)
        require(msd[i] >= 0.0 && stderr_m2[i] >= 0.0,
                "MsdCurve: negative msd or stderr");
}

MsdCurve msd(const std::vector<double> &series, double dt,
             const std::vector<double> &lags) {
    require(series.size() >= 2, "msd: series too short");
    require(dt > 0.0, "msd: dt must be > 0");
    require(!lags.empty(), "msd: empty lag list");
    const size_t n = series.size();

    MsdCurve out;
    std::vector<double> d2;
    for (double lag : lags) {
        const double ratio = lag / dt;
        const auto k = static_cast<size_t>(std::llround(ratio));
        require(k >= 1 && std::fabs(ratio - static_cast<double>(k)) <=
                              1e-9 * std::max(1.0, ratio),
                "msd: lag is not on the sample grid");
        require(k < n, "msd: lag exceeds the record length");

        const size_t pairs = n - k;
        d2.resize(pairs);
        for (size_t i = 0; i < pairs; ++i) {
            const double d = series[i + k] - series[i];
            d2[i] = d * d;
        }
        const double mean = pairwise_sum(d2) / static_cast<double>(pairs);
        // Overlapping pairs are correlated; a conservative effective count
        // of pairs/k stands in for the exact estimator covariance.
        double se = 0.0;
        if (pairs > 1) {
            std::vector<double> centered(pairs);
            for (size_t i = 0; i < pairs; ++i) {
                const double c = d2[i] - mean;
                centered[i] = c * c;
            }
            const double var =
                pairwise_sum(centered) / static_cast<double>(pairs - 1);
            const double n_eff =
                std::max(1.0, static_cast<double>(pairs) / static_cast<double>(k));
            se = std::sqrt(var / n_eff);
        }
        out.lags.push_back(static_cast<double>(k) * dt);
        out.msd.push_back(mean);
        out.stderr_m2.push_back(se);
        out.n_pairs.push_back(pairs);
    }
    out.validate();
    return out;
}

std::vector<double> log_lag_grid(double dt, double lag_min, double lag_max,
                                 int per_decade) {
    require(dt > 0.0 && lag_min > 0.0 && lag_max > lag_min,
            "log_lag_grid: bad range");
    require(per_decade >= 1, "log_lag_grid: per_decade must be >= 1");
    const double decades = std::log10(lag_max / lag_min);
    const int n_pts = static_cast<int>(std::ceil(decades * per_decade)) + 1;
    std::vector<uint64_t> ks;
    for (int i = 0; i < n_pts; ++i) {
        const double t =
            lag_min * std::pow(10.0, decades * i / std::max(1, n_pts - 1));
        const auto k = static_cast<uint64_t>(std::llround(t / dt));
        if (k >= 1) ks.push_back(k);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    std::vector<double> lags;
    lags.reserve(ks.size());
    for (auto k : ks) lags.push_back(static_cast<double>(k) * dt);
    return lags;
}

AlphaFit fit_alpha(const MsdCurve &curve, double lag_min, double lag_max,
                   double noise_offset) {
    curve.validate();
    require(lag_max > lag_min && lag_min > 0.0, "fit_alpha: bad lag range");
    require(noise_offset >= 0.0, "fit_alpha: negative noise offset");

    std::vector<double> lt, lv, var;
    bool have_weights = true;
    double used_min = 0.0, used_max = 0.0;
    for (size_t i = 0; i < curve.size(); ++i) {
        const double lag = curve.lags[i];
        if (lag < lag_min * (1.0 - 1e-12) || lag > lag_max * (1.0 + 1e-12))
            continue;
        const double v = curve.msd[i] - noise_offset;
        if (noise_offset == 0.0)
            require(v > 0.0, "fit_alpha: nonpositive msd in fit range");
        else if (v <= 0.0)
            continue; // noise-dominated lag: gap, not imputed
        if (used_min == 0.0) used_min = lag;
        used_max = lag;
        lt.push_back(std::log(lag));
        lv.push_back(std::log(v));
        const double se = curve.stderr_m2[i];
        if (se > 0.0 && std::isfinite(se))
            var.push_back((se / v) * (se / v));
        else
            have_weights = false;
    }
    require(lt.size() >= 3, "fit_alpha: fewer than 3 usable lags in range");

    const size_t m = lt.size();
    std::vector<double> w(m, 1.0);
    if (have_weights && var.size() == m)
        for (size_t i = 0; i < m; ++i) w[i] = 1.0 / var[i];

    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (size_t i = 0; i < m; ++i) {
        sw += w[i];
        swx += w[i] * lt[i];
        swy += w[i] * lv[i];
        swxx += w[i] * lt[i] * lt[i];
        swxy += w[i] * lt[i] * lv[i];
    }
    const double det = sw * swxx - swx * swx;
    require(std::fabs(det) > 1e-30 * sw * swxx,
            "fit_alpha: degenerate lag grid");

    AlphaFit fit;
    fit.alpha = (sw * swxy - swx * swy) / det;
    fit.log_2d = (swxx * swy - swx * swxy) / det;
    fit.lag_min = used_min;
    fit.lag_max = used_max;
    fit.points_used = m;

    double rss_w = 0.0, rss = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double r = lv[i] - (fit.alpha * lt[i] + fit.log_2d);
        rss_w += w[i] * r * r;
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / static_cast<double>(m));

    // Known per-point variances: covariance straight from the normal
    // equations. Unweighted: scale by the residual variance.
    const double scale =
        (have_weights && var.size() == m)
            ? 1.0
            : (m > 2 ? rss / static_cast<double>(m - 2) : 0.0);
    fit.alpha_stderr = std::sqrt(scale * sw / det);
    fit.d_stderr = std::sqrt(scale * swxx / det);
    return fit;
}

double loss_storage_ratio(double alpha) {
    require(alpha > 0.0 && alpha <= 1.0,
            "loss_storage_ratio: alpha must be in (0,1]");
    if (alpha == 1.0) return std::numeric_limits<double>::infinity();
    return std::tan(kPi * alpha / 2.0);
}

AlphaTrack windowed_alpha(const std::vector<double> &series, double dt,
                          double window_length, double hop, double lag_min,
                          double lag_max, double noise_offset,
                          int lags_per_decade) {
    require(dt > 0.0 && window_length > 0.0 && hop > 0.0,
            "windowed_alpha: bad window parameters");
    require(window_length >= 10.0 * lag_max,
            "windowed_alpha: window shorter than 10x the maximum lag");
    const auto win = static_cast<size_t>(std::llround(window_length / dt));
    const auto step = static_cast<size_t>(std::llround(hop / dt));
    require(step >= 1, "windowed_alpha: hop below one sample");
    require(win <= series.size(), "windowed_alpha: window longer than record");

    const auto lags = log_lag_grid(dt, lag_min, lag_max, lags_per_decade);
    AlphaTrack track;
    track.window_length = static_cast<double>(win) * dt;
    track.hop = static_cast<double>(step) * dt;
    for (size_t start = 0; start + win <= series.size(); start += step) {
        std::vector<double> slice(series.begin() + start,
                                  series.begin() + start + win);
        track.window_centers.push_back(
            (static_cast<double>(start) + static_cast<double>(win) / 2.0) * dt);
        try {
            const auto curve = msd(slice, dt, lags);
            const auto fit = fit_alpha(curve, lag_min, lag_max, noise_offset);
            track.alphas.push_back(fit.alpha);
            track.stderrs.push_back(fit.alpha_stderr);
        } catch (const domain_error &) {
            track.alphas.push_back(kNaN);
            track.stderrs.push_back(kNaN);
        }
    }
    return track;
}

PrecisionReport precision_comparison(const std::vector<AlphaFit> &classical,
                                     const std::vector<AlphaFit> &squeezed,
                                     double floor_classical,
                                     double floor_squeezed) {
    require(!classical.empty() && classical.size() == squeezed.size(),
            "precision_comparison: lists must be nonempty and matched");
    std::vector<double> se_cl, se_sq;
    se_cl.reserve(classical.size());
    se_sq.reserve(squeezed.size());
    for (const auto &f : classical) se_cl.push_back(f.alpha_stderr);
    for (const auto &f : squeezed) se_sq.push_back(f.alpha_stderr);
    const double mean_cl = pairwise_sum(se_cl) / static_cast<double>(se_cl.size());
    const double mean_sq = pairwise_sum(se_sq) / static_cast<double>(se_sq.size());
    require(mean_cl > 0.0, "precision_comparison: zero classical stderr");

    PrecisionReport rep;
    rep.precision_gain = 1.0 - mean_sq / mean_cl;
    rep.rate_gain = rep.precision_gain >= 0.0 && rep.precision_gain < 1.0
                        ? quantum::measurement_rate_gain(rep.precision_gain)
                        : kNaN;
    rep.db_equivalent =
        (floor_classical > 0.0 && floor_squeezed > 0.0)
            ? -10.0 * std::log10(floor_squeezed / floor_classical)
            : kNaN;
    return rep;
}

} // namespace sqz::microrheology
