#include "core/spectrum.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/fft.hpp"

namespace sqz::spectrum {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> make_window(Window w, size_t n) {
    std::vector<double> win(n, 1.0);
    for (size_t i = 0; i < n; ++i) {
        const double x = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        switch (w) {
        case Window::kHann: win[i] = 0.5 * (1.0 - std::cos(x)); break;
        case Window::kHamming: win[i] = 0.54 - 0.46 * std::cos(x); break;
        case Window::kBlackman:
            win[i] = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
            break;
        case Window::kRect: break;
        }
    }
    return win;
}

} // namespace

double Spectrum::integral() const {
    if (frequencies.size() < 2) return 0.0;
    const double df = frequencies[1] - frequencies[0];
    double s = 0.0;
    for (double p : psd) s += p;
    return s * df;
}

Spectrum welch_psd(const std::vector<double> &series, double sample_rate,
                   size_t segment_length, double overlap_fraction,
                   Window window) {
    if (series.empty()) throw domain_error("welch_psd: empty series");
    if (segment_length < 2 || segment_length > series.size())
        throw domain_error("welch_psd: segment length must be in [2, n]");
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
        throw domain_error("welch_psd: overlap fraction must be in [0,1)");
    if (sample_rate <= 0.0) throw domain_error("welch_psd: bad sample rate");

    const size_t nseg = segment_length;
    auto hop = static_cast<size_t>(
        std::llround(static_cast<double>(nseg) * (1.0 - overlap_fraction)));
    if (hop == 0) hop = 1;

    const auto win = make_window(window, nseg);
    double wsum = 0.0, w2sum = 0.0;
    for (double w : win) {
        wsum += w;
        w2sum += w * w;
    }

    const size_t nbins = nseg / 2 + 1;
    std::vector<double> acc(nbins, 0.0);
    size_t count = 0;
    std::vector<double> seg(nseg);
    for (size_t start = 0; start + nseg <= series.size(); start += hop) {
        for (size_t i = 0; i < nseg; ++i) seg[i] = series[start + i] * win[i];
        const auto spec = fft::r2c(seg);
        for (size_t k = 0; k < nbins; ++k) acc[k] += std::norm(spec[k]);
        ++count;
    }

    Spectrum out;
    out.averaging_count = count;
    out.resolution_bandwidth = sample_rate * w2sum / (wsum * wsum);
    out.frequencies.resize(nbins);
    out.psd.resize(nbins);
    const double df = sample_rate / static_cast<double>(nseg);
    const double norm = 1.0 / (sample_rate * w2sum * static_cast<double>(count));
    for (size_t k = 0; k < nbins; ++k) {
        out.frequencies[k] = df * static_cast<double>(k);
        const bool interior = k != 0 && !(nseg % 2 == 0 && k == nbins - 1);
        out.psd[k] = acc[k] * norm * (interior ? 2.0 : 1.0);
    }
    return out;
}

double band_mean(const Spectrum &s, double f_lo, double f_hi) {
    double acc = 0.0;
    size_t n = 0;
    for (size_t k = 0; k < s.frequencies.size(); ++k) {
        if (s.frequencies[k] >= f_lo && s.frequencies[k] < f_hi) {
            acc += s.psd[k];
            ++n;
        }
    }
    if (n == 0) throw domain_error("band_mean: empty band");
    return acc / static_cast<double>(n);
}

} // namespace sqz::spectrum
