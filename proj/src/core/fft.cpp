#include "core/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace sqz::fft {

namespace {
// FFTW plan creation/destruction is not thread safe; execution is.
std::mutex &planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

std::vector<std::complex<double>> r2c(const std::vector<double> &in) {
    const size_t n = in.size();
    std::vector<double> buf(in);
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.data(),
                                    reinterpret_cast<fftw_complex *>(out.data()),
                                    FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> c2r(const std::vector<std::complex<double>> &in, size_t n) {
    std::vector<std::complex<double>> buf(in);
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                    reinterpret_cast<fftw_complex *>(buf.data()),
                                    out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

} // namespace sqz::fft
