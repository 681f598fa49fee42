#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace fracshoot::detail {

namespace {

class FftwRealFft final : public RealFft {
public:
    explicit FftwRealFft(std::size_t n) : RealFft(n) {
        std::vector<double> re(n);
        std::vector<std::complex<double>> cx(n / 2 + 1);
        const int len = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_r2c_1d(len, re.data(), reinterpret_cast<fftw_complex*>(cx.data()), flags);
        inv_ = fftw_plan_dft_c2r_1d(len, reinterpret_cast<fftw_complex*>(cx.data()), re.data(), flags);
    }
    ~FftwRealFft() override {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    FftwRealFft(const FftwRealFft&) = delete;
    FftwRealFft& operator=(const FftwRealFft&) = delete;

    void forward(const double* in, std::complex<double>* out) const override {
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
    }
    void inverse(std::complex<double>* in, double* out) const override {
        fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(in), out);
    }

private:
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

}  // namespace

const RealFft& real_fft(std::size_t n) {
    // The FFTW planner is not re-entrant; plan execution is.
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<FftwRealFft>> plans;
    std::lock_guard lock(mutex);
    auto& slot = plans[n];
    if (!slot) {
        slot = std::make_unique<FftwRealFft>(n);
    }
    return *slot;
}

}  // namespace fracshoot::detail
