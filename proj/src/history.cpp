#include "fracshoot/history.hpp"

#include "fracshoot/errors.hpp"
#include "fft.hpp"

#include <algorithm>
#include <bit>

namespace fracshoot {

namespace {

constexpr std::size_t kBase = 16;         // leaf block, summed directly
constexpr std::size_t kMinFftBlock = 64;  // smaller cross updates are summed directly

std::size_t level_of(std::size_t block) {
    return static_cast<std::size_t>(std::countr_zero(block));
}

}  // namespace

std::vector<double> history_sum_direct(std::span<const double> w, std::span<const double> samples) {
    if (w.size() < samples.size()) {
        throw DomainError("history_sum_direct: weight sequence shorter than samples");
    }
    std::vector<double> out(samples.size(), 0.0);
    for (std::size_t n = 0; n < samples.size(); ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= n; ++j) {
            acc += w[n - j] * samples[j];
        }
        out[n] = acc;
    }
    return out;
}

std::vector<double> history_sum(std::span<const double> w, std::span<const double> samples,
                                std::size_t fft_threshold) {
    if (w.size() < samples.size()) {
        throw DomainError("history_sum: weight sequence shorter than samples");
    }
    const std::size_t n = samples.size();
    if (n == 0) {
        return {};
    }
    std::vector<double> kernel(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n));
    const double w0 = kernel[0];
    CausalConvolution engine({std::move(kernel)}, n, fft_threshold);

    std::vector<double> f(samples.begin(), samples.end());
    std::vector<double> out(n, 0.0);
    engine.run(f, 0, [&](std::size_t m, std::span<const double> hist) {
        out[m] = hist[0] + w0 * samples[m];
        return samples[m];
    });
    return out;
}

struct CausalConvolution::Workspace {
    std::span<double> f;
    std::vector<std::vector<double>> far;  // accumulated contributions from completed blocks
    std::vector<double> history;
    std::vector<double> fft_in;
    std::vector<double> fft_out;
    std::vector<std::complex<double>> x_hat;
    std::vector<std::complex<double>> prod;
};

CausalConvolution::CausalConvolution(std::vector<std::vector<double>> kernels, std::size_t n_nodes,
                                     std::size_t fft_threshold)
    : kernels_(std::move(kernels)), n_nodes_(n_nodes) {
    if (kernels_.empty()) {
        throw DomainError("CausalConvolution: at least one kernel is required");
    }
    for (const auto& k : kernels_) {
        if (k.size() < n_nodes_) {
            throw DomainError("CausalConvolution: kernel shorter than the node count");
        }
    }
    use_fft_ = n_nodes_ > fft_threshold && n_nodes_ > kBase;
    padded_ = use_fft_ ? kBase * std::bit_ceil((n_nodes_ + kBase - 1) / kBase) : n_nodes_;
    for (auto& k : kernels_) {
        k.resize(std::max(padded_, k.size()), 0.0);
        std::fill(k.begin() + static_cast<std::ptrdiff_t>(n_nodes_), k.end(), 0.0);
    }
    if (!use_fft_) {
        return;
    }

    spectra_.resize(level_of(padded_) + 1);
    std::vector<double> segment;
    for (std::size_t block = kMinFftBlock; block <= padded_; block *= 2) {
        const auto& fft = detail::real_fft(block);
        auto& per_kernel = spectra_[level_of(block)];
        per_kernel.resize(kernels_.size());
        segment.assign(block, 0.0);
        for (std::size_t k = 0; k < kernels_.size(); ++k) {
            // segment[e] = K[e + 1]; lags 1..block-1 cover every (left, right) pair.
            std::copy_n(kernels_[k].begin() + 1, block - 1, segment.begin());
            segment[block - 1] = 0.0;
            per_kernel[k].resize(fft.spectrum_size());
            fft.forward(segment.data(), per_kernel[k].data());
        }
    }
}

void CausalConvolution::run(std::span<double> samples, std::size_t first, const StepFn& step) const {
    if (samples.size() != n_nodes_) {
        throw DomainError("CausalConvolution::run: sample buffer size mismatch");
    }
    Workspace ws;
    ws.far.assign(kernels_.size(), std::vector<double>(padded_, 0.0));
    ws.history.assign(kernels_.size(), 0.0);
    std::vector<double> padded_samples;
    if (padded_ != n_nodes_) {
        padded_samples.assign(padded_, 0.0);
        std::copy_n(samples.begin(), std::min(first, n_nodes_), padded_samples.begin());
        ws.f = padded_samples;
    } else {
        ws.f = samples;
    }

    if (use_fft_) {
        solve_block(ws, 0, padded_, first, step);
    } else {
        base_block(ws, 0, n_nodes_, first, step);
    }

    if (padded_ != n_nodes_) {
        std::copy_n(padded_samples.begin(), n_nodes_, samples.begin());
    }
}

void CausalConvolution::solve_block(Workspace& ws, std::size_t lo, std::size_t hi, std::size_t first,
                                    const StepFn& step) const {
    if (lo >= n_nodes_) {
        return;
    }
    if (hi - lo <= kBase) {
        base_block(ws, lo, std::min(hi, n_nodes_), first, step);
        return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    solve_block(ws, lo, mid, first, step);
    if (mid < n_nodes_) {
        cross_update(ws, lo, mid, hi);
        solve_block(ws, mid, hi, first, step);
    }
}

void CausalConvolution::base_block(Workspace& ws, std::size_t lo, std::size_t hi, std::size_t first,
                                   const StepFn& step) const {
    for (std::size_t m = std::max(lo, first); m < hi; ++m) {
        for (std::size_t k = 0; k < kernels_.size(); ++k) {
            const auto& kern = kernels_[k];
            double acc = ws.far[k][m];
            for (std::size_t j = lo; j < m; ++j) {
                acc += kern[m - j] * ws.f[j];
            }
            ws.history[k] = acc;
        }
        ws.f[m] = step(m, ws.history);
    }
}

void CausalConvolution::cross_update(Workspace& ws, std::size_t lo, std::size_t mid, std::size_t hi) const {
    const std::size_t block = hi - lo;
    const std::size_t half = mid - lo;
    const std::size_t n_hi = std::min(hi, n_nodes_);

    if (block < kMinFftBlock) {
        for (std::size_t k = 0; k < kernels_.size(); ++k) {
            const auto& kern = kernels_[k];
            auto& far = ws.far[k];
            for (std::size_t n = mid; n < n_hi; ++n) {
                double acc = 0.0;
                for (std::size_t j = lo; j < mid; ++j) {
                    acc += kern[n - j] * ws.f[j];
                }
                far[n] += acc;
            }
        }
        return;
    }

    const auto& fft = detail::real_fft(block);
    const std::size_t spec = fft.spectrum_size();
    ws.fft_in.assign(block, 0.0);
    std::copy_n(ws.f.begin() + static_cast<std::ptrdiff_t>(lo), half, ws.fft_in.begin());
    ws.x_hat.resize(spec);
    ws.prod.resize(spec);
    ws.fft_out.resize(block);
    fft.forward(ws.fft_in.data(), ws.x_hat.data());

    const double scale = 1.0 / static_cast<double>(block);
    const auto& per_kernel = spectra_[level_of(block)];
    for (std::size_t k = 0; k < kernels_.size(); ++k) {
        const auto& k_hat = per_kernel[k];
        for (std::size_t i = 0; i < spec; ++i) {
            ws.prod[i] = ws.x_hat[i] * k_hat[i];
        }
        fft.inverse(ws.prod.data(), ws.fft_out.data());
        // Circular convolution of length `block` is alias-free at indices half-1 .. block-2.
        auto& far = ws.far[k];
        for (std::size_t n = mid; n < n_hi; ++n) {
            far[n] += scale * ws.fft_out[half - 1 + (n - mid)];
        }
    }
}

}  // namespace fracshoot
