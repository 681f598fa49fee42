#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracshoot {

/// Step counts at or below this use plain O(N^2) summation.
inline constexpr std::size_t kDefaultFftThreshold = 64;

/// y_n = sum_{j<=n} w_{n-j} s_j for n = 0..len(s)-1, summed directly.
std::vector<double> history_sum_direct(std::span<const double> w, std::span<const double> samples);

/// Same lower-triangular convolution, evaluated through the blocked FFT
/// scheme that the time-stepping solvers use. Requires w.size() >= samples.size().
std::vector<double> history_sum(std::span<const double> w, std::span<const double> samples,
                                std::size_t fft_threshold = kDefaultFftThreshold);

/// Causal Volterra convolution driven one node at a time.
///
/// For every node m the engine supplies, per kernel K,
///     history_K(m) = sum_{j<m} K[m-j] * f_j
/// before f_m is known, then receives f_m from the caller. The nodes are
/// processed in a binary block recursion: once the left half of a block is
/// complete, its contribution to the right half is added with one FFT-based
/// Toeplitz product, giving O(N log^2 N) work overall.
///
/// The object is immutable after construction (kernel spectra are
/// precomputed per block size), so one instance can drive concurrent runs.
class CausalConvolution {
public:
    /// Called for each node m >= first; `history` holds one entry per kernel.
    /// Returns f_m.
    using StepFn = std::function<double(std::size_t m, std::span<const double> history)>;

    /// kernels[k][d] is the weight of lag d; entry d = 0 is never used.
    CausalConvolution(std::vector<std::vector<double>> kernels, std::size_t n_nodes,
                      std::size_t fft_threshold = kDefaultFftThreshold);

    std::size_t n_nodes() const noexcept { return n_nodes_; }
    std::size_t kernel_count() const noexcept { return kernels_.size(); }
    bool uses_fft() const noexcept { return use_fft_; }

    /// samples.size() must equal n_nodes(); samples[0..first) are inputs, the
    /// rest are filled by `step`.
    void run(std::span<double> samples, std::size_t first, const StepFn& step) const;

private:
    struct Workspace;

    void solve_block(Workspace& ws, std::size_t lo, std::size_t hi, std::size_t first,
                     const StepFn& step) const;
    void base_block(Workspace& ws, std::size_t lo, std::size_t hi, std::size_t first,
                    const StepFn& step) const;
    void cross_update(Workspace& ws, std::size_t lo, std::size_t mid, std::size_t hi) const;

    std::vector<std::vector<double>> kernels_;  // zero-padded to padded_
    std::size_t n_nodes_;
    std::size_t padded_;
    bool use_fft_;
    // spectra_[level][kernel]: transform of K[1..L-1] for block size L = kBase << level
    std::vector<std::vector<std::vector<std::complex<double>>>> spectra_;
};

}  // namespace fracshoot
