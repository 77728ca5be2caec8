#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

namespace nlsdiag::fft {

namespace detail {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (dim, n, sign) under a mutex and
// executed with the new-array interface. FFTW_ESTIMATE keeps plans (and thus
// results) independent of timing measurements.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int dim, std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(dim, n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        const std::size_t total = dim == 1 ? n : n * n;
        std::vector<std::complex<double>> scratch(total);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = dim == 1
                             ? fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, flags)
                             : fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf,
                                                buf, sign, flags);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

inline PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace detail

/// Unnormalized in-place DFT: sum_j exp(sign * 2 pi i jk/n) data_j, per axis.
inline void transform(std::span<std::complex<double>> data, int dim, std::size_t n, int sign) {
    fftw_plan plan = detail::cache().get(dim, n, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

inline void forward(std::span<std::complex<double>> data, int dim, std::size_t n) {
    transform(data, dim, n, FFTW_FORWARD);
}

inline void backward(std::span<std::complex<double>> data, int dim, std::size_t n) {
    transform(data, dim, n, FFTW_BACKWARD);
}

}  // namespace nlsdiag::fft
