#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "gsk/common.hpp"

namespace gsk::fft {

namespace detail {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

// Plans are cached per transform size; creation is serialized because FFTW's
// planner is not thread-safe. Execution through the new-array interface is.
inline PlanPair& plans(int n) {
    static std::map<int, PlanPair> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cx> a(n), b(n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    PlanPair p;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.fwd = fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD, flags);
    p.bwd = fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD, flags);
    return cache.emplace(n, p).first->second;
}

}  // namespace detail

/// physical -> coefficients, normalized so that u_j = sum_m c_m e^{i k_m x_j}.
inline void forward(int n, const cx* phys, cx* coef) {
    auto& p = detail::plans(n);
    fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(const_cast<cx*>(phys)),
                     reinterpret_cast<fftw_complex*>(coef));
    double s = 1.0 / n;
    for (int j = 0; j < n; ++j) coef[j] *= s;
}

/// coefficients -> physical.
inline void backward(int n, const cx* coef, cx* phys) {
    auto& p = detail::plans(n);
    fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(const_cast<cx*>(coef)),
                     reinterpret_cast<fftw_complex*>(phys));
}

inline std::vector<cx> forward(const std::vector<cx>& phys) {
    std::vector<cx> out(phys.size());
    forward(static_cast<int>(phys.size()), phys.data(), out.data());
    return out;
}

inline std::vector<cx> backward(const std::vector<cx>& coef) {
    std::vector<cx> out(coef.size());
    backward(static_cast<int>(coef.size()), coef.data(), out.data());
    return out;
}

}  // namespace gsk::fft
