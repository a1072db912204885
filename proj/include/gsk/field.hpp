#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gsk/fft.hpp"
#include "gsk/grid.hpp"

namespace gsk {

/// m-component complex coefficient array on a periodic Fourier grid.
/// Coefficients are mode amplitudes: component i in physical space is
/// u_i(x_j) = sum_m c_i(m) e^{i k_m x_j}. The continuum-normalized transform
/// used by the X^r norms is c(k) * length/(2 pi).
class SpectralField {
  public:
    SpectralField() = default;
    SpectralField(const Grid1D& grid, int m)
        : grid_(grid), comps_(m, std::vector<cx>(grid.n, cx{0.0, 0.0})) {}

    const Grid1D& grid() const { return grid_; }
    int components() const { return static_cast<int>(comps_.size()); }
    int n() const { return grid_.n; }

    std::vector<cx>& comp(int i) { return comps_[i]; }
    const std::vector<cx>& comp(int i) const { return comps_[i]; }

    cx& at(int i, int mode) { return comps_[i][grid_.slot(mode)]; }
    cx at(int i, int mode) const { return comps_[i][grid_.slot(mode)]; }

    void set_zero() {
        for (auto& c : comps_) std::fill(c.begin(), c.end(), cx{0.0, 0.0});
    }

    std::vector<cx> to_physical(int i) const { return fft::backward(comps_[i]); }

    void from_physical(int i, const std::vector<cx>& phys) {
        fft::forward(static_cast<int>(phys.size()), phys.data(), comps_[i].data());
    }

    /// Relative deviation from coeff(-k) = conj(coeff(k)).
    double hermitian_asymmetry() const {
        double dev = 0.0, scale = 0.0;
        for (const auto& c : comps_) {
            for (int j = 0; j < grid_.n; ++j) {
                int m = grid_.mode_index(j);
                scale = std::max(scale, std::abs(c[j]));
                if (m <= 0 || m == grid_.n / 2) continue;
                dev = std::max(dev, std::abs(c[grid_.slot(m)] - std::conj(c[grid_.slot(-m)])));
            }
        }
        return scale > 0.0 ? dev / scale : 0.0;
    }

    /// Largest |value| over the physical grid and all components.
    double sup_physical() const {
        double s = 0.0;
        for (int i = 0; i < components(); ++i)
            for (const cx& v : to_physical(i)) s = std::max(s, std::abs(v));
        return s;
    }

    /// Largest per-component sum of |coefficients|; bounds sup_physical().
    double l1_coeff_bound() const {
        double s = 0.0;
        for (const auto& c : comps_) {
            double acc = 0.0;
            for (const cx& v : c) acc += std::abs(v);
            s = std::max(s, acc);
        }
        return s;
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same(o);
        for (int i = 0; i < components(); ++i)
            for (int j = 0; j < grid_.n; ++j) comps_[i][j] += o.comps_[i][j];
        return *this;
    }

    SpectralField& operator-=(const SpectralField& o) {
        check_same(o);
        for (int i = 0; i < components(); ++i)
            for (int j = 0; j < grid_.n; ++j) comps_[i][j] -= o.comps_[i][j];
        return *this;
    }

    SpectralField& operator*=(double s) {
        for (auto& c : comps_)
            for (cx& v : c) v *= s;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

    void check_same(const SpectralField& o) const {
        if (!(grid_ == o.grid_) || components() != o.components())
            throw GridMismatchError("SpectralField: grid or component mismatch");
    }

  private:
    Grid1D grid_;
    std::vector<std::vector<cx>> comps_;
};

}  // namespace gsk
