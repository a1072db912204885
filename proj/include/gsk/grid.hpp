#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

#include "gsk/common.hpp"

namespace gsk {

/// Periodic collocation grid on [0, length) with n points (n a power of two).
/// Coefficient storage follows FFT index order: slot j holds the mode with
/// integer wavenumber j for j <= n/2 and j - n otherwise, i.e. modes
/// {-n/2+1, ..., n/2} are all representable.
struct Grid1D {
    int n = 0;
    double length = 0.0;

    Grid1D() = default;
    Grid1D(int n_, double length_) : n(n_), length(length_) {
        if (n < 16 || !std::has_single_bit(static_cast<std::uint32_t>(n)))
            throw ConfigError("Grid1D: n must be a power of two >= 16");
        if (!(length > 0.0)) throw ConfigError("Grid1D: length must be positive");
    }

    double dk() const { return 2.0 * pi / length; }

    /// Signed integer mode index for storage slot j.
    int mode_index(int j) const { return j <= n / 2 ? j : j - n; }

    /// Wavenumber of storage slot j.
    double wavenumber(int j) const { return dk() * mode_index(j); }

    /// Storage slot of signed mode index m (m in {-n/2+1,...,n/2}).
    int slot(int m) const { return m >= 0 ? m : m + n; }

    double x(int j) const { return length * j / n; }

    /// Largest retained |mode index| for dealiased products of the given order
    /// (2/3 rule for quadratic, 1/2 rule for cubic terms).
    int dealias_cutoff(int order) const { return order <= 2 ? n / 3 : n / 4; }

    bool operator==(const Grid1D& o) const { return n == o.n && length == o.length; }
};

}  // namespace gsk
