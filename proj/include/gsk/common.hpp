#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace gsk {

using cx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct GridMismatchError : Error {
    explicit GridMismatchError(const std::string& msg) : Error(msg) {}
};

/// Eigenvalue collision with a single eigendirection; callers must perturb k.
struct DefectiveMatrixError : Error {
    explicit DefectiveMatrixError(const std::string& msg) : Error(msg) {}
};

struct NoTuringPointError : Error {
    explicit NoTuringPointError(const std::string& msg) : Error(msg) {}
};

/// max_k Re lambda1 attained at k = 0.
struct HomogeneousInstabilityError : Error {
    explicit HomogeneousInstabilityError(const std::string& msg) : Error(msg) {}
};

/// Im lambda1(k_c) != 0; only pure Turing points are supported.
struct TuringHopfError : Error {
    explicit TuringHopfError(const std::string& msg) : Error(msg) {}
};

/// The V0 / V2 correction solve hit a near-singular linear symbol.
struct ResonantSolveError : Error {
    explicit ResonantSolveError(const std::string& msg) : Error(msg) {}
};

/// State sup-norm bound exceeded during time integration.
struct BlowUpError : Error {
    double time;
    BlowUpError(const std::string& msg, double t) : Error(msg), time(t) {}
};

/// A validation command's asserted bound failed.
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace gsk
