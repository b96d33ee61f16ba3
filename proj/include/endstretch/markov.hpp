#pragma once

#include <optional>

#include "endstretch/complex.hpp"

namespace endstretch {

struct IncidenceReport {
    IntMatrix incidence;
    double spectral_radius = 0;
    double target_lambda = 0;
    double relative_error = 0;
    std::optional<std::int64_t> exact_root;  // set when the largest root is an integer
};

// blockdiag(M, M) when doubled, M otherwise.
IntMatrix incidence_matrix(const IntMatrix& m, bool doubled);

// Spectral radius of `incidence` (exact polynomial route) against `target`, no threshold.
IncidenceReport incidence_report(const IntMatrix& incidence, double target);

// Compares the spectral radius of `incidence` (exact polynomial route) with `target`.
// Throws a verification error carrying both values when they differ beyond tol (relative).
IncidenceReport verify_incidence(const IntMatrix& incidence, double target, double tol = 1e-9);

// Incidence of the constructed map against the Perron root of M and the report's stretch factor.
IncidenceReport verify_stretch(const IntMatrix& m, const SurfaceReport& report, double tol = 1e-9);

}  // namespace endstretch
