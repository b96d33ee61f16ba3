#include "endstretch/markov.hpp"

#include <cmath>
#include <sstream>

namespace endstretch {

IntMatrix incidence_matrix(const IntMatrix& m, bool doubled) {
    if (!doubled) return m;
    const std::size_t n = m.size();
    IntMatrix out(2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out.set(i, j, m(i, j));
            out.set(n + i, n + j, m(i, j));
        }
    return out;
}

IncidenceReport incidence_report(const IntMatrix& incidence, double target) {
    if (!(target > 0)) fail(ErrorCode::invalid_input, "target stretch factor must be positive");
    IncidenceReport r;
    r.incidence = incidence;
    r.target_lambda = target;
    const auto poly = char_poly(incidence);
    BigInt root;
    if (largest_root_is_integer(poly, root)) {
        r.exact_root = root.convert_to<std::int64_t>();
        r.spectral_radius = static_cast<double>(*r.exact_root);
    } else {
        r.spectral_radius = largest_real_root(poly);
    }
    r.relative_error = std::abs(r.spectral_radius - target) / target;
    return r;
}

IncidenceReport verify_incidence(const IntMatrix& incidence, double target, double tol) {
    auto r = incidence_report(incidence, target);
    if (r.relative_error > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "incidence spectral radius " << r.spectral_radius << " differs from stretch factor " << target
           << " (relative error " << r.relative_error << ")";
        fail(ErrorCode::verification, os.str());
    }
    return r;
}

IncidenceReport verify_stretch(const IntMatrix& m, const SurfaceReport& report, double tol) {
    const double lambda = perron_eigendata(m).lambda;
    if (std::abs(report.stretch_factor - lambda) > tol * lambda) {
        std::ostringstream os;
        os.precision(17);
        os << "surface report stretch factor " << report.stretch_factor << " differs from Perron root " << lambda;
        fail(ErrorCode::verification, os.str());
    }
    return verify_incidence(incidence_matrix(m, report.doubled), lambda, tol);
}

}  // namespace endstretch
