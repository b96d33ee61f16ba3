#include "endstretch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace endstretch {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_input: return "invalid-input";
        case ErrorCode::precondition: return "precondition";
        case ErrorCode::convergence: return "convergence";
        case ErrorCode::verification: return "verification";
        case ErrorCode::internal: return "internal";
        case ErrorCode::io: return "io";
        case ErrorCode::parse: return "parse";
        case ErrorCode::schema_version: return "schema-version";
        case ErrorCode::missing_data: return "missing-data";
    }
    return "unknown";
}

// ---------------------------------------------------------------- IntMatrix

IntMatrix::IntMatrix(std::size_t n) : n_(n), a_(n * n, 0) {}

IntMatrix::IntMatrix(std::size_t n, std::vector<std::int64_t> entries) : n_(n), a_(std::move(entries)) {
    if (a_.size() != n * n) fail(ErrorCode::invalid_input, "matrix entry count does not match dimension");
    for (auto v : a_)
        if (v < 0) fail(ErrorCode::invalid_input, "matrix entries must be non-negative");
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    const std::size_t n = rows.size();
    std::vector<std::int64_t> flat;
    flat.reserve(n * n);
    for (const auto& r : rows) {
        if (r.size() != n) fail(ErrorCode::invalid_input, "matrix must be square");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return IntMatrix(n, std::move(flat));
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

void IntMatrix::set(std::size_t i, std::size_t j, std::int64_t v) {
    if (v < 0) fail(ErrorCode::invalid_input, "matrix entries must be non-negative");
    a_[i * n_ + j] = v;
}

std::vector<std::vector<std::int64_t>> IntMatrix::rows() const {
    std::vector<std::vector<std::int64_t>> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i].assign(a_.begin() + i * n_, a_.begin() + (i + 1) * n_);
    return out;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) t.a_[j * n_ + i] = a_[i * n_ + j];
    return t;
}

std::int64_t IntMatrix::row_sum(std::size_t i) const {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
    return s;
}

std::int64_t IntMatrix::column_sum(std::size_t j) const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
    return s;
}

std::int64_t IntMatrix::total() const {
    std::int64_t s = 0;
    for (auto v : a_) s += v;
    return s;
}

Digraph Digraph::of(const IntMatrix& m) {
    Digraph g;
    g.vertex_count = m.size();
    g.multiplicity.assign(m.size(), std::vector<std::int64_t>(m.size(), 0));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) g.multiplicity[j][i] = m(i, j);
    return g;
}

std::vector<std::size_t> Digraph::successors(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < vertex_count; ++w)
        if (multiplicity[v][w] > 0) out.push_back(w);
    return out;
}

// ------------------------------------------------------------- graph tests

namespace {

using BoolMatrix = std::vector<std::vector<bool>>;

BoolMatrix pattern(const IntMatrix& m) {
    BoolMatrix p(m.size(), std::vector<bool>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) p[i][j] = m(i, j) > 0;
    return p;
}

BoolMatrix multiply(const BoolMatrix& a, const BoolMatrix& b) {
    const std::size_t n = a.size();
    BoolMatrix c(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (a[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (b[k][j]) c[i][j] = true;
    return c;
}

std::vector<bool> reach(const Digraph& g, std::size_t start, bool reverse) {
    std::vector<bool> seen(g.vertex_count, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (std::size_t w = 0; w < g.vertex_count; ++w) {
            auto mult = reverse ? g.multiplicity[w][v] : g.multiplicity[v][w];
            if (mult > 0 && !seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return seen;
}

std::size_t wielandt_bound(std::size_t n) { return n * n - 2 * n + 2; }

}  // namespace

bool is_irreducible(const IntMatrix& m) {
    if (m.empty()) fail(ErrorCode::invalid_input, "matrix has dimension 0");
    auto g = Digraph::of(m);
    auto fwd = reach(g, 0, false);
    auto bwd = reach(g, 0, true);
    return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
           std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

bool is_primitive(const IntMatrix& m) {
    if (!is_irreducible(m)) fail(ErrorCode::precondition, "primitivity requires an irreducible matrix");
    // An irreducible matrix is primitive iff its Wielandt-bound power is positive.
    auto base = pattern(m);
    auto p = base;
    for (std::size_t k = 1; k < wielandt_bound(m.size()); ++k) p = multiply(p, base);
    for (const auto& row : p)
        for (bool b : row)
            if (!b) return false;
    return true;
}

std::size_t positive_column_power(const IntMatrix& m, std::size_t col) {
    auto base = pattern(m);
    auto p = base;
    for (std::size_t k = 1; k <= wielandt_bound(m.size()); ++k) {
        bool ok = true;
        for (std::size_t i = 0; i < m.size(); ++i) ok = ok && p[i][col];
        if (ok) return k;
        p = multiply(p, base);
    }
    return 0;
}

// -------------------------------------------------------------- polynomials

BigRational IntPolynomial::evaluate(const BigRational& x) const {
    BigRational acc = 0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + BigRational(*it);
    return acc;
}

double IntPolynomial::evaluate(double x) const {
    long double acc = 0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
        acc = acc * x + it->convert_to<long double>();
    return static_cast<double>(acc);
}

std::string IntPolynomial::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const BigInt& c = coefficients[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        BigInt mag = abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        if (mag != 1 || k == 0) os << mag;
        if (k >= 1) os << "x";
        if (k >= 2) os << "^" << k;
    }
    if (first) os << "0";
    return os.str();
}

IntPolynomial char_poly(const IntMatrix& m) {
    // Faddeev-LeVerrier: N_k = A N_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A N_k)/k.
    const std::size_t n = m.size();
    std::vector<BigInt> a(n * n), nk(n * n, 0), tmp(n * n);
    for (std::size_t i = 0; i < n * n; ++i) a[i] = m.entries()[i];
    std::vector<BigInt> c(n + 1, 0);
    c[n] = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        // tmp = A * N_{k-1}
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                BigInt s = 0;
                for (std::size_t l = 0; l < n; ++l) s += a[i * n + l] * nk[l * n + j];
                tmp[i * n + j] = s;
            }
        for (std::size_t i = 0; i < n; ++i) tmp[i * n + i] += c[n - k + 1];
        nk.swap(tmp);
        BigInt trace = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) trace += a[i * n + l] * nk[l * n + i];
        if (trace % BigInt(k) != 0) fail(ErrorCode::internal, "inexact division in characteristic polynomial");
        c[n - k] = -trace / BigInt(k);
    }
    return IntPolynomial{c};
}

BigInt determinant(const IntMatrix& m) {
    // Fraction-free Bareiss elimination.
    const std::size_t n = m.size();
    if (n == 0) return 1;
    std::vector<BigInt> a(n * n);
    for (std::size_t i = 0; i < n * n; ++i) a[i] = m.entries()[i];
    BigInt prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k * n + k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r * n + k] == 0) ++r;
            if (r == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[r * n + j]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
        prev = a[k * n + k];
    }
    return sign * a[(n - 1) * n + (n - 1)];
}

// ------------------------------------------------------------ Sturm chains

namespace {

using RatPoly = std::vector<BigRational>;  // index = power

void trim(RatPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

RatPoly remainder(RatPoly num, const RatPoly& den) {
    while (num.size() >= den.size() && !num.empty()) {
        BigRational factor = num.back() / den.back();
        std::size_t shift = num.size() - den.size();
        for (std::size_t i = 0; i < den.size(); ++i) num[i + shift] -= factor * den[i];
        num.pop_back();
        trim(num);
    }
    return num;
}

std::vector<RatPoly> sturm_chain(const IntPolynomial& p) {
    RatPoly p0(p.coefficients.begin(), p.coefficients.end());
    trim(p0);
    std::vector<RatPoly> chain{p0};
    if (p0.size() <= 1) return chain;
    RatPoly p1(p0.size() - 1);
    for (std::size_t k = 1; k < p0.size(); ++k) p1[k - 1] = p0[k] * BigRational(static_cast<long>(k));
    chain.push_back(p1);
    while (chain.back().size() > 1) {
        RatPoly r = remainder(chain[chain.size() - 2], chain.back());
        if (r.empty()) break;
        for (auto& c : r) c = -c;
        chain.push_back(r);
    }
    return chain;
}

int sign_of(const BigRational& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

BigRational eval(const RatPoly& p, const BigRational& x) {
    BigRational acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

int variations(const std::vector<int>& signs) {
    int count = 0, last = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

int variations_at(const std::vector<RatPoly>& chain, const BigRational& x) {
    std::vector<int> s;
    for (const auto& p : chain) s.push_back(sign_of(eval(p, x)));
    return variations(s);
}

int variations_at_infinity(const std::vector<RatPoly>& chain, bool positive) {
    std::vector<int> s;
    for (const auto& p : chain) {
        int lead = sign_of(p.back());
        bool odd = (p.size() - 1) % 2 == 1;
        s.push_back(!positive && odd ? -lead : lead);
    }
    return variations(s);
}

}  // namespace

int sturm_root_count(const IntPolynomial& p, const BigRational& a, const BigRational& b) {
    auto chain = sturm_chain(p);
    return variations_at(chain, a) - variations_at(chain, b);
}

double largest_real_root(const IntPolynomial& p, double tol) {
    auto chain = sturm_chain(p);
    if (chain.front().size() <= 1) fail(ErrorCode::precondition, "constant polynomial has no roots");
    const int at_pos_inf = variations_at_infinity(chain, true);
    if (variations_at_infinity(chain, false) - at_pos_inf <= 0)
        fail(ErrorCode::precondition, "polynomial has no real root");

    BigInt bound = 0;
    for (const auto& c : p.coefficients) bound = std::max(bound, BigInt(abs(c)));
    BigRational lead = abs(chain.front().back());
    BigRational hi = BigRational(bound) / lead + 1;
    BigRational lo = -hi;

    // Invariant: some root lies in [lo, hi), none in [hi, inf).
    auto root_at_or_above = [&](const BigRational& x) {
        return eval(chain.front(), x) == 0 || variations_at(chain, x) - at_pos_inf > 0;
    };
    for (int it = 0; it < 400; ++it) {
        BigRational mid = (lo + hi) / 2;
        if (root_at_or_above(mid)) lo = mid;
        else hi = mid;
        double width = (hi - lo).convert_to<double>();
        double scale = std::max(1.0, std::abs(lo.convert_to<double>()));
        if (width <= tol * scale) break;
    }
    return ((lo + hi) / 2).convert_to<double>();
}

double spectral_radius(const IntMatrix& m, double tol) {
    if (m.empty()) fail(ErrorCode::invalid_input, "matrix has dimension 0");
    return largest_real_root(char_poly(m), tol);
}

bool largest_root_is_integer(const IntPolynomial& p, BigInt& root) {
    double r = largest_real_root(p);
    BigInt candidate(static_cast<long long>(std::llround(r)));
    if (p.evaluate(BigRational(candidate)) != 0) return false;
    auto chain = sturm_chain(p);
    if (variations_at(chain, BigRational(candidate)) - variations_at_infinity(chain, true) != 0) return false;
    root = candidate;
    return true;
}

// ---------------------------------------------------------- Perron vectors

PerronData perron_eigendata(const IntMatrix& m, double tol) {
    if (!(tol > 0)) fail(ErrorCode::invalid_input, "tolerance must be positive");
    if (!is_irreducible(m)) fail(ErrorCode::precondition, "Perron eigendata requires an irreducible matrix");
    const std::size_t n = m.size();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n * n; ++i) a[i] = static_cast<double>(m.entries()[i]);

    auto apply = [&](const std::vector<double>& v, bool transposed) {
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[i] += (transposed ? a[j * n + i] : a[i * n + j]) * v[j];
        return out;
    };
    auto normalize_max = [](std::vector<double>& v) {
        double mx = *std::max_element(v.begin(), v.end());
        for (auto& x : v) x /= mx;
    };

    // Iterate on M + I so imprimitive spectra do not oscillate.
    std::vector<double> x(n, 1.0), y(n, 1.0);
    PerronData best;
    best.residual = std::numeric_limits<double>::infinity();
    const int budget = 2'000'000;
    const double target = tol * 1e-3;
    int last_improvement = 0;
    double mark = std::numeric_limits<double>::infinity();
    int it = 0;
    for (it = 1; it <= budget; ++it) {
        auto mx = apply(x, false), my = apply(y, true);
        for (std::size_t i = 0; i < n; ++i) {
            mx[i] += x[i];
            my[i] += y[i];
        }
        x = std::move(mx);
        y = std::move(my);
        normalize_max(x);
        normalize_max(y);
        if (it % 8 != 0 && it > 64) continue;

        std::vector<double> eta = x, omega = y;
        for (auto& v : eta) v /= x[n - 1];
        for (auto& v : omega) v /= y[n - 1];
        auto me = apply(eta, false), wm = apply(omega, true);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < n; ++i) {
            num += omega[i] * me[i];
            den += omega[i] * eta[i];
        }
        double lambda = num / den;
        double res = 0;
        for (std::size_t i = 0; i < n; ++i) {
            res = std::max(res, std::abs(me[i] - lambda * eta[i]));
            res = std::max(res, std::abs(wm[i] - lambda * omega[i]));
        }
        if (res < mark * 0.5) {
            mark = res;
            last_improvement = it;
        }
        if (res < best.residual) {
            best.lambda = lambda;
            best.eta = eta;
            best.omega = omega;
            best.residual = res;
        }
        if (best.residual <= target) break;
        if (best.residual <= tol && it - last_improvement > 4096) break;
    }
    best.iterations = std::min(it, budget);
    if (!(best.residual <= tol)) {
        std::ostringstream os;
        os << "power iteration did not converge; last residual " << best.residual;
        fail(ErrorCode::convergence, os.str());
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!(best.eta[i] > 0) || !(best.omega[i] > 0))
            fail(ErrorCode::internal, "Perron vector has a non-positive entry");

    double root = largest_real_root(char_poly(m));
    best.root_gap = std::abs(root - best.lambda);
    if (best.root_gap > std::max(tol, 1e-12)) {
        std::ostringstream os;
        os << "eigenvalue " << best.lambda << " disagrees with polynomial root " << root;
        fail(ErrorCode::convergence, os.str());
    }
    return best;
}

// -------------------------------------------------------------- block lift

IntMatrix block_lift(const IntMatrix& m, std::size_t k) {
    if (k == 0) fail(ErrorCode::invalid_input, "lift order must be at least 1");
    const std::size_t n = m.size();
    IntMatrix out(n * k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.set(i, (k - 1) * n + j, m(i, j));
    for (std::size_t b = 1; b < k; ++b)
        for (std::size_t i = 0; i < n; ++i) out.set(b * n + i, (b - 1) * n + i, 1);
    return out;
}

bool block_unlift(const IntMatrix& lifted, std::size_t k, IntMatrix& base) {
    if (k == 0 || lifted.size() % k != 0) return false;
    const std::size_t n = lifted.size() / k;
    IntMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m.set(i, j, lifted(i, (k - 1) * n + j));
    if (!(block_lift(m, k) == lifted)) return false;
    base = m;
    return true;
}

// -------------------------------------------------------------------- I/O

IntMatrix parse_matrix(std::string_view text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) fail(ErrorCode::parse, "empty matrix input");
    std::vector<std::vector<std::int64_t>> rows;
    if (text[first] == '[') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::parse, std::string("matrix JSON: ") + e.what());
        }
        if (!j.is_array()) fail(ErrorCode::parse, "matrix JSON must be an array of arrays");
        for (const auto& row : j) {
            if (!row.is_array()) fail(ErrorCode::parse, "matrix JSON must be an array of arrays");
            std::vector<std::int64_t> r;
            for (const auto& v : row) {
                if (!v.is_number_integer()) fail(ErrorCode::parse, "matrix entries must be integers");
                r.push_back(v.get<std::int64_t>());
            }
            rows.push_back(std::move(r));
        }
    } else {
        std::istringstream in{std::string(text)};
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::vector<std::int64_t> r;
            std::string tok;
            while (ls >> tok) {
                std::size_t used = 0;
                long long v = 0;
                try {
                    v = std::stoll(tok, &used);
                } catch (const std::exception&) {
                    fail(ErrorCode::parse, "not an integer: " + tok);
                }
                if (used != tok.size()) fail(ErrorCode::parse, "not an integer: " + tok);
                r.push_back(v);
            }
            if (!r.empty()) rows.push_back(std::move(r));
        }
    }
    if (rows.empty()) fail(ErrorCode::parse, "empty matrix input");
    for (const auto& r : rows) {
        if (r.size() != rows.size()) fail(ErrorCode::parse, "matrix must be square");
        for (auto v : r)
            if (v < 0) fail(ErrorCode::invalid_input, "matrix entries must be non-negative");
    }
    return IntMatrix::from_rows(rows);
}

std::string format_matrix(const IntMatrix& m) {
    std::ostringstream os;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) os << (j ? " " : "") << m(i, j);
        os << "\n";
    }
    return os.str();
}

std::string format_decimal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

}  // namespace endstretch
