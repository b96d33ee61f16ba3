#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "endstretch/error.hpp"

namespace endstretch {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Square matrix of non-negative integers, row-major.
class IntMatrix {
public:
    IntMatrix() = default;
    explicit IntMatrix(std::size_t n);
    IntMatrix(std::size_t n, std::vector<std::int64_t> entries);

    static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);
    static IntMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    bool empty() const noexcept { return n_ == 0; }
    std::int64_t operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, std::int64_t v);
    const std::vector<std::int64_t>& entries() const noexcept { return a_; }
    std::vector<std::vector<std::int64_t>> rows() const;

    IntMatrix transpose() const;
    std::int64_t row_sum(std::size_t i) const;
    std::int64_t column_sum(std::size_t j) const;
    std::int64_t total() const;

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::int64_t> a_;
};

// Edge multiset of a matrix: multiplicity(j -> i) = m_ij.
struct Digraph {
    std::size_t vertex_count = 0;
    std::vector<std::vector<std::int64_t>> multiplicity;  // [from][to]

    static Digraph of(const IntMatrix& m);
    std::vector<std::size_t> successors(std::size_t v) const;
    std::int64_t edges(std::size_t from, std::size_t to) const { return multiplicity[from][to]; }
};

// Integer polynomial, coefficients[k] multiplies x^k.
struct IntPolynomial {
    std::vector<BigInt> coefficients;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    bool monic() const { return !coefficients.empty() && coefficients.back() == 1; }
    BigRational evaluate(const BigRational& x) const;
    double evaluate(double x) const;
    std::string to_string() const;
    friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;
};

struct PerronData {
    double lambda = 0.0;
    std::vector<double> eta;
    std::vector<double> omega;
    double residual = 0.0;
    double root_gap = 0.0;  // |lambda - exact polynomial root|
    int iterations = 0;
};

constexpr double default_tolerance = 1e-10;
constexpr double coordinate_tolerance = 1e-7;

bool is_irreducible(const IntMatrix& m);
bool is_primitive(const IntMatrix& m);
// Smallest k with every entry of column `col` of M^k positive; 0 if none up to the Wielandt bound.
std::size_t positive_column_power(const IntMatrix& m, std::size_t col);

IntPolynomial char_poly(const IntMatrix& m);
BigInt determinant(const IntMatrix& m);

// Largest real root by Sturm-sequence bisection on exact rationals.
// Throws precondition if the polynomial has no real root.
double largest_real_root(const IntPolynomial& p, double tol = 1e-15);
// Count of distinct real roots in (a, b].
int sturm_root_count(const IntPolynomial& p, const BigRational& a, const BigRational& b);
// Spectral radius of an arbitrary non-negative matrix (largest real root of char_poly).
double spectral_radius(const IntMatrix& m, double tol = 1e-15);
// Exact integer root check: returns true and sets root when p has a positive integer root r
// that is the largest real root.
bool largest_root_is_integer(const IntPolynomial& p, BigInt& root);

PerronData perron_eigendata(const IntMatrix& m, double tol = default_tolerance);

IntMatrix block_lift(const IntMatrix& m, std::size_t k);
// Recovers (M0, k) from a block lift; returns false if the matrix is not of that shape.
bool block_unlift(const IntMatrix& lifted, std::size_t k, IntMatrix& base);

IntMatrix parse_matrix(std::string_view text);
std::string format_matrix(const IntMatrix& m);
std::string format_decimal(double v);  // 15 significant digits

}  // namespace endstretch
