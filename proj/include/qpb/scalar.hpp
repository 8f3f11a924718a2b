#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace qpb {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Tolerances shared by every floating-point comparison in the library.
// abs_tol/rel_tol gate equality checks, rank_tol gates pivot acceptance.
struct Tol {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double rank_tol = 1e-8;

  bool close(double a, double b) const {
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= abs_tol + rel_tol * scale;
  }
  bool close(const Complex& a, const Complex& b) const {
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= abs_tol + rel_tol * scale;
  }
};

double to_double(const Rational& r);
Rational rational_from_string(const std::string& s);
std::string to_string(const Rational& r);

// Gaussian rational: complex number with exact rational real/imaginary parts.
// Used by the symbolic diagram category; never mixed with Complex in one matrix.
struct GaussRat {
  Rational re, im;

  GaussRat() = default;
  GaussRat(int n) : re(n), im(0) {}
  GaussRat(Rational r) : re(std::move(r)), im(0) {}
  GaussRat(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  GaussRat conj() const { return {re, -im}; }
  Complex to_complex() const { return {to_double(re), to_double(im)}; }

  friend GaussRat operator+(const GaussRat& a, const GaussRat& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussRat operator-(const GaussRat& a, const GaussRat& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussRat operator-(const GaussRat& a) { return {-a.re, -a.im}; }
  friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussRat operator/(const GaussRat& a, const GaussRat& b) {
    Rational d = b.re * b.re + b.im * b.im;
    if (d == 0) throw Error("GaussRat: division by zero");
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  GaussRat& operator+=(const GaussRat& o) { return *this = *this + o; }
  GaussRat& operator-=(const GaussRat& o) { return *this = *this - o; }
  GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }
  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

  std::string str() const;
};

// Scalar traits used by the matrix template.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Complex> {
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  static Complex conj(const Complex& z) { return std::conj(z); }
  static double abs(const Complex& z) { return std::abs(z); }
  static bool is_zero(const Complex& z) { return z == Complex{0.0, 0.0}; }
  static constexpr bool exact = false;
};

template <>
struct ScalarTraits<GaussRat> {
  static GaussRat zero() { return GaussRat{}; }
  static GaussRat one() { return GaussRat{1}; }
  static GaussRat conj(const GaussRat& z) { return z.conj(); }
  static double abs(const GaussRat& z) { return std::abs(z.to_complex()); }
  static bool is_zero(const GaussRat& z) { return z.is_zero(); }
  static constexpr bool exact = true;
};

std::string format_complex(const Complex& z);

// Parses "a", "a+bi", "a-bi", "bi", "p/q" style literals (rational or decimal parts).
Complex parse_complex(const std::string& s);
GaussRat parse_gauss_rat(const std::string& s);

}  // namespace qpb
