#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qpb/matrix.hpp"
#include "qpb/rng.hpp"

using namespace qpb;

static const Tol tol;

TEST_CASE("gaussian rational arithmetic") {
  GaussRat a(Rational(1), Rational(2));  // 1+2i
  GaussRat b(Rational(3), Rational(-1));
  GaussRat p = a * b;
  CHECK(p.re == 5);
  CHECK(p.im == 5);
  GaussRat q = p / b;
  CHECK(q.re == a.re);
  CHECK(q.im == a.im);
  CHECK((a * a.conj()).re == 5);
  CHECK((a * a.conj()).im == 0);
  CHECK_THROWS_AS(a / GaussRat(0), Error);
}

TEST_CASE("scalar parsing and printing") {
  CHECK(rational_from_string("3/4") == Rational(3) / 4);
  CHECK(rational_from_string("-0.25") == Rational(-1) / 4);
  CHECK(to_string(Rational(-7) / 3) == "-7/3");
  CHECK(parse_complex("2.5e-3+i") == Complex(0.0025, 1));
  CHECK(parse_complex("-i") == Complex(0, -1));
  CHECK(parse_complex("1/2-3/4i") == Complex(0.5, -0.75));
  GaussRat g = parse_gauss_rat("1/2-3/4i");
  CHECK(g.re == Rational(1) / 2);
  CHECK(g.im == Rational(-3) / 4);
  CHECK(format_complex(Complex(0.5, -0.75)) == "0.5-0.75i");
  CHECK(format_complex(Complex(3, 0)) == "3");
  CHECK(parse_complex(format_complex(Complex(1.25, -2))) == Complex(1.25, -2));
  CHECK(parse_gauss_rat(GaussRat(Rational(-2), Rational(1) / 3).str()).im == Rational(1) / 3);
  CHECK_THROWS_AS(parse_complex("fish"), Error);
}

TEST_CASE("kron satisfies the mixed product rule") {
  Rng rng(11);
  MatC a = rng.matrix(2, 3), b = rng.matrix(3, 2), c = rng.matrix(3, 2), d = rng.matrix(2, 4);
  CHECK(residual(kron(a, c) * kron(b, d), kron(a * b, c * d)) < 1e-12);
  MatC s = rng.matrix(2, 2), t = rng.matrix(3, 3);
  CHECK(std::abs(kron(s, t).trace() - s.trace() * t.trace()) < 1e-12);
}

TEST_CASE("direct sum is block diagonal") {
  MatC a{{Complex(1), Complex(2)}, {Complex(3), Complex(4)}};
  MatC b{{Complex(0, 1)}};
  MatC s = direct_sum(a, b);
  CHECK(s.rows() == 3);
  CHECK(s.trace() == Complex(5, 1));
  CHECK(s.at(0, 2) == Complex(0));
  CHECK(s.at(2, 2) == Complex(0, 1));
}

TEST_CASE("tensor flip swaps factors") {
  MatC x(2, 1), y(3, 1);
  x.at(0, 0) = 1;
  x.at(1, 0) = 2;
  y.at(0, 0) = 5;
  y.at(1, 0) = 7;
  y.at(2, 0) = 11;
  MatC flipped = tensor_flip<Complex>(2, 3) * kron(x, y);
  CHECK(residual(flipped, kron(y, x)) == 0);
  MatC p = tensor_flip<Complex>(2, 3);
  CHECK(residual(tensor_flip<Complex>(3, 2) * p, MatC::identity(6)) == 0);
}

TEST_CASE("float nullspace of a rank one matrix") {
  MatC m{{Complex(1), Complex(1)}, {Complex(1), Complex(1)}};
  MatC k = nullspace(m, tol);
  REQUIRE(k.cols() == 1);
  // Hand elimination: kernel is spanned by (1,-1)/sqrt(2).
  CHECK(std::abs(std::abs(k.at(0, 0)) - 1 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(k.at(0, 0) + k.at(1, 0)) < 1e-12);
  CHECK((m * k).max_abs() < 1e-12);
}

TEST_CASE("float nullspace is orthonormal and annihilated") {
  Rng rng(5);
  MatC a = rng.matrix(3, 6);
  MatC m = a;  // rank 3, kernel dimension 3
  MatC k = nullspace(m, tol);
  REQUIRE(k.cols() == 3);
  CHECK(residual(k.adjoint() * k, MatC::identity(3)) < 1e-10);
  CHECK((m * k).max_abs() < 1e-9 * m.max_abs());
  MatC full = nullspace(MatC::zero(2, 4), tol);
  CHECK(full.cols() == 4);
  MatC none = nullspace(MatC::identity(3), tol);
  CHECK(none.cols() == 0);
}

TEST_CASE("exact nullspace in echelon normal form") {
  MatQ m(2, 3);
  m.at(0, 0) = GaussRat(1);
  m.at(0, 1) = GaussRat(2);
  m.at(0, 2) = GaussRat(3);
  m.at(1, 0) = GaussRat(2);
  m.at(1, 1) = GaussRat(4);
  m.at(1, 2) = GaussRat(6);
  MatQ k = nullspace(m);
  REQUIRE(k.cols() == 2);
  CHECK(k.at(0, 0).re == -2);
  CHECK(k.at(1, 0).re == 1);
  CHECK(k.at(0, 1).re == -3);
  CHECK(k.at(2, 1).re == 1);
  CHECK((m * k).max_abs() == 0);
}

TEST_CASE("inverse and least squares") {
  MatC u{{Complex(1), Complex(1)}, {Complex(0), Complex(1)}};
  MatC ui = inverse(u, tol);
  CHECK(residual(ui, MatC{{Complex(1), Complex(-1)}, {Complex(0), Complex(1)}}) < 1e-14);
  Rng rng(7);
  MatC a = rng.matrix(4, 4);
  CHECK(residual(a * inverse(a, tol), MatC::identity(4)) < 1e-10);
  CHECK_THROWS_AS(inverse(MatC{{Complex(1), Complex(1)}, {Complex(1), Complex(1)}}, tol), Error);

  MatQ v(2, 2);
  v.at(0, 0) = GaussRat(Rational(1), Rational(1));
  v.at(0, 1) = GaussRat(2);
  v.at(1, 0) = GaussRat(0);
  v.at(1, 1) = GaussRat(Rational(1) / 3);
  CHECK((v * inverse(v) - MatQ::identity(2)).max_abs() == 0);

  MatC c = rng.matrix(5, 2), x0 = rng.matrix(2, 1);
  CHECK(residual(lstsq(c, c * x0, tol), x0) < 1e-9);
}

TEST_CASE("positive definiteness via cholesky") {
  MatC good{{Complex(2), Complex(1)}, {Complex(1), Complex(2)}};
  CHECK(is_positive_definite(good, tol));
  MatC indef{{Complex(1), Complex(2)}, {Complex(2), Complex(1)}};
  CHECK(!is_positive_definite(indef, tol));
  MatC nonherm{{Complex(1), Complex(0, 1)}, {Complex(0, 1), Complex(1)}};
  CHECK(!is_positive_definite(nonherm, tol));
  Rng rng(3);
  MatC a = rng.matrix(4, 4);
  MatC gram = a.adjoint() * a + MatC::identity(4);
  CHECK(is_positive_definite(gram, tol));
}

TEST_CASE("orthonormalize rejects dependent columns") {
  MatC m(3, 2);
  m.at(0, 0) = 1;
  m.at(1, 0) = 1;
  m.at(0, 1) = 2;
  m.at(1, 1) = 2;
  CHECK_THROWS_AS(orthonormalize(m, tol), Error);
}
