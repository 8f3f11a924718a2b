#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "qpb/matrix.hpp"
#include "qpb/report.hpp"

namespace qpb::ba {

// Finite-dimensional C*-algebra presented as a direct sum of full matrix
// blocks.  Functions on an N-point set are N blocks of size 1.  The
// distinguished basis consists of the matrix units of every block, enumerated
// block by block in row-major order; elements are coordinate columns in that
// basis.
class BaseAlgebra {
 public:
  explicit BaseAlgebra(std::vector<int> blocks);

  const std::vector<int>& blocks() const { return blocks_; }
  int dim() const { return dim_; }
  bool commutative() const { return commutative_; }

  int unit_index(int block, int row, int col) const;

  MatC one() const { return one_; }
  MatC mul(const MatC& a, const MatC& b) const;
  MatC star(const MatC& a) const;
  // The star permutes the matrix-unit basis; index of e_i*.
  int star_index(int i) const { return star_index_[size_t(i)]; }

  // Multiplication operators of the i-th basis element on the algebra's own
  // coordinates, a -> e_i a and a -> a e_i.
  const MatC& left_mul(int i) const { return left_mul_[size_t(i)]; }
  const MatC& right_mul(int i) const { return right_mul_[size_t(i)]; }

 private:
  std::vector<int> blocks_;
  int dim_ = 0;
  bool commutative_ = true;
  MatC one_;
  std::vector<int> star_index_;
  std::vector<MatC> left_mul_, right_mul_;
};

using Base = std::shared_ptr<const BaseAlgebra>;
Base make_base(std::vector<int> blocks);

// Bimodule over the base on a distinguished basis: one carrier matrix per
// algebra basis element and side.  The left family is a unital algebra
// representation, the right family a unital antirepresentation, and the two
// commute; check_bimodule verifies all of that.
struct Bimodule {
  Base base;
  int dim = 0;
  std::vector<MatC> left;
  std::vector<MatC> right;

  MatC left_act(const MatC& coeffs) const;
  MatC right_act(const MatC& coeffs) const;
};

Report check_bimodule(const Bimodule&, const Tol& tol = {});

// The algebra over itself.
Bimodule regular_bimodule(const Base&);
// rank copies of the free bimodule V (x) V, a (x (x) y) b = ax (x) yb.
Bimodule free_bimodule(const Base&, int rank);
// One-dimensional bimodule over a commutative base: left action by the
// character at point p, right action by the character at point q.
Bimodule char_bimodule(const Base&, int p, int q);
// Rank-one module over functions on N points in a fixed frame: left action
// pointwise, right action twisted by a point permutation, x * f = t(f) x with
// t(f)_i = f_{perm[i]}.
Bimodule line_bimodule(const Base&, const std::vector<int>& perm);
Bimodule direct_sum(const Bimodule&, const Bimodule&);

// Parity 0 is a bimodule homomorphism x -> mat x; parity 1 is an antilinear
// map x -> mat conj(x) exchanging the sides through the star,
// f(a x b) = b* f(x) a*.
struct BimoduleMap {
  Bimodule src, tgt;
  MatC mat;
  int parity = 0;
};

Report check_map(const BimoduleMap&, const Tol& tol = {});
BimoduleMap identity_map(const Bimodule&);
BimoduleMap compose(const BimoduleMap& f, const BimoduleMap& g);  // f after g
BimoduleMap scale(const Complex&, const BimoduleMap&);
BimoduleMap add(const BimoduleMap&, const BimoduleMap&);
BimoduleMap inverse_map(const BimoduleMap&, const Tol& tol = {});
// Largest entry of f.mat - g.mat (shapes and parities must agree).
double map_residual(const BimoduleMap& f, const BimoduleMap& g);

// Tensor product over the base: the plain tensor carrier modulo the
// middle-interchange subspace span{ xa (x) y - x (x) ay }.  Quotient
// coordinates are an orthonormal basis of the orthogonal complement of that
// subspace; factor is the canonical surjection from the plain tensor bimodule
// and section a right inverse picking orthogonal representatives.
struct TensorProduct {
  Bimodule lhs, rhs;
  Bimodule plain;
  Bimodule space;
  BimoduleMap factor;
  MatC section;
};

TensorProduct tensor_over_m(const Bimodule& e, const Bimodule& f,
                            const Tol& tol = {});

// Induced map between tensor products.  Parity 0 sends x (x) y to
// s(x) (x) t(y) and dst must be the product of the targets in order; parity 1
// sends x (x) y to t(y) (x) s(x) and dst must be the product of the targets
// in reversed order.  Mixed parities are rejected.
BimoduleMap tensor_map(const BimoduleMap& s, const BimoduleMap& t,
                       const TensorProduct& src, const TensorProduct& dst);

BimoduleMap left_unitor(const TensorProduct& ve);   // V (x)_M E -> E
BimoduleMap right_unitor(const TensorProduct& ev);  // E (x)_M V -> E
// (E (x) F) (x) G -> E (x) (F (x) G) from the four pairwise products.
BimoduleMap associator(const TensorProduct& ef, const TensorProduct& ef_g,
                       const TensorProduct& fg, const TensorProduct& e_fg);

// Orthonormal basis of the space of parity-p maps e -> f.
std::vector<BimoduleMap> hom_space(const Bimodule& e, const Bimodule& f,
                                   int parity, const Tol& tol = {});
// Invertible parity-0 map e -> f if one exists in the hom space (seeded
// random combination, retried).
std::optional<BimoduleMap> find_isomorphism(const Bimodule& e,
                                            const Bimodule& f,
                                            unsigned seed = 1,
                                            const Tol& tol = {});

// Conjugate bimodule: same carrier with conjugated scalars, sides exchanged
// through the star.  bar is the canonical antilinear map, the identity matrix
// at parity 1; applying the construction twice returns the original actions
// exactly.
struct ConjugateBimodule {
  Bimodule space;
  BimoduleMap bar;
};

ConjugateBimodule conjugate_bimodule(const Bimodule& e);

// Constructive witness that e is a direct summand of a free bimodule:
// project o embed = identity on e.
struct ProjectivityCertificate {
  int rank = 0;
  BimoduleMap embed;
  BimoduleMap project;
  Report report;
};

ProjectivityCertificate projectivity_certificate(const Bimodule& e,
                                                 unsigned seed = 1,
                                                 const Tol& tol = {});

}  // namespace qpb::ba
