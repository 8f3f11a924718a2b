#pragma once

#include <map>
#include <string>
#include <vector>

#include "qpb/matrix.hpp"
#include "qpb/report.hpp"

namespace qpb::tl {

// The free monoidal category on a conjugate pair of objects. Morphisms are
// linear combinations of planar pairings whose strands carry integer powers
// of the conjugation-squared box.

enum class Letter : unsigned char { U, Ubar };

using Word = std::vector<Letter>;

Word conj(const Word& w);  // reverse order, flip letters
std::string to_string(const Word& w);
Word word_from_string(const std::string& s);  // "u ubar u", commas allowed

// Endpoints are numbered source left-to-right (0..nb-1), then target
// left-to-right (nb..nb+nt-1). partner[e] is the paired endpoint. Strand data
// (the winding) is stored at the smaller endpoint of each pair.
//
// Winding semantics on a carrier with conjugation matrix C:
//   through strand on u:    C^k          (source to target)
//   through strand on ubar: (C^T)^{-k}
//   cap (two source points): x (x) f -> f(C^k x), x on the u end
//   cup (two target points): sum_{ab} (C^k)_{ab} e_a (x) f_b, a on the u end
struct Diagram {
  Word src, tgt;
  std::vector<int> partner;
  std::vector<int> winding;

  static Diagram identity(const Word& w);
  void validate() const;  // letter compatibility and planarity

  int points() const { return int(src.size() + tgt.size()); }
  bool is_source_point(int e) const { return e < int(src.size()); }
  Letter letter_at(int e) const {
    return is_source_point(e) ? src[e] : tgt[e - src.size()];
  }
  // Strands are oriented along the u-flow: a source u or target ubar endpoint
  // is the tail, the other endpoint is the head.
  bool is_tail(int e) const {
    return is_source_point(e) ? letter_at(e) == Letter::U : letter_at(e) == Letter::Ubar;
  }
  int stored_winding(int e) const { return winding[std::min(e, partner[e])]; }
  // Power of C picked up when the strand is traversed tail to head.
  int oriented_power(int e) const;

  auto operator<=>(const Diagram&) const = default;
};

// The four elementary morphisms.
Diagram coev();           // 0 -> u ubar,   sum e_i (x) f_i
Diagram coev_twisted();   // 0 -> ubar u,   sum (C^-1)_{ji} f_i (x) e_j
Diagram ev();             // ubar u -> 0,   f (x) x -> f(x)
Diagram ev_twisted();     // u ubar -> 0,   x (x) f -> f(Cx)
Diagram power_box(Letter l, int k);  // single through strand with winding k

class DiagramSum {
 public:
  DiagramSum(Word src, Word tgt) : src_(std::move(src)), tgt_(std::move(tgt)) {}
  DiagramSum(const Diagram& d, GaussRat coeff = GaussRat(1));

  const Word& src() const { return src_; }
  const Word& tgt() const { return tgt_; }
  const std::map<Diagram, GaussRat>& terms() const { return terms_; }

  void add_term(const Diagram& d, const GaussRat& coeff);
  DiagramSum& operator+=(const DiagramSum& o);
  DiagramSum operator*(const GaussRat& s) const;
  bool operator==(const DiagramSum& o) const;

 private:
  Word src_, tgt_;
  std::map<Diagram, GaussRat> terms_;
};

// compose(f, g) applies g first. Closed loops must have net power +1 or -1
// and contribute a factor n_u; anything else is outside the category and
// raises an error.
DiagramSum compose(const DiagramSum& f, const DiagramSum& g, const Rational& n_u);
DiagramSum tensor(const DiagramSum& f, const DiagramSum& g);

// Adjoint: vertical reflection, conjugated coefficients, windings
// through k -> k, cap k -> cup k-1, cup k -> cap k+1.
DiagramSum star(const DiagramSum& f);

// Conjugate morphism conj(f): conj(src) -> conj(tgt), obtained by conjugating
// with the canonical antilinear maps. Horizontal reflection, conjugated
// coefficients, windings through k -> -k, cap k -> k-1, cup k -> k+1.
DiagramSum conj_diagram(const DiagramSum& f);

// Number of letter-compatible planar pairings between the two words.
long hom_dim(const Word& w1, const Word& w2);
std::vector<Diagram> enumerate_pairings(const Word& w1, const Word& w2);

// Evaluation onto matrices: the carrier of u and ubar is the column space of
// C, which must be invertible. Exact arithmetic throughout.
MatQ evaluate(const Diagram& d, const MatQ& c);
MatQ evaluate(const DiagramSum& f, const MatQ& c);

// Conjugation matrix of the 2-dimensional carrier at deformation parameter q.
MatQ fundamental_cmat(const Rational& q);

// Matrix of the canonical antilinear map j_w : H_w -> H_{conj(w)}, as the
// linear part (j_w x = J conj(x)): reversal permutation times a C box on
// every ubar slot.
MatQ jay_matrix(const Word& w, const MatQ& c);

// Verifies the snake, trace and hermicity relations symbolically (exact,
// with n_u = q + 1/q) and under evaluation at C = fundamental_cmat(q),
// plus functoriality of evaluation.
Report relation_suite(const Rational& q);

}  // namespace qpb::tl
