#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qpb/matrix.hpp"
#include "qpb/report.hpp"

namespace qpb::cqg {

using Label = std::string;

// Fusion-theoretic description of a compact matrix quantum group: irreducible
// labels, dimensions, the conjugate label, the positive matrix governing the
// squared antipode on each irrep, and orthonormal fusion isometries.
//
// Implementations memoize computed data behind an internal lock; all methods
// are safe to call concurrently after construction.
struct IrrepTable {
  virtual ~IrrepTable() = default;
  virtual std::string name() const = 0;
  virtual Label trivial() const = 0;
  virtual int dim(const Label&) const = 0;
  virtual Label conj(const Label&) const = 0;
  virtual MatC cmat(const Label&) const = 0;
  // Orthonormal isometries H_c -> H_a (x) H_b, one per irreducible summand,
  // in a fixed deterministic order.
  virtual std::vector<std::pair<Label, MatC>> fuse(const Label&,
                                                   const Label&) const = 0;
  // All labels reachable without exceeding the configured cutoff.
  virtual std::vector<Label> labels() const = 0;
};

std::shared_ptr<IrrepTable> make_u1_table(int max_charge = 24);
std::shared_ptr<IrrepTable> make_su2_table(int max_twoj = 12);
// q is a rational in (0, 1]; at q = 1 the table is the classical one with a
// different fusion gauge.
std::shared_ptr<IrrepTable> make_suq2_table(const Rational& q,
                                            int max_twoj = 12);
// Selectors: "u1", "su2", "suq2:q=<rational>".
std::shared_ptr<IrrepTable> table_from_selector(const std::string& selector,
                                                int max_level = 12);

// Corepresentation expression: a tree of irrep leaves combined by direct sum
// and tensor product, with conjugation pushed down to the leaves.  A BarLeaf
// carries the number of times conjugation has been applied.
struct CorepNode;
using Corep = std::shared_ptr<const CorepNode>;

struct CorepNode {
  enum class Kind { Leaf, Bar, Sum, Prod };
  Kind kind;
  Label label;        // Leaf, Bar
  int bar_power = 0;  // Bar only, >= 1
  Corep left, right;  // Sum, Prod
};

Corep leaf(const Label&);
Corep sum(const Corep&, const Corep&);
Corep prod(const Corep&, const Corep&);
Corep conj(const Corep&);
// Left-nested product of a list (empty list not allowed).
Corep word(const std::vector<Corep>&);

// Canonical serialization; equal keys mean equal corepresentations.
std::string corep_key(const Corep&);
std::string to_string(const Corep&);

// A morphism element between corepresentation carriers.  Parity 0 is a linear
// map x -> mat * x; parity 1 is conjugate-linear, x -> mat * conj(x).
struct MorElement {
  Corep src, tgt;
  MatC mat;
  int parity = 0;
};

// Category layer over a fixed table: carrier data, decompositions into
// irreducibles, morphism spaces, and the conjugation machinery.
class Model {
 public:
  explicit Model(std::shared_ptr<IrrepTable> table, Tol tol = {});

  const IrrepTable& table() const { return *table_; }
  const Tol& tol() const { return tol_; }

  Corep trivial() const { return leaf(table_->trivial()); }
  int dim(const Corep&) const;

  // Gram matrix of the carrier basis (identity on irrep leaves).
  MatC gram(const Corep&) const;
  // Positive intertwiner u -> u implementing the squared antipode; tensor
  // multiplicative, trace equal to the trace of its inverse.
  MatC canonical_c(const Corep&) const;
  // Matrix part of the canonical conjugation x -> jl * conj(x), a parity-1
  // isomorphism u -> conj(u).
  MatC jl(const Corep&) const;
  // Pairing permutation: the dual pairing of conj(u) against u reads
  // f (x) x -> f^T * pairing(u) * x.
  MatC pairing(const Corep&) const;

  // G-orthonormal complete family of embeddings H_label -> H_u.
  const std::vector<std::pair<Label, MatC>>& dec(const Corep&) const;

  MorElement identity(const Corep&) const;
  MorElement jmor(const Corep& u) const;  // parity 1, u -> conj(u)

  // Elementary intertwiners of the rigid structure.
  MorElement coev(const Corep& u) const;          // triv -> u (x) conj(u)
  MorElement coev_twisted(const Corep& u) const;  // triv -> conj(u) (x) u
  MorElement ev(const Corep& u) const;            // conj(u) (x) u -> triv
  MorElement ev_twisted(const Corep& u) const;    // u (x) conj(u) -> triv

  // Basis of the space of parity-0 intertwiners u -> v.
  std::vector<MorElement> mor_space(const Corep& u, const Corep& v) const;

  // Adjoint with respect to the carrier Gram matrices (parity 0 only).
  MorElement star(const MorElement&) const;
  // Conjugate morphism conj(u) -> conj(v); conjugate-linear in the argument.
  MorElement conj_morphism(const MorElement&) const;

  Report check_intertwiner(const MorElement&) const;

 private:
  std::shared_ptr<IrrepTable> table_;
  Tol tol_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, std::vector<std::pair<Label, MatC>>>
      dec_cache_;
  mutable std::unordered_map<std::string, MatC> w_cache_;

  MatC conj_identification(const Label&, int power) const;
};

MorElement compose(const MorElement& f, const MorElement& g);  // f after g
MorElement tensor(const MorElement& f, const MorElement& g);   // parity 0
MorElement scale(const Complex&, const MorElement&);
MorElement add(const MorElement&, const MorElement&);

}  // namespace qpb::cqg
