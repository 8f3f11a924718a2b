// Classification engines over very small bases: bundles over the one point
// base, and line bundles over finite point sets presented as triples
// (points, eps, u).
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qpb/basealg.hpp"
#include "qpb/cqg.hpp"
#include "qpb/report.hpp"
#include "qpb/taurep.hpp"

namespace qpb::cl {

// Classification datum of a line bundle over an N point base.  eps is a
// permutation of the points; the base automorphism it induces sends f to
// f composed with eps, and the generator module twists its right action by
// that automorphism.  u is an invertible real function on the points fixing
// the forward pairing; the companion weight v = u(eps(i)) of the reverse
// pairing is derived, and a caller-supplied v is rejected unless it matches.
struct LineBundleTriple {
  int points = 0;
  std::vector<int> eps;
  std::vector<double> u;
  std::vector<double> v;

  LineBundleTriple(int n, std::vector<int> e, std::vector<double> uu);
  LineBundleTriple(int n, std::vector<int> e, std::vector<double> uu,
                   std::vector<double> vv);
};

// Structural gate behind the constructors: eps bijective, u real (largest
// imaginary part is the residual), u invertible, and v = u(eps) when v is
// given.  Complex input is accepted here so a rejection can still report
// how far from real it was.
Report validate_triple(int points, const std::vector<int>& eps,
                       const std::vector<Complex>& u,
                       const std::vector<Complex>* v = nullptr,
                       const Tol& tol = {});

// Complex-aware constructor: runs validate_triple and converts, so complex
// or mismatched input is rejected with the same diagnostics.
LineBundleTriple make_triple(int points, std::vector<int> eps,
                             const std::vector<Complex>& u,
                             const std::vector<Complex>* v = nullptr,
                             const Tol& tol = {});

// The presentation attached to a triple: modules for the generator and its
// conjugate, the two pairings weighted by u and v, the two splittings
// weighted by their inverses, and the canonical frame conjugations.
// max_word bounds the tensor words the presentation can realize.
tau::PresentedData line_bundle_data(const LineBundleTriple& t,
                                    std::shared_ptr<const cqg::Model> model,
                                    const Tol& tol = {}, int max_word = 6);

std::shared_ptr<tau::PresentedTau> line_bundle_from_triple(
    const LineBundleTriple& t, std::shared_ptr<const cqg::Model> model,
    const Tol& tol = {});

// The two exchange identities between the pairings, as bimodule map
// identities on the threefold products.
Report pairing_compatibility(const LineBundleTriple& t,
                             std::shared_ptr<const cqg::Model> model,
                             const Tol& tol = {});

// Recover (eps, u) from a representation of the circle group whose
// generator module is rank one over a diagonal base: eps from the right
// action twist, u from the reverse pairing in the classical frame.
LineBundleTriple triple_from_line_bundle(const tau::TauRep& t,
                                         const Tol& tol = {});

// Enumerate dimension vectors consistent with multiplicativity under the
// fusion rules up to max_label, attempt construction for the survivors, and
// certify uniqueness up to isomorphism.  group is a table selector:
// "u1", "su2", or "suq2:q=<rational>".
Report point_bundle_search(const std::string& group, int max_label,
                           const Tol& tol = {});

}  // namespace qpb::cl
