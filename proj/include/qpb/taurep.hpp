#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qpb/basealg.hpp"
#include "qpb/cqg.hpp"
#include "qpb/matrix.hpp"
#include "qpb/report.hpp"

namespace qpb::tau {

// theta_{uv}: E_{uxv} -> E_u (x)_M E_v, with the tensor product carrying the
// right-hand side and the two-sided inverse.
struct ThetaMap {
  ba::TensorProduct product;
  ba::BimoduleMap map;
  ba::BimoduleMap inverse;
};

// A representation of the corepresentation category in bimodules over the
// base: a module E_u for every corepresentation, contravariant arrow images,
// the antilinear conjugation maps, and the product isomorphisms theta.
// Implementations memoize internally and are safe for concurrent use after
// construction.
class TauRep {
 public:
  virtual ~TauRep() = default;
  virtual const cqg::Model& model() const = 0;
  // Owning handle of model(), so derived structures can share it.
  virtual std::shared_ptr<const cqg::Model> shared_model() const = 0;
  virtual const ba::Base& base() const = 0;
  virtual ba::Bimodule module(const cqg::Corep& u) const = 0;
  // Image of a parity-0 intertwiner f: u -> v as a map E_v -> E_u.
  virtual ba::BimoduleMap rho(const cqg::MorElement& f) const = 0;
  // The antilinear structure map E_u -> E_{conj u}.
  virtual ba::BimoduleMap diamond(const cqg::Corep& u) const = 0;
  virtual ThetaMap theta(const cqg::Corep& u, const cqg::Corep& v) const = 0;

  // Image of an intertwiner of either parity; parity 1 is routed through the
  // conjugation structure.
  ba::BimoduleMap rho_any(const cqg::MorElement& f) const;
};

// Finitely presented generating data: corepresentations closed under
// conjugation up to equivalence, named arrows generating the morphisms, and
// relation words that must compose to scalar multiples of identities.
struct GeneratingSubcategory {
  std::vector<cqg::Corep> generators;
  std::vector<std::pair<std::string, cqg::MorElement>> arrows;
  struct Relation {
    std::string name;
    // Composable chain, rightmost applied first.
    std::vector<cqg::MorElement> chain;
    Complex scalar = 1.0;
  };
  std::vector<Relation> relations;
};

// Axioms of a representation on the presented data: module and arrow-image
// structure, functoriality on recognizable composites, naturality of theta,
// associativity of theta on generator triples, relation words, and
// invertibility of theta.  Reports one check per axiom instance with the
// worst residual.
Report validate(const TauRep& t, const GeneratingSubcategory& r,
                const Tol& tol = {});

// The four duality pairings of u transported to the bimodule level.
struct Pairings {
  ThetaMap conj_split;          // theta_{conj(u), u}
  ThetaMap split;               // theta_{u, conj(u)}
  ba::BimoduleMap unit;         // V -> E_conj(u) (x) E_u
  ba::BimoduleMap unit_twisted; // V -> E_u (x) E_conj(u)
  ba::BimoduleMap pair_plus;    // E_u (x) E_conj(u) -> V
  ba::BimoduleMap pair_minus;   // E_conj(u) (x) E_u -> V
};

Pairings pairings(const TauRep& t, const cqg::Corep& u);

// Bimodule-level snake identities for the pairings of u.
Report check_pairing_snakes(const TauRep& t, const cqg::Corep& u,
                            const Tol& tol = {});

// The representation attached to the trivial bundle V (x) A: E_u is V tensor
// the dual carrier of u, arrows act on the dual factor, conjugation is the
// star of V against the canonical conjugation of the carrier.
class TrivialTau : public TauRep {
 public:
  TrivialTau(std::shared_ptr<const cqg::Model> model, ba::Base base);
  const cqg::Model& model() const override { return *model_; }
  std::shared_ptr<const cqg::Model> shared_model() const override {
    return model_;
  }
  const ba::Base& base() const override { return base_; }
  ba::Bimodule module(const cqg::Corep& u) const override;
  ba::BimoduleMap rho(const cqg::MorElement& f) const override;
  ba::BimoduleMap diamond(const cqg::Corep& u) const override;
  ThetaMap theta(const cqg::Corep& u, const cqg::Corep& v) const override;

 private:
  std::shared_ptr<const cqg::Model> model_;
  ba::Base base_;
  MatC star_perm_;
};

// Finite presentation of a representation: one bimodule per generating
// irreducible label, parity-0 arrow images between generator words, and the
// conjugation maps of the generators.  Everything else is produced by the
// extension algorithm: arbitrary morphism images are solved inside the span
// of padded composites of the presented arrows, and modules of other
// irreducibles are carved out of generator words as certified direct
// summands.
struct PresentedData {
  std::shared_ptr<const cqg::Model> model;
  ba::Base base;
  std::vector<cqg::Label> generators;
  std::vector<ba::Bimodule> modules;
  struct Arrow {
    std::string name;
    std::vector<int> src, tgt;  // generator index words
    MatC mat;                   // cqg matrix between the word carriers
    ba::BimoduleMap image;      // E_{tgt word} -> E_{src word}
  };
  std::vector<Arrow> arrows;
  // Parity-1 maps E_g -> E_{conj label of g}, one per generator index.
  std::vector<ba::BimoduleMap> diamonds;
  int max_word = 5;
  int max_depth = 10;
};

// Direct-summand realization of an irreducible label inside a generator
// word, with the splitting pair that carves its module out of the word
// module.
struct Extension {
  cqg::Label label;
  std::vector<int> word;
  MatC iota;               // carrier embedding H_label -> H_word
  ba::Bimodule module;     // E_label
  ba::BimoduleMap into_word, from_word;  // E_label <-> E_word splitting
};

class PresentedTau : public TauRep {
 public:
  explicit PresentedTau(PresentedData data, Tol tol = {});

  const cqg::Model& model() const override { return *data_.model; }
  std::shared_ptr<const cqg::Model> shared_model() const override {
    return data_.model;
  }
  const ba::Base& base() const override { return data_.base; }
  ba::Bimodule module(const cqg::Corep& u) const override;
  ba::BimoduleMap rho(const cqg::MorElement& f) const override;
  ba::BimoduleMap diamond(const cqg::Corep& u) const override;
  ThetaMap theta(const cqg::Corep& u, const cqg::Corep& v) const override;

  const PresentedData& data() const { return data_; }
  // The extension record of a label (generators give identity splittings).
  Extension extend(const cqg::Label& label) const;
  // Extension forced through a specific realization word; used to certify
  // that the construction does not depend on the realization.
  Extension extend_with_word(const cqg::Label& label,
                             const std::vector<int>& word) const;
  // Certificate that two extensions of the same label are isomorphic through
  // the canonical comparison map.
  Report compare_extensions(const Extension& a, const Extension& b) const;
  // The generating data in validator form.
  GeneratingSubcategory presentation() const;
  // Every linear dependence among generated word morphisms must be mirrored
  // by the presented images; reports the worst mismatch per morphism space.
  Report presentation_consistency() const;

  // Module of a generator word (iterated tensor product over the base).
  ba::Bimodule word_module(const std::vector<int>& w) const;
  // Image of a word-to-word intertwiner solved in the span of padded
  // composites of presented arrows; throws when the morphism lies outside
  // the generated span.
  ba::BimoduleMap rho_word(const std::vector<int>& src,
                           const std::vector<int>& tgt, const MatC& mat) const;

 private:
  // Span of the generated morphisms between two fixed words, kept as an
  // incremental orthonormalization so membership tests and image solves stay
  // cheap.  defect records the worst image mismatch seen on dependent
  // composites.
  struct SpanEntry {
    std::vector<int> src, tgt;
    std::vector<MatC> mats;
    std::vector<ba::BimoduleMap> images;
    std::vector<MatC> ortho;
    std::vector<std::vector<Complex>> rcols;
    double defect = 0.0;
  };
  struct PaddedArrow {
    std::vector<int> src, tgt;
    MatC mat;
    ba::BimoduleMap image;
  };
  // Tensor product of two label modules with one embedding and projection
  // per fusion channel.
  struct LabelPair {
    std::shared_ptr<const ba::TensorProduct> prod;
    std::vector<ba::BimoduleMap> emb, prj;
  };

  PresentedData data_;
  Tol tol_;
  mutable std::recursive_mutex mu_;
  mutable std::unordered_map<std::string, ba::Bimodule> wordmods_;
  mutable std::unordered_map<std::string,
                             std::shared_ptr<const ba::TensorProduct>>
      pairs_;
  mutable std::unordered_map<std::string, ba::BimoduleMap> splits_;
  mutable std::map<std::pair<std::string, std::string>, SpanEntry> spans_;
  mutable std::vector<PaddedArrow> padded_;
  mutable bool arrows_built_ = false;
  mutable std::unordered_map<std::string, Extension> ext_;
  mutable std::unordered_map<std::string, ba::BimoduleMap> diamonds_;
  mutable std::unordered_map<std::string, std::shared_ptr<const LabelPair>>
      lpairs_;
  mutable std::unordered_map<std::string, std::shared_ptr<const ThetaMap>>
      thetas_;
  mutable std::unordered_map<std::string, ba::Bimodule> modules_;

  cqg::Corep word_corep(const std::vector<int>& w) const;
  const ba::TensorProduct& word_pair(const std::vector<int>& l,
                                     const std::vector<int>& r) const;
  const ba::TensorProduct& aux_pair(const std::string& key,
                                    const ba::Bimodule& a,
                                    const ba::Bimodule& b) const;
  ba::BimoduleMap word_split(const std::vector<int>& w, int k) const;
  ba::BimoduleMap word_diamond(const std::vector<int>& w) const;
  std::vector<int> conj_word(const std::vector<int>& w) const;
  MatC word_jmat(const std::vector<int>& w) const;
  void build_arrow_spans() const;
  bool span_add(SpanEntry& e, const MatC& mat,
                const ba::BimoduleMap& image) const;
  ba::BimoduleMap pad_image(const ba::BimoduleMap& image,
                            const std::vector<int>& src,
                            const std::vector<int>& tgt,
                            const std::vector<int>& x,
                            const std::vector<int>& y) const;
  const Extension& extension(const cqg::Label& label) const;
  Extension build_extension(const cqg::Label& label,
                            const std::vector<int>& word) const;
  const LabelPair& label_pair(const cqg::Label& a, const cqg::Label& b) const;
  ba::BimoduleMap label_diamond(const cqg::Label& label) const;
  int generator_index(const cqg::Label& label) const;
};

// Wrapper scaling theta on one ordered pair of corepresentations; used to
// probe that the validator notices non-associative product data.
class ScaledThetaTau : public TauRep {
 public:
  ScaledThetaTau(std::shared_ptr<const TauRep> inner, cqg::Corep u,
                 cqg::Corep v, Complex factor);
  const cqg::Model& model() const override { return inner_->model(); }
  std::shared_ptr<const cqg::Model> shared_model() const override {
    return inner_->shared_model();
  }
  const ba::Base& base() const override { return inner_->base(); }
  ba::Bimodule module(const cqg::Corep& u) const override {
    return inner_->module(u);
  }
  ba::BimoduleMap rho(const cqg::MorElement& f) const override {
    return inner_->rho(f);
  }
  ba::BimoduleMap diamond(const cqg::Corep& u) const override {
    return inner_->diamond(u);
  }
  ThetaMap theta(const cqg::Corep& u, const cqg::Corep& v) const override;

 private:
  std::shared_ptr<const TauRep> inner_;
  std::string ukey_, vkey_;
  Complex factor_;
};

}  // namespace qpb::tau
