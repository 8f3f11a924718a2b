#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <string>
#include <vector>

#include "qpb/basealg.hpp"
#include "qpb/cqg.hpp"
#include "qpb/taurep.hpp"

using namespace qpb;
using namespace qpb::tau;
using cqg::Corep;

static const Tol tol;

namespace {

std::shared_ptr<cqg::Model> u1_model() {
  return std::make_shared<cqg::Model>(cqg::make_u1_table(24));
}

std::shared_ptr<cqg::Model> su2_model() {
  return std::make_shared<cqg::Model>(cqg::make_su2_table(12));
}

// Rigid generating data: the four duality arrows of u and the loop relation
// whose scalar is the quantum trace.
GeneratingSubcategory duality_presentation(const cqg::Model& m,
                                           std::vector<Corep> gens,
                                           const Corep& u, double loop) {
  GeneratingSubcategory r;
  r.generators = std::move(gens);
  r.arrows = {{"coev", m.coev(u)},
              {"ev", m.ev(u)},
              {"coev_tw", m.coev_twisted(u)},
              {"ev_tw", m.ev_twisted(u)}};
  GeneratingSubcategory::Relation rel;
  rel.name = "loop";
  rel.chain = {m.ev_twisted(u), m.coev(u)};
  rel.scalar = loop;
  r.relations.push_back(rel);
  return r;
}

// Conjugating twice is the inverse squared antipode.
double double_conj_residual(const TauRep& t, const Corep& u) {
  auto lhs = ba::compose(t.diamond(cqg::conj(u)), t.diamond(u));
  MatC ci = inverse(t.model().canonical_c(u), t.model().tol());
  auto rhs = t.rho(cqg::MorElement{cqg::conj(cqg::conj(u)), u, ci, 0});
  return ba::map_residual(lhs, rhs);
}

// The image of the conjugate morphism is the conjugation sandwich.
double conj_naturality_residual(const TauRep& t, const cqg::MorElement& f) {
  auto lhs = t.rho(t.model().conj_morphism(f));
  auto rhs = ba::compose(
      t.diamond(f.src),
      ba::compose(t.rho(f),
                  ba::inverse_map(t.diamond(f.tgt), t.model().tol())));
  return ba::map_residual(lhs, rhs);
}

// The conjugation of a product factors through theta and the twisted tensor
// of the factor conjugations.
double product_conj_residual(const TauRep& t, const Corep& u, const Corep& v) {
  auto thuv = t.theta(u, v);
  auto thvc = t.theta(cqg::conj(v), cqg::conj(u));
  auto tw =
      ba::tensor_map(t.diamond(u), t.diamond(v), thuv.product, thvc.product);
  Corep uv = cqg::prod(u, v);
  cqg::MorElement psi{cqg::conj(uv), cqg::prod(cqg::conj(v), cqg::conj(u)),
                      MatC::identity(t.model().dim(uv)), 0};
  auto lhs = t.diamond(uv);
  auto rhs = ba::compose(
      t.rho(psi), ba::compose(thvc.inverse, ba::compose(tw, thuv.map)));
  return ba::map_residual(lhs, rhs);
}

// Pairing maps close up to the quantum loop values.
void check_loop_values(const TauRep& t, const Corep& u, double loop_plus,
                       double loop_minus) {
  Pairings p = pairings(t, u);
  ba::Bimodule v = t.module(t.model().trivial());
  auto lp = ba::compose(p.pair_plus, p.unit_twisted);
  auto lm = ba::compose(p.pair_minus, p.unit);
  CHECK(ba::map_residual(lp, ba::scale(loop_plus, ba::identity_map(v))) <
        1e-9);
  CHECK(ba::map_residual(lm, ba::scale(loop_minus, ba::identity_map(v))) <
        1e-9);
}

// Charge-graded line bundle on three points with a cyclic transition: the
// degree-one module twists the right action by the cycle, pairings and
// conjugations are the obvious index maps.
PresentedData cyclic_line_data(std::shared_ptr<const cqg::Model> mdl,
                               ba::Base base) {
  auto ep = ba::line_bimodule(base, {1, 2, 0});
  auto em = ba::line_bimodule(base, {2, 0, 1});
  auto tp = ba::tensor_over_m(ep, em, tol);
  auto tm = ba::tensor_over_m(em, ep, tol);
  auto reg = ba::regular_bimodule(base);
  auto sig = [](int i) { return (i + 1) % 3; };
  auto isig = [](int i) { return (i + 2) % 3; };

  MatC mp(3, 9), nbar(9, 3), mbar(3, 9), np(9, 3);
  for (int i = 0; i < 3; ++i) {
    mp.at(i, 3 * i + sig(i)) = 1;
    nbar.at(3 * i + sig(i), i) = 1;
    mbar.at(i, 3 * i + isig(i)) = 1;
    np.at(3 * i + isig(i), i) = 1;
  }
  ba::BimoduleMap mu{tp.space, reg, mp * tp.section, 0};
  ba::BimoduleMap nubar{reg, tp.space, tp.factor.mat * nbar, 0};
  ba::BimoduleMap mubar{tm.space, reg, mbar * tm.section, 0};
  ba::BimoduleMap nu{reg, tm.space, tm.factor.mat * np, 0};

  MatC pmat(3, 3), qmat(3, 3);
  for (int i = 0; i < 3; ++i) {
    pmat.at(i, isig(i)) = 1;
    qmat.at(i, sig(i)) = 1;
  }

  PresentedData d;
  d.model = std::move(mdl);
  d.base = base;
  d.generators = {"1", "-1"};
  d.modules = {ep, em};
  MatC one = MatC::identity(1);
  d.arrows = {{"mu", {}, {0, 1}, one, mu},
              {"mubar", {}, {1, 0}, one, mubar},
              {"nu", {1, 0}, {}, one, nu},
              {"nubar", {0, 1}, {}, one, nubar}};
  d.diamonds = {ba::BimoduleMap{ep, em, pmat, 1},
                ba::BimoduleMap{em, ep, qmat, 1}};
  d.max_word = 4;
  return d;
}

// Transport of the trivial-bundle representation into presented form: the
// duality arrows land in two-letter words through the carrier identification
// of the conjugate, images are read off through theta.
PresentedData presented_from_trivial_su2(std::shared_ptr<cqg::Model> mdl,
                                         ba::Base base, const TrivialTau& t0) {
  Corep u = cqg::leaf("1/2");
  MatC n = mdl->dec(cqg::conj(u))[0].second;
  cqg::MorElement nmor{u, cqg::conj(u), n, 0};
  cqg::MorElement nmor_inv{cqg::conj(u), u, inverse(n, mdl->tol()), 0};
  cqg::MorElement c0 =
      cqg::compose(cqg::tensor(mdl->identity(u), nmor_inv), mdl->coev(u));
  cqg::MorElement e0 =
      cqg::compose(mdl->ev(u), cqg::tensor(nmor, mdl->identity(u)));
  cqg::MorElement c0t = cqg::compose(cqg::tensor(nmor_inv, mdl->identity(u)),
                                     mdl->coev_twisted(u));
  cqg::MorElement e0t =
      cqg::compose(mdl->ev_twisted(u), cqg::tensor(mdl->identity(u), nmor));

  auto th = t0.theta(u, u);
  PresentedData d;
  d.model = mdl;
  d.base = base;
  d.generators = {"1/2"};
  d.modules = {t0.module(u)};
  d.arrows = {
      {"c0", {}, {0, 0}, c0.mat, ba::compose(t0.rho(c0), th.inverse)},
      {"e0", {0, 0}, {}, e0.mat, ba::compose(th.map, t0.rho(e0))},
      {"c0t", {}, {0, 0}, c0t.mat, ba::compose(t0.rho(c0t), th.inverse)},
      {"e0t", {0, 0}, {}, e0t.mat, ba::compose(th.map, t0.rho(e0t))}};
  d.diamonds = {ba::compose(t0.rho(nmor), t0.diamond(u))};
  d.max_word = 4;
  return d;
}

}  // namespace

TEST_CASE("trivial bundle representation over the circle group") {
  auto mdl = u1_model();
  auto base = ba::make_base({1, 1, 1});
  auto t0 = std::make_shared<TrivialTau>(mdl, base);
  Corep u = cqg::leaf("1");

  CHECK(t0->module(u).dim == 3);
  CHECK(t0->module(cqg::prod(u, cqg::leaf("2"))).dim == 3);
  CHECK(check_bimodule(t0->module(u), tol).ok());

  auto r =
      duality_presentation(*mdl, {cqg::leaf("1"), cqg::leaf("-1")}, u, 1.0);
  Report v = validate(*t0, r);
  CHECK(v.ok());
  CHECK(check_pairing_snakes(*t0, u).ok());
  CHECK(check_pairing_snakes(*t0, cqg::leaf("-1")).ok());
  check_loop_values(*t0, u, 1.0, 1.0);

  CHECK(double_conj_residual(*t0, u) < 1e-9);
  CHECK(conj_naturality_residual(*t0, mdl->ev(u)) < 1e-9);
  CHECK(product_conj_residual(*t0, u, cqg::leaf("-1")) < 1e-9);
  CHECK(product_conj_residual(*t0, u, u) < 1e-9);

  // Antilinearity of the parity-1 route.
  cqg::MorElement j = mdl->jmor(u);
  Complex c(0.4, -1.1);
  CHECK(ba::map_residual(t0->rho_any(cqg::scale(c, j)),
                         ba::scale(std::conj(c), t0->rho_any(j))) < 1e-12);
}

TEST_CASE("trivial bundle representation over the rotation group") {
  auto mdl = su2_model();
  auto base = ba::make_base({1, 1, 1});
  auto t0 = std::make_shared<TrivialTau>(mdl, base);
  Corep h = cqg::leaf("1/2");

  CHECK(t0->module(h).dim == 6);
  auto r = duality_presentation(*mdl, {h}, h, 2.0);
  CHECK(validate(*t0, r).ok());
  CHECK(check_pairing_snakes(*t0, h).ok());
  check_loop_values(*t0, h, 2.0, 2.0);

  CHECK(double_conj_residual(*t0, h) < 1e-9);
  CHECK(conj_naturality_residual(*t0, mdl->ev(h)) < 1e-9);
  CHECK(product_conj_residual(*t0, h, h) < 1e-9);

  // theta inverts exactly on a nested product.
  Corep w = cqg::prod(h, cqg::prod(h, h));
  auto th = t0->theta(h, cqg::prod(h, h));
  CHECK(ba::map_residual(ba::compose(th.inverse, th.map),
                         ba::identity_map(t0->module(w))) < 1e-9);
  CHECK(ba::map_residual(ba::compose(th.map, th.inverse),
                         ba::identity_map(th.product.space)) < 1e-9);
}

TEST_CASE("scaled product structure fails coherence") {
  auto mdl = u1_model();
  auto base = ba::make_base({1, 1, 1});
  auto t0 = std::make_shared<TrivialTau>(mdl, base);
  Corep u = cqg::leaf("1");
  auto r =
      duality_presentation(*mdl, {cqg::leaf("1"), cqg::leaf("-1")}, u, 1.0);

  ScaledThetaTau bad(t0, u, u, 2.0);
  Report v = validate(bad, r);
  CHECK(!v.ok());
  double worst = 0;
  for (const auto& c : v.checks)
    if (!c.passed) worst = std::max(worst, c.residual);
  CHECK(worst > 0.1);
}

TEST_CASE("presented cyclic line bundle over three points") {
  auto mdl = u1_model();
  auto base = ba::make_base({1, 1, 1});
  PresentedTau pt(cyclic_line_data(mdl, base));
  Corep u = cqg::leaf("1");

  CHECK(pt.presentation_consistency().ok());
  auto r = pt.presentation();
  GeneratingSubcategory::Relation rel;
  rel.name = "loop";
  rel.chain = {r.arrows[3].second, r.arrows[0].second};
  rel.scalar = 1.0;
  r.relations.push_back(rel);
  CHECK(validate(pt, r).ok());
  CHECK(check_pairing_snakes(pt, u).ok());
  CHECK(check_pairing_snakes(pt, cqg::leaf("-1")).ok());
  check_loop_values(pt, u, 1.0, 1.0);

  // Higher charges are carved out as the expected cyclic lines.
  auto e2 = pt.extend("2");
  CHECK(e2.module.dim == 3);
  CHECK(ba::find_isomorphism(e2.module, ba::line_bimodule(base, {2, 0, 1}))
            .has_value());
  auto e3 = pt.extend("-2");
  CHECK(ba::find_isomorphism(e3.module, ba::line_bimodule(base, {1, 2, 0}))
            .has_value());
  // The extension does not depend on the realization word.
  auto e2b = pt.extend_with_word("2", {0, 0, 1, 0});
  CHECK(pt.compare_extensions(e2, e2b).ok());

  CHECK(double_conj_residual(pt, u) < 1e-9);
  cqg::MorElement f{cqg::prod(cqg::leaf("1"), cqg::leaf("-1")), mdl->trivial(),
                    MatC::identity(1), 0};
  CHECK(conj_naturality_residual(pt, f) < 1e-9);
  CHECK(product_conj_residual(pt, u, cqg::leaf("-1")) < 1e-9);
  CHECK(product_conj_residual(pt, u, u) < 1e-9);

  // Morphisms outside the generated span are refused.
  CHECK_THROWS_AS(pt.rho_word({0}, {1}, MatC::identity(1)), Error);
}

TEST_CASE("presented representation reproduces the trivial bundle") {
  auto mdl = su2_model();
  auto base = ba::make_base({1, 1, 1});
  TrivialTau t0(mdl, base);
  Corep u = cqg::leaf("1/2");
  PresentedTau pt(presented_from_trivial_su2(mdl, base, t0));

  CHECK(pt.presentation_consistency().ok());
  auto r = pt.presentation();
  GeneratingSubcategory::Relation rel;
  rel.name = "loop";
  rel.chain = {r.arrows[3].second, r.arrows[0].second};
  rel.scalar = 2.0;
  r.relations.push_back(rel);
  CHECK(validate(pt, r).ok());
  CHECK(check_pairing_snakes(pt, u).ok());
  check_loop_values(pt, u, 2.0, 2.0);

  auto e1 = pt.extend("1");
  CHECK(e1.module.dim == 9);
  CHECK(pt.compare_extensions(e1, pt.extend_with_word("1", {0, 0, 0, 0})).ok());

  CHECK(double_conj_residual(pt, u) < 1e-9);
  CHECK(product_conj_residual(pt, u, u) < 1e-9);

  for (const auto& lab : {std::string("1"), std::string("3/2")}) {
    Corep w = cqg::leaf(lab);
    CHECK(ba::find_isomorphism(pt.module(w), t0.module(w)).has_value());
  }

  // A non-intertwiner is outside every presented span.
  MatC garbage(4, 4);
  garbage.at(0, 1) = 1;
  garbage.at(3, 0) = 1;
  CHECK_THROWS_AS(pt.rho_word({0, 0}, {0, 0}, garbage), Error);
}

TEST_CASE("broken pairing image shows up as a span defect") {
  auto mdl = u1_model();
  auto base = ba::make_base({1, 1, 1});
  auto bad = cyclic_line_data(mdl, base);
  bad.arrows[3].image = ba::scale(2.0, bad.arrows[3].image);
  PresentedTau pt(std::move(bad));
  Report rep = pt.presentation_consistency();
  CHECK(!rep.ok());
  double worst = 0;
  for (const auto& c : rep.checks)
    if (!c.passed) worst = std::max(worst, c.residual);
  CHECK(worst > 0.1);
}

TEST_CASE("presented data is validated on construction") {
  auto mdl = u1_model();
  auto base = ba::make_base({1, 1, 1});
  auto good = cyclic_line_data(mdl, base);
  CHECK_NOTHROW(PresentedTau{cyclic_line_data(mdl, base)});

  auto d1 = good;
  d1.generators = {"0", "1"};
  CHECK_THROWS_AS(PresentedTau{std::move(d1)}, Error);

  auto d2 = good;
  d2.generators = {"1", "2"};
  CHECK_THROWS_AS(PresentedTau{std::move(d2)}, Error);

  auto d3 = good;
  d3.arrows[0].mat = MatC::identity(2);
  CHECK_THROWS_AS(PresentedTau{std::move(d3)}, Error);

  auto d4 = good;
  d4.arrows[0].image.parity = 1;
  CHECK_THROWS_AS(PresentedTau{std::move(d4)}, Error);

  auto d5 = good;
  d5.diamonds[0].mat = MatC::identity(2);
  CHECK_THROWS_AS(PresentedTau{std::move(d5)}, Error);

  auto d6 = good;
  d6.arrows[0].src = {0, 0, 0, 0, 0};
  CHECK_THROWS_AS(PresentedTau{std::move(d6)}, Error);

  // A label never reached by generator words cannot be extended.
  PresentedTau pt(std::move(good));
  CHECK_THROWS_AS(pt.extend("24"), Error);
}
