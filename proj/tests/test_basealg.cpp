#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qpb/basealg.hpp"
#include "qpb/rng.hpp"

using namespace qpb;
using namespace qpb::ba;

static const Tol tol;

namespace {

MatC random_element(const BaseAlgebra& v, Rng& rng) {
  return rng.matrix(v.dim(), 1);
}

BimoduleMap random_endo(const Bimodule& e, Rng& rng) {
  auto basis = hom_space(e, e, 0);
  REQUIRE(!basis.empty());
  MatC m(e.dim, e.dim);
  for (auto& b : basis) m = m + rng.complex_unit_ball() * b.mat;
  return {e, e, m, 0};
}

Bimodule char_sum(const Base& v, const std::vector<std::pair<int, int>>& chars) {
  Bimodule e = char_bimodule(v, chars[0].first, chars[0].second);
  for (size_t k = 1; k < chars.size(); ++k)
    e = direct_sum(e, char_bimodule(v, chars[k].first, chars[k].second));
  return e;
}

}  // namespace

TEST_CASE("base algebra block arithmetic") {
  BaseAlgebra v({2, 1});
  CHECK(v.dim() == 5);
  CHECK(!v.commutative());
  CHECK(BaseAlgebra({1, 1, 1}).commutative());

  // e_{01} e_{10} = e_{00} in the 2x2 block.
  MatC a(5, 1), b(5, 1);
  a.at(v.unit_index(0, 0, 1), 0) = 1.0;
  b.at(v.unit_index(0, 1, 0), 0) = 1.0;
  MatC p = v.mul(a, b);
  CHECK(std::abs(p.at(v.unit_index(0, 0, 0), 0) - 1.0) < 1e-14);
  CHECK(p.max_abs() == 1.0);
  CHECK(v.mul(b, a).at(v.unit_index(0, 1, 1), 0) == Complex(1.0));
  // Cross-block products vanish.
  MatC c(5, 1);
  c.at(v.unit_index(1, 0, 0), 0) = 1.0;
  CHECK(v.mul(a, c).max_abs() == 0.0);

  CHECK(v.star_index(v.unit_index(0, 0, 1)) == v.unit_index(0, 1, 0));

  Rng rng(7);
  MatC x = random_element(v, rng), y = random_element(v, rng);
  CHECK(residual(v.mul(x, v.one()), x) < 1e-14);
  CHECK(residual(v.mul(v.one(), x), x) < 1e-14);
  CHECK(residual(v.star(v.star(x)), x) < 1e-14);
  CHECK(residual(v.star(v.mul(x, y)), v.mul(v.star(y), v.star(x))) < 1e-13);
  // Multiplication operators agree with mul.
  for (int i = 0; i < v.dim(); ++i) {
    MatC ei(5, 1);
    ei.at(i, 0) = 1.0;
    CHECK(residual(v.left_mul(i) * x, v.mul(ei, x)) < 1e-14);
    CHECK(residual(v.right_mul(i) * x, v.mul(x, ei)) < 1e-14);
  }

  CHECK_THROWS_AS(BaseAlgebra({}), Error);
  CHECK_THROWS_AS(BaseAlgebra({0}), Error);
}

TEST_CASE("standard bimodules satisfy the action laws") {
  Base v21 = make_base({2, 1});
  Base v3 = make_base({1, 1, 1});
  CHECK(check_bimodule(regular_bimodule(v21)).ok());
  CHECK(check_bimodule(free_bimodule(v21, 2)).ok());
  CHECK(check_bimodule(char_bimodule(v3, 0, 2)).ok());
  CHECK(check_bimodule(line_bimodule(v3, {1, 2, 0})).ok());
  CHECK(check_bimodule(direct_sum(char_bimodule(v3, 0, 1),
                                  char_bimodule(v3, 2, 2)))
            .ok());
  CHECK_THROWS_AS(char_bimodule(v21, 0, 0), Error);
  CHECK_THROWS_AS(line_bimodule(v3, {0, 0, 1}), Error);
  CHECK_THROWS_AS(free_bimodule(v3, 0), Error);
}

TEST_CASE("line bimodule twists the right action by the permutation") {
  Base v = make_base({1, 1, 1});
  std::vector<int> perm = {1, 2, 0};
  Bimodule e = line_bimodule(v, perm);
  CHECK(e.dim == 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      CHECK(e.left[j].at(i, i) == (i == j ? Complex(1.0) : Complex(0.0)));
      CHECK(e.right[j].at(i, i) ==
            (perm[size_t(i)] == j ? Complex(1.0) : Complex(0.0)));
    }
}

TEST_CASE("tensor over a point base is the plain tensor product") {
  Base v = make_base({1});
  Bimodule e, f;
  e.base = f.base = v;
  e.dim = 2;
  f.dim = 3;
  e.left = e.right = {MatC::identity(2)};
  f.left = f.right = {MatC::identity(3)};
  TensorProduct t = tensor_over_m(e, f);
  CHECK(t.space.dim == 6);
  CHECK(residual(t.factor.mat * t.section, MatC::identity(6)) < 1e-12);
  CHECK(residual(t.section * t.factor.mat, MatC::identity(6)) < 1e-12);
}

TEST_CASE("tensor of twisted line bimodules keeps one dimension per point") {
  Base v = make_base({1, 1, 1});
  std::vector<int> cyc = {1, 2, 0};
  std::vector<int> swap01 = {1, 0, 2};
  Bimodule e = line_bimodule(v, cyc);

  SUBCASE("cyclic against itself") {
    TensorProduct t = tensor_over_m(e, e);
    CHECK(t.space.dim == 3);
    CHECK(check_bimodule(t.space).ok());
    CHECK(check_map(t.factor).ok());
    // Only pairs x_i (x) y_{cyc(i)} survive the quotient.
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        MatC basis(9, 1);
        basis.at(i * 3 + j, 0) = 1.0;
        double norm = (t.factor.mat * basis).max_abs();
        if (j == cyc[size_t(i)])
          CHECK(norm > 0.9);
        else
          CHECK(norm < 1e-12);
      }
    // The product is the line bimodule of the composed permutation.
    std::vector<int> composed(3);
    for (int i = 0; i < 3; ++i) composed[size_t(i)] = cyc[size_t(cyc[size_t(i)])];
    CHECK(find_isomorphism(t.space, line_bimodule(v, composed)).has_value());
  }

  SUBCASE("different twists still tensor to dimension three") {
    Bimodule f = line_bimodule(v, swap01);
    TensorProduct t = tensor_over_m(e, f);
    CHECK(t.space.dim == 3);
    std::vector<int> composed(3);
    for (int i = 0; i < 3; ++i)
      composed[size_t(i)] = swap01[size_t(cyc[size_t(i)])];
    CHECK(find_isomorphism(t.space, line_bimodule(v, composed)).has_value());
  }
}

TEST_CASE("middle interchange vanishes in the quotient") {
  Base v = make_base({1, 1, 1});
  Bimodule e = char_sum(v, {{0, 1}, {1, 1}, {2, 0}, {0, 0}});
  Bimodule f = char_sum(v, {{1, 2}, {0, 0}, {1, 0}});
  TensorProduct t = tensor_over_m(e, f);
  CHECK(check_bimodule(t.space).ok());
  CHECK(check_map(t.factor).ok());
  const MatC ie = MatC::identity(e.dim), iff = MatC::identity(f.dim);
  for (int i = 0; i < v->dim(); ++i) {
    MatC gen = kron(e.right[size_t(i)], iff) - kron(ie, f.left[size_t(i)]);
    CHECK((t.factor.mat * gen).max_abs() < 1e-10);
  }
  CHECK(residual(t.factor.mat * t.section, MatC::identity(t.space.dim)) <
        1e-10);
}

TEST_CASE("unitors collapse tensoring with the algebra") {
  Base v = make_base({2, 1});
  for (const Bimodule& e :
       {free_bimodule(v, 1), regular_bimodule(v)}) {
    TensorProduct ve = tensor_over_m(regular_bimodule(v), e);
    CHECK(ve.space.dim == e.dim);
    BimoduleMap lu = left_unitor(ve);
    CHECK(check_map(lu).ok());
    CHECK(map_residual(compose(lu, inverse_map(lu)), identity_map(e)) < 1e-9);

    TensorProduct ev = tensor_over_m(e, regular_bimodule(v));
    CHECK(ev.space.dim == e.dim);
    BimoduleMap ru = right_unitor(ev);
    CHECK(check_map(ru).ok());
    CHECK(map_residual(compose(ru, inverse_map(ru)), identity_map(e)) < 1e-9);
  }
}

TEST_CASE("hom spaces have the dimensions dictated by the characters") {
  Base v3 = make_base({1, 1, 1});
  Base v2 = make_base({2});
  Bimodule c01 = char_bimodule(v3, 0, 1);
  CHECK(hom_space(c01, c01, 0).size() == 1);
  CHECK(hom_space(c01, char_bimodule(v3, 0, 2), 0).empty());
  CHECK(hom_space(c01, char_bimodule(v3, 1, 1), 0).empty());

  // A full matrix block over itself is irreducible.
  CHECK(hom_space(regular_bimodule(v2), regular_bimodule(v2), 0).size() == 1);
  // The commutative regular bimodule splits into one character per point.
  CHECK(hom_space(regular_bimodule(v3), regular_bimodule(v3), 0).size() == 3);

  Bimodule line_cyc = line_bimodule(v3, {1, 2, 0});
  Bimodule line_id = line_bimodule(v3, {0, 1, 2});
  CHECK(hom_space(line_cyc, line_cyc, 0).size() == 3);
  CHECK(hom_space(line_cyc, line_id, 0).empty());

  Bimodule doubled = direct_sum(char_bimodule(v3, 0, 0), char_bimodule(v3, 0, 0));
  CHECK(hom_space(doubled, doubled, 0).size() == 4);

  // The identity lies in the endomorphism space.
  auto basis = hom_space(line_cyc, line_cyc, 0);
  MatC projected(3, 3);
  for (auto& b : basis) {
    Complex overlap = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        overlap += std::conj(b.mat.at(i, j)) *
                   MatC::identity(3).at(i, j);
    projected = projected + overlap * b.mat;
  }
  CHECK(residual(projected, MatC::identity(3)) < 1e-10);
}

TEST_CASE("conjugate bimodules and parity one maps") {
  Base v = make_base({1, 1, 1});
  Bimodule e = line_bimodule(v, {1, 2, 0});
  ConjugateBimodule ce = conjugate_bimodule(e);
  CHECK(check_bimodule(ce.space).ok());
  CHECK(check_map(ce.bar).ok());
  CHECK(ce.bar.parity == 1);

  // Conjugating twice restores the action matrices exactly.
  ConjugateBimodule cce = conjugate_bimodule(ce.space);
  for (int i = 0; i < v->dim(); ++i) {
    CHECK(cce.space.left[size_t(i)].exactly_equal(e.left[size_t(i)]));
    CHECK(cce.space.right[size_t(i)].exactly_equal(e.right[size_t(i)]));
  }
  BimoduleMap round = compose(cce.bar, ce.bar);
  CHECK(round.parity == 0);
  CHECK(residual(round.mat, MatC::identity(e.dim)) < 1e-14);

  // The canonical map spans a slice of the parity-one hom space.
  auto anti = hom_space(e, ce.space, 1);
  CHECK(anti.size() == 3);
  Bimodule c01 = char_bimodule(v, 0, 1);
  ConjugateBimodule cc = conjugate_bimodule(c01);
  CHECK(hom_space(c01, cc.space, 1).size() == 1);
  // The conjugate of the (0,1) character carries the (1,0) character.
  CHECK(find_isomorphism(cc.space, char_bimodule(v, 1, 0)).has_value());

  // Composing two antilinear antihomomorphisms gives a homomorphism.
  Rng rng(11);
  MatC m1(e.dim, e.dim), m2(e.dim, e.dim);
  for (auto& b : anti) m1 = m1 + rng.complex_unit_ball() * b.mat;
  auto anti_back = hom_space(ce.space, e, 1);
  CHECK(anti_back.size() == 3);
  for (auto& b : anti_back) m2 = m2 + rng.complex_unit_ball() * b.mat;
  BimoduleMap f1{e, ce.space, m1, 1}, f2{ce.space, e, m2, 1};
  BimoduleMap both = compose(f2, f1);
  CHECK(both.parity == 0);
  CHECK(check_map(both).ok());

  // Conjugate of a free module is free.
  Base v21 = make_base({2, 1});
  Bimodule fr = free_bimodule(v21, 1);
  CHECK(find_isomorphism(conjugate_bimodule(fr).space, fr).has_value());
}

TEST_CASE("twisted tensor of the canonical conjugations is involutive") {
  Base v = make_base({1, 1, 1});
  Bimodule e = line_bimodule(v, {1, 2, 0});
  Bimodule f = line_bimodule(v, {2, 0, 1});
  ConjugateBimodule ce = conjugate_bimodule(e), cf = conjugate_bimodule(f);
  TensorProduct ef = tensor_over_m(e, f);
  TensorProduct fece = tensor_over_m(cf.space, ce.space);

  BimoduleMap tw = tensor_map(ce.bar, cf.bar, ef, fece);
  CHECK(tw.parity == 1);
  CHECK(check_map(tw).ok());

  ConjugateBimodule cce = conjugate_bimodule(ce.space);
  ConjugateBimodule ccf = conjugate_bimodule(cf.space);
  BimoduleMap back = tensor_map(ccf.bar, cce.bar, fece, ef);
  BimoduleMap round = compose(back, tw);
  CHECK(round.parity == 0);
  CHECK(residual(round.mat, MatC::identity(ef.space.dim)) < 1e-9);
}

TEST_CASE("tensor map is functorial and compatible with the quotient") {
  Base v = make_base({1, 1, 1});
  Bimodule e = line_bimodule(v, {1, 2, 0});
  Bimodule f = line_bimodule(v, {0, 2, 1});
  TensorProduct t = tensor_over_m(e, f);
  Rng rng(23);
  BimoduleMap s1 = random_endo(e, rng), s2 = random_endo(e, rng);
  BimoduleMap t1 = random_endo(f, rng), t2 = random_endo(f, rng);
  BimoduleMap lhs = compose(tensor_map(s2, t2, t, t), tensor_map(s1, t1, t, t));
  BimoduleMap rhs = tensor_map(compose(s2, s1), compose(t2, t1), t, t);
  CHECK(map_residual(lhs, rhs) < 1e-9);
  CHECK(check_map(tensor_map(s1, t1, t, t)).ok());
}

TEST_CASE("associator satisfies the triangle identity") {
  Base v = make_base({1, 1, 1});
  Bimodule e = line_bimodule(v, {1, 2, 0});
  Bimodule f = line_bimodule(v, {2, 0, 1});
  Bimodule reg = regular_bimodule(v);

  TensorProduct ev = tensor_over_m(e, reg);
  TensorProduct ev_f = tensor_over_m(ev.space, f);
  TensorProduct vf = tensor_over_m(reg, f);
  TensorProduct e_vf = tensor_over_m(e, vf.space);
  TensorProduct ef = tensor_over_m(e, f);

  BimoduleMap assoc = associator(ev, ev_f, vf, e_vf);
  CHECK(check_map(assoc).ok());
  BimoduleMap left_route =
      compose(tensor_map(identity_map(e), left_unitor(vf), e_vf, ef), assoc);
  BimoduleMap right_route =
      tensor_map(right_unitor(ev), identity_map(f), ev_f, ef);
  CHECK(map_residual(left_route, right_route) < 1e-9);

  // The associator is invertible.
  BimoduleMap inv = inverse_map(assoc);
  CHECK(map_residual(compose(inv, assoc), identity_map(ev_f.space)) < 1e-9);
}

TEST_CASE("associator on three twisted lines") {
  Base v = make_base({1, 1, 1});
  Bimodule e = line_bimodule(v, {1, 2, 0});
  Bimodule f = line_bimodule(v, {2, 0, 1});
  Bimodule g = line_bimodule(v, {1, 0, 2});
  TensorProduct ef = tensor_over_m(e, f);
  TensorProduct ef_g = tensor_over_m(ef.space, g);
  TensorProduct fg = tensor_over_m(f, g);
  TensorProduct e_fg = tensor_over_m(e, fg.space);
  BimoduleMap assoc = associator(ef, ef_g, fg, e_fg);
  CHECK(check_map(assoc).ok());
  CHECK(ef_g.space.dim == 3);
  CHECK(e_fg.space.dim == 3);
  BimoduleMap inv = inverse_map(assoc);
  CHECK(map_residual(compose(assoc, inv), identity_map(e_fg.space)) < 1e-9);
}

TEST_CASE("projectivity certificates split every module off a free one") {
  Base v3 = make_base({1, 1, 1});
  Base v2 = make_base({2});

  ProjectivityCertificate c1 = projectivity_certificate(regular_bimodule(v3));
  CHECK(c1.report.ok());
  CHECK(c1.rank == 1);

  ProjectivityCertificate c2 =
      projectivity_certificate(line_bimodule(v3, {1, 2, 0}));
  CHECK(c2.report.ok());
  CHECK(c2.rank == 1);

  ProjectivityCertificate c3 = projectivity_certificate(regular_bimodule(v2));
  CHECK(c3.report.ok());
  CHECK(c3.rank == 1);

  // A doubled character exceeds the multiplicity of a rank-one free module.
  Bimodule doubled = direct_sum(char_bimodule(v3, 0, 0),
                                 char_bimodule(v3, 0, 0));
  ProjectivityCertificate c4 = projectivity_certificate(doubled);
  CHECK(c4.report.ok());
  CHECK(c4.rank == 2);
  CHECK(residual(c4.project.mat * c4.embed.mat, MatC::identity(doubled.dim)) <
        1e-9);
  CHECK(check_map(c4.embed).ok());
  CHECK(check_map(c4.project).ok());
}

TEST_CASE("isomorphism search distinguishes inequivalent bimodules") {
  Base v = make_base({1, 1, 1});
  Bimodule a = line_bimodule(v, {1, 2, 0});
  Bimodule b = line_bimodule(v, {2, 0, 1});
  CHECK(!find_isomorphism(a, b).has_value());
  auto self = find_isomorphism(a, a);
  REQUIRE(self.has_value());
  CHECK(check_map(*self).ok());
  BimoduleMap inv = inverse_map(*self);
  CHECK(map_residual(compose(inv, *self), identity_map(a)) < 1e-9);
  CHECK(!find_isomorphism(a, char_bimodule(v, 0, 1)).has_value());
}
