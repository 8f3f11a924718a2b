#include "qpb/classify.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qpb/bundle.hpp"

namespace qpb::cl {

namespace {

bool is_permutation(int n, const std::vector<int>& p) {
  if (int(p.size()) != n) return false;
  std::vector<char> seen(size_t(n), 0);
  for (int x : p) {
    if (x < 0 || x >= n || seen[size_t(x)]) return false;
    seen[size_t(x)] = 1;
  }
  return true;
}

std::vector<int> inverse_perm(const std::vector<int>& p) {
  std::vector<int> q(p.size());
  for (int i = 0; i < int(p.size()); ++i) q[size_t(p[i])] = i;
  return q;
}

std::vector<Complex> to_cvec(const std::vector<double>& x) {
  std::vector<Complex> z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = x[i];
  return z;
}

std::string first_failure(const Report& r) {
  for (const auto& c : r.checks)
    if (!c.passed) return c.name;
  return "unknown failure";
}

double worst_residual(const Report& r) {
  double w = 0;
  for (const auto& c : r.checks) w = std::max(w, c.residual);
  return w;
}

std::string fmt(double x) {
  std::string s = std::to_string(x);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

Report validate_triple(int points, const std::vector<int>& eps,
                       const std::vector<Complex>& u,
                       const std::vector<Complex>* v, const Tol& tol) {
  Report rep;
  rep.subject = "line bundle triple";
  bool perm_ok = points > 0 && is_permutation(points, eps);
  rep.add("eps is a permutation of the points", perm_ok);
  bool size_ok = int(u.size()) == points;
  rep.add("u has one value per point", size_ok);

  double im = 0, lo = size_ok && points > 0 ? 1e300 : 0;
  for (const auto& z : u) {
    im = std::max(im, std::abs(z.imag()));
    lo = std::min(lo, std::abs(z));
  }
  rep.add("u is real valued", size_ok && im <= tol.abs_tol, im);
  bool inv_ok = size_ok && lo > tol.abs_tol;
  rep.add("u is invertible", inv_ok, inv_ok ? 0.0 : lo);

  if (v) {
    bool vsz = int(v->size()) == points;
    double dv = 0;
    if (vsz && perm_ok && size_ok)
      for (int i = 0; i < points; ++i)
        dv = std::max(dv,
                      std::abs((*v)[size_t(i)] - u[size_t(eps[size_t(i)])]));
    rep.add("v equals u transported along eps",
            vsz && perm_ok && size_ok && dv <= tol.abs_tol, dv);
  }
  return rep;
}

LineBundleTriple::LineBundleTriple(int n, std::vector<int> e,
                                   std::vector<double> uu)
    : points(n), eps(std::move(e)), u(std::move(uu)) {
  auto rep = validate_triple(points, eps, to_cvec(u));
  if (!rep.ok()) throw Error("LineBundleTriple: " + first_failure(rep));
  v.resize(size_t(points));
  for (int i = 0; i < points; ++i)
    v[size_t(i)] = u[size_t(eps[size_t(i)])];
}

LineBundleTriple::LineBundleTriple(int n, std::vector<int> e,
                                   std::vector<double> uu,
                                   std::vector<double> vv)
    : points(n), eps(std::move(e)), u(std::move(uu)), v(std::move(vv)) {
  auto cv = to_cvec(v);
  auto rep = validate_triple(points, eps, to_cvec(u), &cv);
  if (!rep.ok()) throw Error("LineBundleTriple: " + first_failure(rep));
}

LineBundleTriple make_triple(int points, std::vector<int> eps,
                             const std::vector<Complex>& u,
                             const std::vector<Complex>* v, const Tol& tol) {
  auto rep = validate_triple(points, eps, u, v, tol);
  if (!rep.ok()) throw Error("make_triple: " + first_failure(rep));
  std::vector<double> ur(u.size());
  for (size_t i = 0; i < u.size(); ++i) ur[i] = u[i].real();
  return LineBundleTriple(points, std::move(eps), std::move(ur));
}

tau::PresentedData line_bundle_data(const LineBundleTriple& t,
                                    std::shared_ptr<const cqg::Model> model,
                                    const Tol& tol, int max_word) {
  const int n = t.points;
  auto base = ba::make_base(std::vector<int>(size_t(n), 1));
  auto sinv = inverse_perm(t.eps);
  auto ep = ba::line_bimodule(base, t.eps);
  auto em = ba::line_bimodule(base, sinv);
  auto tp = ba::tensor_over_m(ep, em, tol);
  auto tm = ba::tensor_over_m(em, ep, tol);
  auto reg = ba::regular_bimodule(base);

  // Forward pairing carries v on the (generator, conjugate) words, reverse
  // carries u; the splittings invert them so the loop through either side
  // closes to the identity.
  MatC fwd(n, n * n), bwd(n, n * n), cof(n * n, n), cob(n * n, n);
  for (int i = 0; i < n; ++i) {
    int si = t.eps[size_t(i)], isi = sinv[size_t(i)];
    fwd.at(i, i * n + si) = t.v[size_t(i)];
    bwd.at(i, i * n + isi) = t.u[size_t(i)];
    cof.at(i * n + si, i) = 1.0 / t.v[size_t(i)];
    cob.at(i * n + isi, i) = 1.0 / t.u[size_t(i)];
  }
  ba::BimoduleMap pair_fwd{tp.space, reg, fwd * tp.section, 0};
  ba::BimoduleMap pair_bwd{tm.space, reg, bwd * tm.section, 0};
  ba::BimoduleMap split_fwd{reg, tp.space, tp.factor.mat * cof, 0};
  ba::BimoduleMap split_bwd{reg, tm.space, tm.factor.mat * cob, 0};

  MatC pmat(n, n), qmat(n, n);
  for (int i = 0; i < n; ++i) {
    pmat.at(i, sinv[size_t(i)]) = 1;
    qmat.at(i, t.eps[size_t(i)]) = 1;
  }

  tau::PresentedData d;
  d.model = std::move(model);
  d.base = base;
  d.generators = {"1", "-1"};
  d.modules = {ep, em};
  MatC one = MatC::identity(1);
  d.arrows = {{"mu", {}, {0, 1}, one, pair_fwd},
              {"mubar", {}, {1, 0}, one, pair_bwd},
              {"nu", {1, 0}, {}, one, split_bwd},
              {"nubar", {0, 1}, {}, one, split_fwd}};
  d.diamonds = {ba::BimoduleMap{ep, em, pmat, 1},
                ba::BimoduleMap{em, ep, qmat, 1}};
  d.max_word = max_word;
  return d;
}

std::shared_ptr<tau::PresentedTau> line_bundle_from_triple(
    const LineBundleTriple& t, std::shared_ptr<const cqg::Model> model,
    const Tol& tol) {
  return std::make_shared<tau::PresentedTau>(
      line_bundle_data(t, std::move(model), tol), tol);
}

Report pairing_compatibility(const LineBundleTriple& t,
                             std::shared_ptr<const cqg::Model> model,
                             const Tol& tol) {
  auto d = line_bundle_data(t, std::move(model), tol);
  const auto& ep = d.modules[0];
  const auto& em = d.modules[1];
  auto reg = ba::regular_bimodule(d.base);
  auto tp = ba::tensor_over_m(ep, em, tol);
  auto tm = ba::tensor_over_m(em, ep, tol);
  const auto& pair_fwd = d.arrows[0].image;
  const auto& pair_bwd = d.arrows[1].image;

  Report rep;
  rep.subject = "pairing exchange identities";
  {
    auto p1 = ba::tensor_over_m(tm.space, em, tol);
    auto p2 = ba::tensor_over_m(reg, em, tol);
    auto p3 = ba::tensor_over_m(em, tp.space, tol);
    auto p4 = ba::tensor_over_m(em, reg, tol);
    auto lhs = ba::compose(
        ba::left_unitor(p2),
        ba::tensor_map(pair_bwd, ba::identity_map(em), p1, p2));
    auto rhs = ba::compose(
        ba::right_unitor(p4),
        ba::tensor_map(ba::identity_map(em), pair_fwd, p3, p4));
    double r =
        ba::map_residual(lhs, ba::compose(rhs, ba::associator(tm, p1, tp, p3)));
    rep.add("reverse pairing on the left leg matches forward on the right",
            r <= 1e3 * tol.abs_tol, r);
  }
  {
    auto q1 = ba::tensor_over_m(tp.space, ep, tol);
    auto q2 = ba::tensor_over_m(reg, ep, tol);
    auto q3 = ba::tensor_over_m(ep, tm.space, tol);
    auto q4 = ba::tensor_over_m(ep, reg, tol);
    auto lhs = ba::compose(
        ba::left_unitor(q2),
        ba::tensor_map(pair_fwd, ba::identity_map(ep), q1, q2));
    auto rhs = ba::compose(
        ba::right_unitor(q4),
        ba::tensor_map(ba::identity_map(ep), pair_bwd, q3, q4));
    double r =
        ba::map_residual(lhs, ba::compose(rhs, ba::associator(tp, q1, tm, q3)));
    rep.add("forward pairing on the left leg matches reverse on the right",
            r <= 1e3 * tol.abs_tol, r);
  }
  return rep;
}

LineBundleTriple triple_from_line_bundle(const tau::TauRep& t,
                                         const Tol& tol) {
  if (t.model().table().name() != "u1")
    throw Error("triple_from_line_bundle: not a circle group representation");
  const auto& base = t.base();
  for (int b : base->blocks())
    if (b != 1)
      throw Error("triple_from_line_bundle: base is not commutative");
  const int n = base->dim();

  cqg::Corep u = cqg::leaf("1");
  auto e = t.module(u);
  if (e.dim != n)
    throw Error("triple_from_line_bundle: generator module is not rank one");

  // The frame convention puts carrier index j at point j; the right action
  // then reads off the permutation directly.
  std::vector<int> s(size_t(n), -1);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double lv = std::abs(e.left[size_t(k)].at(j, j));
      if (std::abs(lv - (k == j ? 1.0 : 0.0)) > 0.5)
        throw Error("triple_from_line_bundle: module is not in the pointwise frame");
    }
    int hit = -1;
    for (int k = 0; k < n; ++k)
      if (std::abs(e.right[size_t(k)].at(j, j)) > 0.5) {
        if (hit >= 0)
          throw Error("triple_from_line_bundle: right action is not a twist");
        hit = k;
      }
    if (hit < 0)
      throw Error("triple_from_line_bundle: right action is not a twist");
    s[size_t(j)] = hit;
  }
  if (!is_permutation(n, s))
    throw Error("triple_from_line_bundle: right twist is not a permutation");
  auto sinv = inverse_perm(s);

  // u from the reverse pairing, v from the forward one, both read in the
  // plain tensor coordinates of the theta products.
  auto pr = tau::pairings(t, u);
  MatC pm = pr.pair_minus.mat * pr.conj_split.product.factor.mat;
  MatC pp = pr.pair_plus.mat * pr.split.product.factor.mat;
  std::vector<double> uu(size_t(n), 0.0);
  std::vector<double> vv(size_t(n), 0.0);
  double off = 0, im = 0;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n * n; ++c) {
      Complex zm = pm.at(a, c), zp = pp.at(a, c);
      if (c == a * n + sinv[size_t(a)]) {
        uu[size_t(a)] = zm.real();
        im = std::max(im, std::abs(zm.imag()));
      } else {
        off = std::max(off, std::abs(zm));
      }
      if (c == a * n + s[size_t(a)]) {
        vv[size_t(a)] = zp.real();
        im = std::max(im, std::abs(zp.imag()));
      } else {
        off = std::max(off, std::abs(zp));
      }
    }
  if (off > 1e3 * tol.abs_tol)
    throw Error("triple_from_line_bundle: pairings do not follow the twist");
  if (im > 1e3 * tol.abs_tol)
    throw Error("triple_from_line_bundle: recovered u is not real");
  for (int i = 0; i < n; ++i)
    if (std::abs(vv[size_t(i)] - uu[size_t(s[size_t(i)])]) > 1e3 * tol.abs_tol)
      throw Error("triple_from_line_bundle: pairing weights are inconsistent");

  return LineBundleTriple(n, std::move(s), std::move(uu));
}

namespace {

// Duality arrows of the generator plus the loop relation whose scalar is
// the trace of the canonical intertwiner.
tau::GeneratingSubcategory duality_relations(const cqg::Model& m,
                                             const cqg::Corep& u) {
  tau::GeneratingSubcategory r;
  r.generators = {u, cqg::conj(u)};
  r.arrows = {{"coev", m.coev(u)},
              {"ev", m.ev(u)},
              {"coev_tw", m.coev_twisted(u)},
              {"ev_tw", m.ev_twisted(u)}};
  tau::GeneratingSubcategory::Relation rel;
  rel.name = "loop";
  rel.chain = {m.ev_twisted(u), m.coev(u)};
  rel.scalar = m.canonical_c(u).trace();
  r.relations.push_back(rel);
  return r;
}

void circle_point_search(Report& rep, std::shared_ptr<const cqg::Model> model,
                         int max_label, const Tol& tol) {
  // Multiplicative dimension vectors d over the window: d(0) = 1 and
  // d(a)d(b) = d(a+b) whenever the sum stays inside.
  const int dmax = 6;
  int survivors = 0;
  bool constant_found = false;
  for (int d1 = 1; d1 <= dmax; ++d1)
    for (int dm = 1; dm <= dmax; ++dm) {
      auto dim_of = [&](int k) {
        long r = 1;
        for (int i = 0; i < std::abs(k); ++i) r *= (k > 0 ? d1 : dm);
        return r;
      };
      bool ok = true;
      for (int a = -max_label; a <= max_label && ok; ++a)
        for (int b = -max_label; b <= max_label && ok; ++b) {
          if (std::abs(a + b) > max_label) continue;
          if (dim_of(a) * dim_of(b) != dim_of(a + b)) ok = false;
        }
      if (ok) {
        ++survivors;
        if (d1 == 1 && dm == 1) constant_found = true;
      }
    }
  rep.add("constant dimension vector is the only multiplicative one",
          survivors == 1 && constant_found, std::abs(survivors - 1.0));

  // The group algebra itself over the window, as scalar tables.
  std::vector<cqg::Label> win{"0"};
  for (int k = 1; k <= max_label; ++k) {
    win.push_back(std::to_string(k));
    win.push_back(std::to_string(-k));
  }
  MatC one = MatC::identity(1);
  auto pbase = ba::make_base({1});
  ba::Bimodule pline{pbase, 1, {one}, {one}};
  std::map<cqg::Label, ba::Bimodule> comps;
  std::map<std::pair<cqg::Label, cqg::Label>, std::vector<pb::ProductChannel>>
      prods;
  std::map<cqg::Label, pb::StarChannel> stars;
  for (int k = -max_label; k <= max_label; ++k) {
    comps.emplace(std::to_string(k), pline);
    stars.emplace(std::to_string(k),
                  pb::StarChannel{std::to_string(-k), one, one});
  }
  for (int a = -max_label; a <= max_label; ++a)
    for (int b = -max_label; b <= max_label; ++b) {
      if (std::abs(a + b) > max_label) continue;
      prods[{std::to_string(a), std::to_string(b)}] = {
          {std::to_string(a + b), one, one}};
    }
  pb::Bundle group_algebra(model, pbase, comps, prods, stars);

  // Solve the scalar constraints at sampled weights; every solution must be
  // gauge equivalent to the group algebra.
  auto relations = duality_relations(*model, cqg::leaf("1"));
  bool all_equivalent = true;
  for (double uval : {1.0, 2.0, 0.5}) {
    LineBundleTriple tr(1, {0}, {uval});
    auto data = line_bundle_data(tr, model, tol,
                                 std::max(6, 2 * max_label));
    auto pt = std::make_shared<tau::PresentedTau>(data, tol);
    auto val = tau::validate(*pt, relations, tol);
    rep.add("solution u=" + fmt(uval) + " validates", val.ok(),
            worst_residual(val));
    auto bd = pb::Bundle::reconstruct(pt);
    auto cert = pb::scalar_gauge_certificate(group_algebra, bd, win, tol);
    rep.add("solution u=" + fmt(uval) +
                " is gauge equivalent to the group algebra",
            cert.ok(), worst_residual(cert));
    all_equivalent = all_equivalent && val.ok() && cert.ok();
  }
  rep.add("number of classes up to isomorphism",
          survivors == 1 && all_equivalent, 0, "1");
}

void spin_point_search(Report& rep, std::shared_ptr<const cqg::Model> model,
                       int max_label, const Tol& tol) {
  cqg::Corep half = cqg::leaf("1/2");
  double loop = model->canonical_c(half).trace().real();

  // d(1/2) = e determines the whole vector through the product with the
  // generator: d(j+1/2) = e d(j) - d(j-1/2).
  const int emax = 6;
  int admitted = 0;
  for (int e = 1; e <= emax; ++e) {
    long prev = 1, cur = e;
    bool positive = cur > 0;
    for (int k = 2; k <= 2 * max_label && positive; ++k) {
      long nxt = e * cur - prev;
      if (nxt <= 0) positive = false;
      prev = cur;
      cur = nxt;
    }
    std::string tag = "d(1/2)=" + std::to_string(e);
    if (!positive) {
      rep.add(tag + " rejected: dimension recursion leaves the positives",
              true);
      continue;
    }
    // A positive self-pairing with tr P = tr inv(P) = loop obeys
    // 2 loop = sum(l + 1/l) >= 2e.
    if (double(e) > loop + 1e-9) {
      rep.add(tag + " rejected: pairing trace bound " + fmt(loop), true);
      continue;
    }
    ++admitted;
    rep.add(tag + " admitted", true);
  }
  rep.add("exactly one admissible dimension vector", admitted == 1,
          std::abs(admitted - 1.0));

  // Canonical construction for the admitted vector.
  auto t0 = std::make_shared<tau::TrivialTau>(model, ba::make_base({1}));
  auto val = tau::validate(*t0, duality_relations(*model, half), tol);
  rep.add("canonical point bundle validates", val.ok(), worst_residual(val));
  auto bd = pb::Bundle::reconstruct(t0);
  auto ax = pb::verify_bundle_axioms(bd, {"0", "1/2"}, 2, 2, tol);
  rep.add("canonical point bundle satisfies the bundle axioms", ax.ok(),
          worst_residual(ax));
  auto fr = pb::verify_freeness(bd, "1/2", tol);
  rep.add("canonical point bundle pairing is free", fr.ok(),
          worst_residual(fr));

  // Uniqueness: with e = 2 the positive pairing has matching traces, so its
  // eigenvalues are the roots of x^2 - loop x + 1, a forced multiset.
  double disc = loop * loop - 4;
  double l1 = (loop + std::sqrt(std::max(0.0, disc))) / 2;
  double l2 = (loop - std::sqrt(std::max(0.0, disc))) / 2;
  rep.add("pairing spectrum is forced", l2 > 0,
          0, "{" + fmt(l1) + ", " + fmt(l2) + "}");
  rep.add("number of classes up to isomorphism",
          admitted == 1 && val.ok() && ax.ok() && fr.ok() && l2 > 0, 0, "1");
}

}  // namespace

Report point_bundle_search(const std::string& group, int max_label,
                           const Tol& tol) {
  Report rep;
  rep.subject = "point bundle search: " + group;
  int level = std::max(12, 2 * max_label + 2);
  auto table = cqg::table_from_selector(group, level);
  auto model = std::make_shared<cqg::Model>(table);
  if (table->name() == "u1")
    circle_point_search(rep, model, max_label, tol);
  else
    spin_point_search(rep, model, max_label, tol);
  return rep;
}

}  // namespace qpb::cl
