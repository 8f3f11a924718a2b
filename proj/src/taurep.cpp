#include "qpb/taurep.hpp"

#include <cmath>
#include <utility>

namespace qpb::tau {

namespace {

Complex inner(const MatC& a, const MatC& b) {
  Complex s = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      s += std::conj(a.at(i, j)) * b.at(i, j);
  return s;
}

// Best scalar c with target ~ c * pattern, and the residual of the match.
std::pair<Complex, double> scalar_match(const MatC& pattern,
                                        const MatC& target) {
  Complex nn = inner(pattern, pattern);
  if (std::abs(nn) < 1e-300) return {0.0, target.max_abs()};
  Complex c = inner(pattern, target) / nn;
  return {c, (target - c * pattern).max_abs()};
}

double rel_scale(const MatC& m) { return std::max(1.0, m.max_abs()); }

// The permutation part of the algebra star in basis coordinates.
MatC star_matrix(const ba::BaseAlgebra& v) {
  MatC s(v.dim(), v.dim());
  for (int i = 0; i < v.dim(); ++i) s.at(v.star_index(i), i) = 1.0;
  return s;
}

// Conjugate-tensor of two parity-1 intertwiners, x (x) y -> g(y) (x) f(x).
cqg::MorElement twisted_tensor(const cqg::Model& model,
                               const cqg::MorElement& f,
                               const cqg::MorElement& g) {
  if (f.parity != 1 || g.parity != 1)
    throw Error("twisted_tensor: both factors must have parity 1");
  MatC flip = tensor_flip<Complex>(model.dim(f.src), model.dim(g.src));
  return cqg::MorElement{cqg::prod(f.src, g.src), cqg::prod(g.tgt, f.tgt),
                         kron(g.mat, f.mat) * flip, 1};
}

// Identity-matrix intertwiner between corepresentations sharing a carrier,
// used for re-bracketing and unit insertion.
cqg::MorElement retype(const cqg::Model& model, const cqg::Corep& src,
                       const cqg::Corep& tgt) {
  int d = model.dim(src);
  if (model.dim(tgt) != d) throw Error("retype: carrier dimension mismatch");
  return cqg::MorElement{src, tgt, MatC::identity(d), 0};
}

}  // namespace

ba::BimoduleMap TauRep::rho_any(const cqg::MorElement& f) const {
  if (f.parity == 0) return rho(f);
  cqg::MorElement shifted = cqg::compose(model().jmor(f.tgt), f);
  return ba::compose(rho(shifted), diamond(f.tgt));
}

Report validate(const TauRep& t, const GeneratingSubcategory& r,
                const Tol& tol) {
  const cqg::Model& model = t.model();
  Report rep;
  rep.subject = "tau";

  for (const auto& g : r.generators) {
    cqg::Corep cg = cqg::conj(g);
    bool closed = false;
    for (const auto& h : r.generators) {
      if (model.dim(h) != model.dim(cg)) continue;
      for (const auto& m : model.mor_space(cg, h)) {
        bool invertible = true;
        try {
          inverse(m.mat, tol);
        } catch (const Error&) {
          invertible = false;
        }
        if (invertible) {
          closed = true;
          break;
        }
      }
      if (closed) break;
    }
    rep.add("generator " + cqg::to_string(g) + " conjugate closed", closed);
    rep.merge(check_bimodule(t.module(g), tol));
  }

  // Arrows: genuine intertwiners whose images preserve the grade and are
  // bimodule maps between the stated modules.
  std::vector<ba::BimoduleMap> images;
  for (const auto& [name, f] : r.arrows) {
    rep.merge(model.check_intertwiner(f));
    ba::BimoduleMap im = t.rho_any(f);
    images.push_back(im);
    rep.add("arrow " + name + " grade preserving", im.parity == f.parity);
    bool shapes = im.src.dim == t.module(f.tgt).dim &&
                  im.tgt.dim == t.module(f.src).dim;
    rep.add("arrow " + name + " contravariant shape", shapes);
    rep.add("arrow " + name + " image is a bimodule map",
            check_map(im, tol).ok());
  }

  // Functoriality on composable pairs whose composite is recognizable as a
  // scalar multiple of an identity or of another presented arrow.
  for (size_t i = 0; i < r.arrows.size(); ++i) {
    for (size_t j = 0; j < r.arrows.size(); ++j) {
      const auto& [fname, f] = r.arrows[i];
      const auto& [gname, g] = r.arrows[j];
      if (cqg::corep_key(f.src) != cqg::corep_key(g.tgt)) continue;
      cqg::MorElement h = cqg::compose(f, g);
      ba::BimoduleMap lhs = ba::compose(t.rho_any(g), t.rho_any(f));
      std::string label = "composite " + fname + " after " + gname;
      if (h.parity == 0 && cqg::corep_key(h.src) == cqg::corep_key(h.tgt)) {
        auto [c, res] = scalar_match(MatC::identity(h.mat.rows()), h.mat);
        if (res <= tol.abs_tol * rel_scale(h.mat)) {
          ba::BimoduleMap rhs = ba::scale(c, ba::identity_map(lhs.src));
          double d = ba::map_residual(lhs, rhs);
          rep.add(label + " acts as a scalar",
                  d <= tol.abs_tol * rel_scale(lhs.mat), d);
          continue;
        }
      }
      for (size_t k = 0; k < r.arrows.size(); ++k) {
        const auto& [pname, p] = r.arrows[k];
        if (p.parity != h.parity ||
            cqg::corep_key(p.src) != cqg::corep_key(h.src) ||
            cqg::corep_key(p.tgt) != cqg::corep_key(h.tgt))
          continue;
        auto [c, res] = scalar_match(p.mat, h.mat);
        if (res > tol.abs_tol * rel_scale(h.mat)) continue;
        // Scaling a parity-1 arrow scales its image by the conjugate.
        Complex cc = h.parity == 1 ? std::conj(c) : c;
        ba::BimoduleMap rhs = ba::scale(cc, images[k]);
        double d = ba::map_residual(lhs, rhs);
        rep.add(label + " matches " + pname,
                d <= tol.abs_tol * rel_scale(lhs.mat), d);
        break;
      }
    }
  }

  for (const auto& rel : r.relations) {
    if (rel.chain.empty()) continue;
    cqg::MorElement total = rel.chain.front();
    for (size_t i = 1; i < rel.chain.size(); ++i)
      total = cqg::compose(total, rel.chain[i]);
    double cres =
        (total.mat - rel.scalar * MatC::identity(total.mat.rows())).max_abs();
    bool cok = total.parity == 0 &&
               cqg::corep_key(total.src) == cqg::corep_key(total.tgt) &&
               cres <= tol.abs_tol * rel_scale(total.mat);
    rep.add("relation " + rel.name + " holds upstairs", cok, cres);
    if (!cok) continue;
    ba::BimoduleMap acc = t.rho_any(rel.chain.front());
    for (size_t i = 1; i < rel.chain.size(); ++i)
      acc = ba::compose(t.rho_any(rel.chain[i]), acc);
    ba::BimoduleMap want = ba::scale(rel.scalar, ba::identity_map(acc.src));
    double d = ba::map_residual(acc, want);
    rep.add("relation " + rel.name + " respected by the images",
            d <= tol.abs_tol * rel_scale(acc.mat), d);
  }

  // Multiplicativity of theta against presented arrows.
  for (size_t i = 0; i < r.arrows.size(); ++i) {
    for (size_t j = 0; j < r.arrows.size(); ++j) {
      const auto& [fname, f] = r.arrows[i];
      const auto& [gname, g] = r.arrows[j];
      if (f.parity != g.parity) continue;
      std::string label = "theta natural in " + fname + " x " + gname;
      ba::BimoduleMap lhs, rhs;
      if (f.parity == 0) {
        ThetaMap th_src = t.theta(f.src, g.src);
        ThetaMap th_tgt = t.theta(f.tgt, g.tgt);
        lhs = ba::compose(th_src.map, t.rho(cqg::tensor(f, g)));
        rhs = ba::compose(ba::tensor_map(t.rho(f), t.rho(g), th_tgt.product,
                                         th_src.product),
                          th_tgt.map);
      } else {
        ThetaMap th_src = t.theta(f.src, g.src);
        ThetaMap th_tgt = t.theta(g.tgt, f.tgt);
        lhs = ba::compose(th_src.map, t.rho_any(twisted_tensor(model, f, g)));
        rhs = ba::compose(ba::tensor_map(t.rho_any(g), t.rho_any(f),
                                         th_tgt.product, th_src.product),
                          th_tgt.map);
      }
      double d = ba::map_residual(lhs, rhs);
      rep.add(label, d <= tol.abs_tol * rel_scale(lhs.mat) * 10, d);
    }
  }

  // Coherence of theta across the two bracketings of a triple product.
  for (const auto& a : r.generators) {
    for (const auto& b : r.generators) {
      for (const auto& c : r.generators) {
        cqg::Corep ab = cqg::prod(a, b), bc = cqg::prod(b, c);
        ThetaMap th_ab = t.theta(a, b);
        ThetaMap th_bc = t.theta(b, c);
        ThetaMap th_ab_c = t.theta(ab, c);
        ThetaMap th_a_bc = t.theta(a, bc);
        ba::Bimodule ea = t.module(a), ec = t.module(c);
        ba::TensorProduct p2 = ba::tensor_over_m(th_ab.product.space, ec, tol);
        ba::TensorProduct p3 = ba::tensor_over_m(ea, th_bc.product.space, tol);
        ba::BimoduleMap reb =
            t.rho(retype(model, cqg::prod(a, bc), cqg::prod(ab, c)));
        ba::BimoduleMap lhs = ba::compose(
            ba::associator(th_ab.product, p2, th_bc.product, p3),
            ba::compose(ba::tensor_map(th_ab.map, ba::identity_map(ec),
                                       th_ab_c.product, p2),
                        th_ab_c.map));
        ba::BimoduleMap rhs =
            ba::compose(ba::tensor_map(ba::identity_map(ea), th_bc.map,
                                       th_a_bc.product, p3),
                        ba::compose(th_a_bc.map, reb));
        double d = ba::map_residual(lhs, rhs);
        rep.add("theta coherent on (" + cqg::to_string(a) + ", " +
                    cqg::to_string(b) + ", " + cqg::to_string(c) + ")",
                d <= tol.abs_tol * rel_scale(lhs.mat) * 10, d);
      }
    }
  }

  // Each theta on a generator pair is an isomorphism of bimodules.
  for (const auto& a : r.generators) {
    for (const auto& b : r.generators) {
      ThetaMap th = t.theta(a, b);
      std::string label =
          "theta (" + cqg::to_string(a) + ", " + cqg::to_string(b) + ")";
      rep.add(label + " is a bimodule map",
              check_map(th.map, tol).ok() && check_map(th.inverse, tol).ok());
      double d1 = ba::map_residual(ba::compose(th.map, th.inverse),
                                   ba::identity_map(th.product.space));
      double d2 = ba::map_residual(ba::compose(th.inverse, th.map),
                                   ba::identity_map(th.map.src));
      double d = std::max(d1, d2);
      rep.add(label + " invertible", d <= tol.abs_tol * 10, d);
    }
  }

  return rep;
}

Pairings pairings(const TauRep& t, const cqg::Corep& u) {
  const cqg::Model& model = t.model();
  cqg::Corep cu = cqg::conj(u);
  Pairings p{t.theta(cu, u), t.theta(u, cu), {}, {}, {}, {}};
  p.unit = ba::compose(p.conj_split.map, t.rho(model.ev(u)));
  p.unit_twisted = ba::compose(p.split.map, t.rho(model.ev_twisted(u)));
  p.pair_plus = ba::compose(t.rho(model.coev(u)), p.split.inverse);
  p.pair_minus =
      ba::compose(t.rho(model.coev_twisted(u)), p.conj_split.inverse);
  return p;
}

Report check_pairing_snakes(const TauRep& t, const cqg::Corep& u,
                            const Tol& tol) {
  const cqg::Model& model = t.model();
  Report rep;
  rep.subject = "snakes " + cqg::to_string(u);
  cqg::Corep cu = cqg::conj(u);
  cqg::Corep triv = model.trivial();

  // Insert a unit, grow a pair on one side, re-bracket, contract the pair on
  // the other side, drop the unit; the image composite must be the identity.
  auto run = [&](const std::string& name, const cqg::Corep& line,
                 const cqg::MorElement& grow, const cqg::MorElement& shrink,
                 bool grow_on_right) {
    std::vector<cqg::MorElement> chain;
    if (grow_on_right) {
      chain.push_back(retype(model, line, cqg::prod(line, triv)));
      chain.push_back(cqg::tensor(model.identity(line), grow));
      cqg::MorElement step = cqg::tensor(shrink, model.identity(line));
      chain.push_back(retype(model, chain.back().tgt, step.src));
      chain.push_back(step);
      chain.push_back(retype(model, step.tgt, line));
    } else {
      chain.push_back(retype(model, line, cqg::prod(triv, line)));
      chain.push_back(cqg::tensor(grow, model.identity(line)));
      cqg::MorElement step = cqg::tensor(model.identity(line), shrink);
      chain.push_back(retype(model, chain.back().tgt, step.src));
      chain.push_back(step);
      chain.push_back(retype(model, step.tgt, line));
    }
    ba::BimoduleMap acc = t.rho(chain.front());
    for (size_t i = 1; i < chain.size(); ++i)
      acc = ba::compose(acc, t.rho(chain[i]));
    double d = ba::map_residual(acc, ba::identity_map(t.module(line)));
    rep.add(name, d <= tol.abs_tol * rel_scale(acc.mat) * 10, d);
  };

  run("grow right with twisted unit, contract left", u, model.coev_twisted(u),
      model.ev_twisted(u), true);
  run("grow right with unit, contract left", cu, model.coev(u), model.ev(u),
      true);
  run("grow left with unit, contract right", u, model.coev(u), model.ev(u),
      false);
  run("grow left with twisted unit, contract right", cu,
      model.coev_twisted(u), model.ev_twisted(u), false);
  return rep;
}

TrivialTau::TrivialTau(std::shared_ptr<const cqg::Model> model, ba::Base base)
    : model_(std::move(model)), base_(std::move(base)) {
  star_perm_ = star_matrix(*base_);
}

ba::Bimodule TrivialTau::module(const cqg::Corep& u) const {
  int d = model_->dim(u);
  ba::Bimodule e;
  e.base = base_;
  e.dim = base_->dim() * d;
  MatC idd = MatC::identity(d);
  for (int i = 0; i < base_->dim(); ++i) {
    e.left.push_back(kron(base_->left_mul(i), idd));
    e.right.push_back(kron(base_->right_mul(i), idd));
  }
  return e;
}

ba::BimoduleMap TrivialTau::rho(const cqg::MorElement& f) const {
  if (f.parity != 0) throw Error("rho: parity-1 input, use rho_any");
  MatC idv = MatC::identity(base_->dim());
  return ba::BimoduleMap{module(f.tgt), module(f.src),
                         kron(idv, f.mat.transpose()), 0};
}

ba::BimoduleMap TrivialTau::diamond(const cqg::Corep& u) const {
  MatC jlu = model_->jl(u);
  MatC m = kron(star_perm_, inverse(jlu, model_->tol()).transpose());
  return ba::BimoduleMap{module(u), module(cqg::conj(u)), std::move(m), 1};
}

ThetaMap TrivialTau::theta(const cqg::Corep& u, const cqg::Corep& v) const {
  int du = model_->dim(u), dv = model_->dim(v);
  int dV = base_->dim();
  ba::Bimodule eu = module(u), ev = module(v);
  ThetaMap th{ba::tensor_over_m(eu, ev, model_->tol()), {}, {}};

  // E_{uxv} -> plain tensor, v (x) xi (x) zeta -> (v (x) xi) (x) (1 (x) zeta).
  MatC one = base_->one();
  MatC p(dV * du * dV * dv, dV * du * dv);
  for (int i = 0; i < dV; ++i)
    for (int a = 0; a < du; ++a)
      for (int j = 0; j < dV; ++j) {
        Complex oj = one.at(j, 0);
        if (oj == Complex(0)) continue;
        for (int b = 0; b < dv; ++b)
          p.at(((i * du + a) * dV + j) * dv + b, (i * du + a) * dv + b) = oj;
      }

  // Plain tensor -> E_{uxv}, multiply the algebra legs together.
  MatC m(dV * du * dv, dV * du * dV * dv);
  for (int i = 0; i < dV; ++i)
    for (int j = 0; j < dV; ++j) {
      MatC ei(dV, 1), ej(dV, 1);
      ei.at(i, 0) = 1.0;
      ej.at(j, 0) = 1.0;
      MatC prod_ij = base_->mul(ei, ej);
      for (int k = 0; k < dV; ++k) {
        Complex c = prod_ij.at(k, 0);
        if (c == Complex(0)) continue;
        for (int a = 0; a < du; ++a)
          for (int b = 0; b < dv; ++b)
            m.at((k * du + a) * dv + b, ((i * du + a) * dV + j) * dv + b) += c;
      }
    }

  ba::Bimodule euv = module(cqg::prod(u, v));
  th.map = ba::BimoduleMap{euv, th.product.space, th.product.factor.mat * p, 0};
  th.inverse =
      ba::BimoduleMap{th.product.space, euv, m * th.product.section, 0};
  return th;
}

ScaledThetaTau::ScaledThetaTau(std::shared_ptr<const TauRep> inner,
                               cqg::Corep u, cqg::Corep v, Complex factor)
    : inner_(std::move(inner)),
      ukey_(cqg::corep_key(u)),
      vkey_(cqg::corep_key(v)),
      factor_(factor) {}

ThetaMap ScaledThetaTau::theta(const cqg::Corep& u,
                               const cqg::Corep& v) const {
  ThetaMap th = inner_->theta(u, v);
  if (cqg::corep_key(u) == ukey_ && cqg::corep_key(v) == vkey_) {
    th.map = ba::scale(factor_, th.map);
    th.inverse = ba::scale(1.0 / factor_, th.inverse);
  }
  return th;
}

}  // namespace qpb::tau
