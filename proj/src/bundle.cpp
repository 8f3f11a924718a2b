#include "qpb/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace qpb::pb {

namespace {

MatC basis_col(int dim, int i) {
  MatC v(dim, 1);
  v.at(i, 0) = 1.0;
  return v;
}

void ct_accumulate(CoactionTensor& t,
                   const std::pair<cqg::Label, cqg::Label>& key,
                   const MatC& block) {
  auto it = t.find(key);
  if (it == t.end()) {
    t.emplace(key, block);
    return;
  }
  it->second = it->second + block;
}

}  // namespace

const MatC* BundleElement::part(const cqg::Label& label) const {
  for (const auto& p : parts)
    if (p.first == label) return &p.second;
  return nullptr;
}

void BundleElement::accumulate(const cqg::Label& label, const MatC& block) {
  auto it = std::lower_bound(
      parts.begin(), parts.end(), label,
      [](const std::pair<cqg::Label, MatC>& p, const cqg::Label& l) {
        return p.first < l;
      });
  if (it != parts.end() && it->first == label) {
    it->second = it->second + block;
    return;
  }
  parts.insert(it, {label, block});
}

BundleElement be_add(const BundleElement& a, const BundleElement& b) {
  BundleElement out = a;
  for (const auto& p : b.parts) out.accumulate(p.first, p.second);
  return out;
}

BundleElement be_scale(Complex c, const BundleElement& a) {
  BundleElement out = a;
  for (auto& p : out.parts) p.second = c * p.second;
  return out;
}

double be_norm(const BundleElement& a) {
  double m = 0;
  for (const auto& p : a.parts) m = std::max(m, p.second.max_abs());
  return m;
}

double be_residual(const BundleElement& a, const BundleElement& b) {
  double m = 0;
  for (const auto& p : a.parts) {
    const MatC* q = b.part(p.first);
    m = std::max(m, q ? residual(p.second, *q) : p.second.max_abs());
  }
  for (const auto& p : b.parts)
    if (!a.part(p.first)) m = std::max(m, p.second.max_abs());
  return m;
}

Bundle Bundle::reconstruct(std::shared_ptr<const tau::TauRep> t) {
  if (!t) throw Error("bundle: null representation");
  Bundle b;
  b.tau_ = std::move(t);
  b.model_ = b.tau_->shared_model();
  b.base_ = b.tau_->base();
  return b;
}

Bundle::Bundle(std::shared_ptr<const cqg::Model> model, ba::Base base,
               std::map<cqg::Label, ba::Bimodule> components,
               std::map<std::pair<cqg::Label, cqg::Label>,
                        std::vector<ProductChannel>>
                   products,
               std::map<cqg::Label, StarChannel> stars)
    : model_(std::move(model)),
      base_(std::move(base)),
      components_(std::move(components)),
      products_(std::move(products)),
      stars_(std::move(stars)) {
  if (!model_ || !base_) throw Error("bundle: null model or base");
}

const ba::Bimodule& Bundle::component(const cqg::Label& g) const {
  auto it = components_.find(g);
  if (it != components_.end()) return it->second;
  if (!tau_) throw Error("bundle: no component stored for label " + g);
  return components_.emplace(g, tau_->module(cqg::leaf(g))).first->second;
}

const std::vector<ProductChannel>& Bundle::product_channels(
    const cqg::Label& a, const cqg::Label& b) const {
  auto key = std::make_pair(a, b);
  auto it = products_.find(key);
  if (it != products_.end()) return it->second;
  if (!tau_)
    throw Error("bundle: no product table for (" + a + ", " + b + ")");
  cqg::Corep u = cqg::leaf(a), v = cqg::leaf(b);
  tau::ThetaMap th = tau_->theta(u, v);
  MatC to_word = th.inverse.mat * th.product.factor.mat;
  std::vector<ProductChannel> chans;
  for (const auto& [g, kappa] : model_->table().fuse(a, b)) {
    cqg::MorElement km{cqg::leaf(g), cqg::prod(u, v), kappa, 0};
    chans.push_back({g, tau_->rho(km).mat * to_word, kappa.conj()});
    (void)component(g);
  }
  return products_.emplace(std::move(key), std::move(chans)).first->second;
}

const StarChannel& Bundle::star_channel(const cqg::Label& g) const {
  auto it = stars_.find(g);
  if (it != stars_.end()) return it->second;
  if (!tau_) throw Error("bundle: no star table for label " + g);
  cqg::Corep u = cqg::leaf(g), cu = cqg::conj(u);
  const auto& dc = model_->dec(cu);
  const cqg::Label& gb = dc[0].first;
  const MatC& n = dc[0].second;
  cqg::MorElement nm{cqg::leaf(gb), cu, n, 0};
  ba::BimoduleMap d = ba::compose(tau_->rho(nm), tau_->diamond(u));
  (void)component(gb);
  StarChannel sc{gb, d.mat, inverse(n, Tol{}) * model_->jl(u)};
  return stars_.emplace(g, std::move(sc)).first->second;
}

std::vector<cqg::Label> Bundle::stored_labels() const {
  std::vector<cqg::Label> out;
  out.reserve(components_.size());
  for (const auto& p : components_) out.push_back(p.first);
  return out;
}

BundleElement Bundle::from_base(const MatC& v) const {
  cqg::Label t = model_->table().trivial();
  const ba::Bimodule& e = component(t);
  if (e.dim != base_->dim())
    throw Error("bundle: trivial component does not carry the base algebra");
  if (v.rows() != e.dim || v.cols() != 1)
    throw Error("bundle: base element has the wrong dimension");
  BundleElement b;
  b.parts.push_back({t, v});
  return b;
}

BundleElement Bundle::unit() const { return from_base(base_->one()); }

BundleElement Bundle::multiply(const BundleElement& x,
                               const BundleElement& y) const {
  BundleElement out;
  for (const auto& [a, xa] : x.parts)
    for (const auto& [b, yb] : y.parts) {
      MatC xy = kron(xa, yb);
      for (const ProductChannel& ch : product_channels(a, b))
        out.accumulate(ch.out, ch.emat * xy * ch.hmat);
    }
  return out;
}

BundleElement Bundle::star(const BundleElement& x) const {
  BundleElement out;
  for (const auto& [a, xa] : x.parts) {
    const StarChannel& sc = star_channel(a);
    out.accumulate(sc.out, sc.emat * xa.conj() * sc.hmat.transpose());
  }
  return out;
}

BundleElement Bundle::random_element(
    Rng& rng, const std::vector<cqg::Label>& support) const {
  std::vector<cqg::Label> s = support;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  BundleElement b;
  for (const cqg::Label& g : s) {
    int e = component(g).dim;
    int d = model_->table().dim(g);
    b.parts.push_back({g, rng.matrix(e, d)});
  }
  return b;
}

CoactionTensor coact(const Bundle& bd, const BundleElement& b) {
  CoactionTensor t;
  for (const auto& [g, Z] : b.parts) {
    int e = Z.rows(), d = Z.cols();
    MatC M(e * d, d * d);
    for (int z = 0; z < e; ++z)
      for (int s = 0; s < d; ++s)
        for (int w = 0; w < d; ++w)
          M.at(z * d + s, s * d + w) = Z.at(z, w);
    ct_accumulate(t, {g, g}, M);
  }
  return t;
}

CoactionTensor coact_product(const Bundle& bd, const BundleElement& x,
                             const BundleElement& y) {
  CoactionTensor t;
  for (const auto& [a, X] : x.parts)
    for (const auto& [b, Y] : y.parts) {
      const auto& chans = bd.product_channels(a, b);
      const auto& fus = bd.model().table().fuse(a, b);
      MatC xy = kron(X, Y);
      for (const ProductChannel& ch : chans) {
        int e = ch.emat.rows();
        int dc = ch.hmat.cols();
        for (const auto& [h, kappa] : fus) {
          MatC a1 = ch.emat * xy * kappa.conj();
          MatC a2 = ch.hmat.transpose() * kappa;
          int dh = a1.cols();
          MatC M(e * dc, dh * dh);
          for (int z = 0; z < e; ++z)
            for (int s = 0; s < dc; ++s)
              for (int w = 0; w < dh; ++w)
                for (int tt = 0; tt < dh; ++tt)
                  M.at(z * dc + s, w * dh + tt) = a1.at(z, tt) * a2.at(s, w);
          ct_accumulate(t, {ch.out, h}, M);
        }
      }
    }
  return t;
}

CoactionTensor coact_times_unit(const Bundle& bd, const BundleElement& b) {
  cqg::Label triv = bd.model().table().trivial();
  CoactionTensor t;
  for (const auto& [g, Z] : b.parts) {
    int e = Z.rows(), d = Z.cols();
    MatC M(e * d, 1);
    for (int z = 0; z < e; ++z)
      for (int s = 0; s < d; ++s) M.at(z * d + s, 0) = Z.at(z, s);
    ct_accumulate(t, {g, triv}, M);
  }
  return t;
}

double ct_residual(const CoactionTensor& a, const CoactionTensor& b) {
  double m = 0;
  for (const auto& [key, M] : a) {
    auto it = b.find(key);
    if (it == b.end()) {
      m = std::max(m, M.max_abs());
      continue;
    }
    if (it->second.rows() != M.rows() || it->second.cols() != M.cols())
      throw Error("bundle: coaction blocks have mismatched shapes");
    m = std::max(m, residual(M, it->second));
  }
  for (const auto& [key, M] : b)
    if (!a.count(key)) m = std::max(m, M.max_abs());
  return m;
}

namespace {

// (id (x) counit) applied to a coaction tensor.
BundleElement counit_contract(const cqg::Model& model, const CoactionTensor& f) {
  BundleElement out;
  for (const auto& [key, M] : f) {
    int dg = model.table().dim(key.first);
    int dh = model.table().dim(key.second);
    int e = M.rows() / dg;
    MatC Z(e, dg);
    for (int z = 0; z < e; ++z)
      for (int s = 0; s < dg; ++s) {
        Complex acc = 0;
        for (int w = 0; w < dh; ++w) acc += M.at(z * dg + s, w * dh + w);
        Z.at(z, s) = acc;
      }
    out.accumulate(key.first, Z);
  }
  return out;
}

// Compare coacting again on the left leg with splitting the right leg by the
// coproduct; both produce a three-leg tensor.
double coassoc_residual(const cqg::Model& model, const CoactionTensor& f) {
  std::map<std::string, MatC> s1, s2;
  for (const auto& [key, M] : f) {
    const cqg::Label& g = key.first;
    const cqg::Label& h = key.second;
    int dg = model.table().dim(g);
    int dh = model.table().dim(h);
    int e = M.rows() / dg;
    MatC& A =
        s1.try_emplace(g + "|" + g + "|" + h, MatC(e * dg, dg * dg * dh * dh))
            .first->second;
    MatC& B =
        s2.try_emplace(g + "|" + h + "|" + h, MatC(e * dg, dh * dh * dh * dh))
            .first->second;
    for (int z = 0; z < e; ++z)
      for (int s = 0; s < dg; ++s)
        for (int w = 0; w < dh; ++w)
          for (int t = 0; t < dh; ++t) {
            Complex val = M.at(z * dg + s, w * dh + t);
            if (val == Complex(0)) continue;
            for (int a = 0; a < dg; ++a)
              A.at(z * dg + a, (a * dg + s) * dh * dh + w * dh + t) =
                  A.at(z * dg + a, (a * dg + s) * dh * dh + w * dh + t) + val;
            for (int m = 0; m < dh; ++m)
              B.at(z * dg + s, (w * dh + m) * dh * dh + m * dh + t) =
                  B.at(z * dg + s, (w * dh + m) * dh * dh + m * dh + t) + val;
          }
  }
  double r = 0;
  for (const auto& [k, A] : s1) {
    auto it = s2.find(k);
    if (it == s2.end()) {
      r = std::max(r, A.max_abs());
      continue;
    }
    r = std::max(r, residual(A, it->second));
  }
  for (const auto& [k, B] : s2)
    if (!s1.count(k)) r = std::max(r, B.max_abs());
  return r;
}

int invariant_nullity(const Bundle& bd, const cqg::Label& g, const Tol& tol) {
  const ba::Bimodule& comp = bd.component(g);
  int e = comp.dim, d = bd.model().table().dim(g);
  // Fix the block layout from the first basis element.
  std::vector<std::pair<cqg::Label, cqg::Label>> keys;
  std::vector<int> offs;
  int total = 0;
  auto probe = [&](int z0, int t0) {
    BundleElement b;
    MatC Z(e, d);
    Z.at(z0, t0) = 1.0;
    b.parts.push_back({g, Z});
    CoactionTensor f = coact(bd, b);
    CoactionTensor u = coact_times_unit(bd, b);
    for (const auto& [key, M] : u) {
      auto it = f.find(key);
      if (it == f.end())
        f.emplace(key, Complex(-1.0) * M);
      else
        it->second = it->second - M;
    }
    return f;
  };
  CoactionTensor first = probe(0, 0);
  for (const auto& [key, M] : first) {
    keys.push_back(key);
    offs.push_back(total);
    total += M.rows() * M.cols();
  }
  MatC A(total, e * d);
  for (int z0 = 0; z0 < e; ++z0)
    for (int t0 = 0; t0 < d; ++t0) {
      CoactionTensor f = probe(z0, t0);
      for (size_t k = 0; k < keys.size(); ++k) {
        auto it = f.find(keys[k]);
        if (it == f.end()) continue;
        const MatC& M = it->second;
        for (int r = 0; r < M.rows(); ++r)
          for (int c = 0; c < M.cols(); ++c)
            A.at(offs[k] + r * M.cols() + c, z0 * d + t0) = M.at(r, c);
      }
    }
  return nullspace(A, tol).cols();
}

}  // namespace

Report verify_bundle_axioms(const Bundle& bd,
                            const std::vector<cqg::Label>& support,
                            unsigned seed, int samples, const Tol& tol) {
  Report rep;
  rep.subject = "bundle axioms";
  Rng rng(seed);
  std::vector<BundleElement> els;
  for (int i = 0; i < samples; ++i)
    els.push_back(bd.random_element(rng, support));

  BundleElement one = bd.unit();
  double r = 0;
  for (const auto& b : els) {
    r = std::max(r, be_residual(bd.multiply(one, b), b));
    r = std::max(r, be_residual(bd.multiply(b, one), b));
  }
  rep.add("unit element is neutral", r <= tol.abs_tol, r);

  int nv = bd.base()->dim();
  double rm = 0, rs = 0;
  for (int i = 0; i < nv; ++i) {
    MatC ei = basis_col(nv, i);
    rs = std::max(rs, be_residual(bd.star(bd.from_base(ei)),
                                  bd.from_base(bd.base()->star(ei))));
    for (int j = 0; j < nv; ++j) {
      MatC ej = basis_col(nv, j);
      rm = std::max(
          rm, be_residual(bd.multiply(bd.from_base(ei), bd.from_base(ej)),
                          bd.from_base(bd.base()->mul(ei, ej))));
    }
  }
  rep.add("base inclusion is multiplicative", rm <= tol.abs_tol, rm);
  rep.add("base inclusion preserves star", rs <= tol.abs_tol, rs);

  r = 0;
  for (const auto& b : els)
    r = std::max(r, be_residual(counit_contract(bd.model(), coact(bd, b)), b));
  rep.add("counit law on the coaction", r <= tol.abs_tol, r);

  r = 0;
  for (const auto& b : els)
    r = std::max(r, coassoc_residual(bd.model(), coact(bd, b)));
  rep.add("coaction is coassociative", r <= tol.abs_tol, r);

  r = 0;
  for (const auto& x : els)
    for (const auto& y : els)
      r = std::max(r, ct_residual(coact(bd, bd.multiply(x, y)),
                                  coact_product(bd, x, y)));
  rep.add("coaction is an algebra map", r <= tol.abs_tol, r);

  cqg::Label triv = bd.model().table().trivial();
  for (const cqg::Label& g : support) {
    int nul = invariant_nullity(bd, g, tol);
    int expect = g == triv ? bd.base()->dim() : 0;
    rep.add("invariants match the base image (" + g + ")", nul == expect,
            double(std::abs(nul - expect)));
  }

  r = 0;
  for (const auto& b : els) r = std::max(r, be_residual(bd.star(bd.star(b)), b));
  rep.add("star is an involution", r <= tol.abs_tol, r);

  r = 0;
  for (const auto& x : els)
    for (const auto& y : els)
      r = std::max(r, be_residual(bd.star(bd.multiply(x, y)),
                                  bd.multiply(bd.star(y), bd.star(x))));
  rep.add("star reverses products", r <= tol.abs_tol, r);

  return rep;
}

Report verify_associativity(const Bundle& bd,
                            const std::vector<cqg::Label>& support,
                            unsigned seed, int triples, const Tol& tol) {
  Report rep;
  rep.subject = "bundle associativity";
  Rng rng(seed);
  double worst = 0;
  for (int i = 0; i < triples; ++i) {
    BundleElement a = bd.random_element(rng, support);
    BundleElement b = bd.random_element(rng, support);
    BundleElement c = bd.random_element(rng, support);
    worst = std::max(worst,
                     be_residual(bd.multiply(bd.multiply(a, b), c),
                                 bd.multiply(a, bd.multiply(b, c))));
  }
  rep.add("product is associative on seeded triples", worst <= tol.abs_tol,
          worst, std::to_string(triples) + " triples");
  return rep;
}

Report verify_freeness(const Bundle& bd, const cqg::Label& g, const Tol& tol) {
  if (!bd.tau())
    throw Error("bundle: freeness check needs a functor-backed bundle");
  const tau::TauRep& t = *bd.tau();
  const cqg::Model& model = bd.model();
  cqg::Corep u = cqg::leaf(g), cu = cqg::conj(u);

  tau::Pairings p = tau::pairings(t, u);
  MatC w0 = p.conj_split.product.section * (p.unit.mat * bd.base()->one());

  const auto& dc = model.dec(cu);
  const cqg::Label& gb = dc[0].first;
  const MatC& n = dc[0].second;
  cqg::MorElement nm{cqg::leaf(gb), cu, n, 0};
  MatC tn = t.rho(nm).mat;
  int eu = bd.component(g).dim;
  MatC w = kron(tn, MatC::identity(eu)) * w0;

  MatC ninv = inverse(n, Tol{});
  MatC jm = model.jl(u);
  MatC pair = model.pairing(u);
  int d = model.dim(u);

  Report rep;
  rep.subject = "freeness " + g;
  BundleElement uone = bd.unit();
  const auto& chans = bd.product_channels(gb, g);
  double worst = 0;
  for (int a = 0; a < d; ++a) {
    MatC f = jm * basis_col(d, a).conj();
    MatC h = ninv * f;
    for (int b = 0; b < d; ++b) {
      MatC xb = basis_col(d, b);
      MatC m = w * kron(h, xb).transpose();
      BundleElement lhs;
      for (const ProductChannel& ch : chans)
        lhs.accumulate(ch.out, ch.emat * m * ch.hmat);
      Complex val = (f.transpose() * pair * xb).at(0, 0);
      worst = std::max(worst, be_residual(lhs, be_scale(val, uone)));
    }
  }
  rep.add("dual frames reproduce the base pairing", worst <= tol.abs_tol,
          worst, std::to_string(d * d) + " carrier pairs");
  return rep;
}

namespace {

struct WordEval {
  ba::Bimodule module;
  int carrier = 1;
  std::vector<std::vector<BundleElement>> T;  // [module idx][carrier idx]
};

struct Layout {
  std::vector<cqg::Label> labels;
  std::vector<int> offset;
  int total = 0;
};

Layout make_layout(const Bundle& bd,
                   const std::vector<const WordEval*>& evs) {
  std::set<cqg::Label> seen;
  for (const WordEval* ev : evs)
    for (const auto& row : ev->T)
      for (const BundleElement& b : row)
        for (const auto& pp : b.parts) seen.insert(pp.first);
  Layout l;
  for (const cqg::Label& g : seen) {
    l.labels.push_back(g);
    l.offset.push_back(l.total);
    l.total += bd.component(g).dim * bd.model().table().dim(g);
  }
  return l;
}

void be_stack(const Bundle& bd, const Layout& l, const BundleElement& b,
              MatC& out, int row0, int col) {
  for (const auto& [g, Z] : b.parts) {
    auto it = std::lower_bound(l.labels.begin(), l.labels.end(), g);
    if (it == l.labels.end() || *it != g)
      throw Error("bundle: element leaves the extraction window");
    int off = l.offset[size_t(it - l.labels.begin())];
    for (int r = 0; r < Z.rows(); ++r)
      for (int c = 0; c < Z.cols(); ++c)
        out.at(row0 + off + r * Z.cols() + c, col) = Z.at(r, c);
  }
}

}  // namespace

ExtractSpec duality_extract_spec(const cqg::Model& model,
                                 const std::vector<cqg::Label>& generators,
                                 int max_word, int max_depth) {
  ExtractSpec spec;
  spec.generators = generators;
  spec.max_word = max_word;
  spec.max_depth = max_depth;
  auto index_of = [&](const cqg::Label& g) {
    for (size_t i = 0; i < generators.size(); ++i)
      if (generators[i] == g) return int(i);
    throw Error("bundle: generators are not closed under conjugation");
  };
  std::set<cqg::Label> done;
  for (const cqg::Label& g : generators) {
    if (done.count(g)) continue;
    cqg::Label gb = model.table().conj(g);
    done.insert(g);
    done.insert(gb);
    int ig = index_of(g), igb = index_of(gb);

    cqg::Corep u = cqg::leaf(g), cu = cqg::conj(u), lb = cqg::leaf(gb);
    const auto& dc = model.dec(cu);
    const MatC& n = dc[0].second;
    cqg::MorElement nmor{lb, cu, n, 0};
    cqg::MorElement nmor_inv{cu, lb, inverse(n, Tol{}), 0};

    cqg::MorElement c0 = cqg::compose(
        cqg::tensor(model.identity(u), nmor_inv), model.coev(u));
    cqg::MorElement e0 = cqg::compose(
        model.ev(u), cqg::tensor(nmor, model.identity(u)));
    cqg::MorElement c0t = cqg::compose(
        cqg::tensor(nmor_inv, model.identity(u)), model.coev_twisted(u));
    cqg::MorElement e0t = cqg::compose(
        model.ev_twisted(u), cqg::tensor(model.identity(u), nmor));

    spec.arrows.push_back({"mu:" + g, {}, {ig, igb}, c0.mat});
    spec.arrows.push_back({"mubar:" + g, {}, {igb, ig}, c0t.mat});
    spec.arrows.push_back({"nu:" + g, {igb, ig}, {}, e0.mat});
    spec.arrows.push_back({"nubar:" + g, {ig, igb}, {}, e0t.mat});
  }
  return spec;
}

tau::PresentedData extract_tau(const Bundle& bd, const ExtractSpec& spec,
                               const Tol& tol) {
  const cqg::Model& model = bd.model();
  if (!bd.shared_model()) throw Error("bundle: extraction needs a model");
  tau::PresentedData data;
  data.model = bd.shared_model();
  data.base = bd.base();
  data.generators = spec.generators;
  data.max_word = spec.max_word;
  data.max_depth = spec.max_depth;
  for (const cqg::Label& g : spec.generators)
    data.modules.push_back(bd.component(g));

  std::map<std::vector<int>, WordEval> cache;
  std::function<const WordEval&(const std::vector<int>&)> eval =
      [&](const std::vector<int>& w) -> const WordEval& {
    auto it = cache.find(w);
    if (it != cache.end()) return it->second;
    WordEval we;
    if (w.empty()) {
      we.module = ba::regular_bimodule(data.base);
      we.carrier = 1;
      we.T.resize(size_t(we.module.dim));
      for (int k = 0; k < we.module.dim; ++k)
        we.T[size_t(k)] = {bd.from_base(basis_col(we.module.dim, k))};
    } else if (w.size() == 1) {
      const cqg::Label& g = spec.generators[size_t(w[0])];
      we.module = bd.component(g);
      we.carrier = model.table().dim(g);
      we.T.assign(size_t(we.module.dim),
                  std::vector<BundleElement>(size_t(we.carrier)));
      for (int i = 0; i < we.module.dim; ++i)
        for (int j = 0; j < we.carrier; ++j) {
          MatC Z(we.module.dim, we.carrier);
          Z.at(i, j) = 1.0;
          we.T[size_t(i)][size_t(j)].parts.push_back({g, Z});
        }
    } else {
      std::vector<int> head(w.begin(), w.end() - 1);
      const WordEval& prev = eval(head);
      const WordEval& last = eval({w.back()});
      ba::TensorProduct tp = ba::tensor_over_m(prev.module, last.module, Tol{});
      we.module = tp.space;
      we.carrier = prev.carrier * last.carrier;
      we.T.assign(size_t(we.module.dim),
                  std::vector<BundleElement>(size_t(we.carrier)));
      for (int i = 0; i < we.module.dim; ++i)
        for (int i1 = 0; i1 < prev.module.dim; ++i1)
          for (int i2 = 0; i2 < last.module.dim; ++i2) {
            Complex c = tp.section.at(i1 * last.module.dim + i2, i);
            if (std::abs(c) < 1e-15) continue;
            for (int j1 = 0; j1 < prev.carrier; ++j1)
              for (int j2 = 0; j2 < last.carrier; ++j2) {
                BundleElement prod = bd.multiply(prev.T[size_t(i1)][size_t(j1)],
                                                 last.T[size_t(i2)][size_t(j2)]);
                auto& slot = we.T[size_t(i)][size_t(j1 * last.carrier + j2)];
                slot = be_add(slot, be_scale(c, prod));
              }
          }
    }
    return cache.emplace(w, std::move(we)).first->second;
  };

  for (const ExtractArrow& ar : spec.arrows) {
    const WordEval& S = eval(ar.src);
    const WordEval& T = eval(ar.tgt);
    if (ar.mat.rows() != T.carrier || ar.mat.cols() != S.carrier)
      throw Error("bundle: arrow '" + ar.name +
                  "' has a carrier matrix of the wrong shape");
    Layout lay = make_layout(bd, {&S, &T});
    MatC A(lay.total * S.carrier, S.module.dim);
    for (int k = 0; k < S.module.dim; ++k)
      for (int j = 0; j < S.carrier; ++j)
        be_stack(bd, lay, S.T[size_t(k)][size_t(j)], A, lay.total * j, k);
    MatC rhs(lay.total * S.carrier, T.module.dim);
    for (int i = 0; i < T.module.dim; ++i)
      for (int j = 0; j < S.carrier; ++j) {
        BundleElement combo;
        for (int jp = 0; jp < T.carrier; ++jp) {
          Complex c = ar.mat.at(jp, j);
          if (c == Complex(0)) continue;
          combo = be_add(combo, be_scale(c, T.T[size_t(i)][size_t(jp)]));
        }
        be_stack(bd, lay, combo, rhs, lay.total * j, i);
      }
    MatC eta = lstsq(A, rhs, tol);
    double rr = residual(A * eta, rhs);
    if (rr > 1e3 * tol.abs_tol)
      throw Error("bundle: arrow image of '" + ar.name +
                  "' is outside the evaluation span");
    data.arrows.push_back(
        {ar.name, ar.src, ar.tgt, ar.mat,
         ba::BimoduleMap{T.module, S.module, eta, 0}});
  }

  for (const cqg::Label& g : spec.generators) {
    const StarChannel& sc = bd.star_channel(g);
    cqg::Label gb = model.table().conj(g);
    if (sc.out != gb)
      throw Error("bundle: star table of " + g +
                  " does not land at the conjugate label");
    cqg::Corep u = cqg::leaf(g);
    const MatC& n = model.dec(cqg::conj(u))[0].second;
    MatC want = inverse(n, Tol{}) * model.jl(u);
    if (residual(sc.hmat, want) > 1e3 * tol.abs_tol)
      throw Error("bundle: star table of " + g +
                  " is not in the canonical carrier frame");
    data.diamonds.push_back(
        ba::BimoduleMap{bd.component(g), bd.component(gb), sc.emat, 1});
  }
  return data;
}

Bundle materialize(const Bundle& bd, const std::vector<cqg::Label>& support) {
  std::map<cqg::Label, ba::Bimodule> comps;
  std::map<std::pair<cqg::Label, cqg::Label>, std::vector<ProductChannel>>
      prods;
  std::map<cqg::Label, StarChannel> stars;
  for (const cqg::Label& g : support) comps.emplace(g, bd.component(g));
  for (const cqg::Label& a : support)
    for (const cqg::Label& b : support) {
      const auto& chans = bd.product_channels(a, b);
      for (const ProductChannel& ch : chans)
        comps.emplace(ch.out, bd.component(ch.out));
      prods.emplace(std::make_pair(a, b), chans);
    }
  std::vector<cqg::Label> all;
  for (const auto& p : comps) all.push_back(p.first);
  for (const cqg::Label& g : all) {
    const StarChannel& sc = bd.star_channel(g);
    comps.emplace(sc.out, bd.component(sc.out));
    stars.emplace(g, sc);
    const StarChannel& back = bd.star_channel(sc.out);
    stars.emplace(sc.out, back);
  }
  return Bundle(bd.shared_model(), bd.base(), std::move(comps),
                std::move(prods), std::move(stars));
}

Report scalar_gauge_certificate(const Bundle& a, const Bundle& b,
                                const std::vector<cqg::Label>& labels,
                                const Tol& tol) {
  Report rep;
  rep.subject = "scalar gauge certificate";
  const cqg::Model& model = a.model();
  cqg::Label triv = model.table().trivial();
  for (const cqg::Label& g : labels)
    if (a.component(g).dim != 1 || b.component(g).dim != 1 ||
        model.table().dim(g) != 1)
      throw Error("bundle: gauge certificate needs one dimensional labels");

  std::set<cqg::Label> lset(labels.begin(), labels.end());
  auto fuse_out = [&](const cqg::Label& x, const cqg::Label& y) {
    const auto& f = model.table().fuse(x, y);
    if (f.size() != 1)
      throw Error("bundle: gauge certificate needs a single fusion channel");
    return f[0].first;
  };
  auto prod_scalar = [&](const Bundle& bd, const cqg::Label& x,
                         const cqg::Label& y) {
    const auto& chans = bd.product_channels(x, y);
    if (chans.size() != 1)
      throw Error("bundle: gauge certificate needs a single fusion channel");
    return chans[0].emat.at(0, 0) * chans[0].hmat.at(0, 0);
  };

  std::map<cqg::Label, Complex> lam;
  std::map<cqg::Label, std::map<cqg::Label, int>> expo;
  lam[triv] = 1.0;
  std::vector<cqg::Label> pins;
  std::string pinned;
  while (true) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (const cqg::Label& x : labels)
        for (const cqg::Label& y : labels) {
          cqg::Label oa = fuse_out(x, y);
          if (!lset.count(oa) && oa != triv) continue;
          Complex ma = prod_scalar(a, x, y);
          Complex mb = prod_scalar(b, x, y);
          int known =
              int(lam.count(x)) + int(lam.count(y)) + int(lam.count(oa));
          if (known != 2) continue;
          if (std::abs(ma) < 1e-14 || std::abs(mb) < 1e-14) continue;
          auto combine = [&](const cqg::Label& lhs, const cqg::Label& rhs,
                             int sign) {
            std::map<cqg::Label, int> e = expo[lhs];
            for (const auto& p : expo[rhs]) e[p.first] += sign * p.second;
            return e;
          };
          if (!lam.count(oa)) {
            lam[oa] = lam[x] * lam[y] * mb / ma;
            expo[oa] = combine(x, y, 1);
          } else if (!lam.count(x)) {
            lam[x] = lam[oa] * ma / (mb * lam[y]);
            expo[x] = combine(oa, y, -1);
          } else {
            lam[y] = lam[oa] * ma / (mb * lam[x]);
            expo[y] = combine(oa, x, -1);
          }
          progress = true;
        }
    }
    // One free character per independent generator; pin the first stuck
    // label in caller order and propagate again.
    auto it = std::find_if(labels.begin(), labels.end(),
                           [&](const cqg::Label& g) { return !lam.count(g); });
    if (it == labels.end()) break;
    lam[*it] = 1.0;
    expo[*it][*it] = 1;
    pins.push_back(*it);
    pinned += (pinned.empty() ? "" : ", ") + *it;
  }

  auto star_scalar = [&](const Bundle& bd, const cqg::Label& g) {
    const StarChannel& sc = bd.star_channel(g);
    return std::make_pair(sc.out, sc.emat.at(0, 0) * sc.hmat.at(0, 0));
  };

  // The products fix each scale only up to a positive modulus per pinned
  // label, and the star channels see exactly those moduli. Solve for them
  // in log space; an obstruction that no modulus can absorb stays visible
  // in the residual checks below.
  if (!pins.empty()) {
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (const cqg::Label& g : labels) {
      auto [ga, ta] = star_scalar(a, g);
      auto [gb, tb] = star_scalar(b, g);
      if (ga != gb) throw Error("bundle: star outputs disagree");
      if (!lam.count(ga)) continue;
      if (std::abs(ta) < 1e-14 || std::abs(tb) < 1e-14) continue;
      Complex r = ta * lam[ga] / (tb * std::conj(lam[g]));
      if (r.real() <= 0 || std::abs(r.imag()) > 1e-9 * std::abs(r)) continue;
      std::vector<double> row(pins.size(), 0.0);
      bool flat = true;
      for (size_t p = 0; p < pins.size(); ++p) {
        row[p] = expo[g][pins[p]] - expo[ga][pins[p]];
        if (row[p] != 0) flat = false;
      }
      if (flat) continue;
      rows.push_back(row);
      rhs.push_back(std::log(r.real()));
    }
    if (!rows.empty()) {
      MatC sys(rows.size(), pins.size()), off(rows.size(), 1);
      for (size_t i = 0; i < rows.size(); ++i) {
        off.at(i, 0) = rhs[i];
        for (size_t p = 0; p < pins.size(); ++p) sys.at(i, p) = rows[i][p];
      }
      MatC logm = lstsq(sys, off, tol);
      for (auto& kv : lam) {
        double scale = 0;
        for (size_t p = 0; p < pins.size(); ++p)
          scale += logm.at(p, 0).real() * expo[kv.first][pins[p]];
        kv.second *= std::exp(scale);
      }
    }
  }

  double worst = 0;
  for (const cqg::Label& x : labels)
    for (const cqg::Label& y : labels) {
      cqg::Label oa = fuse_out(x, y);
      if (!lam.count(oa)) continue;
      Complex ma = prod_scalar(a, x, y);
      Complex mb = prod_scalar(b, x, y);
      worst = std::max(worst, std::abs(mb * lam[x] * lam[y] / lam[oa] - ma));
    }
  rep.add("product scalars match after frame rescaling", worst <= tol.abs_tol,
          worst, pinned.empty() ? "" : "pinned " + pinned);

  double wstar = 0;
  for (const cqg::Label& g : labels) {
    const StarChannel& sa = a.star_channel(g);
    const StarChannel& sb = b.star_channel(g);
    if (sa.out != sb.out) throw Error("bundle: star outputs disagree");
    if (!lam.count(sa.out)) continue;
    Complex ta = sa.emat.at(0, 0) * sa.hmat.at(0, 0);
    Complex tb = sb.emat.at(0, 0) * sb.hmat.at(0, 0);
    wstar = std::max(wstar,
                     std::abs(tb * std::conj(lam[g]) / lam[sa.out] - ta));
  }
  rep.add("star scalars match after frame rescaling", wstar <= tol.abs_tol,
          wstar);
  return rep;
}

}  // namespace qpb::pb
