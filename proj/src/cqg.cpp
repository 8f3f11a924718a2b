#include "qpb/cqg.hpp"

#include <algorithm>
#include <cmath>

#include "qpb/scalar.hpp"

namespace qpb::cqg {

namespace {

Corep node(CorepNode n) { return std::make_shared<const CorepNode>(std::move(n)); }

}  // namespace

Corep leaf(const Label& l) {
  CorepNode n;
  n.kind = CorepNode::Kind::Leaf;
  n.label = l;
  return node(std::move(n));
}

Corep sum(const Corep& a, const Corep& b) {
  CorepNode n;
  n.kind = CorepNode::Kind::Sum;
  n.left = a;
  n.right = b;
  return node(std::move(n));
}

Corep prod(const Corep& a, const Corep& b) {
  CorepNode n;
  n.kind = CorepNode::Kind::Prod;
  n.left = a;
  n.right = b;
  return node(std::move(n));
}

Corep conj(const Corep& u) {
  switch (u->kind) {
    case CorepNode::Kind::Leaf: {
      CorepNode n;
      n.kind = CorepNode::Kind::Bar;
      n.label = u->label;
      n.bar_power = 1;
      return node(std::move(n));
    }
    case CorepNode::Kind::Bar: {
      CorepNode n = *u;
      n.bar_power += 1;
      return node(std::move(n));
    }
    case CorepNode::Kind::Sum:
      return sum(conj(u->left), conj(u->right));
    case CorepNode::Kind::Prod:
      return prod(conj(u->right), conj(u->left));
  }
  throw Error("conj: bad corep node");
}

Corep word(const std::vector<Corep>& factors) {
  if (factors.empty()) throw Error("word: empty factor list");
  Corep u = factors[0];
  for (size_t i = 1; i < factors.size(); ++i) u = prod(u, factors[i]);
  return u;
}

std::string corep_key(const Corep& u) {
  switch (u->kind) {
    case CorepNode::Kind::Leaf:
      return "l:" + u->label;
    case CorepNode::Kind::Bar:
      return "b" + std::to_string(u->bar_power) + ":" + u->label;
    case CorepNode::Kind::Sum:
      return "(+ " + corep_key(u->left) + " " + corep_key(u->right) + ")";
    case CorepNode::Kind::Prod:
      return "(* " + corep_key(u->left) + " " + corep_key(u->right) + ")";
  }
  throw Error("corep_key: bad corep node");
}

std::string to_string(const Corep& u) {
  switch (u->kind) {
    case CorepNode::Kind::Leaf:
      return u->label;
    case CorepNode::Kind::Bar:
      if (u->bar_power == 1) return "bar(" + u->label + ")";
      return "bar^" + std::to_string(u->bar_power) + "(" + u->label + ")";
    case CorepNode::Kind::Sum:
      return "(" + to_string(u->left) + " + " + to_string(u->right) + ")";
    case CorepNode::Kind::Prod:
      return "(" + to_string(u->left) + " x " + to_string(u->right) + ")";
  }
  throw Error("to_string: bad corep node");
}

Model::Model(std::shared_ptr<IrrepTable> table, Tol tol)
    : table_(std::move(table)), tol_(tol) {}

int Model::dim(const Corep& u) const {
  switch (u->kind) {
    case CorepNode::Kind::Leaf:
    case CorepNode::Kind::Bar:
      return table_->dim(u->label);
    case CorepNode::Kind::Sum:
      return dim(u->left) + dim(u->right);
    case CorepNode::Kind::Prod:
      return dim(u->left) * dim(u->right);
  }
  throw Error("dim: bad corep node");
}

MatC Model::gram(const Corep& u) const {
  switch (u->kind) {
    case CorepNode::Kind::Leaf:
      return MatC::identity(table_->dim(u->label));
    case CorepNode::Kind::Bar: {
      int d = table_->dim(u->label);
      MatC g = MatC::identity(d);
      MatC c = table_->cmat(u->label);
      for (int i = 0; i < u->bar_power; ++i) {
        g = inverse(g, tol_).transpose() * c.transpose();
        c = inverse(c, tol_).transpose();
      }
      return g;
    }
    case CorepNode::Kind::Sum:
      return direct_sum(gram(u->left), gram(u->right));
    case CorepNode::Kind::Prod:
      return kron(gram(u->left), gram(u->right));
  }
  throw Error("gram: bad corep node");
}

MatC Model::canonical_c(const Corep& u) const {
  switch (u->kind) {
    case CorepNode::Kind::Leaf:
      return table_->cmat(u->label);
    case CorepNode::Kind::Bar: {
      MatC c = table_->cmat(u->label);
      for (int i = 0; i < u->bar_power; ++i) c = inverse(c, tol_).transpose();
      return c;
    }
    case CorepNode::Kind::Sum:
      return direct_sum(canonical_c(u->left), canonical_c(u->right));
    case CorepNode::Kind::Prod:
      return kron(canonical_c(u->left), canonical_c(u->right));
  }
  throw Error("canonical_c: bad corep node");
}

MatC Model::jl(const Corep& u) const {
  switch (u->kind) {
    case CorepNode::Kind::Leaf:
      return MatC::identity(table_->dim(u->label));
    case CorepNode::Kind::Bar:
      return gram(u).transpose();
    case CorepNode::Kind::Sum:
      return direct_sum(jl(u->left), jl(u->right));
    case CorepNode::Kind::Prod:
      return kron(jl(u->right), jl(u->left)) *
             tensor_flip<Complex>(dim(u->left), dim(u->right));
  }
  throw Error("jl: bad corep node");
}

MatC Model::pairing(const Corep& u) const {
  switch (u->kind) {
    case CorepNode::Kind::Leaf:
    case CorepNode::Kind::Bar:
      return MatC::identity(table_->dim(u->label));
    case CorepNode::Kind::Sum:
      return direct_sum(pairing(u->left), pairing(u->right));
    case CorepNode::Kind::Prod:
      return kron(pairing(u->right), pairing(u->left)) *
             tensor_flip<Complex>(dim(u->left), dim(u->right));
  }
  throw Error("pairing: bad corep node");
}

MatC Model::conj_identification(const Label& alpha, int power) const {
  std::string key = alpha + "#" + std::to_string(power);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = w_cache_.find(key);
    if (it != w_cache_.end()) return it->second;
  }
  MatC w;
  if (power == 1) {
    Label bar = table_->conj(alpha);
    int d = table_->dim(alpha);
    int dbar = table_->dim(bar);
    if (d != dbar) throw Error("conjugate irrep dimension mismatch");
    MatC t;
    bool found = false;
    for (const auto& [g, iso] : table_->fuse(bar, alpha)) {
      if (g == table_->trivial()) {
        if (found) throw Error("trivial appears twice in conjugate fusion");
        t = iso;
        found = true;
      }
    }
    if (!found) throw Error("conjugate fusion lacks a trivial summand");
    MatC m = MatC(d, d);
    for (int p = 0; p < d; ++p)
      for (int i = 0; i < d; ++i) m.at(p, i) = t.at(p * d + i, 0);
    // The invariant functional dual to t sends y to conj(t)^T (y (x) .),
    // which reads H_bar -> H_alpha^* as the adjoint of the reshaped t.
    MatC raw = m.adjoint();
    Corep barleaf = conj(leaf(alpha));
    MatC s = raw.adjoint() * gram(barleaf) * raw;
    Complex lam = s.trace() * (1.0 / d);
    if (!(lam.real() > 0) || std::abs(lam.imag()) > tol_.abs_tol * lam.real())
      throw Error("conjugation identification is not positive");
    double scale = std::sqrt(lam.real());
    if (residual(s, lam * MatC::identity(d)) > tol_.rank_tol * lam.real() * d)
      throw Error("conjugation identification failed the Schur check");
    w = (1.0 / scale) * raw;
  } else {
    Corep prev_tgt = leaf(alpha);
    for (int i = 0; i < power - 1; ++i) prev_tgt = conj(prev_tgt);
    Label prev_label = alpha;
    for (int i = 0; i < power - 1; ++i) prev_label = table_->conj(prev_label);
    MatC wk = conj_identification(alpha, power - 1);
    // Conjugate of the previous identification, then the one-step map.
    MatC wc = jl(prev_tgt) * wk.conj();
    w = wc * conj_identification(prev_label, 1);
  }
  // Fix the overall phase: first significant entry real positive.
  double mx = w.max_abs();
  for (int i = 0; i < w.rows() && mx > 0; ++i) {
    bool done = false;
    for (int j = 0; j < w.cols(); ++j) {
      Complex x = w.at(i, j);
      if (std::abs(x) > 1e-7 * mx) {
        w = (std::conj(x) / std::abs(x)) * w;
        done = true;
        break;
      }
    }
    if (done) break;
  }
  std::lock_guard<std::mutex> lk(mu_);
  auto [it, inserted] = w_cache_.emplace(key, std::move(w));
  return it->second;
}

const std::vector<std::pair<Label, MatC>>& Model::dec(const Corep& u) const {
  std::string key = corep_key(u);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = dec_cache_.find(key);
    if (it != dec_cache_.end()) return it->second;
  }
  std::vector<std::pair<Label, MatC>> out;
  switch (u->kind) {
    case CorepNode::Kind::Leaf:
      out.emplace_back(u->label, MatC::identity(table_->dim(u->label)));
      break;
    case CorepNode::Kind::Bar: {
      Label l = u->label;
      for (int i = 0; i < u->bar_power; ++i) l = table_->conj(l);
      out.emplace_back(l, conj_identification(u->label, u->bar_power));
      break;
    }
    case CorepNode::Kind::Sum: {
      int da = dim(u->left), db = dim(u->right);
      for (const auto& [l, emb] : dec(u->left)) {
        MatC e = MatC(da + db, emb.cols());
        e.set_block(0, 0, emb);
        out.emplace_back(l, std::move(e));
      }
      for (const auto& [l, emb] : dec(u->right)) {
        MatC e = MatC(da + db, emb.cols());
        e.set_block(da, 0, emb);
        out.emplace_back(l, std::move(e));
      }
      break;
    }
    case CorepNode::Kind::Prod: {
      for (const auto& [l1, e1] : dec(u->left)) {
        for (const auto& [l2, e2] : dec(u->right)) {
          MatC e12 = kron(e1, e2);
          for (const auto& [g, iso] : table_->fuse(l1, l2))
            out.emplace_back(g, e12 * iso);
        }
      }
      break;
    }
  }
  std::lock_guard<std::mutex> lk(mu_);
  auto [it, inserted] = dec_cache_.emplace(key, std::move(out));
  return it->second;
}

MorElement Model::identity(const Corep& u) const {
  return MorElement{u, u, MatC::identity(dim(u)), 0};
}

MorElement Model::jmor(const Corep& u) const {
  return MorElement{u, cqg::conj(u), jl(u), 1};
}

MorElement Model::coev(const Corep& u) const {
  int d = dim(u);
  MatC minvt = inverse(pairing(u), tol_).transpose();
  MatC m = MatC(d * d, 1);
  for (int j = 0; j < d; ++j)
    for (int p = 0; p < d; ++p) m.at(j * d + p, 0) = minvt.at(p, j);
  return MorElement{trivial(), prod(u, cqg::conj(u)), std::move(m), 0};
}

MorElement Model::coev_twisted(const Corep& u) const {
  int d = dim(u);
  MatC a = inverse(pairing(u), tol_).transpose() *
           inverse(canonical_c(u), tol_).transpose();
  MatC m = MatC(d * d, 1);
  for (int p = 0; p < d; ++p)
    for (int j = 0; j < d; ++j) m.at(p * d + j, 0) = a.at(p, j);
  return MorElement{trivial(), prod(cqg::conj(u), u), std::move(m), 0};
}

MorElement Model::ev(const Corep& u) const {
  int d = dim(u);
  MatC pm = pairing(u);
  MatC m = MatC(1, d * d);
  for (int p = 0; p < d; ++p)
    for (int i = 0; i < d; ++i) m.at(0, p * d + i) = pm.at(p, i);
  return MorElement{prod(cqg::conj(u), u), trivial(), std::move(m), 0};
}

MorElement Model::ev_twisted(const Corep& u) const {
  int d = dim(u);
  MatC a = pairing(u) * canonical_c(u);
  MatC m = MatC(1, d * d);
  for (int i = 0; i < d; ++i)
    for (int p = 0; p < d; ++p) m.at(0, i * d + p) = a.at(p, i);
  return MorElement{prod(u, cqg::conj(u)), trivial(), std::move(m), 0};
}

std::vector<MorElement> Model::mor_space(const Corep& u, const Corep& v) const {
  const auto& du = dec(u);
  const auto& dv = dec(v);
  MatC gu = gram(u);
  std::vector<MorElement> basis;
  for (const auto& [lu, iu] : du) {
    MatC proj = iu.adjoint() * gu;  // G-adjoint of the embedding
    for (const auto& [lv, kv] : dv) {
      if (lu != lv) continue;
      basis.push_back(MorElement{u, v, kv * proj, 0});
    }
  }
  return basis;
}

MorElement Model::star(const MorElement& f) const {
  if (f.parity != 0) throw Error("star: parity-0 morphism required");
  return MorElement{f.tgt, f.src,
                    inverse(gram(f.src), tol_) * f.mat.adjoint() * gram(f.tgt),
                    0};
}

MorElement Model::conj_morphism(const MorElement& f) const {
  if (f.parity != 0) throw Error("conj_morphism: parity-0 morphism required");
  MatC m = jl(f.tgt) * f.mat.conj() * inverse(jl(f.src), tol_);
  return MorElement{cqg::conj(f.src), cqg::conj(f.tgt), std::move(m), 0};
}

Report Model::check_intertwiner(const MorElement& f) const {
  if (f.parity == 1) {
    MorElement g{f.src, cqg::conj(f.tgt), jl(f.tgt) * f.mat.conj(), 0};
    Report r = check_intertwiner(g);
    r.subject = "antilinear " + r.subject;
    return r;
  }
  Report r;
  r.subject = "intertwiner " + to_string(f.src) + " -> " + to_string(f.tgt);
  if (f.mat.rows() != dim(f.tgt) || f.mat.cols() != dim(f.src)) {
    r.add("shape", false, 0, "matrix does not match carrier dimensions");
    return r;
  }
  const auto& du = dec(f.src);
  const auto& dv = dec(f.tgt);
  MatC gu = gram(f.src), gv = gram(f.tgt);
  double off = 0, schur = 0;
  std::string worst;
  for (size_t j = 0; j < dv.size(); ++j) {
    MatC kproj = dv[j].second.adjoint() * gv;
    for (size_t i = 0; i < du.size(); ++i) {
      MatC b = kproj * f.mat * du[i].second;
      if (du[i].first != dv[j].first) {
        double m = b.max_abs();
        if (m > off) {
          off = m;
          worst = du[i].first + " vs " + dv[j].first;
        }
      } else {
        int d = b.rows();
        Complex lam = b.trace() * (1.0 / d);
        double m = residual(b, lam * MatC::identity(d));
        if (m > schur) schur = m;
      }
    }
  }
  double scale = std::max(1.0, f.mat.max_abs());
  r.add("blocks_between_distinct_irreps_vanish", off <= tol_.abs_tol * scale,
        off, worst.empty() ? std::string{} : "worst pair " + worst);
  r.add("blocks_on_matching_irreps_are_scalar", schur <= tol_.abs_tol * scale,
        schur);
  return r;
}

MorElement compose(const MorElement& f, const MorElement& g) {
  if (corep_key(f.src) != corep_key(g.tgt))
    throw Error("compose: middle corepresentations differ: " +
                to_string(f.src) + " vs " + to_string(g.tgt));
  MatC m = f.mat * (f.parity ? g.mat.conj() : g.mat);
  return MorElement{g.src, f.tgt, std::move(m), (f.parity + g.parity) % 2};
}

MorElement tensor(const MorElement& f, const MorElement& g) {
  if (f.parity != 0 || g.parity != 0)
    throw Error("tensor: parity-0 morphisms required");
  return MorElement{prod(f.src, g.src), prod(f.tgt, g.tgt),
                    kron(f.mat, g.mat), 0};
}

MorElement scale(const Complex& c, const MorElement& f) {
  return MorElement{f.src, f.tgt, c * f.mat, f.parity};
}

MorElement add(const MorElement& f, const MorElement& g) {
  if (corep_key(f.src) != corep_key(g.src) ||
      corep_key(f.tgt) != corep_key(g.tgt) || f.parity != g.parity)
    throw Error("add: morphism shapes differ");
  return MorElement{f.src, f.tgt, f.mat + g.mat, f.parity};
}

}  // namespace qpb::cqg
