#include "qpb/basealg.hpp"

#include <algorithm>
#include <utility>

#include "qpb/rng.hpp"

namespace qpb::ba {

namespace {

MatC basis_column(int dim, int i) {
  MatC c(dim, 1);
  c.at(i, 0) = 1.0;
  return c;
}

void require_same_base(const Bimodule& a, const Bimodule& b,
                       const char* where) {
  if (!a.base || !b.base || a.base->blocks() != b.base->blocks())
    throw Error(std::string(where) + ": bimodules over different bases");
}

}  // namespace

BaseAlgebra::BaseAlgebra(std::vector<int> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw Error("BaseAlgebra: empty block list");
  for (int n : blocks_) {
    if (n <= 0) throw Error("BaseAlgebra: block sizes must be positive");
    if (n > 1) commutative_ = false;
    dim_ += n * n;
  }
  one_ = MatC(dim_, 1);
  star_index_.resize(size_t(dim_));
  int offset = 0;
  for (int n : blocks_) {
    for (int p = 0; p < n; ++p) {
      one_.at(offset + p * n + p, 0) = 1.0;
      for (int q = 0; q < n; ++q)
        star_index_[size_t(offset + p * n + q)] = offset + q * n + p;
    }
    offset += n * n;
  }
  left_mul_.reserve(size_t(dim_));
  right_mul_.reserve(size_t(dim_));
  for (int i = 0; i < dim_; ++i) {
    left_mul_.push_back(MatC(dim_, dim_));
    right_mul_.push_back(MatC(dim_, dim_));
  }
  offset = 0;
  for (int n : blocks_) {
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) {
            // e_{pq} e_{rs} = [q == r] e_{ps}
            if (q != r) continue;
            int i = offset + p * n + q;
            int j = offset + r * n + s;
            int k = offset + p * n + s;
            left_mul_[size_t(i)].at(k, j) = 1.0;
            right_mul_[size_t(j)].at(k, i) = 1.0;
          }
    offset += n * n;
  }
}

int BaseAlgebra::unit_index(int block, int row, int col) const {
  if (block < 0 || block >= int(blocks_.size()))
    throw Error("BaseAlgebra: block index out of range");
  int n = blocks_[size_t(block)];
  if (row < 0 || row >= n || col < 0 || col >= n)
    throw Error("BaseAlgebra: matrix unit index out of range");
  int offset = 0;
  for (int b = 0; b < block; ++b) offset += blocks_[size_t(b)] * blocks_[size_t(b)];
  return offset + row * n + col;
}

MatC BaseAlgebra::mul(const MatC& a, const MatC& b) const {
  if (a.rows() != dim_ || a.cols() != 1 || b.rows() != dim_ || b.cols() != 1)
    throw Error("BaseAlgebra: element shape mismatch");
  MatC out(dim_, 1);
  for (int i = 0; i < dim_; ++i) {
    const Complex& ai = a.at(i, 0);
    if (ai == Complex(0)) continue;
    out = out + ai * (left_mul_[size_t(i)] * b);
  }
  return out;
}

MatC BaseAlgebra::star(const MatC& a) const {
  if (a.rows() != dim_ || a.cols() != 1)
    throw Error("BaseAlgebra: element shape mismatch");
  MatC out(dim_, 1);
  for (int i = 0; i < dim_; ++i)
    out.at(star_index_[size_t(i)], 0) = std::conj(a.at(i, 0));
  return out;
}

Base make_base(std::vector<int> blocks) {
  return std::make_shared<const BaseAlgebra>(std::move(blocks));
}

MatC Bimodule::left_act(const MatC& coeffs) const {
  MatC out(dim, dim);
  for (int i = 0; i < base->dim(); ++i) {
    const Complex& c = coeffs.at(i, 0);
    if (c == Complex(0)) continue;
    out = out + c * left[size_t(i)];
  }
  return out;
}

MatC Bimodule::right_act(const MatC& coeffs) const {
  MatC out(dim, dim);
  for (int i = 0; i < base->dim(); ++i) {
    const Complex& c = coeffs.at(i, 0);
    if (c == Complex(0)) continue;
    out = out + c * right[size_t(i)];
  }
  return out;
}

Report check_bimodule(const Bimodule& e, const Tol& tol) {
  Report rep;
  rep.subject = "bimodule";
  const int dv = e.base->dim();
  bool shapes = int(e.left.size()) == dv && int(e.right.size()) == dv;
  for (auto& m : e.left) shapes = shapes && m.rows() == e.dim && m.cols() == e.dim;
  for (auto& m : e.right) shapes = shapes && m.rows() == e.dim && m.cols() == e.dim;
  rep.add("action_shapes", shapes);
  if (!shapes) return rep;

  const MatC id = MatC::identity(e.dim);
  double runital = std::max(residual(e.left_act(e.base->one()), id),
                            residual(e.right_act(e.base->one()), id));
  rep.add("actions_unital", runital <= tol.abs_tol, runital);

  double rleft = 0, rright = 0, rcomm = 0;
  for (int i = 0; i < dv; ++i) {
    for (int j = 0; j < dv; ++j) {
      MatC eij = e.base->mul(basis_column(dv, i), basis_column(dv, j));
      rleft = std::max(rleft, residual(e.left[size_t(i)] * e.left[size_t(j)],
                                       e.left_act(eij)));
      MatC eji = e.base->mul(basis_column(dv, j), basis_column(dv, i));
      rright = std::max(rright, residual(e.right[size_t(i)] * e.right[size_t(j)],
                                         e.right_act(eji)));
      rcomm = std::max(rcomm, residual(e.left[size_t(i)] * e.right[size_t(j)],
                                       e.right[size_t(j)] * e.left[size_t(i)]));
    }
  }
  rep.add("left_action_multiplicative", rleft <= tol.abs_tol, rleft);
  rep.add("right_action_antimultiplicative", rright <= tol.abs_tol, rright);
  rep.add("actions_commute", rcomm <= tol.abs_tol, rcomm);
  return rep;
}

Bimodule regular_bimodule(const Base& base) {
  Bimodule e;
  e.base = base;
  e.dim = base->dim();
  for (int i = 0; i < base->dim(); ++i) {
    e.left.push_back(base->left_mul(i));
    e.right.push_back(base->right_mul(i));
  }
  return e;
}

Bimodule free_bimodule(const Base& base, int rank) {
  if (rank <= 0) throw Error("free_bimodule: rank must be positive");
  const int d = base->dim();
  const MatC ir = MatC::identity(rank), id = MatC::identity(d);
  Bimodule e;
  e.base = base;
  e.dim = rank * d * d;
  for (int i = 0; i < d; ++i) {
    e.left.push_back(kron(ir, kron(base->left_mul(i), id)));
    e.right.push_back(kron(ir, kron(id, base->right_mul(i))));
  }
  return e;
}

Bimodule char_bimodule(const Base& base, int p, int q) {
  if (!base->commutative())
    throw Error("char_bimodule: base must be commutative");
  const int d = base->dim();
  if (p < 0 || p >= d || q < 0 || q >= d)
    throw Error("char_bimodule: point out of range");
  Bimodule e;
  e.base = base;
  e.dim = 1;
  for (int i = 0; i < d; ++i) {
    MatC l(1, 1), r(1, 1);
    l.at(0, 0) = i == p ? 1.0 : 0.0;
    r.at(0, 0) = i == q ? 1.0 : 0.0;
    e.left.push_back(l);
    e.right.push_back(r);
  }
  return e;
}

Bimodule line_bimodule(const Base& base, const std::vector<int>& perm) {
  if (!base->commutative())
    throw Error("line_bimodule: base must be commutative");
  const int n = base->dim();
  if (int(perm.size()) != n) throw Error("line_bimodule: permutation size mismatch");
  std::vector<bool> seen(size_t(n), false);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[size_t(v)])
      throw Error("line_bimodule: not a permutation");
    seen[size_t(v)] = true;
  }
  Bimodule e;
  e.base = base;
  e.dim = n;
  for (int j = 0; j < n; ++j) {
    MatC l(n, n), r(n, n);
    l.at(j, j) = 1.0;
    for (int i = 0; i < n; ++i)
      if (perm[size_t(i)] == j) r.at(i, i) = 1.0;
    e.left.push_back(l);
    e.right.push_back(r);
  }
  return e;
}

Bimodule direct_sum(const Bimodule& a, const Bimodule& b) {
  require_same_base(a, b, "direct_sum");
  Bimodule e;
  e.base = a.base;
  e.dim = a.dim + b.dim;
  for (int i = 0; i < a.base->dim(); ++i) {
    e.left.push_back(direct_sum(a.left[size_t(i)], b.left[size_t(i)]));
    e.right.push_back(direct_sum(a.right[size_t(i)], b.right[size_t(i)]));
  }
  return e;
}

Report check_map(const BimoduleMap& f, const Tol& tol) {
  Report rep;
  rep.subject = "bimodule_map";
  bool shape = f.mat.rows() == f.tgt.dim && f.mat.cols() == f.src.dim &&
               f.src.base->blocks() == f.tgt.base->blocks() &&
               (f.parity == 0 || f.parity == 1);
  rep.add("shape", shape);
  if (!shape) return rep;
  const int dv = f.src.base->dim();
  double rl = 0, rr = 0;
  for (int i = 0; i < dv; ++i) {
    if (f.parity == 0) {
      rl = std::max(rl, residual(f.mat * f.src.left[size_t(i)],
                                 f.tgt.left[size_t(i)] * f.mat));
      rr = std::max(rr, residual(f.mat * f.src.right[size_t(i)],
                                 f.tgt.right[size_t(i)] * f.mat));
    } else {
      int is = f.src.base->star_index(i);
      rl = std::max(rl, residual(f.mat * f.src.left[size_t(i)].conj(),
                                 f.tgt.right[size_t(is)] * f.mat));
      rr = std::max(rr, residual(f.mat * f.src.right[size_t(i)].conj(),
                                 f.tgt.left[size_t(is)] * f.mat));
    }
  }
  double scale = std::max(1.0, f.mat.max_abs());
  if (f.parity == 0) {
    rep.add("commutes_with_left_action", rl <= tol.abs_tol * scale, rl);
    rep.add("commutes_with_right_action", rr <= tol.abs_tol * scale, rr);
  } else {
    rep.add("exchanges_left_with_right_action", rl <= tol.abs_tol * scale, rl);
    rep.add("exchanges_right_with_left_action", rr <= tol.abs_tol * scale, rr);
  }
  return rep;
}

BimoduleMap identity_map(const Bimodule& e) {
  return {e, e, MatC::identity(e.dim), 0};
}

BimoduleMap compose(const BimoduleMap& f, const BimoduleMap& g) {
  if (f.src.dim != g.tgt.dim) throw Error("compose: shape mismatch");
  MatC gm = f.parity == 1 ? g.mat.conj() : g.mat;
  return {g.src, f.tgt, f.mat * gm, (f.parity + g.parity) % 2};
}

BimoduleMap scale(const Complex& c, const BimoduleMap& f) {
  return {f.src, f.tgt, c * f.mat, f.parity};
}

BimoduleMap add(const BimoduleMap& f, const BimoduleMap& g) {
  if (f.parity != g.parity) throw Error("add: parity mismatch");
  return {f.src, f.tgt, f.mat + g.mat, f.parity};
}

BimoduleMap inverse_map(const BimoduleMap& f, const Tol& tol) {
  MatC inv = inverse(f.mat, tol);
  if (f.parity == 1) inv = inv.conj();
  return {f.tgt, f.src, inv, f.parity};
}

double map_residual(const BimoduleMap& f, const BimoduleMap& g) {
  if (f.parity != g.parity) throw Error("map_residual: parity mismatch");
  return residual(f.mat, g.mat);
}

TensorProduct tensor_over_m(const Bimodule& e, const Bimodule& f,
                            const Tol& tol) {
  require_same_base(e, f, "tensor_over_m");
  const int dv = e.base->dim();
  const MatC ie = MatC::identity(e.dim), iff = MatC::identity(f.dim);

  TensorProduct t;
  t.lhs = e;
  t.rhs = f;
  t.plain.base = e.base;
  t.plain.dim = e.dim * f.dim;
  for (int i = 0; i < dv; ++i) {
    t.plain.left.push_back(kron(e.left[size_t(i)], iff));
    t.plain.right.push_back(kron(ie, f.right[size_t(i)]));
  }

  MatC interchange;
  for (int i = 0; i < dv; ++i) {
    MatC gen = kron(e.right[size_t(i)], iff) - kron(ie, f.left[size_t(i)]);
    interchange = hstack(interchange, gen);
  }
  MatC q = nullspace(interchange.adjoint(), tol);

  t.space.base = e.base;
  t.space.dim = q.cols();
  MatC qa = q.adjoint();
  for (int i = 0; i < dv; ++i) {
    t.space.left.push_back(qa * t.plain.left[size_t(i)] * q);
    t.space.right.push_back(qa * t.plain.right[size_t(i)] * q);
  }
  t.factor = {t.plain, t.space, qa, 0};
  t.section = q;
  return t;
}

BimoduleMap tensor_map(const BimoduleMap& s, const BimoduleMap& t,
                       const TensorProduct& src, const TensorProduct& dst) {
  if (s.parity != t.parity) throw Error("tensor_map: parity mismatch");
  if (s.src.dim != src.lhs.dim || t.src.dim != src.rhs.dim)
    throw Error("tensor_map: source product mismatch");
  if (s.parity == 0) {
    if (s.tgt.dim != dst.lhs.dim || t.tgt.dim != dst.rhs.dim)
      throw Error("tensor_map: target product mismatch");
    MatC m = dst.factor.mat * kron(s.mat, t.mat) * src.section;
    return {src.space, dst.space, m, 0};
  }
  if (t.tgt.dim != dst.lhs.dim || s.tgt.dim != dst.rhs.dim)
    throw Error("tensor_map: target product mismatch");
  MatC flip = tensor_flip<Complex>(s.src.dim, t.src.dim);
  MatC m = dst.factor.mat * kron(t.mat, s.mat) * flip * src.section.conj();
  return {src.space, dst.space, m, 1};
}

BimoduleMap left_unitor(const TensorProduct& ve) {
  const Bimodule& e = ve.rhs;
  const int dv = ve.lhs.dim;
  if (dv != e.base->dim()) throw Error("left_unitor: left factor is not the algebra");
  MatC collapse(e.dim, dv * e.dim);
  for (int i = 0; i < dv; ++i)
    collapse.set_block(0, i * e.dim, e.left[size_t(i)]);
  return {ve.space, e, collapse * ve.section, 0};
}

BimoduleMap right_unitor(const TensorProduct& ev) {
  const Bimodule& e = ev.lhs;
  const int dv = ev.rhs.dim;
  if (dv != e.base->dim()) throw Error("right_unitor: right factor is not the algebra");
  MatC collapse(e.dim, e.dim * dv);
  for (int j = 0; j < dv; ++j) {
    const MatC& rj = e.right[size_t(j)];
    for (int i = 0; i < e.dim; ++i)
      for (int k = 0; k < e.dim; ++k) collapse.at(k, i * dv + j) = rj.at(k, i);
  }
  return {ev.space, e, collapse * ev.section, 0};
}

BimoduleMap associator(const TensorProduct& ef, const TensorProduct& ef_g,
                       const TensorProduct& fg, const TensorProduct& e_fg) {
  const int de = ef.lhs.dim, dg = ef_g.rhs.dim;
  if (ef_g.lhs.dim != ef.space.dim || e_fg.rhs.dim != fg.space.dim ||
      e_fg.lhs.dim != de || fg.lhs.dim != ef.rhs.dim || fg.rhs.dim != dg)
    throw Error("associator: shape mismatch");
  MatC m = e_fg.factor.mat * kron(MatC::identity(de), fg.factor.mat) *
           kron(ef.section, MatC::identity(dg)) * ef_g.section;
  return {ef_g.space, e_fg.space, m, 0};
}

std::vector<BimoduleMap> hom_space(const Bimodule& e, const Bimodule& f,
                                   int parity, const Tol& tol) {
  require_same_base(e, f, "hom_space");
  if (parity != 0 && parity != 1) throw Error("hom_space: bad parity");
  const int dv = e.base->dim();
  const int n = f.dim * e.dim;
  const MatC ie = MatC::identity(e.dim), iff = MatC::identity(f.dim);

  // Row-major vectorization: vec(A X B) = kron(A, B^T) vec(X).
  MatC normal(n, n);
  auto accumulate = [&](const MatC& c) { normal = normal + c.adjoint() * c; };
  for (int i = 0; i < dv; ++i) {
    if (parity == 0) {
      accumulate(kron(iff, e.left[size_t(i)].transpose()) -
                 kron(f.left[size_t(i)], ie));
      accumulate(kron(iff, e.right[size_t(i)].transpose()) -
                 kron(f.right[size_t(i)], ie));
    } else {
      int is = e.base->star_index(i);
      accumulate(kron(iff, e.left[size_t(i)].adjoint()) -
                 kron(f.right[size_t(is)], ie));
      accumulate(kron(iff, e.right[size_t(i)].adjoint()) -
                 kron(f.left[size_t(is)], ie));
    }
  }
  MatC basis = nullspace(normal, tol);
  std::vector<BimoduleMap> out;
  for (int k = 0; k < basis.cols(); ++k) {
    MatC m(f.dim, e.dim);
    for (int i = 0; i < f.dim; ++i)
      for (int j = 0; j < e.dim; ++j) m.at(i, j) = basis.at(i * e.dim + j, k);
    out.push_back({e, f, m, parity});
  }
  return out;
}

std::optional<BimoduleMap> find_isomorphism(const Bimodule& e,
                                            const Bimodule& f, unsigned seed,
                                            const Tol& tol) {
  if (e.dim != f.dim) return std::nullopt;
  auto basis = hom_space(e, f, 0, tol);
  if (basis.empty()) return std::nullopt;
  Rng rng(seed);
  for (int attempt = 0; attempt < 16; ++attempt) {
    MatC m(f.dim, e.dim);
    for (auto& b : basis) m = m + rng.complex_unit_ball() * b.mat;
    try {
      inverse(m, tol);
    } catch (const Error&) {
      continue;
    }
    return BimoduleMap{e, f, m, 0};
  }
  return std::nullopt;
}

ConjugateBimodule conjugate_bimodule(const Bimodule& e) {
  const int dv = e.base->dim();
  Bimodule c;
  c.base = e.base;
  c.dim = e.dim;
  c.left.resize(size_t(dv));
  c.right.resize(size_t(dv));
  for (int i = 0; i < dv; ++i) {
    int is = e.base->star_index(i);
    c.left[size_t(i)] = e.right[size_t(is)].conj();
    c.right[size_t(i)] = e.left[size_t(is)].conj();
  }
  ConjugateBimodule out;
  out.space = c;
  out.bar = {e, c, MatC::identity(e.dim), 1};
  return out;
}

ProjectivityCertificate projectivity_certificate(const Bimodule& e,
                                                 unsigned seed,
                                                 const Tol& tol) {
  for (int rank = 1; rank <= std::max(1, e.dim); ++rank) {
    Bimodule fr = free_bimodule(e.base, rank);
    auto in = hom_space(e, fr, 0, tol);
    auto out = hom_space(fr, e, 0, tol);
    if (in.empty() || out.empty()) continue;
    Rng rng(seed + unsigned(rank));
    for (int attempt = 0; attempt < 8; ++attempt) {
      MatC emb(fr.dim, e.dim);
      for (auto& b : in) emb = emb + rng.complex_unit_ball() * b.mat;
      // Solve for a projection in the hom space with projection * emb = id.
      MatC sys(e.dim * e.dim, int(out.size()));
      for (int k = 0; k < int(out.size()); ++k) {
        MatC pk = out[size_t(k)].mat * emb;
        for (int i = 0; i < e.dim; ++i)
          for (int j = 0; j < e.dim; ++j)
            sys.at(i * e.dim + j, k) = pk.at(i, j);
      }
      MatC rhs(e.dim * e.dim, 1);
      for (int i = 0; i < e.dim; ++i) rhs.at(i * e.dim + i, 0) = 1.0;
      MatC coeff = solve_particular(sys, rhs, tol);
      if (coeff.empty()) continue;
      MatC proj(e.dim, fr.dim);
      for (int k = 0; k < int(out.size()); ++k)
        proj = proj + coeff.at(k, 0) * out[size_t(k)].mat;
      double split = residual(proj * emb, MatC::identity(e.dim));
      if (split > tol.abs_tol) continue;

      ProjectivityCertificate cert;
      cert.rank = rank;
      cert.embed = {e, fr, emb, 0};
      cert.project = {fr, e, proj, 0};
      cert.report.subject = "projectivity";
      cert.report.add("splitting_identity", true, split);
      Report re = check_map(cert.embed);
      Report rp = check_map(cert.project);
      cert.report.add("embedding_is_bimodule_map", re.ok());
      cert.report.add("projection_is_bimodule_map", rp.ok());
      if (cert.report.ok()) return cert;
    }
  }
  throw Error("projectivity_certificate: no free splitting found");
}

}  // namespace qpb::ba
