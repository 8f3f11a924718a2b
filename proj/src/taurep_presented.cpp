#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qpb/taurep.hpp"

namespace qpb::tau {

namespace {

std::string word_key(const std::vector<int>& w) {
  std::string s = "w";
  for (int g : w) {
    s += '.';
    s += std::to_string(g);
  }
  return s;
}

std::string word_text(const std::vector<int>& w) {
  if (w.empty()) return "()";
  std::string s = "(";
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(w[i]);
  }
  return s + ")";
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

MatC vec(const MatC& m) {
  MatC v(m.rows() * m.cols(), 1);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v.at(i * m.cols() + j, 0) = m.at(i, j);
  return v;
}

Complex vdot(const MatC& a, const MatC& b) {
  Complex s = 0;
  for (int i = 0; i < a.rows(); ++i) s += std::conj(a.at(i, 0)) * b.at(i, 0);
  return s;
}

double vnorm(const MatC& a) {
  return std::sqrt(std::max(0.0, vdot(a, a).real()));
}

MatC star_matrix(const ba::BaseAlgebra& v) {
  MatC s(v.dim(), v.dim());
  for (int i = 0; i < v.dim(); ++i) s.at(v.star_index(i), i) = 1.0;
  return s;
}

}  // namespace

PresentedTau::PresentedTau(PresentedData data, Tol tol)
    : data_(std::move(data)), tol_(tol) {
  if (!data_.model || !data_.base)
    throw Error("presented tau: model and base are required");
  const auto& tab = data_.model->table();
  const size_t n = data_.generators.size();
  if (n == 0) throw Error("presented tau: at least one generator required");
  if (data_.modules.size() != n || data_.diamonds.size() != n)
    throw Error(
        "presented tau: one module and one conjugation map per generator");
  if (data_.max_word < 1) throw Error("presented tau: word bound must be >= 1");

  for (size_t i = 0; i < n; ++i) {
    const cqg::Label& lab = data_.generators[i];
    if (lab == tab.trivial())
      throw Error("presented tau: the trivial label is built in");
    int ci = -1;
    for (size_t j = 0; j < n; ++j)
      if (data_.generators[j] == tab.conj(lab)) ci = int(j);
    if (ci < 0)
      throw Error("presented tau: generators must be closed under conjugation");
    const ba::Bimodule& m = data_.modules[i];
    if (m.dim <= 0 || m.base != data_.base)
      throw Error("presented tau: generator module over the wrong base");
    const ba::BimoduleMap& dia = data_.diamonds[i];
    if (dia.parity != 1 || dia.mat.rows() != data_.modules[size_t(ci)].dim ||
        dia.mat.cols() != m.dim)
      throw Error("presented tau: conjugation map of generator '" + lab +
                  "' has the wrong shape");
  }

  for (const auto& a : data_.arrows) {
    if (int(a.src.size()) > data_.max_word ||
        int(a.tgt.size()) > data_.max_word)
      throw Error("presented tau: arrow '" + a.name +
                  "' exceeds the word bound");
    int ds = 1, dt = 1;
    for (int g : a.src) {
      if (g < 0 || size_t(g) >= n) throw Error("presented tau: bad arrow word");
      ds *= tab.dim(data_.generators[size_t(g)]);
    }
    for (int g : a.tgt) {
      if (g < 0 || size_t(g) >= n) throw Error("presented tau: bad arrow word");
      dt *= tab.dim(data_.generators[size_t(g)]);
    }
    if (a.mat.rows() != dt || a.mat.cols() != ds)
      throw Error("presented tau: arrow '" + a.name +
                  "' matrix does not match the word carriers");
    if (a.image.parity != 0)
      throw Error("presented tau: arrow images must have parity 0");
    if (a.image.mat.rows() != word_module(a.src).dim ||
        a.image.mat.cols() != word_module(a.tgt).dim)
      throw Error("presented tau: arrow '" + a.name +
                  "' image does not match the word modules");
  }
}

int PresentedTau::generator_index(const cqg::Label& lab) const {
  for (size_t i = 0; i < data_.generators.size(); ++i)
    if (data_.generators[i] == lab) return int(i);
  throw Error("presented tau: label '" + lab + "' is not a generator");
}

cqg::Corep PresentedTau::word_corep(const std::vector<int>& w) const {
  if (w.empty()) return data_.model->trivial();
  std::vector<cqg::Corep> parts;
  parts.reserve(w.size());
  for (int g : w) parts.push_back(cqg::leaf(data_.generators[size_t(g)]));
  return cqg::word(parts);
}

std::vector<int> PresentedTau::conj_word(const std::vector<int>& w) const {
  const auto& tab = data_.model->table();
  std::vector<int> out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    out.push_back(generator_index(tab.conj(data_.generators[size_t(*it)])));
  return out;
}

ba::Bimodule PresentedTau::word_module(const std::vector<int>& w) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const std::string key = word_key(w);
  auto it = wordmods_.find(key);
  if (it != wordmods_.end()) return it->second;
  ba::Bimodule m;
  if (w.empty()) {
    m = ba::regular_bimodule(data_.base);
  } else if (w.size() == 1) {
    m = data_.modules[size_t(w[0])];
  } else {
    std::vector<int> head(w.begin(), w.end() - 1);
    m = word_pair(head, {w.back()}).space;
  }
  wordmods_[key] = m;
  return m;
}

const ba::TensorProduct& PresentedTau::word_pair(
    const std::vector<int>& l, const std::vector<int>& r) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const std::string key = word_key(l) + "|" + word_key(r);
  auto it = pairs_.find(key);
  if (it == pairs_.end()) {
    auto tp = std::make_shared<ba::TensorProduct>(
        ba::tensor_over_m(word_module(l), word_module(r), tol_));
    it = pairs_.emplace(key, std::move(tp)).first;
  }
  return *it->second;
}

const ba::TensorProduct& PresentedTau::aux_pair(const std::string& key,
                                                const ba::Bimodule& a,
                                                const ba::Bimodule& b) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = pairs_.find(key);
  if (it == pairs_.end()) {
    auto tp =
        std::make_shared<ba::TensorProduct>(ba::tensor_over_m(a, b, tol_));
    it = pairs_.emplace(key, std::move(tp)).first;
  }
  return *it->second;
}

ba::BimoduleMap PresentedTau::word_split(const std::vector<int>& w,
                                         int k) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const int n = int(w.size());
  if (k < 0 || k > n) throw Error("word split: position out of range");
  const std::string key = word_key(w) + "#" + std::to_string(k);
  auto it = splits_.find(key);
  if (it != splits_.end()) return it->second;

  ba::BimoduleMap r;
  if (k == n) {
    r = ba::inverse_map(ba::right_unitor(word_pair(w, {})), tol_);
  } else if (k == 0) {
    r = ba::inverse_map(ba::left_unitor(word_pair({}, w)), tol_);
  } else if (k == n - 1) {
    std::vector<int> head(w.begin(), w.end() - 1);
    const ba::TensorProduct& p = word_pair(head, {w.back()});
    r = ba::BimoduleMap{p.space, p.space, MatC::identity(p.space.dim), 0};
  } else {
    std::vector<int> headk(w.begin(), w.begin() + k);
    std::vector<int> head(w.begin(), w.end() - 1);
    std::vector<int> mid(w.begin() + k, w.end() - 1);
    std::vector<int> tail(w.begin() + k, w.end());
    const int g = w.back();
    ba::BimoduleMap inner = word_split(head, k);
    const ba::TensorProduct& ab = word_pair(headk, mid);
    const ba::TensorProduct& bg = word_pair(mid, {g});
    const ba::TensorProduct& abg =
        aux_pair("aux:" + word_key(headk) + "|" + word_key(mid) + "|" +
                     std::to_string(g),
                 ab.space, word_module({g}));
    const ba::TensorProduct& a_bg = word_pair(headk, tail);
    ba::BimoduleMap step =
        ba::tensor_map(inner, ba::identity_map(word_module({g})),
                       word_pair(head, {g}), abg);
    r = ba::compose(ba::associator(ab, abg, bg, a_bg), step);
  }
  splits_[key] = r;
  return r;
}

ba::BimoduleMap PresentedTau::pad_image(const ba::BimoduleMap& image,
                                        const std::vector<int>& src,
                                        const std::vector<int>& tgt,
                                        const std::vector<int>& x,
                                        const std::vector<int>& y) const {
  ba::BimoduleMap im = image;
  std::vector<int> s = src, t = tgt;
  if (!y.empty()) {
    std::vector<int> sy = concat(s, y), ty = concat(t, y);
    im = ba::compose(
        ba::inverse_map(word_split(sy, int(s.size())), tol_),
        ba::compose(ba::tensor_map(im, ba::identity_map(word_module(y)),
                                   word_pair(t, y), word_pair(s, y)),
                    word_split(ty, int(t.size()))));
    s = sy;
    t = ty;
  }
  if (!x.empty()) {
    std::vector<int> xs = concat(x, s), xt = concat(x, t);
    im = ba::compose(
        ba::inverse_map(word_split(xs, int(x.size())), tol_),
        ba::compose(ba::tensor_map(ba::identity_map(word_module(x)), im,
                                   word_pair(x, t), word_pair(x, s)),
                    word_split(xt, int(x.size()))));
  }
  return im;
}

bool PresentedTau::span_add(SpanEntry& e, const MatC& mat,
                            const ba::BimoduleMap& image) const {
  MatC v = vec(mat);
  const double scale = vnorm(v);
  std::vector<Complex> coef(e.ortho.size(), Complex(0));
  MatC resid = v;
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t j = 0; j < e.ortho.size(); ++j) {
      Complex c = vdot(e.ortho[j], resid);
      coef[j] += c;
      resid = resid - c * e.ortho[j];
    }
  }
  const double rn = vnorm(resid);
  if (rn > tol_.rank_tol * std::max(1.0, scale)) {
    e.ortho.push_back((1.0 / rn) * resid);
    coef.push_back(rn);
    e.rcols.push_back(coef);
    e.mats.push_back(mat);
    e.images.push_back(image);
    return true;
  }
  // Dependent: the span solution must reproduce the image.
  const size_t kk = e.mats.size();
  std::vector<Complex> c(kk, Complex(0));
  for (size_t i = kk; i-- > 0;) {
    Complex t = coef[i];
    for (size_t j = i + 1; j < kk; ++j) t -= e.rcols[j][i] * c[j];
    c[i] = t / e.rcols[i][i];
  }
  MatC predicted(image.mat.rows(), image.mat.cols());
  for (size_t i = 0; i < kk; ++i)
    if (std::abs(c[i]) > 1e-14) predicted = predicted + c[i] * e.images[i].mat;
  double defect = (image.mat - predicted).max_abs() /
                  std::max(1.0, predicted.max_abs());
  e.defect = std::max(e.defect, defect);
  return false;
}

void PresentedTau::build_arrow_spans() const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (arrows_built_) return;
  const auto& tab = data_.model->table();
  const int n = int(data_.generators.size());
  const int L = data_.max_word;

  std::vector<std::vector<int>> words{{}};
  {
    std::vector<std::vector<int>> cur{{}};
    for (int len = 1; len <= L; ++len) {
      std::vector<std::vector<int>> next;
      for (const auto& w : cur)
        for (int g = 0; g < n; ++g) {
          std::vector<int> e = w;
          e.push_back(g);
          next.push_back(std::move(e));
        }
      for (const auto& w : next) words.push_back(w);
      cur = std::move(next);
    }
  }
  auto carrier_dim = [&](const std::vector<int>& w) {
    int d = 1;
    for (int g : w) d *= tab.dim(data_.generators[size_t(g)]);
    return d;
  };

  padded_.clear();
  for (const auto& a : data_.arrows) {
    const int extra = std::max(int(a.src.size()), int(a.tgt.size()));
    for (const auto& x : words) {
      for (const auto& y : words) {
        if (int(x.size()) + extra + int(y.size()) > L) continue;
        PaddedArrow p;
        p.src = concat(concat(x, a.src), y);
        p.tgt = concat(concat(x, a.tgt), y);
        p.mat = kron(kron(MatC::identity(carrier_dim(x)), a.mat),
                     MatC::identity(carrier_dim(y)));
        p.image = pad_image(a.image, a.src, a.tgt, x, y);
        padded_.push_back(std::move(p));
      }
    }
  }

  std::vector<std::pair<std::pair<std::string, std::string>, int>> work;
  auto try_add = [&](const std::vector<int>& s, const std::vector<int>& t,
                     const MatC& m, const ba::BimoduleMap& img) {
    auto key = std::make_pair(word_key(s), word_key(t));
    SpanEntry& e = spans_[key];
    if (e.mats.empty() && e.src.empty() && e.tgt.empty()) {
      e.src = s;
      e.tgt = t;
    }
    if (span_add(e, m, img)) work.emplace_back(key, int(e.mats.size()) - 1);
  };

  for (const auto& w : words)
    try_add(w, w, MatC::identity(carrier_dim(w)),
            ba::identity_map(word_module(w)));
  for (const auto& p : padded_) try_add(p.src, p.tgt, p.mat, p.image);

  for (int round = 0; round < data_.max_depth && !work.empty(); ++round) {
    auto fresh = std::move(work);
    work.clear();
    for (const auto& [key, idx] : fresh) {
      const SpanEntry& e = spans_[key];
      const std::vector<int> src = e.src, tgt = e.tgt;
      const MatC mat = e.mats[size_t(idx)];
      const ba::BimoduleMap img = e.images[size_t(idx)];
      for (const auto& p : padded_) {
        if (p.src == tgt)
          try_add(src, p.tgt, p.mat * mat, ba::compose(img, p.image));
        if (p.tgt == src)
          try_add(p.src, tgt, mat * p.mat, ba::compose(p.image, img));
      }
    }
  }
  arrows_built_ = true;
}

ba::BimoduleMap PresentedTau::rho_word(const std::vector<int>& src,
                                       const std::vector<int>& tgt,
                                       const MatC& mat) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  build_arrow_spans();
  auto it = spans_.find({word_key(src), word_key(tgt)});
  if (it == spans_.end())
    throw Error("rho_word: morphism outside the presented span");
  const SpanEntry& e = it->second;
  MatC v = vec(mat);
  const double scale = vnorm(v);
  std::vector<Complex> coef(e.ortho.size(), Complex(0));
  MatC resid = v;
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t j = 0; j < e.ortho.size(); ++j) {
      Complex c = vdot(e.ortho[j], resid);
      coef[j] += c;
      resid = resid - c * e.ortho[j];
    }
  }
  if (vnorm(resid) > tol_.rank_tol * std::max(1.0, scale) * 10)
    throw Error("rho_word: morphism outside the presented span");
  const size_t kk = e.mats.size();
  std::vector<Complex> c(kk, Complex(0));
  for (size_t i = kk; i-- > 0;) {
    Complex t = coef[i];
    for (size_t j = i + 1; j < kk; ++j) t -= e.rcols[j][i] * c[j];
    c[i] = t / e.rcols[i][i];
  }
  ba::Bimodule ms = word_module(src), mt = word_module(tgt);
  MatC m(ms.dim, mt.dim);
  for (size_t i = 0; i < kk; ++i)
    if (std::abs(c[i]) > 1e-14) m = m + c[i] * e.images[i].mat;
  return ba::BimoduleMap{mt, ms, std::move(m), 0};
}

const Extension& PresentedTau::extension(const cqg::Label& lab) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = ext_.find(lab);
  if (it != ext_.end()) return it->second;
  const auto& tab = data_.model->table();
  Extension e;
  int gi = -1;
  for (size_t i = 0; i < data_.generators.size(); ++i)
    if (data_.generators[i] == lab) gi = int(i);
  if (lab == tab.trivial()) {
    e.label = lab;
    e.word = {};
    e.iota = MatC::identity(1);
    e.module = word_module({});
    e.into_word = ba::identity_map(e.module);
    e.from_word = ba::identity_map(e.module);
  } else if (gi >= 0) {
    e.label = lab;
    e.word = {gi};
    e.iota = MatC::identity(tab.dim(lab));
    e.module = data_.modules[size_t(gi)];
    e.into_word = ba::identity_map(e.module);
    e.from_word = ba::identity_map(e.module);
  } else {
    const int n = int(data_.generators.size());
    bool found = false;
    for (int len = 2; len <= data_.max_word && !found; ++len) {
      std::vector<int> w(size_t(len), 0);
      while (true) {
        const auto& dc = data_.model->dec(word_corep(w));
        for (const auto& entry : dc) {
          if (entry.first == lab) {
            e = build_extension(lab, w);
            found = true;
            break;
          }
        }
        if (found) break;
        int pos = len - 1;
        while (pos >= 0 && w[size_t(pos)] == n - 1) {
          w[size_t(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
        ++w[size_t(pos)];
      }
    }
    if (!found)
      throw Error("extension: label '" + lab +
                  "' is not realizable within the word bound");
  }
  return ext_.emplace(lab, std::move(e)).first->second;
}

Extension PresentedTau::build_extension(const cqg::Label& lab,
                                        const std::vector<int>& w) const {
  const auto& dc = data_.model->dec(word_corep(w));
  const MatC* iota = nullptr;
  for (const auto& entry : dc)
    if (entry.first == lab) {
      iota = &entry.second;
      break;
    }
  if (!iota)
    throw Error("extension: label '" + lab + "' does not occur in the word");
  MatC p = (*iota) * iota->adjoint();
  ba::BimoduleMap pi = rho_word(w, w, p);
  double idres = (pi.mat * pi.mat - pi.mat).max_abs();
  if (idres > 1e-6 * std::max(1.0, pi.mat.max_abs()))
    throw Error("extension: image of the isotypic projector is not idempotent");
  ba::Bimodule ew = word_module(w);
  MatC q = nullspace(MatC::identity(ew.dim) - pi.mat, tol_);
  if (q.cols() == 0) throw Error("extension: projector image is empty");

  Extension e;
  e.label = lab;
  e.word = w;
  e.iota = *iota;
  e.module.base = data_.base;
  e.module.dim = q.cols();
  MatC qa = q.adjoint();
  for (size_t b = 0; b < ew.left.size(); ++b) {
    e.module.left.push_back(qa * ew.left[b] * q);
    e.module.right.push_back(qa * ew.right[b] * q);
  }
  e.into_word = ba::BimoduleMap{e.module, ew, q, 0};
  e.from_word = ba::BimoduleMap{ew, e.module, qa * pi.mat, 0};
  return e;
}

Extension PresentedTau::extend(const cqg::Label& lab) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return extension(lab);
}

Extension PresentedTau::extend_with_word(const cqg::Label& lab,
                                         const std::vector<int>& w) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  for (int g : w)
    if (g < 0 || size_t(g) >= data_.generators.size())
      throw Error("extend_with_word: bad generator index");
  return build_extension(lab, w);
}

Report PresentedTau::compare_extensions(const Extension& a,
                                        const Extension& b) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  Report rep;
  rep.subject = "extensions of " + a.label;
  if (a.label != b.label) {
    rep.add("labels agree", false);
    return rep;
  }
  MatC fwd_mat = a.iota * b.iota.adjoint();
  MatC bwd_mat = b.iota * a.iota.adjoint();
  ba::BimoduleMap fwd = ba::compose(
      b.from_word, ba::compose(rho_word(b.word, a.word, fwd_mat), a.into_word));
  ba::BimoduleMap bwd = ba::compose(
      a.from_word, ba::compose(rho_word(a.word, b.word, bwd_mat), b.into_word));
  rep.merge(check_map(fwd, tol_));
  rep.merge(check_map(bwd, tol_));
  double d1 = ba::map_residual(ba::compose(bwd, fwd), ba::identity_map(a.module));
  double d2 = ba::map_residual(ba::compose(fwd, bwd), ba::identity_map(b.module));
  rep.add("round trip on the first realization", d1 <= tol_.abs_tol * 100, d1);
  rep.add("round trip on the second realization", d2 <= tol_.abs_tol * 100, d2);
  return rep;
}

const PresentedTau::LabelPair& PresentedTau::label_pair(
    const cqg::Label& a, const cqg::Label& b) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const std::string key = a + "|" + b;
  auto it = lpairs_.find(key);
  if (it != lpairs_.end()) return *it->second;

  auto lp = std::make_shared<LabelPair>();
  const Extension& ea = extension(a);
  const Extension& eb = extension(b);
  lp->prod = std::make_shared<ba::TensorProduct>(
      ba::tensor_over_m(ea.module, eb.module, tol_));
  const std::vector<int> rab = concat(ea.word, eb.word);
  ba::BimoduleMap split = word_split(rab, int(ea.word.size()));
  ba::BimoduleMap unsplit = ba::inverse_map(split, tol_);
  MatC iaib = kron(ea.iota, eb.iota);
  ba::BimoduleMap gather = ba::tensor_map(
      ea.from_word, eb.from_word, word_pair(ea.word, eb.word), *lp->prod);
  ba::BimoduleMap scatter = ba::tensor_map(
      ea.into_word, eb.into_word, *lp->prod, word_pair(ea.word, eb.word));

  for (const auto& [g, kappa] : data_.model->table().fuse(a, b)) {
    const Extension& eg = extension(g);
    MatC m2 = eg.iota * kappa.adjoint() * iaib.adjoint();
    MatC m1 = iaib * kappa * eg.iota.adjoint();
    lp->emb.push_back(ba::compose(
        gather,
        ba::compose(split,
                    ba::compose(rho_word(rab, eg.word, m2), eg.into_word))));
    lp->prj.push_back(ba::compose(
        eg.from_word,
        ba::compose(rho_word(eg.word, rab, m1),
                    ba::compose(unsplit, scatter))));
  }
  return *lpairs_.emplace(key, std::move(lp)).first->second;
}

ba::Bimodule PresentedTau::module(const cqg::Corep& u) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const std::string key = cqg::corep_key(u);
  auto it = modules_.find(key);
  if (it != modules_.end()) return it->second;
  const auto& dc = data_.model->dec(u);
  std::vector<const ba::Bimodule*> parts;
  parts.reserve(dc.size());
  int total = 0;
  for (const auto& entry : dc) {
    const Extension& e = extension(entry.first);
    parts.push_back(&e.module);
    total += e.module.dim;
  }
  ba::Bimodule m;
  m.base = data_.base;
  m.dim = total;
  const int nb = data_.base->dim();
  for (int b = 0; b < nb; ++b) {
    MatC l(total, total), r(total, total);
    int off = 0;
    for (const auto* p : parts) {
      l.set_block(off, off, p->left[size_t(b)]);
      r.set_block(off, off, p->right[size_t(b)]);
      off += p->dim;
    }
    m.left.push_back(std::move(l));
    m.right.push_back(std::move(r));
  }
  modules_[key] = m;
  return m;
}

ba::BimoduleMap PresentedTau::rho(const cqg::MorElement& f) const {
  if (f.parity != 0) throw Error("rho: parity-1 input, use rho_any");
  std::lock_guard<std::recursive_mutex> lk(mu_);
  ba::Bimodule mu = module(f.src), mv = module(f.tgt);
  const auto& du = data_.model->dec(f.src);
  const auto& dv = data_.model->dec(f.tgt);
  MatC gv = data_.model->gram(f.tgt);
  MatC r(mu.dim, mv.dim);
  int rowoff = 0;
  for (const auto& [la, ia] : du) {
    const int da = data_.model->table().dim(la);
    const int ea = extension(la).module.dim;
    int coloff = 0;
    for (const auto& [lb, ib] : dv) {
      const int eb = extension(lb).module.dim;
      if (lb == la) {
        Complex c = (ib.adjoint() * gv * f.mat * ia).trace() / double(da);
        if (std::abs(c) > 1e-15)
          for (int i = 0; i < ea; ++i) r.at(rowoff + i, coloff + i) = c;
      }
      coloff += eb;
    }
    rowoff += ea;
  }
  return ba::BimoduleMap{mv, mu, std::move(r), 0};
}

ThetaMap PresentedTau::theta(const cqg::Corep& u, const cqg::Corep& v) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const std::string key = cqg::corep_key(u) + "|" + cqg::corep_key(v);
  auto it = thetas_.find(key);
  if (it != thetas_.end()) return *it->second;

  cqg::Corep uv = cqg::prod(u, v);
  ba::Bimodule mu = module(u), mv = module(v), muv = module(uv);
  auto th = std::make_shared<ThetaMap>();
  th->product = ba::tensor_over_m(mu, mv, tol_);
  const auto& du = data_.model->dec(u);
  const auto& dv = data_.model->dec(v);
  const auto& duv = data_.model->dec(uv);

  MatC mapmat(th->product.space.dim, muv.dim);
  MatC invmat(muv.dim, th->product.space.dim);
  size_t c = 0;
  int coff = 0;
  int uoff = 0;
  for (const auto& [la, ia] : du) {
    const Extension& ea = extension(la);
    int voff = 0;
    for (const auto& [lb, ib] : dv) {
      const Extension& eb = extension(lb);
      const LabelPair& lp = label_pair(la, lb);
      MatC incl_a(mu.dim, ea.module.dim), incl_b(mv.dim, eb.module.dim);
      incl_a.set_block(uoff, 0, MatC::identity(ea.module.dim));
      incl_b.set_block(voff, 0, MatC::identity(eb.module.dim));
      ba::BimoduleMap ja{ea.module, mu, incl_a, 0};
      ba::BimoduleMap jb{eb.module, mv, incl_b, 0};
      ba::BimoduleMap pa{mu, ea.module, incl_a.transpose(), 0};
      ba::BimoduleMap pb{mv, eb.module, incl_b.transpose(), 0};
      ba::BimoduleMap tin = ba::tensor_map(ja, jb, *lp.prod, th->product);
      ba::BimoduleMap tout = ba::tensor_map(pa, pb, th->product, *lp.prod);
      const auto fus = data_.model->table().fuse(la, lb);
      for (size_t m = 0; m < fus.size(); ++m) {
        if (c >= duv.size())
          throw Error("theta: product decomposition is shorter than expected");
        const auto& [lg, ig] = duv[c];
        if (lg != fus[m].first)
          throw Error("theta: product decomposition order mismatch");
        MatC expect = kron(ia, ib) * fus[m].second;
        if ((ig - expect).max_abs() > 1e-7 * std::max(1.0, expect.max_abs()))
          throw Error("theta: product embedding mismatch");
        const Extension& eg = extension(lg);
        mapmat.set_block(0, coff, (ba::compose(tin, lp.emb[m])).mat);
        invmat.set_block(coff, 0, (ba::compose(lp.prj[m], tout)).mat);
        coff += eg.module.dim;
        ++c;
      }
      voff += eb.module.dim;
    }
    uoff += ea.module.dim;
  }
  if (c != duv.size() || coff != muv.dim)
    throw Error("theta: product decomposition is longer than expected");

  th->map = ba::BimoduleMap{muv, th->product.space, std::move(mapmat), 0};
  th->inverse = ba::BimoduleMap{th->product.space, muv, std::move(invmat), 0};
  return *thetas_.emplace(key, std::move(th)).first->second;
}

MatC PresentedTau::word_jmat(const std::vector<int>& w) const {
  const auto& tab = data_.model->table();
  MatC j = MatC::identity(1);
  int placed = 1;
  for (int g : w) {
    const cqg::Label& lab = data_.generators[size_t(g)];
    MatC ng = data_.model->dec(cqg::conj(cqg::leaf(lab)))[0].second;
    MatC jg = inverse(ng, tol_);
    const int dg = tab.dim(lab);
    j = kron(jg, j) * tensor_flip<Complex>(placed, dg);
    placed *= dg;
  }
  return j;
}

ba::BimoduleMap PresentedTau::word_diamond(const std::vector<int>& w) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const std::string key = "word:" + word_key(w);
  auto it = diamonds_.find(key);
  if (it != diamonds_.end()) return it->second;
  ba::BimoduleMap r;
  if (w.empty()) {
    ba::Bimodule reg = word_module({});
    r = ba::BimoduleMap{reg, reg, star_matrix(*data_.base), 1};
  } else if (w.size() == 1) {
    r = data_.diamonds[size_t(w[0])];
  } else {
    std::vector<int> head(w.begin(), w.end() - 1);
    const int g = w.back();
    std::vector<int> cw = conj_word(w);
    std::vector<int> chead = conj_word(head);
    const int gp = cw.front();
    ba::BimoduleMap dh = word_diamond(head);
    const ba::BimoduleMap& dg = data_.diamonds[size_t(g)];
    ba::BimoduleMap tm = ba::tensor_map(dh, dg, word_pair(head, {g}),
                                        word_pair({gp}, chead));
    r = ba::compose(ba::inverse_map(word_split(cw, 1), tol_), tm);
  }
  diamonds_[key] = r;
  return r;
}

ba::BimoduleMap PresentedTau::label_diamond(const cqg::Label& lab) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const std::string key = "label:" + lab;
  auto it = diamonds_.find(key);
  if (it != diamonds_.end()) return it->second;

  const auto& tab = data_.model->table();
  ba::BimoduleMap r;
  int gi = -1;
  for (size_t i = 0; i < data_.generators.size(); ++i)
    if (data_.generators[i] == lab) gi = int(i);
  if (lab == tab.trivial()) {
    r = word_diamond({});
  } else if (gi >= 0) {
    r = data_.diamonds[size_t(gi)];
  } else {
    const Extension& ea = extension(lab);
    const cqg::Label clab = tab.conj(lab);
    const Extension& eca = extension(clab);
    const std::vector<int> cw = conj_word(ea.word);
    MatC jw = word_jmat(ea.word);
    MatC na = data_.model->dec(cqg::conj(cqg::leaf(lab)))[0].second;
    const int d = tab.dim(lab);
    ba::BimoduleMap dw = word_diamond(ea.word);
    const auto& dcw = data_.model->dec(word_corep(cw));
    bool first = true;
    for (const auto& [lm, im] : dcw) {
      if (lm != clab) continue;
      Complex e =
          (im.adjoint() * jw * ea.iota.conj() * na).trace() / double(d);
      if (std::abs(e) < 1e-14) continue;
      MatC m2 = im * eca.iota.adjoint();
      ba::BimoduleMap pm =
          ba::compose(eca.from_word, rho_word(eca.word, cw, m2));
      ba::BimoduleMap term = ba::scale(
          std::conj(e), ba::compose(pm, ba::compose(dw, ea.into_word)));
      r = first ? term : ba::add(r, term);
      first = false;
    }
    if (first)
      throw Error("diamond: no conjugate channel found for label '" + lab +
                  "'");
  }
  diamonds_[key] = r;
  return r;
}

ba::BimoduleMap PresentedTau::diamond(const cqg::Corep& u) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const auto& tab = data_.model->table();
  cqg::Corep cu = cqg::conj(u);
  ba::Bimodule m_u = module(u), m_cu = module(cu);
  const auto& du = data_.model->dec(u);
  const auto& dcu = data_.model->dec(cu);
  MatC gcu = data_.model->gram(cu);
  MatC jlu = data_.model->jl(u);

  std::vector<int> uoff(du.size() + 1, 0), coff(dcu.size() + 1, 0);
  for (size_t k = 0; k < du.size(); ++k)
    uoff[k + 1] = uoff[k] + extension(du[k].first).module.dim;
  for (size_t m = 0; m < dcu.size(); ++m)
    coff[m + 1] = coff[m] + extension(dcu[m].first).module.dim;

  MatC total(m_cu.dim, m_u.dim);
  std::vector<bool> used(du.size(), false);
  for (size_t k0 = 0; k0 < du.size(); ++k0) {
    if (used[k0]) continue;
    const cqg::Label la = du[k0].first;
    const cqg::Label ca = tab.conj(la);
    std::vector<size_t> ks, ms;
    for (size_t k = 0; k < du.size(); ++k)
      if (du[k].first == la) {
        ks.push_back(k);
        used[k] = true;
      }
    for (size_t m = 0; m < dcu.size(); ++m)
      if (dcu[m].first == ca) ms.push_back(m);
    if (ks.size() != ms.size())
      throw Error("diamond: conjugate multiplicities do not match");
    MatC na = data_.model->dec(cqg::conj(cqg::leaf(la)))[0].second;
    const int d = tab.dim(la);
    MatC cmat(int(ms.size()), int(ks.size()));
    for (size_t mi = 0; mi < ms.size(); ++mi)
      for (size_t ki = 0; ki < ks.size(); ++ki)
        cmat.at(int(mi), int(ki)) = (dcu[ms[mi]].second.adjoint() * gcu * jlu *
                                     du[ks[ki]].second.conj() * na)
                                        .trace() /
                                    double(d);
    MatC cinv = inverse(cmat, tol_);
    ba::BimoduleMap dia = label_diamond(la);
    for (size_t ki = 0; ki < ks.size(); ++ki)
      for (size_t mi = 0; mi < ms.size(); ++mi) {
        Complex coeff = cinv.at(int(ki), int(mi));
        if (std::abs(coeff) < 1e-14) continue;
        MatC blk = coeff * dia.mat;
        const int r0 = coff[ms[mi]], c0 = uoff[ks[ki]];
        for (int i = 0; i < blk.rows(); ++i)
          for (int j = 0; j < blk.cols(); ++j)
            total.at(r0 + i, c0 + j) += blk.at(i, j);
      }
  }
  return ba::BimoduleMap{m_u, m_cu, std::move(total), 1};
}

GeneratingSubcategory PresentedTau::presentation() const {
  GeneratingSubcategory r;
  for (const auto& lab : data_.generators)
    r.generators.push_back(cqg::leaf(lab));
  for (const auto& a : data_.arrows)
    r.arrows.emplace_back(
        a.name,
        cqg::MorElement{word_corep(a.src), word_corep(a.tgt), a.mat, 0});
  return r;
}

Report PresentedTau::presentation_consistency() const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  build_arrow_spans();
  Report rep;
  rep.subject = "presentation";
  for (const auto& [key, e] : spans_) {
    (void)key;
    rep.add("images over " + word_text(e.src) + " -> " + word_text(e.tgt) +
                " consistent",
            e.defect <= tol_.abs_tol * 100, e.defect);
  }
  return rep;
}

}  // namespace qpb::tau
