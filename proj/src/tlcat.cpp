#include "qpb/tlcat.hpp"

#include <algorithm>
#include <functional>

namespace qpb::tl {

Word conj(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (auto& l : r) l = (l == Letter::U) ? Letter::Ubar : Letter::U;
  return r;
}

std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += " ";
    s += (w[i] == Letter::U) ? "u" : "ubar";
  }
  return s;
}

Word word_from_string(const std::string& s) {
  Word w;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    if (tok == "u")
      w.push_back(Letter::U);
    else if (tok == "ubar" || tok == "ub")
      w.push_back(Letter::Ubar);
    else if (tok != "1")
      throw Error("unknown letter '" + tok + "' in word");
    tok.clear();
  };
  for (char c : s) {
    if (c == ' ' || c == ',' || c == '\t')
      flush();
    else
      tok += c;
  }
  flush();
  return w;
}

Diagram Diagram::identity(const Word& w) {
  Diagram d;
  d.src = w;
  d.tgt = w;
  int n = int(w.size());
  d.partner.resize(2 * n);
  d.winding.assign(2 * n, 0);
  for (int i = 0; i < n; ++i) {
    d.partner[i] = n + i;
    d.partner[n + i] = i;
  }
  return d;
}

int Diagram::oriented_power(int e) const {
  int k = stored_winding(e);
  if (is_source_point(e) != is_source_point(partner[e]))
    return letter_at(e) == Letter::U ? k : -k;
  return k;
}

void Diagram::validate() const {
  int nb = int(src.size()), nt = int(tgt.size()), n = nb + nt;
  if (int(partner.size()) != n || int(winding.size()) != n)
    throw Error("diagram: endpoint arrays have wrong size");
  if (n % 2) throw Error("diagram: odd number of endpoints");
  for (int e = 0; e < n; ++e) {
    int p = partner[e];
    if (p < 0 || p >= n || p == e || partner[p] != e)
      throw Error("diagram: pairing is not a perfect matching");
    bool same_side = is_source_point(e) == is_source_point(p);
    bool same_letter = letter_at(e) == letter_at(p);
    if (same_side == same_letter) throw Error("diagram: letters incompatible with pairing");
    if (e > p && winding[e] != 0) throw Error("diagram: winding stored at wrong endpoint");
  }
  // Planarity in the circular boundary order: source left to right, then
  // target right to left.
  auto circ = [&](int e) { return e < nb ? e : nb + (nt - 1 - (e - nb)); };
  for (int e1 = 0; e1 < n; ++e1) {
    if (partner[e1] < e1) continue;
    int a1 = circ(e1), b1 = circ(partner[e1]);
    if (a1 > b1) std::swap(a1, b1);
    for (int e2 = e1 + 1; e2 < n; ++e2) {
      if (partner[e2] < e2) continue;
      int a2 = circ(e2), b2 = circ(partner[e2]);
      if (a2 > b2) std::swap(a2, b2);
      bool a2_in = a1 < a2 && a2 < b1, b2_in = a1 < b2 && b2 < b1;
      if (a2_in != b2_in) throw Error("diagram: pairing is not planar");
    }
  }
}

namespace {

Diagram make_pair_diagram(bool on_target, Letter l1, Letter l2, int k) {
  Diagram d;
  Word w = {l1, l2};
  (on_target ? d.tgt : d.src) = w;
  d.partner = {1, 0};
  d.winding = {k, 0};
  d.validate();
  return d;
}

}  // namespace

Diagram coev() { return make_pair_diagram(true, Letter::U, Letter::Ubar, 0); }
Diagram coev_twisted() { return make_pair_diagram(true, Letter::Ubar, Letter::U, -1); }
Diagram ev() { return make_pair_diagram(false, Letter::Ubar, Letter::U, 0); }
Diagram ev_twisted() { return make_pair_diagram(false, Letter::U, Letter::Ubar, 1); }

Diagram power_box(Letter l, int k) {
  Diagram d = Diagram::identity({l});
  d.winding[0] = k;
  return d;
}

DiagramSum::DiagramSum(const Diagram& d, GaussRat coeff) : src_(d.src), tgt_(d.tgt) {
  d.validate();
  add_term(d, coeff);
}

void DiagramSum::add_term(const Diagram& d, const GaussRat& coeff) {
  if (d.src != src_ || d.tgt != tgt_) throw Error("diagram sum: term has wrong shape");
  auto it = terms_.find(d);
  if (it == terms_.end()) {
    if (!coeff.is_zero()) terms_.emplace(d, coeff);
    return;
  }
  it->second += coeff;
  if (it->second.is_zero()) terms_.erase(it);
}

DiagramSum& DiagramSum::operator+=(const DiagramSum& o) {
  if (o.src_ != src_ || o.tgt_ != tgt_) throw Error("diagram sum: shape mismatch in sum");
  for (auto& [d, c] : o.terms_) add_term(d, c);
  return *this;
}

DiagramSum DiagramSum::operator*(const GaussRat& s) const {
  DiagramSum r(src_, tgt_);
  if (s.is_zero()) return r;
  for (auto& [d, c] : terms_) r.terms_.emplace(d, c * s);
  return r;
}

bool DiagramSum::operator==(const DiagramSum& o) const {
  return src_ == o.src_ && tgt_ == o.tgt_ && terms_ == o.terms_;
}

namespace {

// Stacks single diagrams df over dg, resolving chains through the glued
// middle boundary. Loops must have net power +-1; each contributes n_u.
void compose_terms(const Diagram& df, const Diagram& dg, const GaussRat& nu, Diagram& out,
                   GaussRat& factor) {
  int nbg = int(dg.src.size()), mid = int(dg.tgt.size());
  int ntf = int(df.tgt.size());
  out.src = dg.src;
  out.tgt = df.tgt;
  out.partner.assign(nbg + ntf, -1);
  out.winding.assign(nbg + ntf, 0);
  factor = GaussRat(1);

  // Endpoint addresses: (in_f, endpoint id) with glue (g, nbg+i) ~ (f, i).
  std::vector<char> seen_g(nbg + mid, 0), seen_f(int(df.src.size()) + ntf, 0);
  auto traverse = [&](bool in_f, int e, int& end_f, int& end_e) -> long {
    long sum = 0;
    while (true) {
      const Diagram& d = in_f ? df : dg;
      (in_f ? seen_f : seen_g)[e] = 1;
      int p = d.partner[e];
      sum += d.is_tail(e) ? d.oriented_power(e) : -d.oriented_power(e);
      (in_f ? seen_f : seen_g)[p] = 1;
      bool mid_point = in_f ? p < int(df.src.size()) : p >= nbg;
      if (!mid_point) {
        end_f = in_f;
        end_e = p;
        return sum;
      }
      int i = in_f ? p : p - nbg;
      in_f = !in_f;
      e = in_f ? i : nbg + i;
    }
  };

  auto new_id = [&](bool in_f, int e) { return in_f ? nbg + (e - int(df.src.size())) : e; };

  for (int pass = 0; pass < 2; ++pass) {
    int count = pass == 0 ? nbg : ntf;
    for (int s = 0; s < count; ++s) {
      bool in_f = pass == 1;
      int e = pass == 1 ? int(df.src.size()) + s : s;
      if ((in_f ? seen_f : seen_g)[e]) continue;
      const Diagram& d0 = in_f ? df : dg;
      bool started_at_tail = d0.is_tail(e);
      int ef = 0, ee = 0;
      long sum = traverse(in_f, e, ef, ee);
      long p = started_at_tail ? sum : -sum;
      int a = new_id(in_f, e), b = new_id(ef, ee);
      out.partner[a] = b;
      out.partner[b] = a;
      // Convert the tail-to-head power into the stored winding.
      int k;
      bool a_src = a < nbg, b_src = b < nbg;
      if (a_src != b_src) {
        Letter l = a_src ? out.src[a] : out.tgt[a - nbg];
        k = l == Letter::U ? int(p) : int(-p);
      } else {
        k = int(p);
      }
      out.winding[std::min(a, b)] = k;
    }
  }

  // Remaining strands close into loops.
  for (int e = nbg; e < nbg + mid; ++e) {
    if (seen_g[e]) continue;
    long sum = 0;
    bool in_f = false;
    int cur = e;
    do {
      const Diagram& d = in_f ? df : dg;
      (in_f ? seen_f : seen_g)[cur] = 1;
      int p = d.partner[cur];
      sum += d.is_tail(cur) ? d.oriented_power(cur) : -d.oriented_power(cur);
      (in_f ? seen_f : seen_g)[p] = 1;
      int i = in_f ? p : p - nbg;
      in_f = !in_f;
      cur = in_f ? i : nbg + i;
    } while (!(in_f == false && cur == e));
    if (sum != 1 && sum != -1)
      throw Error("compose: closed loop with net power " + std::to_string(sum) +
                  " is outside the category");
    factor = factor * nu;
  }
}

}  // namespace

DiagramSum compose(const DiagramSum& f, const DiagramSum& g, const Rational& n_u) {
  if (f.src() != g.tgt()) throw Error("compose: middle words differ");
  DiagramSum out(g.src(), f.tgt());
  GaussRat nu{n_u, Rational(0)};
  for (auto& [dg, cg] : g.terms())
    for (auto& [df, cf] : f.terms()) {
      Diagram nd;
      GaussRat factor(1);
      compose_terms(df, dg, nu, nd, factor);
      out.add_term(nd, cf * cg * factor);
    }
  return out;
}

DiagramSum tensor(const DiagramSum& f, const DiagramSum& g) {
  Word src = f.src(), tgt = f.tgt();
  src.insert(src.end(), g.src().begin(), g.src().end());
  tgt.insert(tgt.end(), g.tgt().begin(), g.tgt().end());
  DiagramSum out(src, tgt);
  int nbf = int(f.src().size()), nbg = int(g.src().size());
  int ntf = int(f.tgt().size()), ntg = int(g.tgt().size());
  int nb = nbf + nbg;
  for (auto& [df, cf] : f.terms())
    for (auto& [dg, cg] : g.terms()) {
      Diagram nd;
      nd.src = src;
      nd.tgt = tgt;
      nd.partner.assign(src.size() + tgt.size(), -1);
      nd.winding.assign(src.size() + tgt.size(), 0);
      auto remap_f = [&](int e) { return e < nbf ? e : nb + (e - nbf); };
      auto remap_g = [&](int e) { return e < nbg ? nbf + e : nb + ntf + (e - nbg); };
      for (int e = 0; e < nbf + ntf; ++e) {
        int a = remap_f(e), b = remap_f(df.partner[e]);
        nd.partner[a] = b;
        if (e < df.partner[e]) nd.winding[std::min(a, b)] = df.winding[e];
      }
      for (int e = 0; e < nbg + ntg; ++e) {
        int a = remap_g(e), b = remap_g(dg.partner[e]);
        nd.partner[a] = b;
        if (e < dg.partner[e]) nd.winding[std::min(a, b)] = dg.winding[e];
      }
      out.add_term(nd, cf * cg);
    }
  return out;
}

namespace {

enum class StrandKind { Through, Cap, Cup };

StrandKind kind_of(const Diagram& d, int e) {
  bool s1 = d.is_source_point(e), s2 = d.is_source_point(d.partner[e]);
  if (s1 != s2) return StrandKind::Through;
  return s1 ? StrandKind::Cap : StrandKind::Cup;
}

}  // namespace

DiagramSum star(const DiagramSum& f) {
  DiagramSum out(f.tgt(), f.src());
  int nb = int(f.src().size()), nt = int(f.tgt().size());
  for (auto& [d, c] : f.terms()) {
    Diagram nd;
    nd.src = d.tgt;
    nd.tgt = d.src;
    nd.partner.assign(nb + nt, -1);
    nd.winding.assign(nb + nt, 0);
    auto remap = [&](int e) { return e < nb ? nt + e : e - nb; };
    for (int e = 0; e < nb + nt; ++e) {
      int p = d.partner[e];
      if (p < e) continue;
      int a = remap(e), b = remap(p);
      nd.partner[a] = b;
      nd.partner[b] = a;
      int k = d.winding[e];
      switch (kind_of(d, e)) {
        case StrandKind::Through: break;
        case StrandKind::Cap: k = k - 1; break;  // cap becomes cup
        case StrandKind::Cup: k = k + 1; break;  // cup becomes cap
      }
      nd.winding[std::min(a, b)] = k;
    }
    out.add_term(nd, c.conj());
  }
  return out;
}

DiagramSum conj_diagram(const DiagramSum& f) {
  Word csrc = conj(f.src()), ctgt = conj(f.tgt());
  DiagramSum out(csrc, ctgt);
  int nb = int(f.src().size()), nt = int(f.tgt().size());
  for (auto& [d, c] : f.terms()) {
    Diagram nd;
    nd.src = csrc;
    nd.tgt = ctgt;
    nd.partner.assign(nb + nt, -1);
    nd.winding.assign(nb + nt, 0);
    auto remap = [&](int e) { return e < nb ? nb - 1 - e : nb + (nt - 1 - (e - nb)); };
    for (int e = 0; e < nb + nt; ++e) {
      int p = d.partner[e];
      if (p < e) continue;
      int a = remap(e), b = remap(p);
      nd.partner[a] = b;
      nd.partner[b] = a;
      int k = d.winding[e];
      switch (kind_of(d, e)) {
        case StrandKind::Through: k = -k; break;
        case StrandKind::Cap: k = k - 1; break;
        case StrandKind::Cup: k = k + 1; break;
      }
      nd.winding[std::min(a, b)] = k;
    }
    out.add_term(nd, c.conj());
  }
  return out;
}

namespace {

// Sign of a boundary point in the circular order; pairs must join +1 to -1.
int point_sign(bool on_source, Letter l) {
  if (on_source) return l == Letter::U ? 1 : -1;
  return l == Letter::U ? -1 : 1;
}

void pairings_rec(const std::vector<int>& sign, std::vector<int>& match, int lo, int hi,
                  const std::function<void()>& done) {
  if (lo > hi) {
    done();
    return;
  }
  for (int k = lo + 1; k <= hi; k += 2) {
    if (sign[k] != -sign[lo]) continue;
    match[lo] = k;
    match[k] = lo;
    pairings_rec(sign, match, lo + 1, k - 1, [&] { pairings_rec(sign, match, k + 1, hi, done); });
  }
}

}  // namespace

std::vector<Diagram> enumerate_pairings(const Word& w1, const Word& w2) {
  int nb = int(w1.size()), nt = int(w2.size()), n = nb + nt;
  std::vector<Diagram> out;
  if (n % 2) return out;
  // Circular position c -> endpoint id.
  std::vector<int> endpoint(n), sign(n);
  for (int i = 0; i < nb; ++i) {
    endpoint[i] = i;
    sign[i] = point_sign(true, w1[i]);
  }
  for (int c = nb; c < n; ++c) {
    int j = nt - 1 - (c - nb);
    endpoint[c] = nb + j;
    sign[c] = point_sign(false, w2[j]);
  }
  std::vector<int> match(n, -1);
  pairings_rec(sign, match, 0, n - 1, [&] {
    Diagram d;
    d.src = w1;
    d.tgt = w2;
    d.partner.assign(n, -1);
    d.winding.assign(n, 0);
    for (int c = 0; c < n; ++c) d.partner[endpoint[c]] = endpoint[match[c]];
    d.validate();
    out.push_back(d);
  });
  return out;
}

long hom_dim(const Word& w1, const Word& w2) {
  int nb = int(w1.size()), nt = int(w2.size()), n = nb + nt;
  if (n % 2) return 0;
  std::vector<int> sign(n);
  for (int i = 0; i < nb; ++i) sign[i] = point_sign(true, w1[i]);
  for (int c = nb; c < n; ++c) sign[c] = point_sign(false, w2[nt - 1 - (c - nb)]);
  std::vector<std::vector<long>> memo(n + 1, std::vector<long>(n + 1, -1));
  std::function<long(int, int)> count = [&](int lo, int hi) -> long {
    if (lo > hi) return 1;
    long& m = memo[lo][hi];
    if (m >= 0) return m;
    long total = 0;
    for (int k = lo + 1; k <= hi; k += 2)
      if (sign[k] == -sign[lo]) total += count(lo + 1, k - 1) * count(k + 1, hi);
    return m = total;
  };
  return count(0, n - 1);
}

namespace {

MatQ mat_pow(const MatQ& c, const MatQ& cinv, int k) {
  MatQ r = MatQ::identity(c.rows());
  const MatQ& base = k >= 0 ? c : cinv;
  for (int i = 0; i < std::abs(k); ++i) r = r * base;
  return r;
}

}  // namespace

MatQ evaluate(const Diagram& d, const MatQ& c) {
  d.validate();
  if (c.rows() != c.cols()) throw Error("evaluate: conjugation matrix must be square");
  MatQ cinv = inverse(c);
  int dim = c.rows();
  int nb = int(d.src.size()), nt = int(d.tgt.size());
  std::map<int, MatQ> powers;
  auto pw = [&](int k) -> const MatQ& {
    auto it = powers.find(k);
    if (it == powers.end()) it = powers.emplace(k, mat_pow(c, cinv, k)).first;
    return it->second;
  };

  long rows = 1, cols = 1;
  for (int i = 0; i < nt; ++i) rows *= dim;
  for (int i = 0; i < nb; ++i) cols *= dim;
  MatQ m = MatQ(int(rows), int(cols));

  std::vector<int> bidx(nb, 0), tidx(nt, 0);
  auto index_at = [&](int e) { return d.is_source_point(e) ? bidx[e] : tidx[e - nb]; };
  for (long r = 0; r < rows; ++r) {
    long rr = r;
    for (int i = nt - 1; i >= 0; --i) {
      tidx[i] = int(rr % dim);
      rr /= dim;
    }
    for (long col = 0; col < cols; ++col) {
      long cc = col;
      for (int i = nb - 1; i >= 0; --i) {
        bidx[i] = int(cc % dim);
        cc /= dim;
      }
      GaussRat w(1);
      for (int e = 0; e < nb + nt && !w.is_zero(); ++e) {
        int p = d.partner[e];
        if (p < e) continue;
        int k = d.winding[e];
        switch (kind_of(d, e)) {
          case StrandKind::Through: {
            int b = d.is_source_point(e) ? e : p;
            int t = d.partner[b];
            if (d.src[b] == Letter::U)
              w = w * pw(k).at(index_at(t), index_at(b));
            else
              w = w * pw(-k).at(index_at(b), index_at(t));
            break;
          }
          case StrandKind::Cap: {
            int ue = d.letter_at(e) == Letter::U ? e : p;
            int be = d.partner[ue];
            w = w * pw(k).at(index_at(be), index_at(ue));
            break;
          }
          case StrandKind::Cup: {
            int ue = d.letter_at(e) == Letter::U ? e : p;
            int be = d.partner[ue];
            w = w * pw(k).at(index_at(ue), index_at(be));
            break;
          }
        }
      }
      m.at(int(r), int(col)) = w;
    }
  }
  return m;
}

MatQ evaluate(const DiagramSum& f, const MatQ& c) {
  int dim = c.rows();
  long rows = 1, cols = 1;
  for (size_t i = 0; i < f.tgt().size(); ++i) rows *= dim;
  for (size_t i = 0; i < f.src().size(); ++i) cols *= dim;
  MatQ m = MatQ(int(rows), int(cols));
  for (auto& [d, coeff] : f.terms()) m = m + coeff * evaluate(d, c);
  return m;
}

MatQ fundamental_cmat(const Rational& q) {
  if (q <= 0) throw Error("deformation parameter must be positive");
  MatQ c(2, 2);
  c.at(0, 0) = GaussRat(Rational(1) / q);
  c.at(1, 1) = GaussRat(q);
  return c;
}

MatQ jay_matrix(const Word& w, const MatQ& c) {
  int dim = c.rows(), n = int(w.size());
  MatQ dress = MatQ::identity(1);
  for (Letter l : w) dress = kron(dress, l == Letter::Ubar ? c : MatQ::identity(dim));
  long total = 1;
  for (int i = 0; i < n; ++i) total *= dim;
  MatQ rev = MatQ(int(total), int(total));
  std::vector<int> digits(n);
  for (long x = 0; x < total; ++x) {
    long xx = x;
    for (int i = n - 1; i >= 0; --i) {
      digits[i] = int(xx % dim);
      xx /= dim;
    }
    long y = 0;
    for (int i = n - 1; i >= 0; --i) y = y * dim + digits[i];
    rev.at(int(y), int(x)) = GaussRat(1);
  }
  return rev * dress;
}

Report relation_suite(const Rational& q) {
  Report rep;
  rep.subject = "diagram relations at q=" + qpb::to_string(q);
  Rational nu_r = q + 1 / q;
  GaussRat nu{nu_r, Rational(0)};
  MatQ c = fundamental_cmat(q);

  Word wu = {Letter::U}, wub = {Letter::Ubar}, we = {};
  DiagramSum id_u(Diagram::identity(wu)), id_ub(Diagram::identity(wub));
  DiagramSum id_e(Diagram::identity(we));
  DiagramSum cv(coev()), cvt(coev_twisted()), e0(ev()), e1(ev_twisted());
  DiagramSum dress_u(power_box(Letter::U, -1));

  struct Rel {
    std::string name;
    DiagramSum lhs, rhs;
  };
  std::vector<Rel> rels;
  rels.push_back({"snake_on_ubar_left", compose(tensor(e0, id_ub), tensor(id_ub, cv), nu_r), id_ub});
  rels.push_back(
      {"snake_on_ubar_right", compose(tensor(id_ub, e1), tensor(cvt, id_ub), nu_r), id_ub});
  rels.push_back({"snake_on_u_left", compose(tensor(e1, id_u), tensor(id_u, cvt), nu_r), id_u});
  rels.push_back({"snake_on_u_right", compose(tensor(id_u, e0), tensor(cv, id_u), nu_r), id_u});
  rels.push_back({"trace_twisted", compose(e1, cv, nu_r), id_e * nu});
  rels.push_back({"trace_plain", compose(e0, cvt, nu_r), id_e * nu});
  rels.push_back(
      {"hermicity_ev_twisted", compose(e1, tensor(dress_u, id_ub), nu_r), conj_diagram(e1)});
  rels.push_back({"hermicity_ev", compose(e0, tensor(id_ub, dress_u), nu_r), conj_diagram(e0)});
  rels.push_back(
      {"hermicity_coev", compose(tensor(dress_u, id_ub), conj_diagram(cv), nu_r), cv});
  rels.push_back({"hermicity_coev_twisted",
                  compose(tensor(id_ub, dress_u), conj_diagram(cvt), nu_r), cvt});

  for (auto& r : rels) rep.add("symbolic." + r.name, r.lhs == r.rhs);
  for (auto& r : rels) {
    double res = residual(to_complex(evaluate(r.lhs, c)), to_complex(evaluate(r.rhs, c)));
    rep.add("evaluated." + r.name, res <= 1e-12, res);
  }

  rep.add("star_exchanges_units_and_pairings", star(cv) == e1 && star(e1) == cv &&
                                                   star(cvt) == e0 && star(e0) == cvt);
  DiagramSum f = tensor(e0, id_ub), g = tensor(id_ub, cv);
  rep.add("star_antimultiplicative",
          star(compose(f, g, nu_r)) == compose(star(g), star(f), nu_r));
  rep.add("star_involutive", star(star(f)) == f && star(star(cvt)) == cvt);

  double func_res =
      residual(to_complex(evaluate(compose(f, g, nu_r), c)),
               to_complex(evaluate(f, c) * evaluate(g, c)));
  rep.add("evaluation_functorial_compose", func_res <= 1e-12, func_res);
  double tens_res = residual(to_complex(evaluate(tensor(cv, e0), c)),
                             to_complex(kron(evaluate(cv, c), evaluate(e0, c))));
  rep.add("evaluation_functorial_tensor", tens_res <= 1e-12, tens_res);

  MatQ tr = evaluate(compose(e1, cv, nu_r), c);
  rep.add("loop_value_is_n_u", tr.rows() == 1 && tr.at(0, 0).im == 0 && tr.at(0, 0).re == nu_r,
          std::abs(to_double(tr.at(0, 0).re - nu_r)));
  return rep;
}

}  // namespace qpb::tl
