#include <cmath>
#include <map>
#include <numbers>

#include "qpb/cqg.hpp"
#include "qpb/scalar.hpp"
#include "qpb/wigner.hpp"

namespace qpb::cqg {

namespace {

long long parse_int_label(const Label& l) {
  size_t pos = 0;
  long long v;
  try {
    v = std::stoll(l, &pos);
  } catch (const std::exception&) {
    throw Error("bad integer label: " + l);
  }
  if (pos != l.size()) throw Error("bad integer label: " + l);
  return v;
}

// Spin labels are written as 0, 1/2, 1, 3/2, ...; internally twice the spin.
int label_to_twoj(const Label& l) {
  Rational r = rational_from_string(l);
  Rational two = r * 2;
  if (denominator(two) != 1 || two < 0)
    throw Error("bad spin label: " + l);
  return int(numerator(two).convert_to<long long>());
}

Label twoj_to_label(int twoj) {
  if (twoj % 2 == 0) return std::to_string(twoj / 2);
  return std::to_string(twoj) + "/2";
}

class U1Table final : public IrrepTable {
 public:
  explicit U1Table(int max_charge) : max_(max_charge) {}
  std::string name() const override { return "u1"; }
  Label trivial() const override { return "0"; }
  int dim(const Label& l) const override {
    check(l);
    return 1;
  }
  Label conj(const Label& l) const override {
    return std::to_string(-check(l));
  }
  MatC cmat(const Label& l) const override {
    check(l);
    return MatC::identity(1);
  }
  std::vector<std::pair<Label, MatC>> fuse(const Label& a,
                                           const Label& b) const override {
    long long n = check(a) + check(b);
    if ((n < 0 ? -n : n) > max_)
      throw Error("charge " + std::to_string(n) + " exceeds the cutoff " +
                  std::to_string(max_));
    return {{std::to_string(n), MatC::identity(1)}};
  }
  std::vector<Label> labels() const override {
    std::vector<Label> out;
    for (int n = -max_; n <= max_; ++n) out.push_back(std::to_string(n));
    return out;
  }

 private:
  int max_;
  long long check(const Label& l) const {
    long long n = parse_int_label(l);
    if ((n < 0 ? -n : n) > max_)
      throw Error("charge " + l + " exceeds the cutoff " +
                  std::to_string(max_));
    return n;
  }
};

// Classical rotation-group table.  Fusion isometries are extracted from the
// invariant-averaging projector, evaluated with a quadrature that is exact
// for the matrix coefficients involved: uniform rules in both axial Euler
// angles and Gauss-Legendre in cos(beta).
class SU2Table final : public IrrepTable {
 public:
  explicit SU2Table(int max_twoj) : max_(max_twoj) {}
  std::string name() const override { return "su2"; }
  Label trivial() const override { return "0"; }
  int dim(const Label& l) const override { return check(l) + 1; }
  Label conj(const Label& l) const override {
    check(l);
    return l;
  }
  MatC cmat(const Label& l) const override {
    return MatC::identity(check(l) + 1);
  }
  std::vector<std::pair<Label, MatC>> fuse(const Label& a,
                                           const Label& b) const override {
    int t1 = check(a), t2 = check(b);
    if (t1 + t2 > max_)
      throw Error("spin " + twoj_to_label(t1 + t2) + " exceeds the cutoff " +
                  twoj_to_label(max_));
    std::pair<int, int> key{t1, t2};
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    std::vector<std::pair<Label, MatC>> out;
    for (int tg = std::abs(t1 - t2); tg <= t1 + t2; tg += 2)
      out.emplace_back(twoj_to_label(tg), cg_isometry(t1, t2, tg));
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, ins] = cache_.emplace(key, std::move(out));
    return it->second;
  }
  std::vector<Label> labels() const override {
    std::vector<Label> out;
    for (int t = 0; t <= max_; ++t) out.push_back(twoj_to_label(t));
    return out;
  }

 private:
  int max_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, std::vector<std::pair<Label, MatC>>>
      cache_;

  int check(const Label& l) const {
    int t = label_to_twoj(l);
    if (t > max_)
      throw Error("spin " + l + " exceeds the cutoff " + twoj_to_label(max_));
    return t;
  }

  MatC cg_isometry(int t1, int t2, int tg) const {
    int d1 = t1 + 1, d2 = t2 + 1, dg = tg + 1;
    int freq = (t1 + t2 + tg) / 2;
    int na = freq + 1;        // uniform in alpha over 2 pi
    int nphi = 2 * freq + 1;  // uniform in gamma over 4 pi
    int nb = freq / 2 + 1;    // Gauss-Legendre in cos(beta)
    Quadrature gl = gauss_legendre(nb);
    int n = d1 * d2 * dg;
    MatC p = MatC(n, n);
    for (int ib = 0; ib < nb; ++ib) {
      double beta = std::acos(gl.nodes[ib]);
      double wb = gl.weights[ib] / 2.0;
      for (int ia = 0; ia < na; ++ia) {
        double alpha = 2.0 * std::numbers::pi * ia / na;
        for (int ic = 0; ic < nphi; ++ic) {
          double gamma = 4.0 * std::numbers::pi * ic / nphi;
          MatC m = kron(kron(wigner_big_d(t1, alpha, beta, gamma),
                             wigner_big_d(t2, alpha, beta, gamma)),
                        wigner_big_d(tg, alpha, beta, gamma).conj());
          double w = wb / (double(na) * nphi);
          p = p + w * m;
        }
      }
    }
    MatC range = nullspace(MatC::identity(n) - p, Tol{});
    if (range.cols() != 1)
      throw Error("fusion multiplicity is not one for spins " +
                  twoj_to_label(t1) + ", " + twoj_to_label(t2) + " -> " +
                  twoj_to_label(tg));
    MatC iso = MatC(d1 * d2, dg);
    for (int a = 0; a < d1; ++a)
      for (int b = 0; b < d2; ++b)
        for (int c = 0; c < dg; ++c)
          iso.at(a * d2 + b, c) = range.at((a * d2 + b) * dg + c, 0);
    MatC s = iso.adjoint() * iso;
    Complex lam = s.trace() * (1.0 / dg);
    if (!(lam.real() > 1e-14))
      throw Error("degenerate fusion isometry candidate");
    if (residual(s, lam * MatC::identity(dg)) > 1e-9 * lam.real() * dg)
      throw Error("fusion isometry failed the Schur normalization check");
    iso = (1.0 / std::sqrt(lam.real())) * iso;
    fix_phase(iso);
    return iso;
  }

  static void fix_phase(MatC& m) {
    double mx = m.max_abs();
    for (int i = 0; i < m.rows() && mx > 0; ++i)
      for (int j = 0; j < m.cols(); ++j) {
        Complex x = m.at(i, j);
        if (std::abs(x) > 1e-7 * mx) {
          m = (std::conj(x) / std::abs(x)) * m;
          return;
        }
      }
  }
};

// q-deformed table.  Fusion isometries come from highest-weight vectors of
// the deformed enveloping algebra acting on tensor products, lowered with
// exactly normalized step operators.
class SUq2Table final : public IrrepTable {
 public:
  SUq2Table(const Rational& q, int max_twoj) : q_(q), max_(max_twoj) {
    if (!(q > 0) || q > 1) throw Error("deformation parameter must be in (0, 1]");
    qd_ = to_double(q);
  }
  std::string name() const override {
    return "suq2:q=" + qpb::to_string(q_);
  }
  Label trivial() const override { return "0"; }
  int dim(const Label& l) const override { return check(l) + 1; }
  Label conj(const Label& l) const override {
    check(l);
    return l;
  }
  MatC cmat(const Label& l) const override {
    int t = check(l);
    MatC c = MatC(t + 1, t + 1);
    for (int i = 0; i <= t; ++i) c.at(i, i) = std::pow(qd_, 2 * i - t);
    return c;
  }
  std::vector<std::pair<Label, MatC>> fuse(const Label& a,
                                           const Label& b) const override {
    int t1 = check(a), t2 = check(b);
    if (t1 + t2 > max_)
      throw Error("spin " + twoj_to_label(t1 + t2) + " exceeds the cutoff " +
                  twoj_to_label(max_));
    std::pair<int, int> key{t1, t2};
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    auto out = fuse_impl(t1, t2);
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, ins] = cache_.emplace(key, std::move(out));
    return it->second;
  }
  std::vector<Label> labels() const override {
    std::vector<Label> out;
    for (int t = 0; t <= max_; ++t) out.push_back(twoj_to_label(t));
    return out;
  }
  const Rational& q() const { return q_; }

 private:
  Rational q_;
  double qd_;
  int max_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, std::vector<std::pair<Label, MatC>>>
      cache_;

  int check(const Label& l) const {
    int t = label_to_twoj(l);
    if (t > max_)
      throw Error("spin " + l + " exceeds the cutoff " + twoj_to_label(max_));
    return t;
  }

  double qnum(int n) const {
    if (qd_ == 1.0) return n;
    return (std::pow(qd_, n) - std::pow(qd_, -n)) / (qd_ - 1.0 / qd_);
  }

  // Step-up, step-down, and weight matrices on the spin t/2 module, weight
  // basis ascending.
  MatC step_up(int t) const {
    MatC e = MatC(t + 1, t + 1);
    for (int i = 0; i < t; ++i) {
      int twom = 2 * i - t;
      e.at(i + 1, i) =
          std::sqrt(qnum((t - twom) / 2) * qnum((t + twom) / 2 + 1));
    }
    return e;
  }
  MatC step_down(int t) const {
    MatC f = MatC(t + 1, t + 1);
    for (int i = 1; i <= t; ++i) {
      int twom = 2 * i - t;
      f.at(i - 1, i) =
          std::sqrt(qnum((t + twom) / 2) * qnum((t - twom) / 2 + 1));
    }
    return f;
  }
  MatC weight_diag(int t, int sign) const {
    MatC k = MatC(t + 1, t + 1);
    for (int i = 0; i <= t; ++i)
      k.at(i, i) = std::pow(qd_, sign * (2 * i - t) / 2.0);
    return k;
  }

  std::vector<std::pair<Label, MatC>> fuse_impl(int t1, int t2) const {
    int d1 = t1 + 1, d2 = t2 + 1, dd = d1 * d2;
    MatC de = kron(step_up(t1), weight_diag(t2, 1)) +
              kron(weight_diag(t1, -1), step_up(t2));
    MatC df = kron(step_down(t1), weight_diag(t2, 1)) +
              kron(weight_diag(t1, -1), step_down(t2));
    std::vector<std::pair<Label, MatC>> out;
    for (int tg = std::abs(t1 - t2); tg <= t1 + t2; tg += 2) {
      std::vector<int> idx;
      for (int i1 = 0; i1 < d1; ++i1)
        for (int i2 = 0; i2 < d2; ++i2)
          if ((2 * i1 - t1) + (2 * i2 - t2) == tg) idx.push_back(i1 * d2 + i2);
      MatC sel = MatC(dd, int(idx.size()));
      for (size_t c = 0; c < idx.size(); ++c) sel.at(idx[c], int(c)) = 1;
      MatC hw = nullspace(de * sel, Tol{});
      if (hw.cols() != 1)
        throw Error("highest-weight multiplicity is not one for spins " +
                    twoj_to_label(t1) + ", " + twoj_to_label(t2) + " -> " +
                    twoj_to_label(tg));
      MatC v = sel * hw;
      fix_phase(v);
      MatC iso = MatC(dd, tg + 1);
      iso.set_block(0, tg, v);
      for (int twom = tg; twom > -tg; twom -= 2) {
        double c = std::sqrt(qnum((tg + twom) / 2) * qnum((tg - twom) / 2 + 1));
        v = (1.0 / c) * (df * v);
        double nrm = 0;
        for (int i = 0; i < dd; ++i) nrm += std::norm(v.at(i, 0));
        if (std::abs(nrm - 1.0) > 1e-8)
          throw Error("lowering lost normalization in deformed fusion");
        iso.set_block(0, (twom - 2 + tg) / 2, v);
      }
      out.emplace_back(twoj_to_label(tg), std::move(iso));
    }
    return out;
  }

  static void fix_phase(MatC& v) {
    double mx = v.max_abs();
    for (int i = 0; i < v.rows() && mx > 0; ++i) {
      Complex x = v.at(i, 0);
      if (std::abs(x) > 1e-7 * mx) {
        v = (std::conj(x) / std::abs(x)) * v;
        return;
      }
    }
  }
};

}  // namespace

std::shared_ptr<IrrepTable> make_u1_table(int max_charge) {
  return std::make_shared<U1Table>(max_charge);
}

std::shared_ptr<IrrepTable> make_su2_table(int max_twoj) {
  return std::make_shared<SU2Table>(max_twoj);
}

std::shared_ptr<IrrepTable> make_suq2_table(const Rational& q, int max_twoj) {
  return std::make_shared<SUq2Table>(q, max_twoj);
}

std::shared_ptr<IrrepTable> table_from_selector(const std::string& selector,
                                                int max_level) {
  if (selector == "u1") return make_u1_table(max_level);
  if (selector == "su2") return make_su2_table(max_level);
  if (selector.rfind("suq2", 0) == 0) {
    std::string rest = selector.substr(4);
    if (rest.rfind(":q=", 0) != 0)
      throw Error("deformed selector must look like suq2:q=<rational>");
    Rational q = rational_from_string(rest.substr(3));
    return make_suq2_table(q, max_level);
  }
  throw Error("unknown quantum group selector: " + selector);
}

}  // namespace qpb::cqg
