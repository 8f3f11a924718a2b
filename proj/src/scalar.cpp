#include "qpb/scalar.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qpb {

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational rational_from_string(const std::string& s_in) {
  std::string s = s_in;
  if (!s.empty() && s[0] == '+') s = s.substr(1);
  size_t slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      if (s.find('.') != std::string::npos) {
        // Decimal literals are accepted for convenience and converted exactly.
        std::string t = s;
        bool neg = false;
        if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
          neg = t[0] == '-';
          t = t.substr(1);
        }
        size_t dot = t.find('.');
        std::string ip = t.substr(0, dot), fp = t.substr(dot + 1);
        if (ip.empty()) ip = "0";
        Rational num(ip.empty() ? "0" : ip);
        Rational den = 1;
        for (char c : fp) {
          if (!std::isdigit(static_cast<unsigned char>(c))) throw Error("bad digit");
          num = num * 10 + (c - '0');
          den *= 10;
        }
        Rational r = num / den;
        return neg ? -r : r;
      }
      return Rational(s);
    }
    Rational num(s.substr(0, slash));
    Rational den(s.substr(slash + 1));
    if (den == 0) throw Error("zero denominator");
    return num / den;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error("not a rational literal: '" + s + "'");
  }
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string format_complex(const Complex& z) {
  auto fmt = [](double x) {
    if (x == 0) x = 0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
  };
  if (z.imag() == 0) return fmt(z.real());
  std::string s = fmt(z.real());
  s += (z.imag() < 0 ? "-" : "+");
  double ai = std::abs(z.imag());
  if (ai != 1) s += fmt(ai);
  s += "i";
  return s;
}

namespace {

// Parses "a", "bi", "a+bi", "a-bi" with decimal or rational parts; also "i", "-i".
bool split_complex(const std::string& s, std::string& re, std::string& im) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) return false;
  // Find the sign that separates real and imaginary parts: a '+'/'-' not at
  // position 0 and not immediately after 'e'/'E' (exponent).
  size_t sep = std::string::npos;
  for (size_t i = 1; i < t.size(); ++i) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E' && t[i - 1] != '/')
      sep = i;  // keep last occurrence, exponents live inside parts
  }
  bool has_i = !t.empty() && (t.back() == 'i' || t.back() == 'j');
  if (!has_i) {
    if (t.find('i') != std::string::npos || t.find('j') != std::string::npos) return false;
    re = t;
    im = "0";
    return true;
  }
  t.pop_back();
  if (sep == std::string::npos) {
    re = "0";
    im = t.empty() ? "1" : (t == "+" ? "1" : (t == "-" ? "-1" : t));
    return true;
  }
  re = t.substr(0, sep);
  std::string imp = t.substr(sep);
  if (imp == "+") imp = "1";
  if (imp == "-") imp = "-1";
  im = imp;
  return true;
}

}  // namespace

Complex parse_complex(const std::string& s) {
  std::string re, im;
  if (!split_complex(s, re, im)) throw Error("not a complex literal: '" + s + "'");
  auto part = [](const std::string& p) -> double {
    if (p.find('/') != std::string::npos) return to_double(rational_from_string(p));
    size_t pos = 0;
    double v;
    try {
      v = std::stod(p, &pos);
    } catch (const std::exception&) {
      throw Error("not a number: '" + p + "'");
    }
    if (pos != p.size()) throw Error("not a number: '" + p + "'");
    return v;
  };
  return Complex(part(re), part(im));
}

GaussRat parse_gauss_rat(const std::string& s) {
  std::string re, im;
  if (!split_complex(s, re, im)) throw Error("not a complex literal: '" + s + "'");
  return GaussRat(rational_from_string(re), rational_from_string(im));
}

std::string GaussRat::str() const {
  if (im == 0) return to_string(re);
  std::string s;
  if (re != 0) {
    s = to_string(re);
    if (im > 0) s += "+";
  }
  if (im == 1)
    s += "i";
  else if (im == -1)
    s += "-i";
  else
    s += to_string(im) + "i";
  return s;
}

}  // namespace qpb
