#pragma once

#include <random>

#include "qpb/matrix.hpp"

namespace qpb {

// All randomness in the library goes through a caller-provided seed so that
// runs are reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(eng_);
  }
  Complex complex_unit_ball() {
    while (true) {
      double re = uniform(-1, 1), im = uniform(-1, 1);
      if (re * re + im * im <= 1) return Complex(re, im);
    }
  }
  MatC matrix(int rows, int cols) {
    MatC m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m.at(i, j) = complex_unit_ball();
    return m;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qpb
