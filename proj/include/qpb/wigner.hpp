#pragma once

#include <vector>

#include "qpb/matrix.hpp"

namespace qpb {

// Gauss-Legendre nodes and weights on [-1, 1]; exact for polynomials of
// degree 2n-1.
struct Quadrature {
  std::vector<double> nodes, weights;
};
Quadrature gauss_legendre(int n);

// Rotation matrices for the classical group of 2x2 special unitaries, spin
// labels passed as twice the spin. Basis ordered by ascending weight.
MatC wigner_d(int twoj, double beta);
MatC wigner_big_d(int twoj, double alpha, double beta, double gamma);

// Euler angles of a 2x2 special unitary in the same convention.
void euler_from_su2(const MatC& g, double& alpha, double& beta, double& gamma);

}  // namespace qpb
