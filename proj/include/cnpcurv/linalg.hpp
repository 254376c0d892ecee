#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cnpcurv {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

// sum |x_ij|^2
double frob_sq(const cmat& m);

double spectral_norm(const cmat& m);

// Eigenvalues of the Hermitian part, ascending.
rvec hermitian_eigenvalues(const cmat& h);

// Positive square root of a Hermitian matrix whose negative eigenvalues
// are rounding noise; eigenvalues below zero are clamped.
cmat psd_sqrt(const cmat& h);

// Count of eigenvalues above eps * max(lambda_max, 1) for a positive
// semidefinite spectrum.
int psd_rank(const rvec& eigenvalues, double eps);

double hermitian_residual(const cmat& h);

}  // namespace cnpcurv
