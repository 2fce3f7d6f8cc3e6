#pragma once

#include <cstddef>

// Dense vector kernels used by the matrix and SVD inner loops.
// Scalar reference versions live in kernels::ref; the top-level entry
// points dispatch at load time to an AVX2 variant when the CPU has one.
// The two backends are equivalence-tested against each other.

namespace memlab::kernels {

namespace ref {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);   // y += a*x
void rot(double* x, double* y, double c, double s, std::size_t n); // (x,y) <- (c*x - s*y, s*x + c*y)
double nrm2sq(const double* x, std::size_t n);
void scale(double a, double* x, std::size_t n);
}

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void rot(double* x, double* y, double c, double s, std::size_t n);
double nrm2sq(const double* x, std::size_t n);
void scale(double a, double* x, std::size_t n);
}
#endif

double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void rot(double* x, double* y, double c, double s, std::size_t n);
double nrm2sq(const double* x, std::size_t n);
void scale(double a, double* x, std::size_t n);

// Name of the backend the dispatcher picked ("avx2" or "scalar").
const char* active_backend();

} // namespace memlab::kernels
