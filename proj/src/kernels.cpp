#include "memlab/kernels.hpp"

namespace memlab::kernels {

namespace ref {

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void rot(double* x, double* y, double c, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

double nrm2sq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void scale(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

} // namespace ref

namespace {

struct Dispatch {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*rot)(double*, double*, double, double, std::size_t);
    double (*nrm2sq)(const double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    const char* name;
};

Dispatch pick_backend() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return {avx2::dot, avx2::axpy, avx2::rot, avx2::nrm2sq, avx2::scale, "avx2"};
    }
#endif
    return {ref::dot, ref::axpy, ref::rot, ref::nrm2sq, ref::scale, "scalar"};
}

const Dispatch g_dispatch = pick_backend();

} // namespace

double dot(const double* x, const double* y, std::size_t n) { return g_dispatch.dot(x, y, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { g_dispatch.axpy(a, x, y, n); }
void rot(double* x, double* y, double c, double s, std::size_t n) { g_dispatch.rot(x, y, c, s, n); }
double nrm2sq(const double* x, std::size_t n) { return g_dispatch.nrm2sq(x, n); }
void scale(double a, double* x, std::size_t n) { g_dispatch.scale(a, x, n); }

const char* active_backend() { return g_dispatch.name; }

} // namespace memlab::kernels
