#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fwi {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using RealVector = std::vector<double>;

// Inner products are conjugate-linear in the FIRST argument throughout.

inline Complex dot(const ComplexVector& x, const ComplexVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
    Complex s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline double dot(const RealVector& x, const RealVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm(const ComplexVector& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

inline double norm(const RealVector& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline void axpy(Complex a, const ComplexVector& x, ComplexVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void axpy(double a, const RealVector& x, RealVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scal(Complex a, ComplexVector& x) {
    for (auto& v : x) v *= a;
}

inline void scal(double a, RealVector& x) {
    for (auto& v : x) v *= a;
}

inline RealVector real_part(const ComplexVector& x) {
    RealVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i].real();
    return out;
}

}  // namespace fwi
