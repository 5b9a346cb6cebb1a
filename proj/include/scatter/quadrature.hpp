#pragma once

#include <functional>
#include <vector>

#include "scatter/grid.hpp"

namespace scatter {

// Adaptive Gauss-Kronrod integration on [a, b]; either endpoint may be
// infinite. Throws NonConvergence when the error estimate stays above the
// requested relative tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

// Complex-valued integrand, integrated component-wise. (A separate name, not
// an overload: a real-returning lambda would convert to either signature.)
Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b,
                          double rel_tol = 1e-10);

// Precomputed Filon-type rule for the family of oscillatory integrals
//
//     I(w) = Int_0^R e^{i w rho} g(rho) drho
//
// with one fixed real g and many frequencies w. The integrand is sampled once
// on a uniform mesh; value(w) replaces g by its panelwise quadratic
// interpolant and integrates the product with e^{i w rho} exactly, so the
// accuracy does not degrade as w grows.
class OscillatoryTable {
public:
    OscillatoryTable(const std::function<double(double)>& g, double upper, int panels);

    Complex value(double w) const;

    double upper() const { return upper_; }

private:
    double upper_ = 0.0;
    double h_ = 0.0;              // panel half-width
    std::vector<double> samples_; // 2*panels + 1 values of g
};

// Moments M_k(w, h) = Int_{-h}^{h} t^k e^{i w t} dt for k = 0, 1, 2, with a
// series branch near w h = 0. Exposed for direct testing against adaptive
// quadrature.
void filon_moments(double w, double h, Complex& m0, Complex& m1, Complex& m2);

} // namespace scatter
