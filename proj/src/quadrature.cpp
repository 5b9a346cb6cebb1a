#include "scatter/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace scatter {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// Deep enough to resolve integrands whose sharpest feature sits four or five
// decades below the interval length (boundary layers near a quadrature node);
// subdivision only recurses where the local estimate fails, so depth is cheap.
constexpr int kMaxDepth = 24;

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
    double err = 0.0, l1 = 0.0;
    const double value = GK::integrate(f, a, b, kMaxDepth, rel_tol, &err, &l1);
    // The error estimate is absolute; compare against the L1 mass so pure
    // cancellation (value near zero) is not misread as failure. The estimate
    // is built from per-panel |GK - G| terms and can land a small factor
    // above a tolerance the refinement has actually met, so only a clear
    // miss counts as failure.
    if (!(err <= 4.0 * rel_tol * std::max(l1, 1e-300)) && err > 1e-14) {
        throw NonConvergence("adaptive quadrature did not reach tolerance");
    }
    return value;
}

Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b,
                          double rel_tol) {
    const double re = integrate([&](double x) { return f(x).real(); }, a, b, rel_tol);
    const double im = integrate([&](double x) { return f(x).imag(); }, a, b, rel_tol);
    return {re, im};
}

void filon_moments(double w, double h, Complex& m0, Complex& m1, Complex& m2) {
    const double th = w * h;
    if (std::abs(th) < 0.08) {
        // Series in th; truncation below 1e-15 relative at the switch point.
        const double t2 = th * th;
        m0 = Complex(2.0 * h * (1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0), 0.0);
        m1 = Complex(0.0, 2.0 * h * h * th *
                              (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0 - t2 * t2 * t2 / 45360.0));
        m2 = Complex(2.0 * h * h * h *
                         (1.0 / 3.0 - t2 / 10.0 + t2 * t2 / 168.0 - t2 * t2 * t2 / 6480.0),
                     0.0);
        return;
    }
    const double s = std::sin(th), c = std::cos(th);
    m0 = Complex(2.0 * s / w, 0.0);
    m1 = Complex(0.0, 2.0 * (s - th * c) / (w * w));
    m2 = Complex(2.0 * (th * th * s - 2.0 * s + 2.0 * th * c) / (w * w * w), 0.0);
}

OscillatoryTable::OscillatoryTable(const std::function<double(double)>& g, double upper,
                                   int panels) {
    if (!(upper > 0.0) || panels < 1) {
        throw ValidationError("oscillatory table needs a positive range and >= 1 panel");
    }
    upper_ = upper;
    h_ = upper / (2.0 * panels);
    samples_.resize(2 * static_cast<size_t>(panels) + 1);
    for (size_t i = 0; i < samples_.size(); ++i) {
        samples_[i] = g(static_cast<double>(i) * h_);
    }
}

Complex OscillatoryTable::value(double w) const {
    Complex m0, m1, m2;
    filon_moments(w, h_, m0, m1, m2);
    const size_t panels = (samples_.size() - 1) / 2;
    std::vector<Complex> terms(panels);
    for (size_t p = 0; p < panels; ++p) {
        const double gl = samples_[2 * p];
        const double gc = samples_[2 * p + 1];
        const double gr = samples_[2 * p + 2];
        const double centre = (2.0 * static_cast<double>(p) + 1.0) * h_;
        // Quadratic through the three panel samples, in the local variable t:
        // g(t) ~ gc + t*(gr-gl)/(2h) + t^2*(gr-2gc+gl)/(2h^2).
        const Complex phase = std::polar(1.0, w * centre);
        terms[p] = phase * (gc * m0 + (gr - gl) / (2.0 * h_) * m1 +
                            (gr - 2.0 * gc + gl) / (2.0 * h_ * h_) * m2);
    }
    return pairwise_sum(std::span<const Complex>(terms));
}

} // namespace scatter
