#include "scatter/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace scatter {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double point_segment_distance(Complex p0, Complex p1) {
    const Complex d = p1 - p0;
    const double dd = std::norm(d);
    if (dd == 0.0) return std::abs(p0);
    // Parameter of the point on the segment closest to the origin.
    const double t = std::clamp(-(p0.real() * d.real() + p0.imag() * d.imag()) / dd, 0.0, 1.0);
    return std::abs(p0 + t * d);
}

} // namespace

// ---------------------------------------------------------------------------
// Coefficients
// ---------------------------------------------------------------------------

SIECoefficients build_sie(const ForwardData& data) {
    const SampledFunction& f = data.samples;
    const double scale = [&] {
        double m = 0.0;
        for (const Complex& z : f.values) m = std::max(m, std::abs(z));
        return std::max(m, 1e-300);
    }();
    if (symmetry_defect(f, Symmetry::hermitian) > 1e-6 * scale) {
        throw ValidationError("forward data is not Hermitian-even");
    }
    SIECoefficients coeffs;
    coeffs.grid = f.grid;
    const int n = f.grid.count;
    coeffs.a.resize(static_cast<size_t>(n));
    coeffs.rhs.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double q = f.grid.point(j);
        const Complex fj = f.values[static_cast<size_t>(j)];
        coeffs.a[static_cast<size_t>(j)] = kTwoPi * (Complex(0.0, 1.0) * q * fj + kTwoPi);
        coeffs.rhs[static_cast<size_t>(j)] = -2.0 * q * q * fj;
    }
    return coeffs;
}

// ---------------------------------------------------------------------------
// Winding and solvability
// ---------------------------------------------------------------------------

int winding_number(std::span<const Complex> curve, Complex closure,
                   const WindingOptions& options) {
    if (curve.size() < 2) throw ValidationError("winding number needs at least two samples");

    // Walk the closed polygon curve[0..n-1], closure, curve[0]. Origin
    // proximity is decided segment-wise first so a crossing between samples
    // cannot masquerade as a large-but-clean argument jump.
    const size_t n = curve.size();
    auto vertex = [&](size_t i) -> Complex {
        if (i < n) return curve[i];
        return i == n ? closure : curve[0];
    };
    for (size_t i = 0; i <= n; ++i) {
        const double dist = point_segment_distance(vertex(i), vertex(i + 1));
        if (dist < options.origin_eps) {
            std::ostringstream msg;
            msg << "symbol curve passes within " << dist << " of the origin";
            throw OriginHit(msg.str());
        }
    }

    double total = 0.0;
    for (size_t i = 0; i <= n; ++i) {
        const Complex from = vertex(i);
        const Complex to = vertex(i + 1);
        const double inc = std::arg(to / from);
        if (std::abs(inc) >= options.max_increment) {
            throw UnderResolved("argument step of a quarter turn or more between samples");
        }
        total += inc;
    }
    const double revolutions = total / kTwoPi;
    const double rounded = std::round(revolutions);
    if (std::abs(revolutions - rounded) > 1e-6) {
        throw UnderResolved("accumulated argument is not an integer number of turns");
    }
    return static_cast<int>(rounded);
}

namespace {

// Shared analysis of the symbol curve c(q) = i q F(q) + 2 pi given its
// full-grid samples in ascending q order.
SolvabilityReport analyze_symbol(const UniformGrid& grid, std::span<const Complex> c,
                                 const WindingOptions& options) {
    SolvabilityReport report;
    const int n = grid.count;

    double min_abs = std::numeric_limits<double>::infinity();
    double sup_qf = 0.0;
    for (const Complex& z : c) {
        min_abs = std::min(min_abs, std::abs(z));
        sup_qf = std::max(sup_qf, std::abs(z - kTwoPi)); // |i q F| = |c - 2 pi|
    }
    report.min_abs_c = min_abs;
    report.sup_qF = sup_qf;
    report.corollary_ok = sup_qf < kTwoPi;

    try {
        report.kappa = winding_number(c, c[0], options);
    } catch (const OriginHit&) {
        report.origin_hit = true;
    } catch (const UnderResolved&) {
        report.under_resolved = true;
    }

    // Tail contraction factor |i q F / (i q F + 4 pi)| over |q| >= A; by the
    // Hermitian symmetry of F the modulus is even, so the radial suffix
    // suffices. 0.95 leaves a safety margin below the contraction limit.
    const int half = n / 2;
    const int m = grid.radial_count();
    std::vector<double> mag(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        const int j = k < m - 1 ? half + k : 0;
        const Complex qf = c[static_cast<size_t>(j)] - kTwoPi; // i q F
        const Complex c2 = qf + 2.0 * kTwoPi;                  // i q F + 4 pi
        const double denom = std::abs(c2);
        mag[static_cast<size_t>(k)] =
            denom == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(qf) / denom;
    }
    double suffix = 0.0;
    std::optional<int> best;
    for (int k = m - 1; k >= 0; --k) {
        suffix = std::max(suffix, mag[static_cast<size_t>(k)]);
        if (suffix < 0.95) best = k;
    }
    if (best) {
        ContractionCertificate cert;
        cert.threshold = grid.radial_point(*best);
        double factor = 0.0;
        for (int k = *best; k < m; ++k) factor = std::max(factor, mag[static_cast<size_t>(k)]);
        cert.factor = factor;
        report.contraction = cert;
    }
    return report;
}

std::vector<Complex> symbol_from_forward(const ForwardData& data) {
    const SampledFunction& f = data.samples;
    std::vector<Complex> c(f.values.size());
    for (size_t j = 0; j < c.size(); ++j) {
        const double q = f.grid.point(static_cast<int>(j));
        c[j] = Complex(0.0, 1.0) * q * f.values[j] + kTwoPi;
    }
    return c;
}

} // namespace

SolvabilityReport solvability_report(const ForwardData& data, const WindingOptions& options) {
    const std::vector<Complex> c = symbol_from_forward(data);
    return analyze_symbol(data.samples.grid, c, options);
}

// ---------------------------------------------------------------------------
// Least-squares solver
// ---------------------------------------------------------------------------

namespace {

// Projection onto the solution subspace: real values, even under the index
// mirror, zero at q = 0.
void project_even_real(const UniformGrid& grid, std::vector<Complex>& v) {
    const int n = grid.count;
    for (int j = 1; j <= n / 2; ++j) {
        const int jm = grid.mirror_index(j);
        const double avg =
            0.5 * (v[static_cast<size_t>(j)].real() + v[static_cast<size_t>(jm)].real());
        v[static_cast<size_t>(j)] = avg;
        v[static_cast<size_t>(jm)] = avg;
    }
    v[0] = v[0].real();
    v[static_cast<size_t>(grid.zero_index())] = 0.0;
}

double real_dot(const std::vector<Complex>& u, const std::vector<Complex>& v) {
    std::vector<double> terms(u.size());
    for (size_t i = 0; i < u.size(); ++i) terms[i] = u[i].real() * v[i].real();
    return pairwise_sum(std::span<const double>(terms));
}

double l2_norm(const std::vector<Complex>& v) {
    std::vector<double> terms(v.size());
    for (size_t i = 0; i < v.size(); ++i) terms[i] = std::norm(v[i]);
    return std::sqrt(pairwise_sum(std::span<const double>(terms)));
}

} // namespace

SieSolution solve_sie(const SIECoefficients& coeffs, const SingularOperator& op,
                      const SieSolveOptions& options) {
    const UniformGrid& grid = coeffs.grid;
    if (op.grid() != grid) throw ValidationError("operator grid does not match coefficients");
    const size_t n = coeffs.a.size();
    if (n != static_cast<size_t>(grid.count) || coeffs.rhs.size() != n) {
        throw ValidationError("coefficient arrays do not match the grid");
    }

    SieSolution sol;
    sol.report = analyze_symbol(
        grid,
        [&] {
            std::vector<Complex> c(n);
            for (size_t j = 0; j < n; ++j) c[j] = coeffs.a[j] / kTwoPi;
            return c;
        }(),
        WindingOptions{});
    if (!sol.report.solvable() && !options.force) {
        throw ConditionsViolated("uniqueness gate failed (origin hit, resolution, or "
                                 "negative index); pass force to solve anyway");
    }

    double a_sup = 0.0;
    for (const Complex& z : coeffs.a) a_sup = std::max(a_sup, std::abs(z));
    const double reg = options.regularization.value_or(1e-10 * a_sup);

    // A xi = m1 xi + m2 (S xi) with m1 = (a+b)/2, m2 = (a-b)/2; the adjoint
    // uses the Hermitian symmetry of S.
    std::vector<Complex> m1(n), m2(n);
    for (size_t j = 0; j < n; ++j) {
        m1[j] = 0.5 * (coeffs.a[j] + coeffs.b);
        m2[j] = 0.5 * (coeffs.a[j] - coeffs.b);
    }
    auto apply_a = [&](const std::vector<Complex>& x) {
        std::vector<Complex> sx = x;
        op.apply_inplace(sx);
        for (size_t j = 0; j < n; ++j) sx[j] = m1[j] * x[j] + m2[j] * sx[j];
        return sx;
    };
    auto apply_ah = [&](const std::vector<Complex>& y) {
        std::vector<Complex> t(n);
        for (size_t j = 0; j < n; ++j) t[j] = std::conj(m2[j]) * y[j];
        op.apply_inplace(t);
        for (size_t j = 0; j < n; ++j) t[j] += std::conj(m1[j]) * y[j];
        return t;
    };
    auto apply_normal = [&](const std::vector<Complex>& v) {
        std::vector<Complex> w = apply_ah(apply_a(v));
        project_even_real(grid, w);
        for (size_t j = 0; j < n; ++j) w[j] += reg * v[j];
        return w;
    };

    const double g_norm = l2_norm(coeffs.rhs);
    auto relative_residual = [&](const std::vector<Complex>& x) {
        if (g_norm == 0.0) return 0.0;
        std::vector<Complex> r = apply_a(x);
        for (size_t j = 0; j < n; ++j) r[j] -= coeffs.rhs[j];
        return l2_norm(r) / g_norm;
    };

    std::vector<Complex> x(n, Complex(0.0, 0.0));
    std::vector<Complex> r = apply_ah(coeffs.rhs);
    project_even_real(grid, r);
    std::vector<Complex> p = r;
    double rr = real_dot(r, r);
    double best = relative_residual(x);
    int iterations = 0;

    while (best > options.tol && iterations < options.max_iter) {
        if (rr == 0.0) break; // gradient exhausted: at the least-squares point
        std::vector<Complex> bp = apply_normal(p);
        const double pbp = real_dot(p, bp);
        if (!(pbp > 0.0)) break;
        const double alpha = rr / pbp;
        for (size_t j = 0; j < n; ++j) {
            x[j] += alpha * p[j];
            r[j] -= alpha * bp[j];
        }
        project_even_real(grid, x);
        project_even_real(grid, r);
        const double rr_next = real_dot(r, r);
        for (size_t j = 0; j < n; ++j) p[j] = r[j] + (rr_next / rr) * p[j];
        rr = rr_next;
        ++iterations;
        best = relative_residual(x);
    }
    if (best > options.tol) {
        std::ostringstream msg;
        msg << "least-squares iteration stalled at relative residual " << best;
        throw NonConvergence(msg.str());
    }

    sol.xi.samples = SampledFunction{grid, std::move(x), Symmetry::even_real};
    sol.iterations = iterations;
    sol.relative_residual = best;
    return sol;
}

// ---------------------------------------------------------------------------
// Fixed-point solver
// ---------------------------------------------------------------------------

FixedPointSolution solve_fixed_point(const ForwardData& data, double threshold,
                                     const SingularOperator& op,
                                     const FixedPointOptions& options) {
    const UniformGrid& grid = data.samples.grid;
    if (op.grid() != grid) throw ValidationError("operator grid does not match data");
    if (!(threshold > 0.0)) throw ValidationError("support threshold must be positive");
    const size_t n = data.samples.values.size();

    std::vector<char> mask(n);
    std::vector<Complex> mult(n), rhs(n);
    double factor = 0.0;
    for (size_t j = 0; j < n; ++j) {
        const double q = grid.point(static_cast<int>(j));
        const Complex fj = data.samples.values[j];
        const Complex iqf = Complex(0.0, 1.0) * q * fj;
        const Complex c2 = iqf + 2.0 * kTwoPi;
        mask[j] = std::abs(q) >= threshold * (1.0 - 1e-12) ? 1 : 0;
        if (!mask[j]) continue;
        if (std::abs(c2) == 0.0) {
            throw NotContractive("i q F + 4 pi vanishes on the support");
        }
        mult[j] = iqf / c2;
        rhs[j] = -2.0 * q * q * fj / (kPi * c2);
        factor = std::max(factor, std::abs(mult[j]));
    }
    if (!(factor < 1.0)) {
        std::ostringstream msg;
        msg << "fixed-point multiplier reaches " << factor << " >= 1 above A = " << threshold;
        throw NotContractive(msg.str());
    }

    FixedPointSolution sol;
    sol.threshold = threshold;
    sol.factor = factor;

    std::vector<Complex> xi(n, Complex(0.0, 0.0));
    bool converged = false;
    for (int it = 1; it <= options.max_iter; ++it) {
        std::vector<Complex> sxi = xi;
        op.apply_inplace(sxi);
        std::vector<Complex> next(n, Complex(0.0, 0.0));
        for (size_t j = 0; j < n; ++j) {
            if (mask[j]) next[j] = (rhs[j] - mult[j] * sxi[j]).real();
        }
        project_even_real(grid, next);
        double step = 0.0;
        for (size_t j = 0; j < n; ++j) step = std::max(step, std::abs(next[j] - xi[j]));
        xi.swap(next);
        sol.step_sups.push_back(step);
        sol.iterations = it;
        if (step <= options.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw NonConvergence("fixed-point iteration did not settle within the step budget");
    }
    sol.xi.samples = SampledFunction{grid, std::move(xi), Symmetry::even_real};
    return sol;
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

Reconstruction reconstruct_radial(const Xi& xi, const ReconstructOptions& options) {
    const UniformGrid& grid = xi.samples.grid;
    const int m = grid.radial_count();
    if (m < 4) throw ValidationError("grid too small for the q = 0 extrapolation");

    std::vector<double> vals(static_cast<size_t>(m));
    double peak = 0.0;
    for (int k = 0; k < m; ++k) {
        const int j = k < m - 1 ? grid.zero_index() + k : 0;
        vals[static_cast<size_t>(k)] = xi.samples.values[static_cast<size_t>(j)].real();
        peak = std::max(peak, std::abs(vals[static_cast<size_t>(k)]));
    }
    if (peak == 0.0) {
        throw NoPotential("spectral density vanishes identically");
    }
    const double band = options.band * peak;
    bool has_pos = false, has_neg = false;
    for (double v : vals) {
        if (v > band) has_pos = true;
        if (v < -band) has_neg = true;
    }
    if (has_pos && has_neg) {
        throw SignInconsistent("spectral density changes sign; no single real "
                               "coupling is consistent with it");
    }
    if (!has_pos && !has_neg) {
        throw NoPotential("spectral density vanishes identically (within band)");
    }

    Reconstruction rec;
    rec.lambda_sign = has_pos ? 1 : -1;
    rec.grid = grid;
    rec.modulus.resize(static_cast<size_t>(m));
    rec.kernel.resize(static_cast<size_t>(m));
    for (int k = 1; k < m; ++k) {
        const double q = grid.radial_point(k);
        rec.modulus[static_cast<size_t>(k)] =
            std::sqrt(std::abs(vals[static_cast<size_t>(k)]) / (4.0 * kPi)) / q;
    }
    // m(0) from the even ratio xi/q^2, which has a finite limit: quadratic
    // extrapolation through the first three positive shells.
    auto h = [&](int k) {
        const double q = grid.radial_point(k);
        return std::abs(vals[static_cast<size_t>(k)]) / (q * q);
    };
    const double h0 = std::max(0.0, 3.0 * h(1) - 3.0 * h(2) + h(3));
    rec.modulus[0] = std::sqrt(h0 / (4.0 * kPi));
    for (int k = 0; k < m; ++k) {
        const double mk = rec.modulus[static_cast<size_t>(k)];
        rec.kernel[static_cast<size_t>(k)] = rec.lambda_sign * mk * mk;
    }
    return rec;
}

Complex on_shell_kernel(Complex amplitude_value, Complex denominator_value, double epsilon) {
    if (std::abs(denominator_value) <= epsilon) {
        throw Condition7Violation("denominator vanishes on this shell");
    }
    return -amplitude_value * denominator_value / (2.0 * kPi * kPi);
}

} // namespace scatter
