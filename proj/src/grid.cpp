#include "scatter/grid.hpp"

#include "scatter/quadrature.hpp"

#include <cmath>
using std::isnan; // the interpolator header resolves isnan by unqualified lookup
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace scatter {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Monotone cubic evaluator for a tabulated shape: pchip inside the table,
// clamped to the first value on the left, zero beyond the last radius.
class TableEval {
public:
    explicit TableEval(const TabulatedProfile& t)
        : r_front_(t.radius.front()), r_back_(t.radius.back()), v_front_(t.value.front()) {
        std::vector<double> x = t.radius;
        std::vector<double> y = t.value;
        spline_ = std::make_unique<boost::math::interpolators::pchip<std::vector<double>>>(
            std::move(x), std::move(y));
    }

    double operator()(double r) const {
        if (r <= r_front_) return v_front_;
        if (r >= r_back_) return 0.0;
        return (*spline_)(r);
    }

private:
    double r_front_, r_back_, v_front_;
    std::unique_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline_;
};

} // namespace

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

std::vector<double> UniformGrid::points() const {
    std::vector<double> q(static_cast<size_t>(count));
    for (int j = 0; j < count; ++j) q[static_cast<size_t>(j)] = point(j);
    return q;
}

UniformGrid make_uniform_grid(double half_width, int count) {
    if (!(half_width > 0.0) || !finite(half_width)) {
        throw ValidationError("grid half width must be positive");
    }
    if (count < 2 || count % 2 != 0) {
        throw ValidationError("grid count must be an even integer >= 2");
    }
    return UniformGrid{half_width, count};
}

// ---------------------------------------------------------------------------
// Symmetry extensions
// ---------------------------------------------------------------------------

namespace {

void check_radial_size(const UniformGrid& grid, size_t n) {
    if (n != static_cast<size_t>(grid.radial_count())) {
        throw ValidationError("radial sample count does not match grid");
    }
}

double max_abs(std::span<const Complex> v) {
    double m = 0.0;
    for (const Complex& z : v) m = std::max(m, std::abs(z));
    return m;
}

SampledFunction unfold(const UniformGrid& grid, std::span<const Complex> radial,
                       bool conjugate, Symmetry tag) {
    const int n = grid.count;
    const int half = n / 2;
    SampledFunction f{grid, std::vector<Complex>(static_cast<size_t>(n)), tag};
    for (int k = 0; k < grid.radial_count(); ++k) {
        const Complex v = radial[static_cast<size_t>(k)];
        const int j = half + k;            // q = +k dq; k = half lands on the -L slot
        const int jm = grid.mirror_index(j % n);
        if (j < n) f.values[static_cast<size_t>(j)] = v;
        f.values[static_cast<size_t>(jm)] = conjugate ? std::conj(v) : v;
    }
    return f;
}

} // namespace

SampledFunction extend_even(const UniformGrid& grid, std::span<const double> radial) {
    check_radial_size(grid, radial.size());
    std::vector<Complex> tmp(radial.size());
    std::transform(radial.begin(), radial.end(), tmp.begin(),
                   [](double x) { return Complex(x, 0.0); });
    return unfold(grid, tmp, false, Symmetry::even_real);
}

SampledFunction extend_even(const UniformGrid& grid, std::span<const Complex> radial,
                            double imag_tol) {
    check_radial_size(grid, radial.size());
    const double scale = std::max(max_abs(radial), 1e-300);
    for (const Complex& z : radial) {
        if (std::abs(z.imag()) > imag_tol * scale) {
            throw ValidationError("even extension requires real samples");
        }
    }
    std::vector<Complex> tmp(radial.begin(), radial.end());
    for (Complex& z : tmp) z = Complex(z.real(), 0.0);
    return unfold(grid, tmp, false, Symmetry::even_real);
}

SampledFunction extend_hermitian(const UniformGrid& grid, std::span<const Complex> radial,
                                 double imag_tol) {
    check_radial_size(grid, radial.size());
    const double scale = std::max(max_abs(radial), 1e-300);
    if (std::abs(radial[0].imag()) > imag_tol * scale) {
        throw ValidationError("hermitian extension requires a real value at q = 0");
    }
    std::vector<Complex> tmp(radial.begin(), radial.end());
    tmp[0] = Complex(tmp[0].real(), 0.0);
    return unfold(grid, tmp, true, Symmetry::hermitian);
}

std::vector<Complex> restrict_radial(const SampledFunction& f) {
    const UniformGrid& grid = f.grid;
    const int half = grid.count / 2;
    std::vector<Complex> radial(static_cast<size_t>(grid.radial_count()));
    for (int k = 0; k < half; ++k) {
        radial[static_cast<size_t>(k)] = f.values[static_cast<size_t>(half + k)];
    }
    // The q = L sample lives on the -L slot; undo the conjugation that the
    // hermitian unfolding applied there.
    const Complex edge = f.values[0];
    radial[static_cast<size_t>(half)] =
        f.symmetry == Symmetry::hermitian ? std::conj(edge) : edge;
    return radial;
}

double symmetry_defect(const SampledFunction& f, Symmetry sym) {
    const int n = f.grid.count;
    double defect = 0.0;
    for (int j = 1; j < n; ++j) {
        const Complex a = f.values[static_cast<size_t>(f.grid.mirror_index(j))];
        const Complex b = f.values[static_cast<size_t>(j)];
        if (sym == Symmetry::even_real) {
            defect = std::max(defect, std::abs(a - b));
            defect = std::max(defect, std::abs(b.imag()));
        } else if (sym == Symmetry::hermitian) {
            defect = std::max(defect, std::abs(a - std::conj(b)));
        }
    }
    return defect;
}

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

namespace {

void validate_profile(const RadialProfile& profile) {
    if (const auto* g = std::get_if<GaussianProfile>(&profile)) {
        if (!(g->alpha > 0.0) || !finite(g->alpha)) {
            throw ValidationError("gaussian width alpha must be positive");
        }
    } else if (const auto* y = std::get_if<YukawaProfile>(&profile)) {
        if (!(y->mu > 0.0) || !finite(y->mu)) {
            throw ValidationError("yukawa range mu must be positive");
        }
    } else {
        const auto& t = std::get<TabulatedProfile>(profile);
        if (t.radius.size() != t.value.size()) {
            throw ValidationError("tabulated shape needs matching radius/value arrays");
        }
        if (t.radius.size() < 4) {
            throw ValidationError("tabulated shape needs at least 4 samples");
        }
        if (t.radius.front() < 0.0) {
            throw ValidationError("tabulated radii must be nonnegative");
        }
        for (size_t i = 0; i + 1 < t.radius.size(); ++i) {
            if (!(t.radius[i] < t.radius[i + 1])) {
                throw ValidationError("tabulated radii must be strictly increasing");
            }
        }
        bool all_zero = true;
        for (double v : t.value) {
            if (!finite(v)) throw ValidationError("tabulated values must be finite");
            if (v != 0.0) all_zero = false;
        }
        if (all_zero) throw ValidationError("tabulated shape is identically zero");
    }
}

} // namespace

void validate(const PotentialSpec& spec) {
    if (!finite(spec.lambda)) throw ValidationError("coupling must be finite");
    if (spec.lambda == 0.0) throw ValidationError("coupling must be nonzero");
    validate_profile(spec.profile);
}

double profile_value(const RadialProfile& profile, double r) {
    if (const auto* g = std::get_if<GaussianProfile>(&profile)) {
        return std::exp(-g->alpha * r * r);
    }
    if (const auto* y = std::get_if<YukawaProfile>(&profile)) {
        if (r == 0.0) return std::numeric_limits<double>::infinity();
        return std::exp(-y->mu * r) / r;
    }
    return TableEval(std::get<TabulatedProfile>(profile))(r);
}

double profile_value_times_r(const RadialProfile& profile, double r) {
    if (const auto* y = std::get_if<YukawaProfile>(&profile)) {
        return std::exp(-y->mu * r);
    }
    return r * profile_value(profile, r);
}

std::function<double(double)> make_profile_sampler(const RadialProfile& profile) {
    if (const auto* t = std::get_if<TabulatedProfile>(&profile)) {
        auto eval = std::make_shared<const TableEval>(*t);
        return [eval](double r) { return r * (*eval)(r); };
    }
    return [profile](double r) { return profile_value_times_r(profile, r); };
}

double profile_extent(const RadialProfile& profile) {
    if (const auto* g = std::get_if<GaussianProfile>(&profile)) {
        return 12.0 / std::sqrt(g->alpha);
    }
    if (const auto* y = std::get_if<YukawaProfile>(&profile)) {
        return 40.0 / y->mu;
    }
    return std::get<TabulatedProfile>(profile).radius.back();
}

// ---------------------------------------------------------------------------
// Radial Fourier transform
// ---------------------------------------------------------------------------

namespace {

constexpr double kQuadTol = 1e-10;

// Composite adaptive rule over the table intervals, as g is only piecewise
// smooth across them. 'weight' is r^2 at q = 0 and r sin(qr)/q otherwise.
double tabulated_sine_transform(const TabulatedProfile& t, double q) {
    const TableEval eval(t);
    std::vector<double> nodes;
    nodes.push_back(0.0);
    for (double r : t.radius) {
        if (r > 0.0) nodes.push_back(r);
    }
    std::vector<double> parts;
    parts.reserve(nodes.size());
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        auto f = [&](double r) {
            const double w = q == 0.0 ? r * r : r * std::sin(q * r) / q;
            return w * eval(r);
        };
        parts.push_back(integrate(f, nodes[i], nodes[i + 1], kQuadTol));
    }
    return std::sqrt(2.0 / kPi) * pairwise_sum(std::span<const double>(parts));
}

} // namespace

Complex radial_fourier(const RadialProfile& profile, double q) {
    if (q < 0.0) throw ValidationError("radial momentum must be nonnegative");
    if (const auto* g = std::get_if<GaussianProfile>(&profile)) {
        const double a = g->alpha;
        return Complex(std::pow(2.0 * a, -1.5) * std::exp(-q * q / (4.0 * a)), 0.0);
    }
    if (const auto* y = std::get_if<YukawaProfile>(&profile)) {
        const double m = y->mu;
        return Complex(std::sqrt(2.0 / kPi) / (q * q + m * m), 0.0);
    }
    return Complex(tabulated_sine_transform(std::get<TabulatedProfile>(profile), q), 0.0);
}

FormFactor make_form_factor(const PotentialSpec& spec, const UniformGrid& grid) {
    validate(spec);
    FormFactor ff;
    ff.grid = grid;
    ff.values.resize(static_cast<size_t>(grid.radial_count()));
    if (std::holds_alternative<GaussianProfile>(spec.profile)) {
        ff.route = FormFactorRoute::gaussian_closed_form;
    } else if (std::holds_alternative<YukawaProfile>(spec.profile)) {
        ff.route = FormFactorRoute::yukawa_closed_form;
    } else {
        ff.route = FormFactorRoute::quadrature;
    }
    for (int k = 0; k < grid.radial_count(); ++k) {
        ff.values[static_cast<size_t>(k)] = radial_fourier(spec.profile, grid.radial_point(k));
    }
    return ff;
}

// ---------------------------------------------------------------------------
// Directions and sphere quadrature
// ---------------------------------------------------------------------------

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (!(n > 0.0) || !finite(n)) throw ValidationError("cannot normalise a zero vector");
    return {v.x / n, v.y / n, v.z / n};
}

Vec3 scale(const Vec3& v, double s) { return {v.x * s, v.y * s, v.z * s}; }

SphereQuadrature make_sphere_quadrature(int polar_count, int azimuthal_count) {
    if (polar_count < 1 || azimuthal_count < 1) {
        throw ValidationError("sphere rule needs positive node counts");
    }
    // Gauss-Legendre nodes in cos(theta): zeros of P_n and the standard
    // weights 2 / ((1 - x^2) P_n'(x)^2).
    std::vector<double> ct, wt;
    const auto zeros = boost::math::legendre_p_zeros<double>(polar_count);
    for (double z : zeros) {
        const double d = boost::math::legendre_p_prime(polar_count, z);
        const double w = 2.0 / ((1.0 - z * z) * d * d);
        if (z == 0.0) {
            ct.push_back(0.0);
            wt.push_back(w);
        } else {
            ct.push_back(z);
            wt.push_back(w);
            ct.push_back(-z);
            wt.push_back(w);
        }
    }
    SphereQuadrature rule;
    const double dphi = 2.0 * kPi / azimuthal_count;
    for (size_t i = 0; i < ct.size(); ++i) {
        const double c = ct[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int m = 0; m < azimuthal_count; ++m) {
            const double phi = dphi * m;
            rule.direction.push_back({s * std::cos(phi), s * std::sin(phi), c});
            rule.weight.push_back(wt[i] * dphi);
        }
    }
    return rule;
}

DirectionalFormFactor make_directional_form_factor(
    const UniformGrid& grid, SphereQuadrature sphere,
    const std::function<Complex(double, const Vec3&)>& ghat) {
    DirectionalFormFactor dff;
    dff.grid = grid;
    dff.sphere = std::move(sphere);
    const size_t m = dff.sphere.size();
    dff.values.resize(static_cast<size_t>(grid.radial_count()) * m);
    for (int k = 0; k < grid.radial_count(); ++k) {
        const double q = grid.radial_point(k);
        for (size_t d = 0; d < m; ++d) {
            dff.values[static_cast<size_t>(k) * m + d] = ghat(q, dff.sphere.direction[d]);
        }
    }
    return dff;
}

DirectionalFormFactor lift_radial(const FormFactor& ff, SphereQuadrature sphere) {
    DirectionalFormFactor dff;
    dff.grid = ff.grid;
    dff.sphere = std::move(sphere);
    const size_t m = dff.sphere.size();
    dff.values.resize(ff.values.size() * m);
    for (size_t k = 0; k < ff.values.size(); ++k) {
        for (size_t d = 0; d < m; ++d) dff.values[k * m + d] = ff.values[k];
    }
    return dff;
}

} // namespace scatter
