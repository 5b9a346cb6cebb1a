#pragma once

#include <complex>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "scatter/errors.hpp"

namespace scatter {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Pairwise (cascade) summation. Used for every reduction whose result feeds a
// reported number, so sums are schedule independent and carry O(log n) error
// growth instead of O(n).
template <class T>
T pairwise_sum(std::span<const T> v) {
    if (v.empty()) return T{};
    if (v.size() <= 8) {
        T acc = v[0];
        for (size_t i = 1; i < v.size(); ++i) acc += v[i];
        return acc;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

// ---------------------------------------------------------------------------
// Momentum grid
// ---------------------------------------------------------------------------

// Uniform symmetric grid on [-L, L) with N points,
//
//     q_j = (j - N/2) * dq,   dq = 2L/N,   j = 0, ..., N-1.
//
// N must be even, so q = 0 lands exactly on index N/2 and the grid is closed
// under q -> -q except for the single unpaired endpoint q_0 = -L. The same
// layout, rotated by N/2, is the natural index order of a length-N DFT, which
// is what the singular operator backend relies on.
struct UniformGrid {
    double half_width = 0.0; // L
    int count = 0;           // N, even, >= 2

    double spacing() const { return 2.0 * half_width / count; }
    double point(int j) const { return (j - count / 2) * spacing(); }
    int zero_index() const { return count / 2; }

    // Index of -q_j; index 0 (the unpaired -L endpoint) maps to itself.
    int mirror_index(int j) const { return j == 0 ? 0 : count - j; }

    // Radial view: the half line samples q = k*dq for k = 0, ..., N/2. The
    // last slot (q = L) additionally serves as the value stored at the
    // unpaired -L endpoint when a radial array is unfolded onto the full grid.
    int radial_count() const { return count / 2 + 1; }
    double radial_point(int k) const { return k * spacing(); }

    std::vector<double> points() const;

    bool operator==(const UniformGrid&) const = default;
};

// Validates L > 0, N even and >= 2, and returns the grid.
UniformGrid make_uniform_grid(double half_width, int count);

// ---------------------------------------------------------------------------
// Sampled functions
// ---------------------------------------------------------------------------

enum class Symmetry {
    none,      // no constraint
    even_real, // f(-q) = f(q), values real (imaginary parts zero)
    hermitian, // f(-q) = conj(f(q))
};

// A function sampled on a UniformGrid. The symmetry tag is descriptive; it is
// enforced where it matters (construction from radial data, CSV import) and
// assumed elsewhere.
struct SampledFunction {
    UniformGrid grid;
    std::vector<Complex> values; // size grid.count
    Symmetry symmetry = Symmetry::none;
};

// Unfolds radial samples (size N/2+1, k = 0..N/2) onto the full grid as an
// even function. The complex overload requires all imaginary parts to vanish
// (tolerance 'imag_tol' relative to the largest magnitude) and throws
// ValidationError otherwise.
SampledFunction extend_even(const UniformGrid& grid, std::span<const double> radial);
SampledFunction extend_even(const UniformGrid& grid, std::span<const Complex> radial,
                            double imag_tol = 1e-10);

// Unfolds radial samples onto the full grid with f(-q) = conj(f(q)). The
// q = 0 sample must be real to that same tolerance.
SampledFunction extend_hermitian(const UniformGrid& grid, std::span<const Complex> radial,
                                 double imag_tol = 1e-10);

// Restricts a full-grid function to its radial samples (indices N/2..N-1 plus
// the -L slot standing in for q = L).
std::vector<Complex> restrict_radial(const SampledFunction& f);

// Max over j of |f(-q_j) - f(q_j)| (even) or |f(-q_j) - conj f(q_j)|
// (hermitian); used by validators and tests.
double symmetry_defect(const SampledFunction& f, Symmetry sym);

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

// Radial shape of the separable potential's generating function. The rank-one
// potential acting on u is  V u = lambda * <u, g> g  with g(x) = shape(|x|).
struct GaussianProfile {
    double alpha = 1.0; // g(r) = exp(-alpha r^2)
};

struct YukawaProfile {
    double mu = 1.0; // g(r) = exp(-mu r)/r
};

// Monotone cubic (pchip) interpolation of tabulated samples. The shape is
// clamped to value.front() below the first radius and vanishes beyond the
// last one.
struct TabulatedProfile {
    std::vector<double> radius; // strictly increasing, nonnegative
    std::vector<double> value;
};

using RadialProfile = std::variant<GaussianProfile, YukawaProfile, TabulatedProfile>;

struct PotentialSpec {
    double lambda = 0.0; // coupling constant, any sign
    RadialProfile profile;
};

// Throws ValidationError on non-finite or non-positive width parameters, or a
// malformed table. A zero coupling is rejected too: the potential would
// vanish identically.
void validate(const PotentialSpec& spec);

// Pointwise shape evaluation g(r), r >= 0. The Yukawa shape diverges at
// r = 0; integrals should use the bounded product below instead.
double profile_value(const RadialProfile& profile, double r);

// r * g(r), finite for all supported shapes down to r = 0.
double profile_value_times_r(const RadialProfile& profile, double r);

// r * g(r) as a reusable callable. Tabulated shapes compile their
// interpolant once here instead of on every evaluation, which matters
// inside nested quadrature loops.
std::function<double(double)> make_profile_sampler(const RadialProfile& profile);

// Radius beyond which the shape is negligible (used to size quadrature
// domains): scales like 12/sqrt(alpha) for Gaussians, 40/mu for Yukawa, and
// is the last table point for tabulated shapes.
double profile_extent(const RadialProfile& profile);

// ---------------------------------------------------------------------------
// Form factors
// ---------------------------------------------------------------------------

// Radial Fourier transform with the symmetric (2 pi)^{-3/2} normalisation,
//
//     ghat(q) = sqrt(2/pi) * (1/q) * Int_0^inf r sin(q r) g(r) dr,
//
// continued to q = 0 by sqrt(2/pi) * Int r^2 g(r) dr. Gaussian and Yukawa
// shapes use their closed forms; tabulated shapes are integrated adaptively.
// The result is real for the supported (real radial) shapes and is returned
// in the complex type the downstream formulas expect.
Complex radial_fourier(const RadialProfile& profile, double q);

enum class FormFactorRoute {
    gaussian_closed_form,
    yukawa_closed_form,
    quadrature, // adaptive integration of a tabulated shape
};

// ghat sampled on the radial slots of a grid.
struct FormFactor {
    UniformGrid grid;
    std::vector<Complex> values; // size grid.radial_count()
    FormFactorRoute route = FormFactorRoute::quadrature;

    Complex at_index(int k) const { return values[static_cast<size_t>(k)]; }
};

FormFactor make_form_factor(const PotentialSpec& spec, const UniformGrid& grid);

// ---------------------------------------------------------------------------
// Directions and sphere quadrature
// ---------------------------------------------------------------------------

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
Vec3 normalized(const Vec3& v); // throws ValidationError on zero vector
Vec3 scale(const Vec3& v, double s);

// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times the
// uniform periodic rule in phi. Weights sum to 4 pi and the rule integrates
// spherical harmonics exactly up to the orders the two factors support.
struct SphereQuadrature {
    std::vector<Vec3> direction;
    std::vector<double> weight;

    size_t size() const { return direction.size(); }
};

SphereQuadrature make_sphere_quadrature(int polar_count, int azimuthal_count);

// Samples of a direction-dependent form factor ghat(q * n) on the radial
// slots of a grid times a sphere rule; values are stored shell-major.
struct DirectionalFormFactor {
    UniformGrid grid;
    SphereQuadrature sphere;
    std::vector<Complex> values; // size grid.radial_count() * sphere.size()

    Complex at(int shell, size_t dir) const {
        return values[static_cast<size_t>(shell) * sphere.size() + dir];
    }
};

DirectionalFormFactor make_directional_form_factor(
    const UniformGrid& grid, SphereQuadrature sphere,
    const std::function<Complex(double, const Vec3&)>& ghat);

// Directional samples of a radially symmetric form factor (constant on each
// shell); convenient for feeding radial problems through the general path.
DirectionalFormFactor lift_radial(const FormFactor& ff, SphereQuadrature sphere);

} // namespace scatter
