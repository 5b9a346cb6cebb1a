#pragma once

#include <memory>
#include <optional>

#include "scatter/grid.hpp"
#include "scatter/quadrature.hpp"
#include "scatter/singular.hpp"

namespace scatter {

// ---------------------------------------------------------------------------
// Spectral density
// ---------------------------------------------------------------------------

// xi(q) = lambda q^2 Int |ghat(q n)|^2 dOmega(n), sampled on the full grid as
// a real even function with xi(0) = 0 exactly. The sign of xi is the sign of
// the coupling; the radial specialization is xi = 4 pi lambda q^2 |ghat(q)|^2.
struct Xi {
    SampledFunction samples;
    std::optional<PotentialSpec> source;
};

Xi compute_xi(const PotentialSpec& spec, const FormFactor& ff, const UniformGrid& grid);
Xi compute_xi(const PotentialSpec& spec, const DirectionalFormFactor& ff,
              const UniformGrid& grid);

// ---------------------------------------------------------------------------
// Resolvent denominator
// ---------------------------------------------------------------------------

enum class DenominatorRoute {
    hilbert,              // 1 + (i pi / 2q) ((1 + S) xi)(q) on the grid
    autocorrelation,      // oscillatory integral of the shape autocorrelation
    yamaguchi_closed_form // residue-calculus oracle for the Yukawa shape
};

// Samples of D(q) = 1 + lambda (R0(q) g, g) on the radial slots of a grid.
struct Denominator {
    UniformGrid grid;
    std::vector<Complex> values; // size grid.radial_count()
    DenominatorRoute route = DenominatorRoute::hilbert;

    Complex at_index(int k) const { return values[static_cast<size_t>(k)]; }

    // Four-point Lagrange interpolation between radial samples; exact at the
    // samples themselves. q must lie in [0, L].
    Complex at(double q) const;
};

// Hilbert route. The formula is 0/0 at q = 0 (xi vanishes there, and the odd
// transform does too), so D(0) is filled by quadratic extrapolation through
// the three smallest positive shells; the autocorrelation route, which is
// regular at q = 0, serves as the cross-check.
Denominator compute_denominator(const Xi& xi, const SingularOperator& op);

// Autocorrelation route, usable at any q >= 0 without a grid:
//
//     D(q) = 1 + lambda Int_0^inf e^{i q rho} rho a(rho) drho,
//     a(rho) = Int g(|y|) g(|y + rho e|) dy.
//
// The radial autocorrelation is reduced to the nested finite integral
// rho a(rho) = 2 pi Int_0^inf y g(y) [Int_{|y-rho|}^{y+rho} s g(s) ds] dy,
// which is singularity free even for the Yukawa shape, and the oscillatory
// rho integral is evaluated from a precomputed Filon table so the cost per q
// is flat and the accuracy does not degrade at large q.
class AutocorrelationDenominator {
public:
    explicit AutocorrelationDenominator(const PotentialSpec& spec, int panels = 400);

    Complex value(double q) const;

private:
    double lambda_ = 0.0;
    std::shared_ptr<const OscillatoryTable> table_;
};

// One-shot convenience wrapper around the class above.
Complex denominator_autocorr(const PotentialSpec& spec, double q);

// Scan of the nonvanishing condition for D: the minimum of |D| over the
// shells and the list of shell momenta with |D| below epsilon.
struct Condition7Report {
    double epsilon = 0.0;
    double min_abs = 0.0;
    double argmin_q = 0.0;
    std::vector<double> failing_shells;

    bool ok() const { return failing_shells.empty(); }
};

Condition7Report check_condition7(const Denominator& d, double epsilon = 1e-3);

// ---------------------------------------------------------------------------
// Amplitude and forward data
// ---------------------------------------------------------------------------

// Scattering amplitude f(q, n, omega) = -2 pi^2 lambda ghat(q n) conj
// ghat(q omega) / D(q). For the radial shapes supported here the directions
// drop out; they are validated and kept in the signature for symmetry with
// the directional data path. Throws Condition7Violation when |D(q)| <=
// epsilon.
Complex amplitude(const PotentialSpec& spec, const Denominator& d, double q,
                  const Vec3& n, const Vec3& omega, double epsilon = 1e-8);

// F(q): the full solid-angle integral of the forward (omega = n) amplitude,
// extended over the whole grid with F(-q) = conj F(q).
struct ForwardData {
    SampledFunction samples;
    std::optional<PotentialSpec> source;
};

// F = -4 pi^2 xi / (q (2q + i pi (1 + S) xi)) evaluated as
// -2 pi^2 xi / (q^2 D); F(0) is the real part of a quadratic extrapolation
// from the first three shells. Throws ZeroDenominator when the denominator
// vanishes at a shell where xi does not.
ForwardData forward_F(const Xi& xi, const Denominator& d, double epsilon = 1e-12);

// ---------------------------------------------------------------------------
// Wavefunction
// ---------------------------------------------------------------------------

// The scalar data determining the scattered wave on one energy shell.
struct ScatteringState {
    double shell = 0.0;   // q = |k|
    Vec3 incident;        // omega = k/|k|
    Complex coefficient;  // c = (psi, g) = (2 pi)^{3/2} conj ghat(q) / D(q)
    Complex denominator;  // D(q)
};

// Outgoing-wave solution psi(x) = e^{i k.x} - lambda c u(|x|) with the s-wave
// resolvent kernel
//
//     u(r) = (1/(q r)) Int_0^inf sin(q min(r,s)) e^{i q max(r,s)} s g(s) ds.
//
// The denominator comes from the autocorrelation route, so evaluation needs
// no grid. A zero coupling is accepted here (plane-wave sanity limit).
class WaveEvaluator {
public:
    WaveEvaluator(const PotentialSpec& spec, const Vec3& k, double epsilon = 1e-8);

    Complex operator()(const Vec3& x) const;

    // u(|x|); u(0) = Int_0^inf e^{i q s} s g(s) ds.
    Complex scattered_radial(double r) const;

    const ScatteringState& state() const { return state_; }

private:
    PotentialSpec spec_;
    Vec3 k_;
    double q_ = 0.0;
    double extent_ = 0.0;
    ScatteringState state_;
};

Complex wavefunction(const PotentialSpec& spec, const Vec3& k, const Vec3& x);

// Independent check that a computed wave actually solves the equation it came
// from: every right-hand-side ingredient (the free resolvent applied to the
// shape, the inner product (psi, g), the shape transform) is recomputed by
// direct quadrature, with no use of the evaluator's internal kernel, closed
// forms, or Filon table.
class LippmannSchwingerProbe {
public:
    LippmannSchwingerProbe(const PotentialSpec& spec, const Vec3& k);

    // | psi(x) - e^{i k.x} + lambda (psi, g) (R0 g)(|x|) |
    double residual(const Vec3& x) const;

    const WaveEvaluator& wave() const { return wave_; }

private:
    Complex green_applied(double r) const; // (R0(q) g)(r) by nested quadrature

    PotentialSpec spec_;
    Vec3 k_;
    double q_ = 0.0;
    double extent_ = 0.0;
    WaveEvaluator wave_;
    Complex inner_product_; // (psi, g) by quadrature against the wave itself
};

double lippmann_schwinger_residual(const PotentialSpec& spec, const Vec3& k, const Vec3& x);

} // namespace scatter
