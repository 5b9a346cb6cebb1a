#include "scatter/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace scatter {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

bool near_zero(double x, double eps) { return std::abs(x) < eps; }

} // namespace

// ---------------------------------------------------------------------------
// Spectral density
// ---------------------------------------------------------------------------

Xi compute_xi(const PotentialSpec& spec, const FormFactor& ff, const UniformGrid& grid) {
    validate(spec);
    if (ff.grid != grid) throw ValidationError("form factor grid does not match");
    std::vector<double> radial(static_cast<size_t>(grid.radial_count()));
    for (int k = 0; k < grid.radial_count(); ++k) {
        const double q = grid.radial_point(k);
        radial[static_cast<size_t>(k)] =
            4.0 * kPi * spec.lambda * q * q * std::norm(ff.at_index(k));
    }
    Xi xi{extend_even(grid, std::span<const double>(radial)), spec};
    return xi;
}

Xi compute_xi(const PotentialSpec& spec, const DirectionalFormFactor& ff,
              const UniformGrid& grid) {
    validate(spec);
    if (ff.grid != grid) throw ValidationError("form factor grid does not match");
    const size_t m = ff.sphere.size();
    std::vector<double> radial(static_cast<size_t>(grid.radial_count()));
    std::vector<double> terms(m);
    for (int k = 0; k < grid.radial_count(); ++k) {
        const double q = grid.radial_point(k);
        for (size_t d = 0; d < m; ++d) {
            terms[d] = ff.sphere.weight[d] * std::norm(ff.at(k, d));
        }
        radial[static_cast<size_t>(k)] =
            spec.lambda * q * q * pairwise_sum(std::span<const double>(terms));
    }
    Xi xi{extend_even(grid, std::span<const double>(radial)), spec};
    return xi;
}

// ---------------------------------------------------------------------------
// Denominator
// ---------------------------------------------------------------------------

Complex Denominator::at(double q) const {
    const int m = grid.radial_count();
    const double dq = grid.spacing();
    if (q < 0.0 || q > grid.half_width * (1.0 + 1e-12)) {
        throw ValidationError("momentum outside the tabulated range");
    }
    if (m < 2) throw ValidationError("denominator has too few samples");
    if (m < 4) {
        // Linear fallback for toy grids.
        const int k0 = std::min(static_cast<int>(q / dq), m - 2);
        const double t = q / dq - k0;
        return (1.0 - t) * values[static_cast<size_t>(k0)] +
               t * values[static_cast<size_t>(k0 + 1)];
    }
    const double t = q / dq;
    const int k0 = std::clamp(static_cast<int>(std::floor(t)) - 1, 0, m - 4);
    Complex sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double xi = static_cast<double>(k0 + i);
        double basis = 1.0;
        for (int j = 0; j < 4; ++j) {
            if (j == i) continue;
            const double xj = static_cast<double>(k0 + j);
            basis *= (t - xj) / (xi - xj);
        }
        sum += basis * values[static_cast<size_t>(k0 + i)];
    }
    return sum;
}

Denominator compute_denominator(const Xi& xi, const SingularOperator& op) {
    const UniformGrid& grid = xi.samples.grid;
    if (op.grid() != grid) throw ValidationError("operator grid does not match");
    if (grid.radial_count() < 4) {
        throw ValidationError("grid too small for the q = 0 extrapolation");
    }

    SampledFunction w = op.apply(xi.samples);
    for (size_t j = 0; j < w.values.size(); ++j) w.values[j] += xi.samples.values[j];
    // For real even xi, (1 + S) xi is Hermitian, which is exactly what the
    // radial restriction needs to fill the q = L slot from the -L sample.
    w.symmetry = Symmetry::hermitian;
    const std::vector<Complex> radial = restrict_radial(w);

    Denominator d;
    d.grid = grid;
    d.route = DenominatorRoute::hilbert;
    d.values.resize(radial.size());
    for (int k = 1; k < grid.radial_count(); ++k) {
        const double q = grid.radial_point(k);
        d.values[static_cast<size_t>(k)] =
            1.0 + Complex(0.0, kPi / (2.0 * q)) * radial[static_cast<size_t>(k)];
    }
    // The defining formula is 0/0 at q = 0; fill by quadratic extrapolation
    // through the three smallest positive shells.
    d.values[0] = 3.0 * d.values[1] - 3.0 * d.values[2] + d.values[3];
    return d;
}

namespace {

// Int_A^B s g(s) ds with per-shape antiderivatives where they are elementary.
double shape_moment(const RadialProfile& profile, double a, double b) {
    if (const auto* g = std::get_if<GaussianProfile>(&profile)) {
        const double al = g->alpha;
        return (std::exp(-al * a * a) - std::exp(-al * b * b)) / (2.0 * al);
    }
    if (const auto* y = std::get_if<YukawaProfile>(&profile)) {
        const double mu = y->mu;
        return (std::exp(-mu * a) - std::exp(-mu * b)) / mu;
    }
    if (a >= b) return 0.0;
    return integrate([&](double s) { return profile_value_times_r(profile, s); }, a, b, 1e-10);
}

// Cumulative Int_0^r s g(s) ds for a tabulated shape. Between knots the
// interpolant is cubic, so s g(s) has degree at most four and a three-point
// Gauss-Legendre panel per piece is exact; the same holds on the clamped
// segment before the first knot and on a partial piece up to an off-knot r.
class MomentTable {
  public:
    MomentTable(const TabulatedProfile& shape, std::function<double(double)> sample)
        : sample_(std::move(sample)) {
        knots_.push_back(0.0);
        for (double r : shape.radius) {
            if (r > 0.0) knots_.push_back(r);
        }
        cumulative_.resize(knots_.size());
        cumulative_[0] = 0.0;
        for (size_t i = 1; i < knots_.size(); ++i) {
            cumulative_[i] = cumulative_[i - 1] + panel(knots_[i - 1], knots_[i]);
        }
    }

    double between(double a, double b) const {
        if (b <= a) return 0.0;
        return upto(b) - upto(a);
    }

  private:
    double panel(double a, double b) const {
        const double node = std::sqrt(0.6);
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        return half / 9.0 *
               (5.0 * sample_(mid - half * node) + 8.0 * sample_(mid) +
                5.0 * sample_(mid + half * node));
    }

    double upto(double r) const {
        if (r <= 0.0) return 0.0;
        if (r >= knots_.back()) return cumulative_.back();
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
        const size_t i = static_cast<size_t>(it - knots_.begin()) - 1;
        return cumulative_[i] + panel(knots_[i], r);
    }

    std::function<double(double)> sample_;
    std::vector<double> knots_;
    std::vector<double> cumulative_;
};

// Composite five-point Gauss rule on a fixed uniform mesh. Tabulated shapes
// need this instead of the adaptive rule: their interpolant's deep tail is
// noise in relative terms, and adaptive refinement grinds to full depth
// there without ever certifying a tolerance.
double composite_gauss(const std::function<double(double)>& f, double a, double b,
                       int panels) {
    static const double node[2] = {0.5384693101056831, 0.9061798459386640};
    static const double weight[3] = {0.5688888888888889, 0.4786286704993665,
                                     0.2369268850561891};
    const double h = (b - a) / panels;
    std::vector<double> parts(static_cast<size_t>(panels));
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        parts[static_cast<size_t>(p)] =
            half * (weight[0] * f(mid) +
                    weight[1] * (f(mid - half * node[0]) + f(mid + half * node[0])) +
                    weight[2] * (f(mid - half * node[1]) + f(mid + half * node[1])));
    }
    return pairwise_sum(std::span<const double>(parts));
}

} // namespace

AutocorrelationDenominator::AutocorrelationDenominator(const PotentialSpec& spec, int panels) {
    if (!std::isfinite(spec.lambda)) throw ValidationError("coupling must be finite");
    lambda_ = spec.lambda;
    const RadialProfile& profile = spec.profile;
    // Validate the shape without insisting on lambda != 0 (the plane-wave
    // sanity limit is allowed here).
    PotentialSpec probe{1.0, profile};
    validate(probe);

    const double extent = profile_extent(profile);
    const auto* tab = std::get_if<TabulatedProfile>(&profile);
    const double rho_max = tab != nullptr ? 2.0 * extent : extent;

    // Tabulated shapes would otherwise re-integrate the inner moment for
    // every (y, rho) sample; precompute its cumulative form once instead.
    const auto sample = make_profile_sampler(profile);
    std::optional<MomentTable> moments;
    if (tab != nullptr) moments.emplace(*tab, sample);
    auto moment = [&](double a, double b) {
        return moments ? moments->between(a, b) : shape_moment(profile, a, b);
    };

    // Mesh for the fixed-rule branch, sized so panels stay a few knot
    // spacings wide for typical tables.
    const double panel_width = extent / 256.0;
    auto fixed_rule = [&](const std::function<double(double)>& f, double a, double b) {
        const int panels = std::max(16, static_cast<int>(std::ceil((b - a) / panel_width)));
        return composite_gauss(f, a, b, panels);
    };

    // rho a(rho) = 2 pi Int y g(y) [Int_{|y-rho|}^{y+rho} s g(s) ds] dy.
    auto g_of_rho = [&](double rho) {
        if (rho == 0.0) return 0.0;
        auto f = [&](double y) { return sample(y) * moment(std::abs(y - rho), y + rho); };
        auto piece = [&](double a, double b) {
            return tab != nullptr ? fixed_rule(f, a, b) : integrate(f, a, b, 1e-9);
        };
        // |y - rho| kinks the moment at y = rho for non-even shapes; split
        // there so each piece is smooth.
        if (rho < extent) {
            return kTwoPi * (piece(0.0, rho) + piece(rho, extent));
        }
        return kTwoPi * piece(0.0, extent);
    };
    table_ = std::make_shared<const OscillatoryTable>(g_of_rho, rho_max, panels);
}

Complex AutocorrelationDenominator::value(double q) const {
    if (q < 0.0) throw ValidationError("momentum must be nonnegative");
    return 1.0 + lambda_ * table_->value(q);
}

Complex denominator_autocorr(const PotentialSpec& spec, double q) {
    return AutocorrelationDenominator(spec).value(q);
}

Condition7Report check_condition7(const Denominator& d, double epsilon) {
    Condition7Report report;
    report.epsilon = epsilon;
    report.min_abs = std::numeric_limits<double>::infinity();
    for (int k = 0; k < d.grid.radial_count(); ++k) {
        const double q = d.grid.radial_point(k);
        const double mag = std::abs(d.at_index(k));
        if (mag < report.min_abs) {
            report.min_abs = mag;
            report.argmin_q = q;
        }
        if (mag < epsilon) report.failing_shells.push_back(q);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Amplitude and forward data
// ---------------------------------------------------------------------------

Complex amplitude(const PotentialSpec& spec, const Denominator& d, double q,
                  const Vec3& n, const Vec3& omega, double epsilon) {
    validate(spec);
    normalized(n); // direction arguments must at least be valid directions
    normalized(omega);
    if (q < 0.0) throw ValidationError("momentum must be nonnegative");
    const Complex dq = d.at(q);
    if (std::abs(dq) <= epsilon) {
        throw Condition7Violation("denominator vanishes on this shell");
    }
    // Radial shape: ghat(q n) = ghat(q omega) = ghat(q), so the directions
    // drop out of the product ghat(q n) conj ghat(q omega).
    const Complex ghat = radial_fourier(spec.profile, q);
    return -2.0 * kPi * kPi * spec.lambda * ghat * std::conj(ghat) / dq;
}

ForwardData forward_F(const Xi& xi, const Denominator& d, double epsilon) {
    const UniformGrid& grid = xi.samples.grid;
    if (d.grid != grid) throw ValidationError("denominator grid does not match");
    const int m = grid.radial_count();
    if (m < 4) throw ValidationError("grid too small for the q = 0 extrapolation");

    std::vector<Complex> radial(static_cast<size_t>(m));
    for (int k = 1; k < m; ++k) {
        const double q = grid.radial_point(k);
        const int j = k < m - 1 ? grid.zero_index() + k : 0; // q = L sits on the -L slot
        const double xk = xi.samples.values[static_cast<size_t>(j)].real();
        const Complex dk = d.at_index(k);
        // |2q + i pi (1 + S) xi| = |2 q D|; a vanishing denominator is only
        // tolerable where the numerator xi vanishes along with it.
        if (std::abs(2.0 * q * dk) < epsilon) {
            if (near_zero(xk, epsilon)) {
                radial[static_cast<size_t>(k)] = 0.0;
                continue;
            }
            throw ZeroDenominator("forward data denominator vanishes at a shell "
                                  "with nonzero spectral density");
        }
        radial[static_cast<size_t>(k)] = -2.0 * kPi * kPi * xk / (q * q * dk);
    }
    // Hermitian symmetry forces F(0) real; extrapolate and keep the real part.
    radial[0] = (3.0 * radial[1] - 3.0 * radial[2] + radial[3]).real();

    ForwardData data;
    data.samples = extend_hermitian(grid, radial);
    data.source = xi.source;
    return data;
}

// ---------------------------------------------------------------------------
// Wavefunction
// ---------------------------------------------------------------------------

WaveEvaluator::WaveEvaluator(const PotentialSpec& spec, const Vec3& k, double epsilon)
    : spec_(spec), k_(k) {
    PotentialSpec probe{1.0, spec.profile};
    validate(probe);
    if (!std::isfinite(spec.lambda)) throw ValidationError("coupling must be finite");
    q_ = norm(k);
    if (!(q_ > 0.0)) throw ValidationError("incident momentum must be nonzero");
    extent_ = profile_extent(spec_.profile);

    const Complex d = spec_.lambda == 0.0
                          ? Complex(1.0, 0.0)
                          : AutocorrelationDenominator(spec_).value(q_);
    if (std::abs(d) <= epsilon) {
        throw Condition7Violation("denominator vanishes on the incident shell");
    }
    const Complex ghat = radial_fourier(spec_.profile, q_);
    state_.shell = q_;
    state_.incident = normalized(k);
    state_.denominator = d;
    state_.coefficient = std::pow(kTwoPi, 1.5) * std::conj(ghat) / d;
}

Complex WaveEvaluator::scattered_radial(double r) const {
    if (r < 0.0) throw ValidationError("radius must be nonnegative");
    const RadialProfile& profile = spec_.profile;
    if (r == 0.0) {
        return integrate_complex(
            [&](double s) {
                return std::polar(1.0, q_ * s) * profile_value_times_r(profile, s);
            },
            0.0, extent_, 1e-10);
    }
    const double inner_top = std::min(r, extent_);
    const double i1 = integrate(
        [&](double s) { return std::sin(q_ * s) * profile_value_times_r(profile, s); }, 0.0,
        inner_top, 1e-10);
    Complex i2 = 0.0;
    if (r < extent_) {
        i2 = integrate_complex(
            [&](double s) {
                return std::polar(1.0, q_ * s) * profile_value_times_r(profile, s);
            },
            r, extent_, 1e-10);
    }
    return (std::polar(1.0, q_ * r) * i1 + std::sin(q_ * r) * i2) / (q_ * r);
}

Complex WaveEvaluator::operator()(const Vec3& x) const {
    const Complex plane = std::polar(1.0, dot(k_, x));
    if (spec_.lambda == 0.0) return plane;
    return plane - spec_.lambda * state_.coefficient * scattered_radial(norm(x));
}

Complex wavefunction(const PotentialSpec& spec, const Vec3& k, const Vec3& x) {
    return WaveEvaluator(spec, k)(x);
}

// ---------------------------------------------------------------------------
// Independent residual probe
// ---------------------------------------------------------------------------

LippmannSchwingerProbe::LippmannSchwingerProbe(const PotentialSpec& spec, const Vec3& k)
    : spec_(spec), k_(k), wave_(spec, k) {
    q_ = norm(k);
    extent_ = profile_extent(spec_.profile);

    // (psi, g) over R^3, reduced to radial integrals. The plane-wave part is
    // the sine transform of the shape, recomputed by quadrature; the
    // scattered part integrates the wave's own radial kernel against g.
    const double plane_part = (4.0 * kPi / q_) *
                              integrate(
                                  [&](double r) {
                                      return std::sin(q_ * r) *
                                             profile_value_times_r(spec_.profile, r);
                                  },
                                  0.0, extent_, 1e-10);
    // The integrand is only as smooth as the evaluator's inner quadrature
    // (1e-10), so the outer tolerance stays two decades above that noise.
    Complex scattered_part = 0.0;
    if (spec_.lambda != 0.0) {
        scattered_part = 4.0 * kPi *
                         integrate_complex(
                             [&](double r) -> Complex {
                                 return wave_.scattered_radial(r) * r *
                                        profile_value_times_r(spec_.profile, r);
                             },
                             0.0, extent_, 1e-8);
    }
    inner_product_ = plane_part - spec_.lambda * wave_.state().coefficient * scattered_part;
}

Complex LippmannSchwingerProbe::green_applied(double r) const {
    // (R0(q) g)(r) as a literal two-dimensional quadrature over the shape,
    //
    //   Int_0^inf ds s^2 g(s) (1/2) Int_{-1}^{1} dt e^{i q R}/R,
    //   R = sqrt(r^2 + s^2 - 2 r s t),
    //
    // with the polar variable mapped as t = 1 - v^2 so the integrand stays
    // bounded at the R -> 0 corner (s = r, t = 1).
    auto outer = [&](double s) -> Complex {
        const double sg = profile_value_times_r(spec_.profile, s); // s g(s)
        if (sg == 0.0) return 0.0;
        auto inner = [&](double v) -> Complex {
            const double rr = (r - s) * (r - s) + 2.0 * r * s * v * v;
            const double R = std::sqrt(rr);
            if (R == 0.0) return Complex(0.0, 0.0);
            return (v / R) * std::polar(1.0, q_ * R);
        };
        return s * sg * integrate_complex(inner, 0.0, std::sqrt(2.0), 1e-11);
    };
    // The inner integral's value has an |r - s| kink across the diagonal;
    // integrate each side separately so both pieces are smooth.
    if (r > 0.0 && r < extent_) {
        return integrate_complex(outer, 0.0, r, 1e-8) +
               integrate_complex(outer, r, extent_, 1e-8);
    }
    return integrate_complex(outer, 0.0, extent_, 1e-8);
}

double LippmannSchwingerProbe::residual(const Vec3& x) const {
    const Complex psi = wave_(x);
    const Complex rhs = std::polar(1.0, dot(k_, x)) -
                        spec_.lambda * inner_product_ * green_applied(norm(x));
    return std::abs(psi - rhs);
}

double lippmann_schwinger_residual(const PotentialSpec& spec, const Vec3& k, const Vec3& x) {
    return LippmannSchwingerProbe(spec, k).residual(x);
}

} // namespace scatter
