#include "doctest.h"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "scatter/singular.hpp"

using namespace scatter;

namespace {

SampledFunction sample(const UniformGrid& grid, const std::function<Complex(double)>& f,
                       Symmetry sym = Symmetry::none) {
    SampledFunction phi{grid, std::vector<Complex>(static_cast<size_t>(grid.count)), sym};
    for (int j = 0; j < grid.count; ++j) {
        phi.values[static_cast<size_t>(j)] = f(grid.point(j));
    }
    return phi;
}

Complex mean(const SampledFunction& f) {
    return pairwise_sum(std::span<const Complex>(f.values)) / double(f.grid.count);
}

double sup_diff(const SampledFunction& a, const SampledFunction& b) {
    double m = 0.0;
    for (size_t j = 0; j < a.values.size(); ++j) {
        m = std::max(m, std::abs(a.values[j] - b.values[j]));
    }
    return m;
}

} // namespace

TEST_CASE("applying S twice subtracts the mean") {
    const UniformGrid grid = make_uniform_grid(30.0, 2048);
    const SingularOperator op(grid);
    const SampledFunction phi = sample(grid, [](double q) {
        return std::exp(-q * q / 50.0) * Complex(std::cos(q), std::sin(0.7 * q));
    });
    const Complex mu = mean(phi);
    const SampledFunction twice = op.apply(op.apply(phi));
    double worst = 0.0;
    for (size_t j = 0; j < phi.values.size(); ++j) {
        worst = std::max(worst, std::abs(twice.values[j] - (phi.values[j] - mu)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("S is linear and annihilates zero") {
    const UniformGrid grid = make_uniform_grid(10.0, 256);
    const SingularOperator op(grid);
    const SampledFunction f = sample(grid, [](double q) {
        return Complex(std::exp(-q * q), 0.0);
    });
    const SampledFunction g = sample(grid, [](double q) {
        return Complex(0.0, std::exp(-(q - 1.0) * (q - 1.0)));
    });
    SampledFunction combo = f;
    for (size_t j = 0; j < combo.values.size(); ++j) {
        combo.values[j] = 2.0 * f.values[j] + Complex(0.0, -3.0) * g.values[j];
    }
    const SampledFunction lhs = op.apply(combo);
    const SampledFunction sf = op.apply(f);
    const SampledFunction sg = op.apply(g);
    double worst = 0.0;
    for (size_t j = 0; j < lhs.values.size(); ++j) {
        const Complex rhs = 2.0 * sf.values[j] + Complex(0.0, -3.0) * sg.values[j];
        worst = std::max(worst, std::abs(lhs.values[j] - rhs));
    }
    CHECK(worst < 1e-13);

    const SampledFunction zero = sample(grid, [](double) { return Complex(0.0); });
    const SampledFunction sz = op.apply(zero);
    for (const Complex& v : sz.values) CHECK(v == Complex(0.0, 0.0));
}

TEST_CASE("Lorentzian transform on the production grid") {
    // Exact: S[1/(1+y^2)](x) = i x/(1+x^2). The periodic model's truncation
    // bias for this slowly decaying shape is O(1/L); at L = 100 it sits just
    // below 1e-3 over |x| <= 10.
    const UniformGrid grid = make_uniform_grid(100.0, 16384);
    const SingularOperator op(grid);
    const SampledFunction phi = sample(
        grid, [](double q) { return Complex(1.0 / (1.0 + q * q), 0.0); },
        Symmetry::even_real);
    const SampledFunction s = op.apply(phi);
    double worst = 0.0;
    for (int j = 0; j < grid.count; ++j) {
        const double x = grid.point(j);
        if (std::abs(x) > 10.0) continue;
        const Complex exact(0.0, x / (1.0 + x * x));
        worst = std::max(worst, std::abs(s.values[static_cast<size_t>(j)] - exact));
    }
    MESSAGE("Lorentzian sup error on |x| <= 10: ", worst);
    CHECK(worst < 1e-3);
}

TEST_CASE("principal-value oracle reproduces closed forms") {
    // Lorentzian: i x/(1+x^2) -> 0.5i at x = 1.
    const auto lorentz = [](double y) { return 1.0 / (1.0 + y * y); };
    const Complex at1 = apply_S_pv(lorentz, 1.0);
    CHECK(std::abs(at1 - Complex(0.0, 0.5)) < 1e-8);

    // Any even shape transforms to zero at the origin.
    const auto gauss = [](double y) { return std::exp(-y * y); };
    CHECK(std::abs(apply_S_pv(gauss, 0.0)) < 1e-10);

    // Gaussian: S[e^{-y^2}](x) = 2i F(x)/sqrt(pi) with F the Dawson
    // integral; F(1) = 0.53807950691...
    const Complex g1 = apply_S_pv(gauss, 1.0);
    const double dawson1 = 0.5380795069127684;
    CHECK(std::abs(g1 - Complex(0.0, 2.0 * dawson1 / std::sqrt(kPi))) < 1e-8);
}

TEST_CASE("backend matches the quadrature oracle on a wide grid") {
    const UniformGrid grid = make_uniform_grid(1000.0, 131072);
    const SingularOperator op(grid);

    const auto lorentz = [](double y) { return 1.0 / (1.0 + y * y); };
    const auto gauss = [](double y) { return std::exp(-y * y / 4.0); };

    const SampledFunction sl = op.apply(
        sample(grid, [&](double q) { return Complex(lorentz(q), 0.0); }));
    const SampledFunction sg = op.apply(
        sample(grid, [&](double q) { return Complex(gauss(q), 0.0); }));

    // The wrapped kernel drifts from 1/(y - x) by O(|x| / L^2), so the error
    // grows toward the edge of the comparison range for both shapes.
    for (double target : {0.5, 1.0, 10.0, 100.0}) {
        const int j = grid.zero_index() +
                      static_cast<int>(std::lround(target / grid.spacing()));
        const double x = grid.point(j);
        CHECK(std::abs(sl.values[static_cast<size_t>(j)] - apply_S_pv(lorentz, x)) < 1e-4);
        CHECK(std::abs(sg.values[static_cast<size_t>(j)] - apply_S_pv(gauss, x)) < 1e-4);
    }
}

TEST_CASE("dense realization agrees with the transform backend") {
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int n : {64, 512}) {
        const UniformGrid grid = make_uniform_grid(5.0, n);
        const SingularOperator op(grid);
        const std::vector<Complex> dense = dense_singular_matrix(grid);

        SampledFunction phi{grid, std::vector<Complex>(static_cast<size_t>(n)),
                            Symmetry::none};
        for (Complex& v : phi.values) v = Complex(unif(rng), unif(rng));

        const SampledFunction fast = op.apply(phi);
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            Complex acc(0.0);
            for (int k = 0; k < n; ++k) {
                acc += dense[static_cast<size_t>(j) * n + k] *
                       phi.values[static_cast<size_t>(k)];
            }
            worst = std::max(worst, std::abs(acc - fast.values[static_cast<size_t>(j)]));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("dense realization is Hermitian with unit norm") {
    const int n = 64;
    const UniformGrid grid = make_uniform_grid(5.0, n);
    const std::vector<Complex> dense = dense_singular_matrix(grid);

    double herm = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            herm = std::max(herm, std::abs(dense[static_cast<size_t>(j) * n + k] -
                                           std::conj(dense[static_cast<size_t>(k) * n + j])));
        }
    }
    CHECK(herm < 1e-12);

    Eigen::MatrixXcd m(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            m(j, k) = dense[static_cast<size_t>(j) * n + k];
        }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    CHECK(svd.singularValues().maxCoeff() <= 1.0 + 1e-8);
}

TEST_CASE("a real even input maps to an imaginary odd output") {
    const UniformGrid grid = make_uniform_grid(20.0, 1024);
    const SingularOperator op(grid);
    const SampledFunction phi = sample(
        grid, [](double q) { return Complex(1.0 / (1.0 + q * q * q * q), 0.0); },
        Symmetry::even_real);
    const SampledFunction s = op.apply(phi);
    double re_sup = 0.0, odd_defect = 0.0;
    for (int j = 1; j < grid.count; ++j) {
        const size_t a = static_cast<size_t>(j);
        const size_t b = static_cast<size_t>(grid.mirror_index(j));
        re_sup = std::max(re_sup, std::abs(s.values[a].real()));
        odd_defect = std::max(odd_defect, std::abs(s.values[a].imag() +
                                                   s.values[b].imag()));
    }
    CHECK(re_sup < 1e-10);
    CHECK(odd_defect < 1e-10);
}

TEST_CASE("analytic projector on the Lorentzian") {
    // P[1/(1+y^2)](x) = 1/(2(1 - i x)), up to the same O(1/L) bias as S.
    const UniformGrid grid = make_uniform_grid(100.0, 16384);
    const SingularOperator op(grid);
    const SampledFunction phi = sample(
        grid, [](double q) { return Complex(1.0 / (1.0 + q * q), 0.0); },
        Symmetry::even_real);
    const SampledFunction p = op.project_plus(phi);
    double worst = 0.0;
    for (int j = 0; j < grid.count; ++j) {
        const double x = grid.point(j);
        if (std::abs(x) > 10.0) continue;
        const Complex exact = 0.5 / Complex(1.0, -x);
        worst = std::max(worst, std::abs(p.values[static_cast<size_t>(j)] - exact));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("projector algebra") {
    const UniformGrid grid = make_uniform_grid(15.0, 512);
    const SingularOperator op(grid);
    const SampledFunction phi = sample(grid, [](double q) {
        return std::exp(-0.2 * q * q) * Complex(1.0 + q, 0.5 * q * q);
    });

    const SampledFunction p = op.project_plus(phi);
    const SampledFunction q = op.project_minus(phi);
    double split = 0.0;
    for (size_t j = 0; j < phi.values.size(); ++j) {
        split = std::max(split, std::abs(p.values[j] + q.values[j] - phi.values[j]));
    }
    CHECK(split < 1e-14);

    // P^2 = P - mean/4 under the half-weight zero-bin convention.
    const SampledFunction pp = op.project_plus(p);
    const Complex mu = mean(phi);
    double idem = 0.0;
    for (size_t j = 0; j < phi.values.size(); ++j) {
        idem = std::max(idem, std::abs(pp.values[j] - p.values[j] + 0.25 * mu));
    }
    CHECK(idem < 1e-12);
}

TEST_CASE("boundary warning fires only for non-decaying input") {
    const UniformGrid grid = make_uniform_grid(10.0, 256);
    int warnings = 0;
    SingularOperatorOptions options;
    options.warn = [&warnings](const std::string&) { ++warnings; };
    const SingularOperator op(grid, options);

    const SampledFunction flat = sample(grid, [](double) { return Complex(1.0); });
    op.apply(flat);
    CHECK(warnings == 1);

    const SampledFunction decaying = sample(grid, [](double q) {
        return Complex(std::exp(-q * q), 0.0);
    });
    op.apply(decaying);
    CHECK(warnings == 1);
}

TEST_CASE("taper option modifies boundary-heavy input") {
    const UniformGrid grid = make_uniform_grid(10.0, 256);
    const SingularOperator plain(grid);
    SingularOperatorOptions options;
    options.taper = true;
    const SingularOperator tapered(grid, options);

    const SampledFunction phi = sample(
        grid, [](double q) { return Complex(1.0 / (1.0 + q * q), 0.0); },
        Symmetry::even_real);
    CHECK(sup_diff(plain.apply(phi), tapered.apply(phi)) > 1e-6);
}
