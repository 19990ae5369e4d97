#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "resetlab/errors.hpp"
#include "resetlab/stroboscopic.hpp"

using namespace resetlab;

namespace {

StroboscopicMap gompertz_map(double gamma = 0.67, double alpha = 1.0, double T = 1.0) {
    return StroboscopicMap(make_model("gompertz", {{"alpha", alpha}}), ResetRule::scalar_scale(gamma, T));
}

StroboscopicMap logistic_map(double gamma = 0.67, double alpha = 1.0, double T = 1.0, double beta = 0.9) {
    return StroboscopicMap(make_model("logistic", {{"alpha", alpha}, {"beta", beta}}),
                           ResetRule::scalar_scale(gamma, T));
}

FixedPointOptions with_method(FixedPointMethod m) {
    FixedPointOptions o;
    o.method = m;
    return o;
}

}  // namespace

TEST(MapEval, GompertzFixedPoint) {
    const double xs = oracle::gompertz_reset_fixed_point(0.67, 1.0, 1.0);
    EXPECT_NEAR(map_eval(gompertz_map(), StateVector{xs})[0], xs, 1e-10);
}

TEST(MapEval, LogisticIdentityAtEquilibrium) {
    const StroboscopicMap p(make_model("logistic", {{"beta", 0.9}}), ResetRule::linear_map(Matrix::Identity(1, 1), 1.0));
    EXPECT_EQ(map_eval(p, StateVector{0.9})[0], 0.9);
}

TEST(MapEval, EquilibriaAreScaled) {
    for (const auto& name : model_names()) {
        const ModelSpec m = make_model(name);
        for (const auto& eq : m.equilibria()) {
            const StateVector y = map_eval(StroboscopicMap(m, ResetRule::scalar_scale(0.4, 1.5)), eq);
            for (std::size_t i = 0; i < eq.dim(); ++i) EXPECT_NEAR(y[i], 0.4 * eq[i], 1e-15) << name;
        }
    }
}

TEST(MapEval, MatchesClosedForm) {
    for (double x : {0.05, 0.3, 0.9, 2.0}) {
        EXPECT_NEAR(map_eval(logistic_map(), StateVector{x})[0], oracle::logistic_reset_map(x, 0.67, 1.0, 0.9, 1.0),
                    1e-10);
    }
}

TEST(StroboscopicMap, DimensionsMustAgree) {
    EXPECT_THROW(StroboscopicMap(make_model("logistic"), ResetRule::linear_map(Matrix::Identity(2, 2), 1.0)),
                 DimensionMismatch);
    EXPECT_THROW(map_eval(gompertz_map(), StateVector{1.0, 2.0}), DimensionMismatch);
    EXPECT_THROW(map_eval(gompertz_map(), StateVector{-1.0}), DomainError);
}

TEST(IterateMap, GompertzMatchesAffineSolution) {
    const StroboscopicMap p = gompertz_map();
    for (double x0 : {0.02, 0.5, 3.0, 10.0}) {
        const MapOrbit orbit = iterate_map(p, StateVector{x0}, 50);
        ASSERT_TRUE(orbit.complete());
        ASSERT_EQ(orbit.states.size(), 50u);
        for (int n = 1; n <= 50; ++n) {
            EXPECT_NEAR(orbit.states[static_cast<std::size_t>(n - 1)][0],
                        oracle::gompertz_reset_iterate(x0, 0.67, 1.0, 1.0, n), 1e-8)
                << "x0=" << x0 << " n=" << n;
        }
    }
}

TEST(IterateMap, FixedPointIsConstant) {
    const double xs = oracle::gompertz_reset_fixed_point(0.67, 1.0, 1.0);
    for (const auto& x : iterate_map(gompertz_map(), StateVector{xs}, 20).states) EXPECT_NEAR(x[0], xs, 1e-10);
}

TEST(IterateMap, LogisticConvergesBy40) {
    const auto orbit = iterate_map(logistic_map(), StateVector{0.5}, 40);
    EXPECT_NEAR(orbit.states.back()[0], oracle::logistic_reset_fixed_point(0.67, 1.0, 0.9, 1.0), 1e-8);
}

TEST(IterateMap, StopsOnDomainError) {
    const StroboscopicMap p(make_model("gompertz"), ResetRule::linear_map(Matrix::Constant(1, 1, -1.0), 1.0));
    const MapOrbit orbit = iterate_map(p, StateVector{0.5}, 10);
    EXPECT_FALSE(orbit.complete());
    EXPECT_EQ(orbit.states.size(), 1u);
    ASSERT_TRUE(orbit.failure->iteration().has_value());
    EXPECT_EQ(*orbit.failure->iteration(), 2u);
}

TEST(FixedPoint, Gompertz) {
    const FixedPointReport r = find_fixed_point(gompertz_map(), StateVector{2.0});
    EXPECT_NEAR(r.x_star[0], oracle::gompertz_reset_fixed_point(0.67, 1.0, 1.0), 1e-9);
    EXPECT_NEAR(r.spectral_radius, std::exp(-1.0), 1e-5);
    EXPECT_EQ(r.classification, Stability::stable);
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_EQ(r.method, FixedPointMethod::picard);
}

TEST(FixedPoint, Logistic) {
    const FixedPointReport r = find_fixed_point(logistic_map(), StateVector{0.5});
    EXPECT_NEAR(r.x_star[0], oracle::logistic_reset_fixed_point(0.67, 1.0, 0.9, 1.0), 1e-9);
    EXPECT_LT(r.spectral_radius, 1.0);
    EXPECT_EQ(r.classification, Stability::stable);
}

TEST(FixedPoint, LogisticBelowThresholdGoesToZero) {
    const FixedPointReport r = find_fixed_point(logistic_map(0.3), StateVector{0.5});
    EXPECT_NEAR(r.x_star[0], 0.0, 1e-8);
    EXPECT_EQ(r.classification, Stability::stable);
}

TEST(FixedPoint, MethodsAgree) {
    const FixedPointOptions opts;
    for (const StroboscopicMap& p : {gompertz_map(), logistic_map(), gompertz_map(0.3, 2.0, 0.5)}) {
        const StateVector x0{0.6};
        const auto a = find_fixed_point(p, x0, with_method(FixedPointMethod::picard));
        const auto b = find_fixed_point(p, x0, with_method(FixedPointMethod::newton_fd));
        EXPECT_EQ(a.method, FixedPointMethod::picard);
        EXPECT_EQ(b.method, FixedPointMethod::newton_fd);
        EXPECT_NEAR(a.x_star[0], b.x_star[0], 10 * opts.tol);
    }
}

TEST(FixedPoint, AutomaticFallsBackToNewton) {
    // Near the degenerate case the Picard contraction factor is close to one.
    FixedPointOptions o;
    o.max_iter = 40;
    const StroboscopicMap p = logistic_map(0.45, 1.0, 1.0);
    const auto r = find_fixed_point(p, StateVector{0.5}, o);
    EXPECT_EQ(r.method, FixedPointMethod::newton_fd);
    EXPECT_NEAR(r.x_star[0], oracle::logistic_reset_fixed_point(0.45, 1.0, 0.9, 1.0), 1e-8);
}

TEST(FixedPoint, NoConvergenceCarriesBestIterate) {
    FixedPointOptions o;
    o.method = FixedPointMethod::picard;
    o.max_iter = 3;
    try {
        find_fixed_point(logistic_map(), StateVector{0.05}, o);
        FAIL();
    } catch (const NoConvergence& e) {
        EXPECT_EQ(e.max_iter(), 3u);
        EXPECT_EQ(e.best().size(), 1u);
        EXPECT_GT(e.best_residual(), 0.0);
    }
}

TEST(FixedPoint, SingularJacobian) {
    // P(x) = diag(1, 0.5) x: the first direction is neutral, so P' - I is singular.
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 0.5;
    const StroboscopicMap p(make_model("zero_field", {{"dim", 2.0}}), ResetRule::linear_map(m, 1.0));
    EXPECT_THROW(find_fixed_point(p, StateVector{0.3, 0.7}, with_method(FixedPointMethod::newton_fd)),
                 SingularJacobian);
}

TEST(FixedPoint, OracleGrid) {
    for (double g : {0.3, 0.5, 0.67}) {
        for (double a : {0.5, 1.0, 2.0}) {
            for (double T : {0.5, 1.0, 2.0}) {
                const auto rg = find_fixed_point(gompertz_map(g, a, T), StateVector{0.5});
                EXPECT_NEAR(rg.x_star[0], oracle::gompertz_reset_fixed_point(g, a, T), 1e-6);
                if (g > std::exp(-a * T)) {
                    const auto rl = find_fixed_point(logistic_map(g, a, T), StateVector{0.5});
                    EXPECT_NEAR(rl.x_star[0], oracle::logistic_reset_fixed_point(g, a, 0.9, T), 1e-6);
                }
            }
        }
    }
}

TEST(Jacobian, GompertzDerivative) {
    const double xs = oracle::gompertz_reset_fixed_point(0.67, 1.0, 1.0);
    const FdJacobian j = jacobian_fd(gompertz_map(), StateVector{xs});
    EXPECT_NEAR(j.matrix(0, 0), std::exp(-1.0), 1e-5);
    EXPECT_FALSE(j.one_sided);
}

TEST(Jacobian, ZeroFieldGivesResetMatrix) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.5;
    d(1, 1) = 0.25;
    const ModelSpec zero = make_model("zero_field", {{"dim", 2.0}});
    const FdJacobian jd = jacobian_fd(StroboscopicMap(zero, ResetRule::linear_map(d, 1.0)), StateVector{0.3, -1.7});
    EXPECT_EQ(jd.matrix, d);

    Matrix m(2, 2);
    m << 0.9, -0.2, 0.35, 1.4;
    const FdJacobian jm = jacobian_fd(StroboscopicMap(zero, ResetRule::linear_map(m, 1.0)), StateVector{0.3, -1.7});
    for (Eigen::Index r = 0; r < 2; ++r) {
        for (Eigen::Index c = 0; c < 2; ++c) EXPECT_NEAR(jm.matrix(r, c), m(r, c), 1e-5 * std::abs(m(r, c)));
    }
}

TEST(Jacobian, MalthusScaleIsConstant) {
    const StroboscopicMap p(make_model("malthus_decay", {{"alpha", 1.0}}), ResetRule::scalar_scale(0.67, 1.0));
    const double expected = 0.67 * std::exp(-1.0);
    for (double x : {0.1, 1.0, 7.0, -3.0}) {
        EXPECT_NEAR(jacobian_fd(p, StateVector{x}).matrix(0, 0), expected, 1e-5 * expected) << x;
    }
}

TEST(Jacobian, OneSidedAtDomainEdge) {
    // A central probe at x = 5e-7 would step to x < 0, outside the Gompertz domain.
    const FdJacobian j = jacobian_fd(gompertz_map(), StateVector{5e-7});
    EXPECT_TRUE(j.one_sided);
    EXPECT_GT(j.matrix(0, 0), 0.0);
}

TEST(Spectral, RadiusAndNorm) {
    Matrix rot(2, 2);
    rot << 0.0, -0.5, 0.5, 0.0;
    EXPECT_NEAR(spectral_radius(rot), 0.5, 1e-15);
    Matrix shear(2, 2);
    shear << 0.5, 10.0, 0.0, 0.5;
    EXPECT_NEAR(spectral_radius(shear), 0.5, 1e-12);
    EXPECT_GT(spectral_norm(shear), 10.0);
    EXPECT_EQ(classify(0.5), Stability::stable);
    EXPECT_EQ(classify(1.0 + 2e-6), Stability::unstable);
    EXPECT_EQ(classify(1.0 - 5e-7), Stability::marginal);
}

TEST(Stability, ConsistentWithPerturbedIterates) {
    const double delta = 1e-3;
    // Stable: gompertz and logistic positive fixed points.
    for (const StroboscopicMap& p : {gompertz_map(), logistic_map()}) {
        const auto r = find_fixed_point(p, StateVector{0.5});
        ASSERT_EQ(r.classification, Stability::stable);
        const auto orbit = iterate_map(p, StateVector{r.x_star[0] + delta}, 500);
        EXPECT_NEAR(orbit.states.back()[0], r.x_star[0], 1e-8);
    }
    // Unstable: the origin of the logistic map when gamma e^{alpha T} > 1.
    const StroboscopicMap p = logistic_map();
    const auto r = analyze_fixed_point(p, StateVector{0.0}, 0, FixedPointMethod::picard);
    EXPECT_EQ(r.classification, Stability::unstable);
    EXPECT_NEAR(r.spectral_radius, 0.67 * std::exp(1.0), 1e-6);
    const auto orbit = iterate_map(p, StateVector{delta}, 50);
    bool escaped = false;
    for (const auto& x : orbit.states) escaped = escaped || std::abs(x[0]) > 10 * delta;
    EXPECT_TRUE(escaped);
}

TEST(Stability, DegenerateLogisticIsMarginal) {
    const StroboscopicMap p = logistic_map(std::exp(-1.0));
    const auto r = analyze_fixed_point(p, StateVector{0.0}, 0, FixedPointMethod::picard);
    EXPECT_EQ(r.classification, Stability::marginal);
}

TEST(Contraction, MalthusLinear) {
    const StroboscopicMap p(make_model("malthus_decay", {{"alpha", 1.0}}), ResetRule::scalar_scale(0.67, 1.0));
    const auto est = estimate_contraction(p, Box{{0.1}, {10.0}}, 50);
    EXPECT_NEAR(est.L_hat, 0.67 * std::exp(-1.0), 1e-6);
    EXPECT_TRUE(est.contractive);
    // P(0.1) = 0.0246 lies below the region, so the region is not invariant.
    EXPECT_FALSE(est.invariant);
    EXPECT_FALSE(est.certified);
    EXPECT_EQ(est.valid_samples, 50u);
}

TEST(Contraction, GompertzCertified) {
    const auto est = estimate_contraction(gompertz_map(), Box{{0.3}, {0.8}}, 200);
    EXPECT_TRUE(est.certified);
    EXPECT_LT(est.L_hat, 1.0);
    // P'(x) = e^{-1} P(x) / x is largest at the left end.
    const double bound = std::exp(-1.0) * 0.67 * std::pow(0.3, std::exp(-1.0)) / 0.3;
    EXPECT_NEAR(est.L_hat, bound, 1e-6);
}

TEST(Contraction, LogisticIdentityNearZeroNotCertified) {
    const StroboscopicMap p(make_model("logistic", {{"beta", 0.9}}), ResetRule::linear_map(Matrix::Identity(1, 1), 1.0));
    const auto est = estimate_contraction(p, Box{{0.001}, {0.01}}, 20);
    EXPECT_GT(est.L_hat, 1.0);
    EXPECT_FALSE(est.contractive);
    EXPECT_FALSE(est.certified);
}

TEST(Contraction, InvalidSamplesAreExcluded) {
    const StroboscopicMap p(make_model("gompertz"), ResetRule::scalar_scale(0.67, 1.0));
    const auto est = estimate_contraction(p, Box{{-1.0}, {1.0}}, 5);
    EXPECT_GT(est.invalid_samples, 0u);
    EXPECT_EQ(est.invalid_samples + est.valid_samples, 5u);
    EXPECT_EQ(est.failures.size(), est.invalid_samples);
}

TEST(Basin, GompertzWholeBox) {
    const auto xs = find_fixed_point(gompertz_map(), StateVector{0.5}).x_star;
    const BasinGrid g = basin_scan(gompertz_map(), BasinSpec{Box{{0.01}, {10.0}}, {1000}}, xs);
    EXPECT_EQ(g.cells.size(), 1000u);
    EXPECT_EQ(g.converged_count, 1000u);
    EXPECT_EQ(g.invalid_count, 0u);
    EXPECT_NEAR(g.measure, 9.99, 1e-12);
}

TEST(Basin, LogisticOriginCellDoesNotConverge) {
    const auto xs = find_fixed_point(logistic_map(), StateVector{0.5}).x_star;
    // Three unit cells with centers 0, 1 and 2.
    const BasinGrid g = basin_scan(logistic_map(), BasinSpec{Box{{-0.5}, {2.5}}, {3}}, xs);
    ASSERT_EQ(g.cells.size(), 3u);
    EXPECT_EQ(g.cells[0].center[0], 0.0);
    EXPECT_FALSE(g.cells[0].converged);
    EXPECT_TRUE(g.cells[1].converged);
    EXPECT_TRUE(g.cells[2].converged);
    EXPECT_DOUBLE_EQ(g.measure, 2.0);
}

TEST(Basin, LogisticBelowThresholdAllToZero) {
    const BasinGrid g = basin_scan(logistic_map(0.3), BasinSpec{Box{{0.0}, {2.0}}, {50}}, StateVector{0.0});
    EXPECT_EQ(g.converged_count, 50u);
    EXPECT_DOUBLE_EQ(g.measure, 2.0);
}

TEST(Basin, InvalidCellsExcluded) {
    const auto xs = find_fixed_point(gompertz_map(), StateVector{0.5}).x_star;
    const BasinGrid g = basin_scan(gompertz_map(), BasinSpec{Box{{-1.0}, {1.0}}, {10}}, xs);
    EXPECT_EQ(g.invalid_count, 5u);
    EXPECT_EQ(g.converged_count, 5u);
    EXPECT_DOUBLE_EQ(g.measure, 1.0);
    for (const auto& c : g.cells) EXPECT_NE(c.invalid, c.converged);
}

TEST(Basin, TwoDimensionalOrdering) {
    const StroboscopicMap p(make_model("zero_field", {{"dim", 2.0}}), ResetRule::scalar_scale(0.5, 1.0));
    const BasinGrid g = basin_scan(p, BasinSpec{Box{{0.0, 0.0}, {2.0, 3.0}}, {2, 3}}, StateVector{0.0, 0.0});
    ASSERT_EQ(g.cells.size(), 6u);
    EXPECT_EQ(g.cells[1].center, (StateVector{1.5, 0.5}));
    EXPECT_EQ(g.cells[2].center, (StateVector{0.5, 1.5}));
    EXPECT_DOUBLE_EQ(g.cell_volume, 1.0);
    EXPECT_DOUBLE_EQ(g.measure, 6.0);
}

TEST(Basin, InvalidTarget) {
    EXPECT_THROW(basin_scan(gompertz_map(), BasinSpec{Box{{0.1}, {1.0}}, {4}}, StateVector{0.5}), InvalidTarget);
}

TEST(Basin, DeterministicAcrossWorkers) {
    const auto xs = find_fixed_point(logistic_map(), StateVector{0.5}).x_star;
    const BasinSpec spec{Box{{0.0}, {3.0}}, {301}};
    BasinOptions one;
    one.workers = 1;
    BasinOptions four;
    four.workers = 4;
    const BasinGrid a = basin_scan(logistic_map(), spec, xs, one);
    const BasinGrid b = basin_scan(logistic_map(), spec, xs, four);
    EXPECT_EQ(a.measure, b.measure);
    ASSERT_EQ(a.cells.size(), b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        EXPECT_EQ(a.cells[i].center, b.cells[i].center);
        EXPECT_EQ(a.cells[i].converged, b.cells[i].converged);
        EXPECT_EQ(a.cells[i].iterations, b.cells[i].iterations);
    }
}

TEST(Sweep, LogisticGammaMonotone) {
    const std::vector<double> gammas{0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const auto rows = parameter_sweep([](double g) { return logistic_map(g); }, gammas, StateVector{0.5});
    ASSERT_EQ(rows.size(), gammas.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ASSERT_TRUE(rows[i].x_star) << rows[i].error;
        EXPECT_EQ(rows[i].value, gammas[i]);
        EXPECT_NEAR((*rows[i].x_star)[0], oracle::logistic_reset_fixed_point(gammas[i], 1.0, 0.9, 1.0), 1e-8);
        if (i > 0) EXPECT_GT((*rows[i].x_star)[0], (*rows[i - 1].x_star)[0]);
    }
}

TEST(Sweep, LongPeriodLimit) {
    const std::vector<double> periods{5.0, 10.0, 20.0};
    const auto rows = parameter_sweep([](double T) { return logistic_map(0.67, 1.0, T); }, periods, StateVector{0.5});
    EXPECT_NEAR((*rows.back().x_star)[0], 0.67 * 0.9, 1e-7);
    EXPECT_LT(std::abs((*rows[2].x_star)[0] - 0.603), std::abs((*rows[0].x_star)[0] - 0.603));
}

TEST(Sweep, GompertzGamma) {
    const std::vector<double> gammas{0.3, 0.5, 0.67, 0.9};
    const auto rows = parameter_sweep([](double g) { return gompertz_map(g); }, gammas, StateVector{0.5});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double expected = std::pow(gammas[i], 1.0 / (1.0 - std::exp(-1.0)));
        EXPECT_NEAR((*rows[i].x_star)[0], expected, 1e-8);
        if (i > 0) EXPECT_GT((*rows[i].x_star)[0], (*rows[i - 1].x_star)[0]);
    }
}

TEST(Sweep, FailedRowsAreRecorded) {
    const std::vector<double> gammas{0.5, 1.5, 0.6};
    const auto rows = parameter_sweep([](double g) { return logistic_map(g); }, gammas, StateVector{0.5});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(rows[0].x_star);
    EXPECT_FALSE(rows[1].x_star);
    EXPECT_FALSE(rows[1].error.empty());
    EXPECT_TRUE(rows[2].x_star);
}
