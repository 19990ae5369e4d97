#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "resetlab/config.hpp"
#include "resetlab/errors.hpp"
#include "resetlab/io.hpp"

using namespace resetlab;

TEST(ParseConfig, LogisticScalingScenario) {
    const RunConfig cfg = parse_config(R"(# logistic with annual scaling
model = logistic
param.alpha = 1
param.beta = 0.9
gamma = 0.67
T = 1
x0 = 0.5
)");
    EXPECT_EQ(cfg.scenario.model, "logistic");
    EXPECT_EQ(cfg.scenario.reset.kind, ResetKind::scalar_scale);
    EXPECT_EQ(cfg.scenario.reset.gamma, 0.67);
    EXPECT_EQ(cfg.scenario.reset.period, 1.0);
    EXPECT_EQ(cfg.x0, StateVector{0.5});
    EXPECT_EQ(cfg.precision, 17);
    EXPECT_EQ(cfg.entries.at("param.beta"), "0.90000000000000002");
    EXPECT_EQ(cfg.entries.at("horizon"), "30");
}

TEST(ParseConfig, TrailingCommentsAndBlankLines) {
    const RunConfig cfg = parse_config("\n  model = gompertz   # growth\n\nx0 = 2 # start\n");
    EXPECT_EQ(cfg.scenario.model, "gompertz");
    EXPECT_EQ(cfg.x0[0], 2.0);
}

TEST(ParseConfig, GammaOutOfRange) {
    EXPECT_THROW(parse_config("model = logistic\ngamma = 1.5\nx0 = 0.5\n"), ValidationError);
}

TEST(ParseConfig, UnknownModelListsCatalogue) {
    try {
        parse_config("model = predator_prey\nx0 = 1\n");
        FAIL();
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        for (const auto& name : model_names()) EXPECT_NE(msg.find(name), std::string::npos) << name;
    }
}

TEST(ParseConfig, UnknownKeyIsParseError) {
    try {
        parse_config("model = logistic\nx0 = 0.5\ngama = 0.5\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.key(), "gama");
    }
}

TEST(ParseConfig, DuplicateKey) {
    try {
        parse_config("x0 = 0.5\nmodel = logistic\nx0 = 0.6\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.key(), "x0");
    }
}

TEST(ParseConfig, SyntaxErrors) {
    EXPECT_THROW(parse_config("model logistic\n"), ParseError);
    EXPECT_THROW(parse_config("x0 = 0.5abc\n"), ParseError);
    EXPECT_THROW(parse_config("x0 = 0.5\nmax_iter = -3\n"), ParseError);
    EXPECT_THROW(parse_config("x0 = 0.5\nstrict = maybe\n"), ParseError);
    EXPECT_THROW(parse_config("x0 = 0.5,\n"), ParseError);
}

TEST(ParseConfig, ValidationErrors) {
    EXPECT_THROW(parse_config("model = logistic\n"), ValidationError);  // missing x0
    EXPECT_THROW(parse_config("model = logistic\nx0 = 0.5, 0.5\n"), ValidationError);
    EXPECT_THROW(parse_config("model = gompertz\nx0 = -1\n"), DomainError);
    EXPECT_THROW(parse_config("x0 = 0.5\nreset = linear_map\n"), ValidationError);
    EXPECT_THROW(parse_config("x0 = 0.5\nreset = linear_map\nmatrix = 1, 0\n"), ValidationError);
    EXPECT_THROW(parse_config("x0 = 0.5\nreset = linear_map\nmatrix = 1\ngamma = 0.5\n"), ValidationError);
    EXPECT_THROW(parse_config("x0 = 0.5\nT = 2\nhorizon = 1\n"), ValidationError);
    EXPECT_THROW(parse_config("x0 = 0.5\nmethod = bisection\n"), ValidationError);
    EXPECT_THROW(parse_config("x0 = 0.5\nintegrator.rel_tol = 2\n"), ValidationError);
    EXPECT_THROW(parse_config("x0 = 0.5\nsweep.param = delta\nsweep.values = 1\n"), ValidationError);
    EXPECT_THROW(parse_config("x0 = 0.5\nbasin.cells = 10\n"), ValidationError);
    EXPECT_THROW(parse_config("x0 = 0.5\nparam.kappa = 1\n"), ValidationError);
}

TEST(ParseConfig, Overrides) {
    const std::string text = "model = logistic\nx0 = 0.5\ngamma = 0.67\n";
    const RunConfig cfg = parse_config(text, {"gamma=0.5", "method = newton", "out=/tmp/x", "strict=true"});
    EXPECT_EQ(cfg.scenario.reset.gamma, 0.5);
    EXPECT_EQ(cfg.fixpoint.method, FixedPointMethod::newton_fd);
    EXPECT_EQ(cfg.out_dir, "/tmp/x");
    EXPECT_EQ(cfg.scenario.reset.policy, NegativePolicy::error);
    try {
        parse_config(text, {"gamma=2"});
        FAIL();
    } catch (const ValidationError&) {
    }
    try {
        parse_config(text, {"bogus=1"});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 0u);
    }
}

TEST(ParseConfig, AnalysisSections) {
    const RunConfig cfg = parse_config(R"(model = logistic_coupled
x0 = 0.2, 0.1
reset = linear_map
matrix = 0.67, 0, 0, 0.67
basin.lo = 0, 0
basin.hi = 1, 2
basin.cells = 4
contraction.lo = 0.1, 0.1
contraction.hi = 0.5, 0.5
sweep.param = alpha
sweep.values = 0.5, 1, 1.5
workers = 2
)");
    ASSERT_TRUE(cfg.basin_bounds);
    EXPECT_EQ(cfg.basin_resolution, (std::vector<std::size_t>{4, 4}));
    EXPECT_EQ(cfg.basin_bounds->hi[1], 2.0);
    ASSERT_TRUE(cfg.contraction_region);
    EXPECT_EQ(cfg.sweep_values.size(), 3u);
    EXPECT_EQ(cfg.workers, 2u);
    EXPECT_EQ(cfg.basin.workers, 2u);
    EXPECT_EQ(cfg.scenario.reset.matrix.size(), 4u);
}

TEST(ParseConfig, Replenishment) {
    const RunConfig cfg = parse_config("model = college\nreset = replenishment\nx0 = 40, 30, 20, 10\n");
    const ResetRule rule = cfg.scenario.build_rule(cfg.x0);
    EXPECT_EQ(rule.total(), 100.0);
    EXPECT_EQ(rule.fractions()[0], 0.4);
    const RunConfig explicit_cfg =
        parse_config("model = college\nreset = replenishment\nc = 0.25,0.25,0.25,0.25\nN0 = 120\nx0 = 40, 30, 20, 10\n");
    EXPECT_EQ(explicit_cfg.scenario.build_rule(explicit_cfg.x0).total(), 120.0);
}

TEST(Scenario, WithParameter) {
    const RunConfig cfg = parse_config("model = logistic\nx0 = 0.5\n");
    EXPECT_EQ(cfg.scenario.with_parameter("gamma", 0.4).reset.gamma, 0.4);
    EXPECT_EQ(cfg.scenario.with_parameter("T", 3.0).reset.period, 3.0);
    EXPECT_EQ(cfg.scenario.with_parameter("beta", 2.0).build_model().param("beta"), 2.0);
}

TEST(FormatReal, Precision) {
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(format_real(0.1, 6), "0.1");
    EXPECT_EQ(format_real(1.0 / 3.0), "0.33333333333333331");
    EXPECT_EQ(format_real(-2.5e-300), "-2.5e-300");
    EXPECT_EQ(format_real(3.0), "3");
}

TEST(TrajectoryCsv, RoundTripIsExact) {
    const ModelSpec m = make_model("logistic_coupled");
    Matrix diag = Matrix::Identity(2, 2) * 0.67;
    const auto traj = simulate_hybrid(m, ResetRule::linear_map(diag, 1.0), StateVector{0.3, 0.2}, 0.0, 5.5,
                                      IntegratorConfig{}, 7);
    std::stringstream ss;
    write_trajectory_csv(ss, traj);
    const std::string first = ss.str();
    const HybridTrajectory back = read_trajectory_csv(ss);
    EXPECT_EQ(back.samples, traj.samples);
    EXPECT_EQ(back.reset_times, traj.reset_times);
    std::stringstream again;
    write_trajectory_csv(again, back);
    EXPECT_EQ(again.str(), first);
    EXPECT_EQ(first.substr(0, first.find('\n')), "t,tag,x0,x1");
}

TEST(TrajectoryCsv, RandomValuesRoundTrip) {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    HybridTrajectory traj;
    for (int i = 0; i < 500; ++i) {
        const double t = static_cast<double>(i) * 0.37;
        const double v = std::ldexp(mant(rng), expo(rng));
        traj.samples.push_back({t, StateVector{v, mant(rng)}, SampleTag::flow});
    }
    std::stringstream ss;
    write_trajectory_csv(ss, traj);
    EXPECT_EQ(read_trajectory_csv(ss).samples, traj.samples);
}

TEST(TrajectoryCsv, MalformedInput) {
    std::istringstream bad_header("time,tag,x0\n0,flow,1\n");
    EXPECT_THROW(read_trajectory_csv(bad_header), ParseError);
    std::istringstream bad_tag("t,tag,x0\n0,jump,1\n");
    EXPECT_THROW(read_trajectory_csv(bad_tag), ParseError);
    std::istringstream bad_count("t,tag,x0\n0,flow,1,2\n");
    try {
        read_trajectory_csv(bad_count);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream empty("");
    EXPECT_THROW(read_trajectory_csv(empty), ParseError);
}

TEST(BasinCsv, Layout) {
    BasinGrid g;
    g.bounds = Box{{0.0}, {1.0}};
    g.resolution = {2};
    g.cells.push_back({StateVector{0.25}, true, 12, false});
    g.cells.push_back({StateVector{0.75}, false, 500, true});
    std::ostringstream os;
    write_basin_csv(os, g);
    EXPECT_EQ(os.str(), "x0,converged,iterations,invalid\n0.25,1,12,0\n0.75,0,500,1\n");
}

TEST(SweepCsv, Layout) {
    std::vector<SweepRow> rows;
    rows.push_back({0.5, StateVector{0.25}, 0.5, Stability::stable, ""});
    rows.push_back({1.5, std::nullopt, std::nullopt, std::nullopt, "bad gamma"});
    std::ostringstream os;
    write_sweep_csv(os, rows, 1);
    EXPECT_EQ(os.str(), "value,status,x_star0,spectral_radius,classification\n0.5,ok,0.25,0.5,stable\n1.5,error,,,\n");
}
