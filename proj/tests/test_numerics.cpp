#include "common.hpp"

#include <cmath>
#include <sstream>

using namespace cmsym;
using namespace cmsym::testing;

namespace {

const ParamBinding g0_binding{{"k1", 1.0}, {"k2", 4.0}, {"eps", 1e-7}};

OdeSystem decay() { return OdeSystem::parse({"y1"}, {"k1"}, {"-k1*y1"}); }

double decay_error(double rtol) {
  auto tr = integrate_adaptive(decay(), {{"k1", 1.0}}, std::vector<double>{1e4}, 10.0, rtol);
  double worst = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    double exact = 1e4 * std::exp(-tr.times[i]);
    worst = std::max(worst, std::abs(tr.state(i)[0] - exact) / exact);
  }
  return worst;
}

Generator restricted_x4() { return models::restricted_table()[2]; }

} // namespace

TEST(EvalRhs, ReducedModelZeroCase) {
  auto dy = eval_rhs(models::reduced_model_g0(), g0_binding, std::vector<double>{1e4, 0, 0});
  EXPECT_DOUBLE_EQ(dy[0], -1e4);
  EXPECT_DOUBLE_EQ(dy[1], 1e4);
  EXPECT_DOUBLE_EQ(dy[2], 0.0);
}

TEST(EvalRhs, OriginAndDecay) {
  ParamBinding b{{"k1", 1.0}, {"k2", 4.0}, {"G", 3.0}, {"eps", 1e-7}};
  for (double v : eval_rhs(models::reduced_model_sym(), b, std::vector<double>{0, 0, 0}))
    EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(eval_rhs(decay(), {{"k1", 1.0}}, std::vector<double>{1.0})[0], -1.0);
}

TEST(EvalRhs, Errors) {
  EXPECT_THROW(eval_rhs(decay(), {}, std::vector<double>{1.0}), InputError);
  EXPECT_THROW(eval_rhs(decay(), {{"k1", 1.0}}, std::vector<double>{1.0, 2.0}), InputError);
  auto sys = OdeSystem::parse({"x"}, {"a"}, {"x/a"});
  EXPECT_THROW(eval_rhs(sys, {{"a", 0.0}}, std::vector<double>{1.0}), NumericError);
}

TEST(Integrate, ClosedFormDecay) {
  EXPECT_LT(decay_error(1e-9), 1e-7);
}

TEST(Integrate, HalvingRtolDoesNotHurt) {
  double prev = decay_error(1e-6);
  for (double rtol : {5e-7, 2.5e-7, 1.25e-7, 6.25e-8}) {
    double e = decay_error(rtol);
    EXPECT_LE(e, prev * 1.0000001) << "rtol " << rtol;
    prev = e;
  }
}

TEST(Integrate, DeterministicAndMonotoneTimes) {
  auto sys = models::full_model();
  auto s = models::find_scenario("paper-G0");
  auto a = integrate_adaptive(sys, s.binding, s.ic, 20.0);
  auto b = integrate_adaptive(sys, s.binding, s.ic, 20.0);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.states, b.states);
  for (std::size_t i = 1; i < a.size(); ++i)
    EXPECT_GT(a.times[i], a.times[i - 1]);
  EXPECT_EQ(a.states.size(), a.times.size() * 4);
  EXPECT_DOUBLE_EQ(a.times.back(), 20.0);
}

TEST(Integrate, DenseOutputIsAccurate) {
  auto tr = integrate_adaptive(decay(), {{"k1", 1.0}}, std::vector<double>{1.0}, 5.0, 1e-10);
  for (double t : {0.123, 1.7, 3.3333, 4.99})
    EXPECT_NEAR(tr.interpolate(t)[0], std::exp(-t), 1e-8);
}

TEST(Integrate, Errors) {
  auto blow = OdeSystem::parse({"y"}, {}, {"y^2"});
  EXPECT_THROW(integrate_adaptive(blow, {}, std::vector<double>{1.0}, 2.0), NumericError);
  EXPECT_THROW(integrate_adaptive(decay(), {{"k1", 1.0}}, std::vector<double>{1.0}, -1.0),
               InputError);
  EXPECT_THROW(integrate_adaptive(decay(), {{"k1", 1.0}}, std::vector<double>{1.0}, 1.0, 0.0),
               InputError);
}

TEST(Integrate, StepUnderflowMessageHasLocation) {
  auto blow = OdeSystem::parse({"y"}, {}, {"y^2"});
  try {
    integrate_adaptive(blow, {}, std::vector<double>{1.0}, 2.0);
    FAIL();
  } catch (const NumericError &e) {
    EXPECT_NE(std::string(e.what()).find("t = "), std::string::npos);
  }
}

TEST(Integrate, ZeroCaseReducedSystemShape) {
  auto tr = integrate_adaptive(models::center_system_g0(), g0_binding,
                               std::vector<double>{0.0, 1e4}, 100.0);
  for (std::size_t i = 1; i < tr.size(); ++i) {
    EXPECT_LE(tr.state(i)[1], tr.state(i - 1)[1]);
    EXPECT_GE(tr.state(i)[0], tr.state(i - 1)[0]);
  }
  EXPECT_LT(tr.final_state()[1], 0.01 * 1e4);
  EXPECT_TRUE(models::shape::approaches_constant(tr, 0));
  EXPECT_LT(tr.final_state()[0], 4.0 / 1e-7);
}

TEST(Integrate, FullModelBounds) {
  auto sys = models::full_model();
  const double atol = 1e-12;
  for (const auto &s : models::scenarios()) {
    auto tr = integrate_adaptive(sys, s.binding, s.ic, s.t_end, 1e-9, atol);
    double eps = 1e-9 * s.binding.at("k3");
    double cap = eps > 0 ? s.binding.at("k2") / eps : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tr.size(); ++i) {
      auto y = tr.state(i);
      EXPECT_GT(y[0], 0.0) << s.name;
      EXPECT_GE(y[1], -atol) << s.name;
      EXPECT_GE(y[2], -atol) << s.name;
      EXPECT_LE(y[2], cap + atol) << s.name;
      // one rounding unit of D itself is the resolution of "non-decreasing"
      double ulp = 4 * std::numeric_limits<double>::epsilon() * std::abs(y[3]);
      if (i > 0) {
        EXPECT_GE(y[3], tr.state(i - 1)[3] - atol - ulp) << s.name;
      }
    }
  }
}

TEST(Integrate, FullModelZeroCaseRegimeOverLongerHorizon) {
  auto s = models::find_scenario("paper-G0");
  auto tr = integrate_adaptive(models::full_model(), s.binding, s.ic, 100.0);
  s.t_end = 100.0;
  for (const auto &c : models::check_scenario(s, tr))
    EXPECT_TRUE(c.passed) << c.name;
}

TEST(Flow, ZeroGammaIsIdentity) {
  auto x = restricted_x4();
  FlowPoint p{1.25, {3.0, 7.0}};
  auto r = flow_generator(x, g0_binding, p, 0.0);
  EXPECT_EQ(r.t, p.t);
  EXPECT_EQ(r.y, p.y);
}

TEST(Flow, TimeTranslation) {
  auto sys = models::center_system_g0();
  auto x1 = Generator::parse(sys, "1", {"0", "0"});
  auto r = flow_generator(x1, g0_binding, FlowPoint{2.0, {5.0, 6.0}}, 0.75);
  EXPECT_NEAR(r.t, 2.75, 1e-14);
  EXPECT_EQ(r.y, (std::vector<double>{5.0, 6.0}));
}

TEST(Flow, RestrictedX4FollowsItsFlowEquations) {
  // du/dgamma = -(k2/eps) v + u v, dv/dgamma = u v
  auto x = restricted_x4();
  const double k2 = 4.0, eps = 1e-7, g = 1e-11;
  FlowPoint p{0.0, {100.0, 50.0}};
  auto r = flow_generator(x, g0_binding, p, g);
  double du = (-k2 / eps * p.y[1] + p.y[0] * p.y[1]) * g;
  double dv = p.y[0] * p.y[1] * g;
  EXPECT_NEAR(r.y[0] - p.y[0], du, 1e-6 * std::abs(du));
  EXPECT_NEAR(r.y[1] - p.y[1], dv, 1e-2 * std::abs(dv));
}

TEST(Flow, ForwardThenBackwardReturns) {
  auto x = restricted_x4();
  FlowPoint p{0.0, {-3e5, 8e3}};
  FlowOptions opt;
  GeneratorFlow flow(x, g0_binding);
  auto there = flow(p, 2e-6, opt);
  auto back = flow(there, -2e-6, opt);
  for (std::size_t k = 0; k < 2; ++k)
    EXPECT_NEAR(back.y[k], p.y[k], 10 * (opt.rtol * std::abs(p.y[k]) + opt.atol));
}

TEST(Invariance, RestrictedX4) {
  auto rep = solution_invariance(models::center_system_g0(), restricted_x4(), g0_binding,
                                 std::vector<double>{0.0, 1e4}, 1e-5);
  EXPECT_TRUE(rep.verified_symbolically);
  EXPECT_TRUE(rep.monotone);
  EXPECT_EQ(rep.deviations.size(), 64u);
  EXPECT_LE(rep.max_rel_deviation, 1e-6);
  EXPECT_EQ(rep.max_rel_deviation,
            *std::max_element(rep.deviations.begin(), rep.deviations.end()));
}

TEST(Invariance, TimeTranslation) {
  auto sys = models::center_system_g0();
  auto x1 = Generator::parse(sys, "1", {"0", "0"});
  auto rep = solution_invariance(sys, x1, g0_binding, std::vector<double>{0.0, 1e4}, 0.5);
  EXPECT_LE(rep.max_rel_deviation, 1e-6);
}

TEST(Invariance, NonSymmetryDrifts) {
  auto sys = models::reduced_model_g0();
  auto bad = Generator::parse(sys, "0", {"y1", "0", "0"});
  auto rep = solution_invariance(sys, bad, g0_binding, std::vector<double>{1e4, 0, 0}, 0.1);
  EXPECT_FALSE(rep.verified_symbolically);
  EXPECT_GT(rep.max_rel_deviation, 1e-2);
}

TEST(Invariance, DeviationShrinksWithGamma) {
  auto sys = models::center_system_g0();
  auto x = restricted_x4();
  std::vector<double> ic{0.0, 1e4};
  InvarianceOptions opt;
  opt.t_end = 20.0;
  double d_big = solution_invariance(sys, x, g0_binding, ic, 1e-5, opt).max_rel_deviation;
  double d_small = solution_invariance(sys, x, g0_binding, ic, 1e-6, opt).max_rel_deviation;
  // Linear scaling toward the integrator noise floor.
  EXPECT_LE(d_small, 10.0 * d_big + 1e-8);
}

TEST(Invariance, NonMonotoneTimesRestrictComparison) {
  // x' = 1 from x = 0 with xi = -x^2: t^ = t - gamma t^2 turns back at t = 5.
  auto sys = OdeSystem::parse({"x"}, {}, {"1"});
  auto x = Generator::parse(sys, "-x^2", {"0"});
  InvarianceOptions opt;
  opt.t_end = 10.0;
  auto rep = solution_invariance(sys, x, {}, std::vector<double>{0.0}, 0.1, opt);
  EXPECT_FALSE(rep.monotone);
  EXPECT_GT(rep.deviations.size(), 2u);
  EXPECT_LT(rep.deviations.size(), 64u);
  EXPECT_EQ(rep.transformed_times.size(), 64u);
  EXPECT_FALSE(rep.verified_symbolically);
}

TEST(Invariance, DecreasingTimesThrow) {
  auto x = Generator::parse(decay(), "y1", {"0"});
  EXPECT_THROW(solution_invariance(decay(), x, {{"k1", 1.0}}, std::vector<double>{1.0}, 5.0),
               NumericError);
}

TEST(Drift, ConstantIsZero) {
  auto tr = integrate_adaptive(decay(), {{"k1", 1.0}}, std::vector<double>{2.0}, 3.0);
  EXPECT_EQ(conserved_drift(tr, [](double, std::span<const double>) { return 42.0; }), 0.0);
}

TEST(Drift, FirstIntegralOfZeroCaseReducedSystem) {
  auto tr = integrate_adaptive(models::center_system_g0(), g0_binding,
                               std::vector<double>{0.0, 1e4}, 50.0, 1e-9);
  EXPECT_LT(conserved_drift(tr, models::first_integral_g0(4.0, 1e-7)), 1e-6);
}

TEST(Drift, TimeAugmentedDecay) {
  auto tr = integrate_adaptive(decay(), {{"k1", 1.0}}, std::vector<double>{1e4}, 10.0, 1e-9);
  auto h = [](double t, std::span<const double> y) { return y[0] * std::exp(t); };
  EXPECT_LT(conserved_drift(tr, h), 1e-7);
}

TEST(Drift, NonFiniteThrows) {
  auto tr = integrate_adaptive(decay(), {{"k1", 1.0}}, std::vector<double>{1.0}, 1.0);
  auto h = [](double, std::span<const double> y) { return std::log(y[0] - 0.5); };
  EXPECT_THROW(conserved_drift(tr, h), NumericError);
  auto bad = models::first_integral_g0(4.0, 1e-7);
  std::vector<double> y{5e7, 1.0};
  EXPECT_THROW(bad(0.0, y), NumericError);
  EXPECT_NEAR(bad(0.0, std::vector<double>{0.0, 3.0}), 3.0 - 4e7 * std::log(4.0), 1e-6);
}

TEST(Csv, HeaderAndPrecision) {
  auto tr = integrate_adaptive(decay(), {{"k1", 1.0}}, std::vector<double>{1.0}, 1.0);
  std::ostringstream os;
  write_csv(os, tr, {"y1"});
  std::string first;
  std::istringstream in(os.str());
  std::getline(in, first);
  EXPECT_EQ(first, "t,y1");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line))
    ++rows;
  EXPECT_EQ(rows, tr.size());
  std::ostringstream dense;
  write_csv(dense, tr, {"y1"}, 11);
  std::istringstream din(dense.str());
  std::getline(din, line);
  std::getline(din, line);
  EXPECT_EQ(line, "0,1");
  std::getline(din, line);
  double t = std::stod(line.substr(0, line.find(',')));
  double y = std::stod(line.substr(line.find(',') + 1));
  EXPECT_DOUBLE_EQ(t, 0.1);
  EXPECT_NEAR(y, std::exp(-0.1), 1e-8);
  EXPECT_GE(line.size(), 20u);
}
