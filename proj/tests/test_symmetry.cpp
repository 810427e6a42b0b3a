#include "common.hpp"

using namespace cmsym;
using namespace cmsym::testing;

namespace {

struct CaseFixture {
  models::PaperCase pc;
  LinearChange lc;
  OdeSystem nf;
  BlockSplit split;
  ManifoldApprox h;

  explicit CaseFixture(models::CaseTag tag)
      : pc(models::paper_case(tag)), lc(make_linear_change(pc.system, pc.t)),
        nf(change_coordinates(pc.system, lc)), split(make_split(nf, pc.center_names, pc.hyperbolic_names)),
        h(compute_center_manifold(nf, split, 3)) {}
};

} // namespace

TEST(TotalDerivative, Basics) {
  auto sys = models::reduced_model_sym();
  const auto &s = sys.symbols();
  EXPECT_TRUE(same(total_derivative(rf("t", s), sys), "1"));
  EXPECT_TRUE(same(total_derivative(rf("y1", s), sys), "-k1*y1"));
  EXPECT_TRUE(same(total_derivative(rf("y2*y3", s), sys),
                   "y3*(k1*y1 + G*y2 - eps*y2*y3) + y2*(k2*y2 - eps*y2*y3)"));
}

TEST(Prolongation, TimeTranslationAndScaling) {
  auto sys = models::reduced_model_sym();
  auto p = prolong_first(Generator::parse(sys, "1", {"0", "0", "0"}), sys);
  for (const auto &e : p)
    EXPECT_TRUE(e.is_zero());

  auto one = OdeSystem::parse({"y"}, {"k1"}, {"-k1*y"});
  auto q = prolong_first(Generator::parse(one, "0", {"y"}), one);
  EXPECT_TRUE(same(q[0], "-k1*y"));

  auto x4 = models::paper_case(models::CaseTag::g_nonzero).generators_original[3];
  EXPECT_TRUE(same(prolong_first(x4, sys)[0], "k1*y1"));
}

TEST(Lsc, TabulatedGeneratorsOfBothCases) {
  for (auto tag : {models::CaseTag::g_nonzero, models::CaseTag::g_zero}) {
    auto pc = models::paper_case(tag);
    for (std::size_t i = 0; i < pc.generators_original.size(); ++i) {
      auto rep = lsc_residual(pc.generators_original[i], pc.system);
      EXPECT_TRUE(rep.is_symmetry) << models::case_name(tag) << " " << pc.labels[i];
    }
  }
}

TEST(Lsc, NonSymmetryResidual) {
  auto sys = models::reduced_model_sym();
  auto rep = lsc_residual(Generator::parse(sys, "0", {"y1", "0", "0"}), sys);
  EXPECT_FALSE(rep.is_symmetry);
  EXPECT_TRUE(rep.residuals[0].is_zero());
  EXPECT_TRUE(same(rep.residuals[1], "-k1*y1"));
  EXPECT_TRUE(rep.residuals[2].is_zero());
}

TEST(Lsc, EvolutionGenerator) {
  auto sys = models::reduced_model_sym();
  auto c = rf("k1", sys.symbols());
  auto ev = evolution_generator(sys, c);
  EXPECT_TRUE(lsc_residual(ev, sys).is_symmetry);
  auto x4 = models::paper_case(models::CaseTag::g_nonzero).generators_original[3];
  // X4 of the G != 0 table equals omega / k1.
  auto lam = proportional(x4, ev, sys.dim());
  ASSERT_TRUE(lam.has_value());
  EXPECT_TRUE(same(*lam, "1"));
}

TEST(Lsc, GeneratorValidation) {
  auto sys = models::reduced_model_sym();
  EXPECT_THROW(Generator::parse(sys, "1", {"0", "0"}), InputError);
  EXPECT_THROW(Generator::parse(sys, "1/y1", {"0", "0", "0"}), InputError);
  EXPECT_THROW(Generator::parse(sys, "q", {"0", "0", "0"}), ParseError);
}

TEST(Pushforward, NonzeroCaseX4) {
  CaseFixture c(models::CaseTag::g_nonzero);
  auto x = pushforward_linear(c.pc.generators_original[3], c.lc);
  std::string f = "(-(eps/G)*(v - k1*w)*(k2*v + G*(u + k2*w)))";
  Generator expect = Generator::parse(
      c.nf, "0", {"(G - k2)*" + f + "/(G*k1)", "(G*v + " + f + ")/k1", "-w"});
  EXPECT_TRUE(same_generator(x, expect));
}

TEST(Pushforward, ZeroCaseX2) {
  CaseFixture c(models::CaseTag::g_zero);
  auto x = pushforward_linear(c.pc.generators_original[1], c.lc);
  std::string n = "(eps*k2*w*(-v + w) + k1*(k2*v + eps*u*(-v + w)))";
  std::string p = "((v - w)*(u + k2/k1*w))";
  Generator expect = Generator::parse(
      c.nf, "v - w", {"(v - w)*" + n + "/k1", "-eps*(v - w)*" + p, "-k1*(v - w)*w"});
  EXPECT_TRUE(same_generator(x, expect));
}

TEST(Pushforward, IdentityLeavesGeneratorUnchanged) {
  auto sys = models::reduced_model_sym();
  Symbols ps = OdeSystem::make_symbols({}, sys.params());
  auto x = models::paper_case(models::CaseTag::g_nonzero).generators_original[5];
  auto y = pushforward_linear(x, sys, PolyMatrix::identity(ps, 3), {"y1", "y2", "y3"});
  EXPECT_TRUE(same_generator(y, x));
}

TEST(Pushforward, MatchesTabulatedTransformedGenerators) {
  for (auto tag : {models::CaseTag::g_nonzero, models::CaseTag::g_zero}) {
    CaseFixture c(tag);
    for (std::size_t i = 0; i < 6; ++i) {
      auto x = pushforward_linear(c.pc.generators_original[i], c.lc);
      auto lam = proportional(x, c.pc.generators_normal[i], c.nf.dim());
      ASSERT_TRUE(lam.has_value()) << models::case_name(tag) << " " << c.pc.labels[i];
      EXPECT_TRUE(same(*lam, "1")) << models::case_name(tag) << " " << c.pc.labels[i];
      EXPECT_TRUE(lsc_residual(x, c.nf).is_symmetry);
    }
  }
}

TEST(Pushforward, CoordinateIndependenceOfNonSymmetry) {
  CaseFixture c(models::CaseTag::g_nonzero);
  auto bad = Generator::parse(c.pc.system, "0", {"y1", "0", "0"});
  EXPECT_FALSE(lsc_residual(bad, c.pc.system).is_symmetry);
  EXPECT_FALSE(lsc_residual(pushforward_linear(bad, c.lc), c.nf).is_symmetry);
}

TEST(Proportional, RequiresStateFreeFactor) {
  auto sys = models::reduced_model_sym();
  auto a = Generator::parse(sys, "0", {"y1", "y2", "0"});
  auto b = Generator::parse(sys, "0", {"k1*y1", "k1*y2", "0"});
  auto lam = proportional(b, a, 3);
  ASSERT_TRUE(lam.has_value());
  EXPECT_TRUE(same(*lam, "k1"));
  auto c = Generator::parse(sys, "0", {"y1^2", "y1*y2", "0"});
  EXPECT_FALSE(proportional(c, a, 3).has_value());
  auto d = Generator::parse(sys, "0", {"y1", "0", "0"});
  EXPECT_FALSE(proportional(d, a, 3).has_value());
}

TEST(Linearity, CombinationOfSymmetriesIsSymmetry) {
  auto pc = models::paper_case(models::CaseTag::g_zero);
  auto x = linear_combination(3, pc.generators_original[1], make_rational(-2, 7),
                              pc.generators_original[4]);
  EXPECT_TRUE(lsc_residual(x, pc.system).is_symmetry);
}

TEST(ManifoldInvariance, NonzeroCaseAllInvariantAndTrivialOnAxis) {
  CaseFixture c(models::CaseTag::g_nonzero);
  for (std::size_t i = 0; i < 6; ++i) {
    auto x = pushforward_linear(c.pc.generators_original[i], c.lc);
    auto rep = lemma4_check(x, c.nf, c.split, c.h);
    EXPECT_TRUE(rep.invariant) << c.pc.labels[i];
    auto r = restrict_to_center(x, c.nf, c.split, c.h);
    ASSERT_EQ(r.eta.size(), 1u);
    EXPECT_TRUE(r.eta[0].is_zero()) << c.pc.labels[i];
  }
}

TEST(ManifoldInvariance, NonzeroCaseX2HyperbolicPartVanishesOnAxis) {
  CaseFixture c(models::CaseTag::g_nonzero);
  auto rep = lemma4_check(c.pc.generators_normal[1], c.nf, c.split, c.h);
  EXPECT_TRUE(rep.invariant);
  for (const auto &r : rep.residual)
    EXPECT_TRUE(r.is_zero());
}

TEST(ManifoldInvariance, ZeroCaseAllInvariant) {
  CaseFixture c(models::CaseTag::g_zero);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_TRUE(lemma4_check(c.pc.generators_normal[i], c.nf, c.split, c.h).invariant);
    auto x = pushforward_linear(c.pc.generators_original[i], c.lc);
    EXPECT_TRUE(lemma4_check(x, c.nf, c.split, c.h).invariant) << c.pc.labels[i];
  }
}

TEST(ManifoldInvariance, ConstantHyperbolicShiftFails) {
  CaseFixture c(models::CaseTag::g_zero);
  auto x = Generator::parse(c.nf, "0", {"0", "0", "1"});
  auto rep = lemma4_check(x, c.nf, c.split, c.h);
  EXPECT_FALSE(rep.invariant);
  EXPECT_TRUE(same(rep.residual[0], "1"));
  EXPECT_THROW(restrict_to_center(x, c.nf, c.split, c.h), Lemma4Violation);
}

TEST(ManifoldInvariance, CurvedManifold) {
  // h = -x^2 - 2x^4 is invariant under the evolution field, not under a pure
  // hyperbolic translation.
  auto sys = OdeSystem::parse({"x", "y"}, {}, {"x*y", "-y - x^2"});
  auto split = make_split(sys, std::vector<std::size_t>{0}, {1});
  auto h = compute_center_manifold(sys, split, 4);
  EXPECT_TRUE(lemma4_check(evolution_generator(sys, RatFunc::one(sys.symbols())), sys, split, h)
                  .invariant);
  EXPECT_FALSE(lemma4_check(Generator::parse(sys, "0", {"0", "x^2"}), sys, split, h).invariant);
}

TEST(Restriction, ZeroCaseMatchesTabulatedRestrictions) {
  CaseFixture c(models::CaseTag::g_zero);
  auto red = reduce_to_center(c.nf, c.split, c.h);
  auto table = models::restricted_table();
  for (std::size_t i = 1; i <= 4; ++i) {
    auto x = pushforward_linear(c.pc.generators_original[i], c.lc);
    auto r = restrict_to_center(x, c.nf, c.split, c.h);
    EXPECT_TRUE(same_generator(r, table[i - 1])) << c.pc.labels[i];
    EXPECT_TRUE(lsc_residual(r, red).is_symmetry) << c.pc.labels[i];
  }
}

TEST(Restriction, TimeTranslation) {
  CaseFixture c(models::CaseTag::g_zero);
  auto r = restrict_to_center(c.pc.generators_normal[0], c.nf, c.split, c.h);
  EXPECT_TRUE(same(r.xi, "1"));
  EXPECT_TRUE(r.eta[0].is_zero());
  EXPECT_TRUE(r.eta[1].is_zero());
}

// Mapping u = y3, v = y2 takes the restricted X^4 to
// y2 y3 d/dy2 + (-(k2/eps) y2 + y2 y3) d/dy3. The tabulated form in the
// original names has the two components exchanged and is not a symmetry of
// the relabelled system.
TEST(Restriction, OriginalNamesOfX4) {
  auto s = models::center_system_g0_original_names();
  auto table = models::restricted_table();
  // states of s are (y2, y3) = (v, u)
  Symbols target = s.symbols();
  Bindings uv{{"u", RatFunc::variable(target, "y3")}, {"v", RatFunc::variable(target, "y2")}};
  auto relabel = [&](const Generator &g) {
    return Generator{substitute(g.xi, uv, target),
                     {substitute(g.eta[1], uv, target), substitute(g.eta[0], uv, target)}};
  };
  auto x4 = relabel(table[2]);
  EXPECT_TRUE(same(x4.eta[0], "y2*y3"));
  EXPECT_TRUE(same(x4.eta[1], "-k2/eps*y2 + y2*y3"));
  EXPECT_TRUE(lsc_residual(x4, s).is_symmetry);

  auto printed = models::restricted_table_original_names();
  for (std::size_t i = 0; i < 4; ++i) {
    auto computed = relabel(table[i]);
    EXPECT_TRUE(lsc_residual(computed, s).is_symmetry);
    EXPECT_FALSE(same_generator(computed, printed[i]));
    EXPECT_TRUE(same(computed.eta[0], printed[i].eta[1]));
    EXPECT_TRUE(same(computed.eta[1], printed[i].eta[0]));
    EXPECT_FALSE(lsc_residual(printed[i], s).is_symmetry);
  }
}
