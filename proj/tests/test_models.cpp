#include "common.hpp"

using namespace cmsym;
using namespace cmsym::testing;

namespace {

NumericTrajectory run(const models::Scenario &s) {
  return integrate_adaptive(models::full_model(), s.binding, s.ic, s.t_end);
}

NumericTrajectory synthetic(const std::vector<double> &t, const std::vector<double> &y) {
  NumericTrajectory tr;
  tr.dim = 1;
  tr.times = t;
  tr.states = y;
  tr.derivs.assign(y.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    tr.derivs[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
  tr.derivs.back() = tr.derivs.size() > 1 ? tr.derivs[tr.derivs.size() - 2] : 0.0;
  return tr;
}

} // namespace

TEST(Models, FullModelStructure) {
  auto sys = models::full_model();
  EXPECT_EQ(sys.states(), (std::vector<std::string>{"M", "Mstar", "A", "D"}));
  EXPECT_EQ(sys.params(), (std::vector<std::string>{"k1", "k2", "k3", "k4"}));
  // Mass balance of the sensitive populations: M + Mstar + D grows at k2 Mstar.
  auto total = sys.rhs()[0] + sys.rhs()[1] + sys.rhs()[3];
  EXPECT_TRUE(same(total, "k2*Mstar"));
}

TEST(Models, ReducedRowsMatchFullModel) {
  auto full = models::full_model();
  auto red = models::reduced_model_sym();
  auto y = red.symbols();
  Bindings b{{"M", rf("y1", y)}, {"Mstar", rf("y2", y)}, {"A", rf("y3", y)},
             {"D", RatFunc::zero(y)}, {"k3", rf("eps*10^9", y)}, {"k4", rf("k2 - G", y)}};
  Symbols wide = OdeSystem::make_symbols({"M", "Mstar", "A", "D", "y1", "y2", "y3"},
                                         {"k1", "k2", "k3", "k4", "G", "eps"});
  for (std::size_t k = 0; k < 3; ++k) {
    auto e = substitute(full.rhs()[k].rebase(wide), b, y);
    EXPECT_TRUE(same(e, red.rhs()[k])) << k;
  }
}

TEST(Models, ZeroCaseSystemsAgree) {
  auto a = models::center_system_g0();
  auto b = models::center_system_g0_original_names();
  auto s = b.symbols();
  Bindings m{{"u", rf("y3", s)}, {"v", rf("y2", s)}};
  EXPECT_TRUE(same(substitute(a.rhs()[0], m, s), b.rhs()[1]));
  EXPECT_TRUE(same(substitute(a.rhs()[1], m, s), b.rhs()[0]));
}

TEST(Models, CaseNames) {
  EXPECT_EQ(models::case_name(models::parse_case("g0")), "g0");
  EXPECT_EQ(models::case_name(models::parse_case("gnz")), "gnz");
  EXPECT_THROW(models::parse_case("other"), InputError);
}

TEST(Models, CaseTablesAreWellFormed) {
  for (auto tag : {models::CaseTag::g_nonzero, models::CaseTag::g_zero}) {
    auto pc = models::paper_case(tag);
    EXPECT_EQ(pc.generators_original.size(), 6u);
    EXPECT_EQ(pc.generators_normal.size(), 6u);
    EXPECT_EQ(pc.labels.size(), 6u);
    EXPECT_EQ(pc.normal_form.states(), (std::vector<std::string>{"u", "v", "w"}));
    EXPECT_FALSE(pc.samples.empty());
    EXPECT_NO_THROW(pc.split());
  }
}

TEST(Models, TransformedSystemEqualsTabulatedNormalForm) {
  for (auto tag : {models::CaseTag::g_nonzero, models::CaseTag::g_zero}) {
    auto pc = models::paper_case(tag);
    auto nf = change_coordinates(pc.system, pc.t);
    for (std::size_t k = 0; k < 3; ++k)
      EXPECT_TRUE(same(nf.rhs()[k], pc.normal_form.rhs()[k])) << models::case_name(tag) << k;
  }
}

TEST(Models, RestrictedTableSize) {
  auto r = models::restricted_table();
  ASSERT_EQ(r.size(), 4u);
  for (const auto &g : r)
    EXPECT_EQ(g.eta.size(), 2u);
  EXPECT_EQ(models::restricted_table_original_names().size(), 4u);
}

TEST(Scenarios, Catalogue) {
  auto all = models::scenarios();
  ASSERT_EQ(all.size(), 4u);
  auto g0 = models::find_scenario("paper-G0");
  EXPECT_EQ(g0.binding.at("k2"), 4.0);
  EXPECT_EQ(g0.binding.at("k3"), 100.0);
  EXPECT_EQ(g0.binding.at("k4"), 4.0);
  EXPECT_EQ(g0.ic, (std::vector<double>{1e4, 0, 0, 0}));
  EXPECT_EQ(g0.t_end, 50.0);
  EXPECT_THROW(models::find_scenario("nope"), InputError);
}

TEST(Scenarios, GrowthWithoutInhibitor) {
  auto s = models::find_scenario("ross-k3zero-Gpos");
  for (const auto &c : models::check_scenario(s, run(s)))
    EXPECT_TRUE(c.passed) << c.name;
}

TEST(Scenarios, PeakWithBoundedInhibitor) {
  auto s = models::find_scenario("ross-k3pos-Gpos");
  for (const auto &c : models::check_scenario(s, run(s)))
    EXPECT_TRUE(c.passed) << c.name;
}

TEST(Scenarios, DecliningGrowth) {
  auto s = models::find_scenario("ross-k3zero-Gneg");
  for (const auto &c : models::check_scenario(s, run(s)))
    EXPECT_TRUE(c.passed) << c.name;
}

TEST(Scenarios, ZeroCaseBoundHolds) {
  auto s = models::find_scenario("paper-G0");
  auto tr = run(s);
  EXPECT_TRUE(models::shape::bounded_above(tr, 2, 4.0 / 1e-7));
  // Mstar has peaked by t = 50 even though its decay is still under way.
  auto c = models::shape::column(tr, 1);
  auto peak = std::max_element(c.begin(), c.end());
  EXPECT_LT(c.back(), 0.1 * *peak);
}

TEST(Shapes, SyntheticColumns) {
  std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto peak = synthetic(t, {0, 5, 9, 10, 6, 3, 1, 0.5, 0.2, 0.1, 0.05});
  EXPECT_TRUE(models::shape::peaks_then_declines(peak, 0));
  auto rising = synthetic(t, {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024});
  EXPECT_FALSE(models::shape::peaks_then_declines(rising, 0));
  EXPECT_TRUE(models::shape::unrestrained_growth(rising, 0));
  auto flat = synthetic(t, {0, 5, 8, 9, 9.5, 9.9, 9.99, 9.999, 10, 10, 10});
  EXPECT_TRUE(models::shape::approaches_constant(flat, 0));
  EXPECT_FALSE(models::shape::unrestrained_growth(flat, 0));
  EXPECT_TRUE(models::shape::bounded_above(flat, 0, 10));
  EXPECT_FALSE(models::shape::bounded_above(flat, 0, 9.9));
}
