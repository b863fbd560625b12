#include "makespan/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "makespan/rng.hpp"

namespace makespan {
namespace {

const std::vector<std::size_t> kX1{300, 600, 900, 1200};
const std::vector<std::size_t> kX2{50, 100, 200};

RegressionModel model(std::array<double, 6> c) {
  RegressionModel m;
  m.coefficients = c;
  return m;
}

TEST(Fit, RecoversEveryReferenceModel) {
  for (const auto& [name, ref] : reference_models()) {
    SCOPED_TRACE(name);
    const auto fit = fit_polynomial(synthesize_records(name, ref, kX1, kX2));
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_NEAR(fit.coefficients[j], ref.coefficients[j], 1e-6 * std::abs(ref.coefficients[j]))
          << kCoefficientNames[j];
    }
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-9);
    EXPECT_EQ(fit.residuals.size(), 12u);
  }
}

TEST(Fit, ConstantY) {
  const auto fit = fit_polynomial(synthesize_records("c", model({7.5, 0, 0, 0, 0, 0}), kX1, kX2));
  EXPECT_NEAR(fit.coefficients[0], 7.5, 1e-9);
  for (std::size_t j = 1; j < 6; ++j) EXPECT_NEAR(fit.coefficients[j], 0.0, 1e-9);
}

TEST(Fit, NoiseLowersRSquared) {
  const auto& ref = reference_models().at("dodin");
  auto records = synthesize_records("dodin", ref, kX1, kX2);
  Xoshiro256 rng(8);
  for (auto& r : records) r.y_seconds *= 1.0 + rng.uniform(-0.05, 0.05);
  const auto fit = fit_polynomial(records);
  EXPECT_LT(fit.r_squared, 1.0);
  EXPECT_GT(fit.r_squared, 0.9);
}

TEST(Fit, RankDeficientDesign) {
  const auto one_x2 = synthesize_records("m", model({1, 1, 1, 1, 1, 1}), kX1, {100});
  try {
    fit_polynomial(one_x2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::rank_deficient_design);
  }
  const auto too_few = synthesize_records("m", model({1, 1, 1, 1, 1, 1}), {300, 600}, {50, 100});
  EXPECT_THROW(fit_polynomial(too_few), Error);
}

TEST(Evaluate, ReferenceValues) {
  const auto& ku = reference_models().at("kleindorfer-upper");
  EXPECT_NEAR(evaluate(ku, 1200, 200), 109.16, 0.01);
  EXPECT_EQ(evaluate(ku, 0, 0), ku.coefficients[0]);
  const double spelde = evaluate(reference_models().at("spelde"), 1200, 200);
  EXPECT_LT(spelde, evaluate(ku, 1200, 200));
  EXPECT_GT(spelde, 0);
}

TEST(Correlations, MixedTermLeads) {
  const auto ku = synthesize_records("kleindorfer-upper", reference_models().at("kleindorfer-upper"),
                                     kX1, kX2);
  const auto c = correlations(ku);
  EXPECT_EQ(kRegressorNames[c.ranking[0]], "X1*X2");

  auto exact = synthesize_records("p", model({0, 0, 0, 1, 0, 0}), kX1, kX2);
  EXPECT_NEAR(correlations(exact).r[2], 1.0, 1e-12);

  const auto flat = synthesize_records("c", model({3, 0, 0, 0, 0, 0}), kX1, kX2);
  try {
    correlations(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_variance_input);
  }
}

// Oracle: Pearson r computed directly on the 12 cells with long double.
TEST(Correlations, MatchesDirectFormula) {
  const auto recs = synthesize_records("d", reference_models().at("dodin"), kX1, kX2);
  const auto c = correlations(recs);
  for (std::size_t j = 0; j < 5; ++j) {
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& r : recs) {
      const long double x = regressors(double(r.x1), double(r.x2))[j + 1], y = r.y_seconds;
      sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
    }
    const long double n = recs.size();
    const long double rr = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    EXPECT_NEAR(c.r[j], static_cast<double>(rr), 1e-9);
  }
}

TEST(RelativeErrors, LayoutAndSign) {
  std::vector<BenchmarkRecord> all;
  std::map<std::string, RegressionModel> fits;
  for (const auto& [name, ref] : reference_models()) {
    auto recs = synthesize_records(name, ref, kX1, kX2);
    fits[name] = fit_polynomial(recs);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  const auto t = relative_errors(all, fits);
  ASSERT_EQ(t.rows.size(), 12u);
  EXPECT_EQ(t.methods.size(), 4u);
  EXPECT_EQ(t.rows.front().x1, 300u);
  EXPECT_EQ(t.rows.front().x2, 50u);
  EXPECT_EQ(t.rows.back().x1, 1200u);
  for (const auto& row : t.rows) {
    for (const auto& e : row.percent) {
      ASSERT_TRUE(e.has_value());
      EXPECT_NEAR(*e, 0.0, 1e-6);
    }
  }
  EXPECT_LT(*relative_error(10, 11), 0);
  EXPECT_DOUBLE_EQ(*relative_error(10, 10), 0);
  EXPECT_DOUBLE_EQ(*relative_error(10, 9), 10);
  EXPECT_FALSE(relative_error(0, 1).has_value());
}

TEST(Records, CsvRoundTrip) {
  auto recs = synthesize_records("dodin", reference_models().at("dodin"), {300}, {50, 100});
  recs[0].ops = {1, 2, 3, 4};
  recs[1].y_seconds = std::numeric_limits<double>::quiet_NaN();
  const auto text = records_csv(recs);
  EXPECT_EQ(text.substr(0, text.find('\n')), kRecordsHeader);
  const auto back = parse_records_csv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].y_seconds, recs[0].y_seconds);
  EXPECT_EQ(back[0].ops.duplications, 4u);
  EXPECT_TRUE(std::isnan(back[1].y_seconds));
  EXPECT_EQ(records_csv(back), text);

  try {
    parse_records_csv(std::string(kRecordsHeader) + "\ndodin,0,50,1,0,0,0,0,1,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::malformed_row);
    EXPECT_NE(e.detail().find("line 2"), std::string::npos);
  }
}

TEST(RunGrid, ShapeAndDeterministicCounts) {
  GridConfig g;
  g.x1 = {30, 60};
  g.x2 = {5, 10};
  g.repetitions = 3;
  const auto a = run_grid(g);
  ASSERT_EQ(a.size(), 16u);
  const auto b = run_grid(g);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i].error.empty()) << a[i].error;
    EXPECT_EQ(a[i].method, b[i].method);
    EXPECT_EQ(a[i].ops.convolutions, b[i].ops.convolutions);
    EXPECT_EQ(a[i].ops.products, b[i].ops.products);
    EXPECT_EQ(a[i].ops.duplications, b[i].ops.duplications);
    EXPECT_GE(a[i].y_seconds, 0);
    if (a[i].method.starts_with("kleindorfer")) {
      EXPECT_LE(a[i].ops.convolutions, a[i].x1);
      EXPECT_LE(a[i].ops.products + a[i].ops.min_ops, a[i].x1);
    }
  }
}

TEST(RunGrid, KleindorferScalesLinearlyInActivities) {
  GridConfig g;
  g.methods = {BenchMethod::kleindorfer_upper};
  g.x1 = {150, 600};
  g.x2 = {30};
  g.repetitions = 5;
  const auto r = run_grid(g);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].ops.convolutions, 150u);
  EXPECT_EQ(r[1].ops.convolutions, 600u);
  const double ratio = r[1].y_seconds / r[0].y_seconds;
  EXPECT_LE(ratio, 4.0 * 2.0) << ratio;
}

TEST(RunGrid, RejectsEmptyGrid) {
  GridConfig g;
  g.x1.clear();
  EXPECT_THROW(run_grid(g), Error);
}

}  // namespace
}  // namespace makespan
