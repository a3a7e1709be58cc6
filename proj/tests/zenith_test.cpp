#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "ctm/zenith.hpp"

namespace ctm::zenith {
namespace {

namespace fs = std::filesystem;

const std::string kData = std::string(CTM_DATA_DIR) + "/zenith_answers.csv";
const std::string kReference = std::string(CTM_DATA_DIR) + "/p_random_d4_reference.csv";

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string csv_from(const ZenithDataset& d, std::size_t drop = 99) {
  std::string text = "class,percent\n";
  for (std::size_t i = 0; i < d.rows.size(); ++i)
    if (i != drop) text += d.rows[i].representative + "," + std::to_string(d.rows[i].percent) + "\n";
  return text;
}

TEST(Dataset, BundledTableLoads) {
  const ZenithDataset d = load_zenith(kData);
  ASSERT_EQ(d.rows.size(), 16u);
  EXPECT_DOUBLE_EQ(d.percent("00000"), 0.84);
  EXPECT_DOUBLE_EQ(d.percent("00101"), 14.23);
  double sum = 0.0;
  for (const auto& r : d.rows) sum += r.percent;
  EXPECT_NEAR(sum, 100.07, 1e-9);
}

TEST(Dataset, ReferenceColumnLoadsAsProbabilities) {
  const auto p = load_p_random_column(kReference);
  ASSERT_EQ(p.size(), 16u);
  EXPECT_DOUBLE_EQ(p.at("00000"), 0.3416);
  EXPECT_DOUBLE_EQ(p.at("01110"), 0.6113);
}

TEST(Dataset, RejectsMalformedFiles) {
  const ZenithDataset d = load_zenith(kData);
  EXPECT_THROW(load_zenith(write_temp("z15.csv", csv_from(d, 3))), LoadError);

  std::string unknown = csv_from(d);
  unknown.replace(unknown.find("00001,"), 5, "0001x");
  EXPECT_THROW(load_zenith(write_temp("zunk.csv", unknown)), LoadError);

  std::string negative = csv_from(d);
  negative.replace(negative.find("00000,0.84"), 10, "00000,-0.84");
  EXPECT_THROW(load_zenith(write_temp("zneg.csv", negative)), LoadError);

  std::string dup = csv_from(d, 0) + "11111,0.84\n" + "11111,0.84\n";
  EXPECT_THROW(load_zenith(write_temp("zdup.csv", dup)), LoadError);

  std::string off = csv_from(d);
  off.replace(off.find("00101,14.23"), 11, "00101,24.23");
  EXPECT_THROW(load_zenith(write_temp("zsum.csv", off)), LoadError);

  EXPECT_THROW(load_zenith("/nonexistent/zenith.csv"), IoError);
}

TEST(Dataset, ComplementLabelSelectsTheSameClass) {
  const ZenithDataset d = load_zenith(kData);
  std::string text = csv_from(d);
  text.replace(text.find("00110,"), 5, "11001");
  EXPECT_EQ(load_zenith(write_temp("zcomp.csv", text)).percent("00110"), d.percent("00110"));
}

TEST(Fit, RecoversAnExactPowerLaw) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  ZenithDataset d;
  std::map<std::string, double> p;
  for (const auto& c : make_classes()) {
    const double v = u(rng);
    p[c.representative] = v;
    d.rows.push_back({c.representative, 100.0 * 0.7 * v * v * v});
  }
  const PowerLawFit fit = fit_power_law(d, p);
  EXPECT_NEAR(fit.with_intercept.exponent, 3.0, 1e-9);
  EXPECT_NEAR(std::exp(fit.with_intercept.intercept), 0.7, 1e-9);
  EXPECT_NEAR(fit.with_intercept.r, 1.0, 1e-12);
  EXPECT_LT(fit.with_intercept.p_value, 1e-12);
}

TEST(Fit, ReferenceColumnReproducesTheReferenceCorrelation) {
  const PowerLawFit fit = fit_power_law(load_zenith(kData), load_p_random_column(kReference));
  const FitResult& f = fit.with_intercept;
  EXPECT_NEAR(f.r, 0.736, 0.005);
  EXPECT_NEAR(f.f_statistic, 16.544, 0.15);
  EXPECT_EQ(f.df_residual, 14.0);
  EXPECT_LT(f.p_value, 0.002);
  EXPECT_NEAR(f.exponent, 4.3707, 1e-3);
  EXPECT_NEAR(fit.through_origin.exponent, 4.4126, 1e-3);
  EXPECT_EQ(fit.through_origin.df_residual, 15.0);
  EXPECT_EQ(fit.through_origin.intercept, 0.0);
}

TEST(Fit, FollowsFromCorrelationIdentity) {
  const PowerLawFit fit = fit_power_law(load_zenith(kData), load_p_random_column(kReference));
  const double r = fit.with_intercept.r;
  EXPECT_NEAR(fit.with_intercept.f_statistic, r * r * 14.0 / (1.0 - r * r), 1e-9);
}

TEST(Fit, RowOrderDoesNotMatter) {
  const ZenithDataset d = load_zenith(kData);
  const auto p = load_p_random_column(kReference);
  const PowerLawFit base = fit_power_law(d, p);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ZenithDataset shuffled = d;
    std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), rng);
    const PowerLawFit f = fit_power_law(shuffled, p);
    EXPECT_EQ(f.with_intercept.exponent, base.with_intercept.exponent);
    EXPECT_EQ(f.with_intercept.r, base.with_intercept.r);
    EXPECT_EQ(f.through_origin.exponent, base.through_origin.exponent);
  }
}

TEST(Fit, ScalingObservationsOnlyMovesTheIntercept) {
  const ZenithDataset d = load_zenith(kData);
  const auto p = load_p_random_column(kReference);
  const PowerLawFit base = fit_power_law(d, p);
  for (double k : {0.5, 2.0, 10.0}) {
    ZenithDataset scaled = d;
    for (auto& r : scaled.rows) r.percent *= k;
    const PowerLawFit f = fit_power_law(scaled, p);
    EXPECT_NEAR(f.with_intercept.exponent, base.with_intercept.exponent, 1e-9);
    EXPECT_NEAR(f.with_intercept.r, base.with_intercept.r, 1e-12);
    EXPECT_NEAR(f.with_intercept.intercept, base.with_intercept.intercept + std::log(k), 1e-9);
  }
}

TEST(Fit, DegenerateInputsThrow) {
  const ZenithDataset d = load_zenith(kData);
  std::map<std::string, double> flat;
  for (const auto& c : make_classes()) flat[c.representative] = 0.5;
  EXPECT_THROW(fit_power_law(d, flat), FitError);
  auto missing = load_p_random_column(kReference);
  missing.erase("01010");
  EXPECT_THROW(fit_power_law(d, missing), FitError);
  auto out_of_range = load_p_random_column(kReference);
  out_of_range["01010"] = 1.0;
  EXPECT_THROW(fit_power_law(d, out_of_range), FitError);
}

TEST(Ranks, AverageTiesAndSpearman) {
  EXPECT_EQ(average_ranks({3.0, 1.0, 3.0, 2.0}), (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 400}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_NEAR(pearson({1, 2, 3}, {2, 4, 6}), 1.0, 1e-15);
}

TEST(Report, ListsEveryClassAndEchoesProvenance) {
  const ZenithDataset d = load_zenith(kData);
  const auto p = load_p_random_column(kReference);
  const ZenithReport rep = zenith_report(d, p, fit_power_law(d, p), {"source=reference-column", "prior=0.5"});
  EXPECT_EQ(rep.rows.size(), 16u);
  const std::string text = render_report(rep);
  EXPECT_EQ(text.rfind("# ctm-zenith-report\n", 0), 0u);
  EXPECT_NE(text.find("# source=reference-column\n"), std::string::npos);
  EXPECT_NE(text.find("fit with-intercept"), std::string::npos);
  EXPECT_NE(text.find("fit through-origin"), std::string::npos);
  EXPECT_NE(text.find("[plot:log]"), std::string::npos);
  EXPECT_NE(text.find("[plot:linear]"), std::string::npos);
  for (const auto& c : make_classes()) EXPECT_NE(text.find("\n" + c.representative + "   "), std::string::npos);
}

}  // namespace
}  // namespace ctm::zenith
