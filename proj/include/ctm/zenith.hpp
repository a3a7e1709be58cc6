#pragma once

// Re-analysis of the 1937 Radio Zenith guessing data: observed answer
// frequencies per 5-bit class against the model's P(R|s), with a power-law
// fit RZ = c * P(R|s)^beta done by least squares in log-log space.

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctm/complexity.hpp"

namespace ctm::zenith {

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ZenithRow {
  std::string representative;
  double percent = 0.0;
};

struct ZenithDataset {
  std::vector<ZenithRow> rows;  // file order

  double percent(const std::string& representative) const {
    for (const auto& r : rows)
      if (r.representative == representative) return r.percent;
    throw std::out_of_range("no row for class " + representative);
  }
};

// `class,value` rows keyed by class representative; '#' lines and a literal
// column-title line are skipped. Any member of a class may label its row.
inline std::vector<std::pair<std::string, double>> read_class_column(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::vector<std::pair<std::string, double>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw LoadError(path + ":" + std::to_string(lineno) + ": expected 'class,value'");
    const std::string label = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (label == "class") continue;
    AggregateClass c;
    try {
      c = class_of(label);
    } catch (const ValidationError&) {
      throw LoadError(path + ":" + std::to_string(lineno) + ": unknown class label '" + label + "'");
    }
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw LoadError(path + ":" + std::to_string(lineno) + ": bad number '" + value + "'");
    }
    if (!(v > 0.0))
      throw LoadError(path + ":" + std::to_string(lineno) + ": value for " + label + " must be positive");
    for (const auto& [rep, _] : out)
      if (rep == c.representative)
        throw LoadError(path + ":" + std::to_string(lineno) + ": duplicate class " + c.representative);
    out.emplace_back(c.representative, v);
  }
  if (out.size() != 16)
    throw LoadError(path + ": expected 16 class rows, found " + std::to_string(out.size()));
  return out;
}

inline ZenithDataset load_zenith(const std::string& path) {
  ZenithDataset d;
  for (const auto& [rep, v] : read_class_column(path)) d.rows.push_back({rep, v});
  double sum = 0.0;
  for (const auto& r : d.rows) sum += r.percent;
  if (sum < 99.0 || sum > 101.0)
    throw LoadError(path + ": percentages sum to " + std::to_string(sum) + ", outside [99, 101]");
  return d;
}

// Reference P(R|s) column, in percent, converted to probabilities.
inline std::map<std::string, double> load_p_random_column(const std::string& path) {
  std::map<std::string, double> out;
  for (const auto& [rep, v] : read_class_column(path)) {
    if (v >= 100.0) throw LoadError(path + ": P(R|s) for " + rep + " must be below 100%");
    out[rep] = v / 100.0;
  }
  return out;
}

inline std::map<std::string, double> p_random_by_class(const RandomnessModel& model) {
  std::map<std::string, double> out;
  for (const auto& c : make_classes()) out[c.representative] = p_random(c, model);
  return out;
}

// --- regression ---------------------------------------------------------------

enum class FitMode : std::uint8_t { WithIntercept, ThroughOrigin };

inline const char* to_string(FitMode m) {
  return m == FitMode::WithIntercept ? "with-intercept" : "through-origin";
}

struct FitResult {
  FitMode mode = FitMode::WithIntercept;
  double exponent = 0.0;   // beta
  double intercept = 0.0;  // ln c; zero through the origin
  double r = 0.0;
  double f_statistic = 0.0;
  double df_model = 1.0;
  double df_residual = 0.0;
  double p_value = 1.0;
  std::map<std::string, double> residuals;  // ln(observed) - ln(fitted), by class
};

struct PowerLawFit {
  FitResult with_intercept;
  FitResult through_origin;
};

namespace detail {

inline double f_p_value(double f, double df1, double df2) {
  if (std::isinf(f)) return 0.0;
  boost::math::fisher_f dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

}  // namespace detail

// Least squares of ln(percent/100) on ln(P(R|s)) over the 16 classes.
//
// With intercept: r is Pearson's r and F = r^2 (n-2) / (1-r^2) on (1, n-2) df.
// Through the origin: R^2 is the uncentered 1 - SSE / sum(y^2), r carries the
// sign of beta, and F = R^2 (n-1) / (1-R^2) on (1, n-1) df.
inline PowerLawFit fit_power_law(const ZenithDataset& data, const std::map<std::string, double>& p_random) {
  std::vector<std::string> labels;
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : data.rows) {
    auto it = p_random.find(row.representative);
    if (it == p_random.end()) throw FitError("no P(R|s) value for class " + row.representative);
    if (!(it->second > 0.0 && it->second < 1.0))
      throw FitError("P(R|s) for " + row.representative + " is outside (0, 1)");
    if (!(row.percent > 0.0)) throw FitError("observed percent for " + row.representative + " is not positive");
    labels.push_back(row.representative);
    x.push_back(std::log(it->second));
    y.push_back(std::log(row.percent / 100.0));
  }
  const auto n = static_cast<double>(x.size());
  if (x.size() < 3) throw FitError("need at least 3 classes to fit");

  // Sums are formed in a fixed order after sorting by label, so the result
  // does not depend on row order.
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return labels[a] < labels[b]; });

  double mx = 0.0, my = 0.0;
  for (auto i : order) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0, xx0 = 0.0, xy0 = 0.0, yy0 = 0.0;
  for (auto i : order) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
    xx0 += x[i] * x[i];
    xy0 += x[i] * y[i];
    yy0 += y[i] * y[i];
  }
  if (sxx <= 0.0) throw FitError("all P(R|s) values are equal; slope is undefined");

  PowerLawFit out;
  {
    FitResult& f = out.with_intercept;
    f.mode = FitMode::WithIntercept;
    f.exponent = sxy / sxx;
    f.intercept = my - f.exponent * mx;
    f.r = syy > 0.0 ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0) : 1.0;
    const double r2 = f.r * f.r;
    f.df_residual = n - 2.0;
    f.f_statistic = r2 >= 1.0 ? std::numeric_limits<double>::infinity() : r2 * f.df_residual / (1.0 - r2);
    f.p_value = detail::f_p_value(f.f_statistic, f.df_model, f.df_residual);
    for (std::size_t i = 0; i < x.size(); ++i)
      f.residuals[labels[i]] = y[i] - (f.intercept + f.exponent * x[i]);
  }
  {
    FitResult& f = out.through_origin;
    f.mode = FitMode::ThroughOrigin;
    f.exponent = xy0 / xx0;
    double sse = 0.0;
    for (auto i : order) sse += (y[i] - f.exponent * x[i]) * (y[i] - f.exponent * x[i]);
    const double r2 = yy0 > 0.0 ? std::clamp(1.0 - sse / yy0, 0.0, 1.0) : 1.0;
    f.r = std::copysign(std::sqrt(r2), f.exponent);
    f.df_residual = n - 1.0;
    f.f_statistic = r2 >= 1.0 ? std::numeric_limits<double>::infinity() : r2 * f.df_residual / (1.0 - r2);
    f.p_value = detail::f_p_value(f.f_statistic, f.df_model, f.df_residual);
    for (std::size_t i = 0; i < x.size(); ++i) f.residuals[labels[i]] = y[i] - f.exponent * x[i];
  }
  return out;
}

// Ranks with ties sharing their average rank (1-based).
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw FitError("correlation undefined for a constant vector");
  return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw FitError("spearman needs two equal-length vectors");
  return pearson(average_ranks(a), average_ranks(b));
}

// --- report -----------------------------------------------------------------

struct ReportRow {
  std::string representative;
  double observed_percent = 0.0;
  double p_random_percent = 0.0;
  double residual_with_intercept = 0.0;
  double residual_through_origin = 0.0;
};

struct ZenithReport {
  std::vector<std::string> provenance;  // "key=value" lines describing the model source
  std::vector<ReportRow> rows;
  PowerLawFit fit;
};

inline ZenithReport zenith_report(const ZenithDataset& data, const std::map<std::string, double>& p_random,
                                  const PowerLawFit& fit, std::vector<std::string> provenance) {
  ZenithReport rep;
  rep.provenance = std::move(provenance);
  rep.fit = fit;
  for (const auto& row : data.rows) {
    rep.rows.push_back({row.representative, row.percent, 100.0 * p_random.at(row.representative),
                        fit.with_intercept.residuals.at(row.representative),
                        fit.through_origin.residuals.at(row.representative)});
  }
  return rep;
}

inline std::vector<std::string> distribution_provenance(const Distribution& d) {
  std::vector<std::string> out;
  for (const auto& [k, v] : provenance(d)) out.push_back(k + "=" + v);
  return out;
}

inline std::string render_report(const ZenithReport& rep) {
  std::ostringstream os;
  const auto fx = [](double v, int digits) { return format_fixed(v, digits); };
  os << "# ctm-zenith-report\n";
  for (const auto& p : rep.provenance) os << "# " << p << "\n";
  os << "\n";
  os << "class   observed_%  P(R|s)_%  resid_intercept  resid_origin\n";
  for (const auto& r : rep.rows) {
    os << r.representative << "   " << fx(r.observed_percent, 2) << "\t" << fx(r.p_random_percent, 2) << "\t"
       << fx(r.residual_with_intercept, 4) << "\t" << fx(r.residual_through_origin, 4) << "\n";
  }
  os << "\n";
  for (const FitResult* f : {&rep.fit.with_intercept, &rep.fit.through_origin}) {
    os << "fit " << to_string(f->mode) << ": RZ = " << fx(std::exp(f->intercept), 4) << " * P(R|s)^"
       << fx(f->exponent, 4) << "  r=" << fx(f->r, 4) << "  F(" << fx(f->df_model, 0) << ","
       << fx(f->df_residual, 0) << ")=" << fx(f->f_statistic, 3) << "  p=" << fx(f->p_value, 6) << "\n";
  }
  double ssr = 0.0;
  double worst = 0.0;
  std::string worst_class;
  for (const auto& r : rep.rows) {
    ssr += r.residual_with_intercept * r.residual_with_intercept;
    if (std::abs(r.residual_with_intercept) > worst) {
      worst = std::abs(r.residual_with_intercept);
      worst_class = r.representative;
    }
  }
  os << "residuals with-intercept: rms=" << fx(std::sqrt(ssr / static_cast<double>(rep.rows.size())), 4)
     << "  largest=" << fx(worst, 4) << " (" << worst_class << ")\n";

  os << "\n[plot:log]\nclass,ln_p_random,ln_observed\n";
  for (const auto& r : rep.rows)
    os << r.representative << "," << fx(std::log(r.p_random_percent / 100.0), 6) << ","
       << fx(std::log(r.observed_percent / 100.0), 6) << "\n";
  os << "\n[plot:linear]\nclass,p_random,observed\n";
  for (const auto& r : rep.rows)
    os << r.representative << "," << fx(r.p_random_percent / 100.0, 6) << "," << fx(r.observed_percent / 100.0, 6)
       << "\n";
  return os.str();
}

}  // namespace ctm::zenith
