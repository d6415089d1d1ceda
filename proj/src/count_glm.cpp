#include "geosensor/count_glm.hpp"

#include <algorithm>
#include <charconv>

#include "geosensor/csv.hpp"
#include "geosensor/io.hpp"

namespace geosensor {

PanelModel fit_panel(const std::vector<RegionPanel>& panel, RegionKind kind, std::string burden_label,
                     std::string papers_label) {
  if (panel.empty()) throw Error(ErrorKind::InvalidArgument, "empty regression panel");
  const auto n = static_cast<Eigen::Index>(panel.size());
  glm::Matrix<double> x(n, 2);
  glm::Vector<double> y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = panel[static_cast<std::size_t>(i)];
    x(i, 0) = row.burden;
    x(i, 1) = static_cast<double>(row.papers);
    y(i) = static_cast<double>(row.tweets);
  }
  PanelModel model;
  model.fit = glm::fit_poisson(x, y);
  model.labels = {std::move(burden_label), std::move(papers_label)};
  model.region_kind = kind;
  return model;
}

double pct_change(double beta, double sd) { return glm::pct_change(beta, sd); }

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::string format_coefficient(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 2);
  return std::string(buf, end);
}

std::string format_sample_size(long n, RegionKind kind) {
  return "n=" + std::to_string(n) + (kind == RegionKind::Country ? " countries" : " US states");
}

std::string summarize(const GlmFit& fit, const std::vector<std::string>& labels, RegionKind kind) {
  struct Line {
    std::string label, coef, se, pct;
  };
  std::vector<Line> lines;
  lines.push_back({"Independent variable", "Coefficient", "Standard error", "Percentage change in expected count"});
  const auto k = static_cast<std::size_t>(fit.pct_change.size());
  for (std::size_t j = 0; j < k; ++j) {
    const auto idx = static_cast<Eigen::Index>(j + 1);
    std::string label = j < labels.size() ? labels[j] : "x" + std::to_string(j + 1);
    lines.push_back({label, format_coefficient(fit.beta(idx)) + significance_stars(fit.p(idx)),
                     format_coefficient(fit.se(idx)), io::format_fixed(fit.pct_change(static_cast<Eigen::Index>(j)), 1)});
  }
  lines.push_back({"Constant", format_coefficient(fit.beta(0)) + significance_stars(fit.p(0)),
                   format_coefficient(fit.se(0)), ""});

  std::size_t w_label = 0, w_coef = 0, w_se = 0;
  for (const auto& l : lines) {
    w_label = std::max(w_label, l.label.size());
    w_coef = std::max(w_coef, l.coef.size());
    w_se = std::max(w_se, l.se.size());
  }
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size() + 2, ' '); };

  std::string out = "Poisson regression, number of tweets as dependent variable (" +
                    format_sample_size(static_cast<long>(fit.n), kind) + ")\n\n";
  for (const auto& l : lines) {
    std::string row = pad(l.label, w_label) + pad(l.coef, w_coef) + pad(l.se, w_se) + l.pct;
    while (!row.empty() && row.back() == ' ') row.pop_back();
    out += row + '\n';
  }
  out += '\n' + format_sample_size(static_cast<long>(fit.n), kind) + '\n';
  out += "Note. *** p < .001, ** p < .01, * p < .05\n";
  if (!fit.converged) out += "Warning: " + fit.diagnostic + '\n';
  return out;
}

std::string fit_csv(const GlmFit& fit, const std::vector<std::string>& labels) {
  std::string out = "term,coefficient,se,z,p,pct_change,sd\n";
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    std::string term = j == 0 ? "Constant"
                              : (static_cast<std::size_t>(j - 1) < labels.size() ? labels[static_cast<std::size_t>(j - 1)]
                                                                                 : "x" + std::to_string(j));
    std::string pct = j == 0 ? "" : io::format_double(fit.pct_change(j - 1));
    std::string sd = j == 0 ? "" : io::format_double(fit.sds(j - 1));
    out += csv::format_row({term, io::format_double(fit.beta(j)), io::format_double(fit.se(j)),
                            io::format_double(fit.z(j)), io::format_double(fit.p(j)), pct, sd});
  }
  return out;
}

}  // namespace geosensor
