#pragma once

#include <string>
#include <vector>

#include "geosensor/burden.hpp"
#include "geosensor/glm/poisson.hpp"
#include "geosensor/linkage.hpp"

namespace geosensor {

using GlmFit = glm::PoissonFit<double>;

/// Regression of tweets on burden and papers. The labels name the two
/// covariates in the report table.
struct PanelModel {
  GlmFit fit;
  std::vector<std::string> labels;  // covariates only, without the constant
  RegionKind region_kind = RegionKind::Country;
};

// Throws the glm errors plus InvalidArgument for an empty panel.
PanelModel fit_panel(const std::vector<RegionPanel>& panel, RegionKind kind,
                     std::string burden_label = "Burden", std::string papers_label = "Number of papers");

double pct_change(double beta, double sd);

// "***" for p < .001, "**" for p < .01, "*" for p < .05.
std::string significance_stars(double p);

// Scientific notation with three significant digits, e.g. "2.63e-07".
std::string format_coefficient(double value);

// "n=126 countries" / "n=44 US states".
std::string format_sample_size(long n, RegionKind kind);

/// Aligned text table: one row per covariate (coefficient with stars, SE,
/// percentage change to one decimal), then the constant row with an empty
/// percentage column, then the sample size and the star legend.
std::string summarize(const GlmFit& fit, const std::vector<std::string>& labels, RegionKind kind);

// Machine-readable form with full precision:
// term,coefficient,se,z,p,pct_change,sd
std::string fit_csv(const GlmFit& fit, const std::vector<std::string>& labels);

}  // namespace geosensor
