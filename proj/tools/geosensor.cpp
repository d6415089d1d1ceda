// geosensor: tweet-location / disease-burden pipeline driver.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geosensor/fixture.hpp"
#include "geosensor/pipeline.hpp"

namespace {

using namespace geosensor;

constexpr int kExitOk = 0;
constexpr int kExitStage = 1;
constexpr int kExitValidation = 2;

const char* kFooter = R"(Paper-ID lists and per-region paper counts are pre-fetched from PubMed:
  hiv      ("hiv"[MeSH Major Topic]) AND ("2011/01/01"[Date - Publication] : "2017/12/31"[Date - Publication])
  tb       ("tuberculosis"[MeSH Major Topic]) AND ("2011/01/01"[Date - Publication] : "2017/12/31"[Date - Publication])
  malaria  ("malaria"[MeSH Major Topic]) AND ("2011/01/01"[Date - Publication] : "2017/12/31"[Date - Publication])

Exit codes: 0 success, 1 stage failure, 2 configuration or validation error.)";

struct Overrides {
  std::string config;
  std::optional<double> geocode_rps;
  std::optional<std::string> geocode;
  std::optional<int> classes;
  std::optional<std::string> canvas;
  std::optional<std::string> extent;
  std::optional<double> dot_base;
  std::optional<double> dot_min;
  std::optional<double> dot_max;
  std::optional<std::string> regions;
  std::optional<std::string> output_dir;
  std::vector<std::string> settings;  // key=value
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "key=value config file")->required();
  cmd->add_option("--geocode", o.geocode, "offline | external");
  cmd->add_option("--geocode-rps", o.geocode_rps, "external geocoder requests per second");
  cmd->add_option("--classes", o.classes, "choropleth class count");
  cmd->add_option("--canvas", o.canvas, "map canvas WxH in pixels");
  cmd->add_option("--extent", o.extent, "lon_min,lon_max,lat_min,lat_max");
  cmd->add_option("--dot-base", o.dot_base, "dot radius before clamping");
  cmd->add_option("--dot-min", o.dot_min, "smallest dot radius");
  cmd->add_option("--dot-max", o.dot_max, "largest dot radius");
  cmd->add_option("--regions", o.regions, "country | us-state");
  cmd->add_option("-o,--output-dir", o.output_dir, "output directory");
  cmd->add_option("--set", o.settings, "extra key=value overrides")->take_all();
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig config = load_config(o.config);
  const std::filesystem::path cwd = std::filesystem::current_path();
  auto set = [&](std::string_view key, const std::string& value) { apply_setting(config, key, value, cwd); };
  for (const auto& kv : o.settings) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Validation, "--set expects key=value, got '" + kv + "'");
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.geocode) set("geocode", *o.geocode);
  if (o.geocode_rps) set("geocode_rps", std::to_string(*o.geocode_rps));
  if (o.classes) set("classes", std::to_string(*o.classes));
  if (o.canvas) set("canvas", *o.canvas);
  if (o.extent) set("extent", *o.extent);
  if (o.dot_base) set("dot_base", std::to_string(*o.dot_base));
  if (o.dot_min) set("dot_min", std::to_string(*o.dot_min));
  if (o.dot_max) set("dot_max", std::to_string(*o.dot_max));
  if (o.regions) set("regions", *o.regions);
  if (o.output_dir) set("output_dir", *o.output_dir);
  return config;
}

int run_stage(Stage stage, const Overrides& o) {
  RunConfig config;
  try {
    config = resolve_config(o);
    if (stage != Stage::Run) validate_config(config, stage);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  try {
    std::string report;
    switch (stage) {
      case Stage::Filter: report = run_filter(config); break;
      case Stage::Geocode: report = run_geocode(config); break;
      case Stage::Panel: report = run_panel(config); break;
      case Stage::Fit: report = run_fit(config); break;
      case Stage::Render: report = run_render(config); break;
      case Stage::Run: report = run_all(config); break;
    }
    std::cout << report;
    return kExitOk;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  } catch (const Error& e) {
    // run_all validates before any stage runs
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Validation ? kExitValidation : kExitStage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tweet-location and disease-burden pipeline"};
  app.footer(kFooter);
  app.require_subcommand(1);

  Overrides overrides;
  const std::vector<std::pair<Stage, std::string>> stages = {
      {Stage::Run, "filter, geocode, panel, fit and render in one go"},
      {Stage::Filter, "keep or drop each tweet location"},
      {Stage::Geocode, "resolve kept locations to coordinates"},
      {Stage::Panel, "count tweets per region and join burden and papers"},
      {Stage::Fit, "Poisson regression of tweets on burden and papers"},
      {Stage::Render, "choropleth with tweet dots as SVG and GeoJSON"},
  };
  std::vector<std::pair<CLI::App*, Stage>> commands;
  for (const auto& [stage, help] : stages) {
    CLI::App* cmd = app.add_subcommand(std::string(to_string(stage)), help);
    add_common(cmd, overrides);
    commands.emplace_back(cmd, stage);
  }

  std::string fixture_dir;
  std::uint64_t fixture_seed = fixture::kDefaultSeed;
  CLI::App* fixture_cmd = app.add_subcommand("fixture", "write the synthetic input fixture");
  fixture_cmd->add_option("--out", fixture_dir, "target directory")->required();
  fixture_cmd->add_option("--seed", fixture_seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (fixture_cmd->parsed()) {
    try {
      for (const auto& name : fixture::write_fixture(fixture_dir, fixture_seed)) std::cout << name << "\n";
      return kExitOk;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitStage;
    }
  }
  for (const auto& [cmd, stage] : commands) {
    if (cmd->parsed()) return run_stage(stage, overrides);
  }
  return kExitValidation;
}
