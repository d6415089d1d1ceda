#include <gtest/gtest.h>

#include <cstdlib>
#include <json.hpp>
#include <sys/wait.h>

#include "geosensor/fixture.hpp"
#include "geosensor/linkage.hpp"
#include "geosensor/pipeline.hpp"
#include "test_support.hpp"

using namespace geosensor;
using nlohmann::json;
using testing_support::slurp;
using testing_support::TempDir;
using testing_support::write_file;
namespace fs = std::filesystem;

namespace {

RunConfig fixture_config(const std::string& name, const fs::path& out) {
  RunConfig c = load_config(testing_support::source_dir() / "configs" / (name + ".conf"));
  c.output_dir = out;
  return c;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(GEOSENSOR_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t files_in(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

}  // namespace

TEST(Config, ParseAndResolve) {
  RunConfig c = parse_config(
      "# comment\n disease = hiv \nregions=us-state\ntweets = t.csv\ncanvas = 800x400\n"
      "extent = -125,-66,24,50\nclasses=7\ngeocode=external\ngeocode_rps=0.5\n",
      "/base");
  EXPECT_EQ(c.disease, "hiv");
  EXPECT_EQ(c.region_kind, RegionKind::UsState);
  EXPECT_EQ(c.tweets, fs::path("/base/t.csv"));
  EXPECT_EQ(c.map.projection.width, 800);
  EXPECT_EQ(c.map.projection.lat_max, 50);
  EXPECT_EQ(c.map.classes, 7);
  EXPECT_EQ(c.geocode_mode, GeocodeMode::External);
  EXPECT_EQ(c.geocode_rps, 0.5);
  EXPECT_EQ(c.effective_burden_rule(), BurdenRule::UsHiv);
  EXPECT_EQ(c.map_title(), "Tweeting on papers dealing with HIV in the USA");

  c.region_kind = RegionKind::Country;
  EXPECT_EQ(c.effective_burden_rule(), BurdenRule::HivWorld);
  apply_setting(c, "burden_rule", "window", "/");
  EXPECT_EQ(c.effective_burden_rule(), BurdenRule::Window);

  RunConfig m = parse_config("disease=malaria\n", "/");
  EXPECT_EQ(m.measure(), Measure::IncidencePer1000AtRisk);
  EXPECT_EQ(m.burden_label(), "Malaria incidences (per 1,000 population at risk)");
}

TEST(Config, RejectsBadInput) {
  auto kind = [](std::string_view text) {
    try {
      parse_config(text, "/");
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind("colour = blue\n"), ErrorKind::Validation);
  EXPECT_EQ(kind("disease = flu\n"), ErrorKind::Validation);
  EXPECT_EQ(kind("classes = 1\n"), ErrorKind::Validation);
  EXPECT_EQ(kind("canvas = wide\n"), ErrorKind::Validation);
  EXPECT_EQ(kind("no equals sign\n"), ErrorKind::Validation);
  EXPECT_EQ(kind("geocode_rps = 0\n"), ErrorKind::Validation);
}

TEST(Validate, MissingInputs) {
  TempDir dir("validate");
  RunConfig c = fixture_config("tb-world", dir / "out");
  c.gazetteer = dir / "nope.csv";
  EXPECT_THROW(validate_config(c, Stage::Run), Error);
  EXPECT_NO_THROW(validate_config(c, Stage::Fit));  // fit reads only the panel
}

TEST(Pipeline, StagedRunEqualsFullRun) {
  TempDir dir("staged");
  RunConfig staged = fixture_config("tb-world", dir / "staged");
  RunConfig full = fixture_config("tb-world", dir / "full");
  validate_config(staged, Stage::Filter);
  run_filter(staged);
  run_geocode(staged);
  run_panel(staged);
  run_fit(staged);
  run_render(staged);
  run_all(full);
  for (auto name : {outputs::kFiltered, outputs::kResolved, outputs::kPanel, outputs::kFitTable, outputs::kFitCsv,
                    outputs::kSvg, outputs::kGeoJson}) {
    EXPECT_EQ(slurp(dir / "staged" / name), slurp(dir / "full" / name)) << name;
  }
}

TEST(Pipeline, RunTwiceIsIdentical) {
  TempDir dir("twice");
  RunConfig a = fixture_config("malaria-world", dir / "a");
  RunConfig b = fixture_config("malaria-world", dir / "b");
  std::string ra = run_all(a);
  std::string rb = run_all(b);
  EXPECT_NE(ra.find("timings_ms"), std::string::npos);
  EXPECT_EQ(strip_timings(ra), strip_timings(rb));
  EXPECT_EQ(strip_timings(ra).find("timings_ms"), std::string::npos);
  for (auto name : {outputs::kPanel, outputs::kFitCsv, outputs::kSvg}) {
    EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name)) << name;
  }
}

TEST(Pipeline, SampleSizeAgreesEverywhere) {
  TempDir dir("n");
  for (std::string name : {"tb-world", "malaria-world", "hiv-world", "hiv-us"}) {
    RunConfig c = fixture_config(name, dir / name);
    json report = json::parse(run_all(c));
    long n = report["panel"]["n"];
    EXPECT_EQ(report["fit"]["n"], n) << name;
    std::string table = slurp(dir / name / outputs::kFitTable);
    std::string unit = c.region_kind == RegionKind::Country ? " countries" : " US states";
    EXPECT_NE(table.find("(n=" + std::to_string(n) + unit + ")"), std::string::npos) << name;
    auto panel_text = slurp(dir / name / outputs::kPanel);
    EXPECT_EQ(static_cast<long>(std::count(panel_text.begin(), panel_text.end(), '\n')) - 1, n) << name;
    // Every panel row has burden and papers: regions with tweets minus exclusions.
    long with_tweets = report["panel"]["regions_with_tweets"];
    long excluded = static_cast<long>(report["panel"]["excluded_no_burden"]) +
                    static_cast<long>(report["panel"]["excluded_no_papers"]);
    EXPECT_EQ(with_tweets - excluded, n) << name;
    EXPECT_TRUE(report["fit"]["converged"].get<bool>()) << name;
  }
}

TEST(Pipeline, HivUsPanelIsStates) {
  TempDir dir("hivus");
  RunConfig c = fixture_config("hiv-us", dir / "o");
  run_all(c);
  auto rows = parse_panel_csv(slurp(dir / "o" / outputs::kPanel));
  ASSERT_FALSE(rows.empty());
  for (const auto& r : rows) {
    EXPECT_EQ(r.region_code.size(), 2u);
    EXPECT_NE(r.region_code, "MT");  // no tweets in the fixture
    EXPECT_NE(r.region_code, "WY");
  }
}

TEST(Pipeline, FitOnHandWrittenPanel) {
  TempDir dir("fit");
  write_file(dir / "out" / outputs::kPanel,
             "region_code,tweets,burden,papers\nAAA,3,10,5\nBBB,7,20,9\nCCC,12,35,11\nDDD,4,12,2\nEEE,20,60,14\n");
  RunConfig c = parse_config("disease=tb\n", dir.path());
  c.output_dir = dir / "out";
  json report = json::parse(run_fit(c));
  EXPECT_EQ(report["n"], 5);
  EXPECT_TRUE(fs::exists(dir / "out" / outputs::kFitTable));
  EXPECT_TRUE(fs::exists(dir / "out" / outputs::kFitCsv));
}

TEST(Pipeline, StageFailureIsTagged) {
  TempDir dir("fail");
  write_file(dir / "out" / outputs::kPanel, "region_code,tweets,burden,papers\nAAA,0,10,5\nBBB,0,20,9\nCCC,0,3,1\n");
  RunConfig c = parse_config("disease=tb\n", dir.path());
  c.output_dir = dir / "out";
  try {
    run_fit(c);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), Stage::Fit);
    EXPECT_EQ(e.kind(), ErrorKind::AllZeroResponse);
  }
  EXPECT_FALSE(fs::exists(dir / "out" / outputs::kFitTable));
}

TEST(Cli, ExitCodes) {
  TempDir dir("cli");
  fs::path conf = testing_support::source_dir() / "configs" / "tb-world.conf";

  EXPECT_EQ(run_cli("run -c " + conf.string() + " -o " + (dir / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / outputs::kRunReport));

  // Validation failure: nothing is written.
  EXPECT_EQ(run_cli("run -c " + conf.string() + " -o " + (dir / "bad").string() + " --set gazetteer=" +
                    (dir / "missing.csv").string()),
            2);
  EXPECT_EQ(files_in(dir / "bad"), 0u);
  EXPECT_EQ(run_cli("run"), 2);
  EXPECT_EQ(run_cli("run -c " + (dir / "no.conf").string()), 2);
  EXPECT_EQ(run_cli("run -c " + conf.string() + " --classes 1"), 2);

  // Stage failure: a panel with no tweets at all.
  write_file(dir / "zero" / outputs::kPanel, "region_code,tweets,burden,papers\nAAA,0,1,1\nBBB,0,2,2\nCCC,0,3,4\n");
  EXPECT_EQ(run_cli("fit -c " + conf.string() + " -o " + (dir / "zero").string()), 1);
}

TEST(Fixture, RegeneratesCommittedFiles) {
  TempDir dir("fixture");
  auto names = fixture::write_fixture(dir.path(), fixture::kDefaultSeed);
  ASSERT_EQ(names.size(), 17u);
  for (const auto& name : names) {
    EXPECT_EQ(slurp(dir / name), slurp(testing_support::fixture_dir() / name)) << name;
  }
  TempDir other("fixture2");
  auto again = fixture::write_fixture(other.path(), 7);
  EXPECT_EQ(again, names);
  EXPECT_NE(slurp(other / "tb/tweets.csv"), slurp(dir / "tb/tweets.csv"));
}
