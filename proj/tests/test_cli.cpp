#include "cli_commands.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

using namespace c1vol::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "c1vol");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

std::string column(const std::vector<std::vector<std::string>>& rows, std::size_t row, const std::string& name) {
  const auto& h = rows.at(0);
  auto it = std::find(h.begin(), h.end(), name);
  if (it == h.end()) return "<missing " + name + ">";
  return rows.at(row).at(static_cast<std::size_t>(it - h.begin()));
}

}  // namespace

TEST(ParseRange, Forms) {
  EXPECT_EQ(parse_range("3"), (std::vector<int>{3}));
  EXPECT_EQ(parse_range("3..5"), (std::vector<int>{3, 4, 5}));
  EXPECT_EQ(parse_range("3,5,7"), (std::vector<int>{3, 5, 7}));
  EXPECT_EQ(parse_range("0..1,4"), (std::vector<int>{0, 1, 4}));
  EXPECT_THROW(parse_range("5..3"), std::invalid_argument);
  EXPECT_THROW(parse_range("x"), std::invalid_argument);
  EXPECT_THROW(parse_range(""), std::invalid_argument);
  EXPECT_EQ(regularities("admissible", 5), (std::vector<int>{1, 2, 3}));
}

TEST(Check, ExitCodes) {
  auto good = invoke({"check", "--volume", oracle::data("threepatch_s53.json")});
  EXPECT_EQ(good.code, 0) << good.err;
  EXPECT_TRUE(nlohmann::json::parse(good.out)["pass"].get<bool>());
  auto planar = invoke({"check", "--volume", oracle::data("twocube.json")});
  EXPECT_EQ(planar.code, 1);
  auto j = nlohmann::json::parse(planar.out);
  EXPECT_TRUE(j["faces"][0]["planar"].get<bool>());

  std::string bad = testing::TempDir() + "/malformed.json";
  std::ofstream(bad) << "{\"vertices\": [[0, 0]";
  auto broken = invoke({"check", "--volume", bad});
  EXPECT_EQ(broken.code, 2);
  EXPECT_FALSE(broken.err.empty());
  EXPECT_EQ(invoke({"check", "--volume", "/nonexistent/volume.json"}).code, 2);
  EXPECT_EQ(invoke({"check"}).code, 2);
  EXPECT_EQ(invoke({"dim", "--volume", oracle::data("threepatch_s53.json"), "--p", "2"}).code, 2);
}

TEST(Dim, GenericWedges) {
  auto r = invoke({"dim", "--generic", "3", "--p", "5", "--r", "2", "--k", "2", "--samples", "2"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(column(rows, 1, "modal_dim_edge"), "34");
  EXPECT_EQ(column(rows, 1, "samples_agree"), "1");

  auto v4 = invoke({"dim", "--generic", "4", "--p", "3", "--r", "1", "--k", "0..4", "--samples", "1"});
  ASSERT_EQ(v4.code, 0) << v4.err;
  auto rows4 = csv_rows(v4.out);
  ASSERT_EQ(rows4.size(), 6u);
  for (std::size_t i = 1; i < rows4.size(); ++i) EXPECT_EQ(column(rows4, i, "modal_dim_edge"), "18");
}

TEST(Dim, FixedVolumeBreakdown) {
  auto r = invoke({"dim", "--volume", oracle::data("fourpatch_nongeneric_s52.json"), "--p", "7", "--r", "3", "--k", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "mode");
  EXPECT_EQ(column(rows, 1, "dim_edge"), "91");
  EXPECT_EQ(column(rows, 1, "mode"), "subclassA");
}

TEST(Output, HeaderCarriesSeedAndRepeatsAreIdentical) {
  std::vector<std::string> args{"dim", "--generic", "3", "--p", "3..4", "--r", "1", "--k", "0,1", "--samples", "2",
                                "--seed", "77"};
  auto a = invoke(args), b = invoke(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("seed=77"), std::string::npos);
  EXPECT_EQ(a.out.rfind("# c1vol dim", 0), 0u);
}

TEST(Fit, ConstantTargetAndDims) {
  auto r = invoke({"fit", "--volume", oracle::data("threepatch_s53.json"), "--p", "3", "--L", "0..1", "--target",
                   "constant:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(column(rows, 1, "dim_total"), "76");
  EXPECT_EQ(column(rows, 2, "dim_total"), "334");
  EXPECT_EQ(column(rows, 1, "dim_edge"), "16");
  EXPECT_LE(std::stod(column(rows, 1, "e_volume")), 1e-10);
  EXPECT_LE(std::stod(column(rows, 2, "e_volume")), 1e-10);
}

TEST(Fit, MaxDimSkipsRows) {
  auto r = invoke({"fit", "--volume", oracle::data("threepatch_s53.json"), "--p", "3", "--L", "0,3", "--max-dim",
                   "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(column(rows, 2, "dim_total"), "14104");
  EXPECT_NE(r.out.find("skipped"), std::string::npos);
}

TEST(Basis, ReportsDimsAndAudit) {
  auto r = invoke({"basis", "--volume", oracle::data("threepatch_s53.json"), "--p", "3", "--k", "0", "--samples", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["dim_total"], 76);
  EXPECT_EQ(j["dim_edge"], 16);
  EXPECT_TRUE(j["audit"]["pass"].get<bool>());
  EXPECT_FALSE(j.contains("functions"));
}

TEST(Gluing, ReportsEveryInnerFace) {
  auto r = invoke({"gluing", "--volume", oracle::data("threepatch_s53.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["faces"].size(), 3u);
  for (auto& f : j["faces"]) EXPECT_TRUE(f["identities_hold"].get<bool>());
}
