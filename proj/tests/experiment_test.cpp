#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "barron/construction.hpp"
#include "barron/errors.hpp"
#include "barron/experiment.hpp"
#include "barron/rates.hpp"

namespace barron {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("barron_exp_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_config(const fs::path& dir) {
  ExperimentConfig c;
  c.d = 3;
  c.gammas = {2.0};
  c.sizes = {60, 120};
  c.iterations = 1;
  c.master_seed = 5;
  c.pool_train = 2000;
  c.pool_test = 2000;
  c.test_size = 500;
  c.max_width = 4;
  c.trainer.learning_rate = 1e-2;
  c.trainer.max_epochs = 5;
  c.out_dir = dir;
  return c;
}

std::string strip_wall_seconds(const fs::path& csv) {
  std::stringstream out;
  for (const auto& r : read_risk_csv(csv)) {
    auto copy = r;
    copy.wall_seconds = 0.0;
    out << to_csv_row(copy) << '\n';
  }
  return out.str();
}

TEST(Sweep, CellCountAndResume) {
  const auto cfg = small_config(fresh_dir("resume"));
  const auto s1 = run_sweep(cfg);
  EXPECT_TRUE(s1.ok());
  EXPECT_EQ(s1.cells_run, 2U);
  EXPECT_EQ(read_risk_csv(s1.csv).size(), 2U);
  const auto s2 = run_sweep(cfg);
  EXPECT_EQ(s2.cells_run, 0U);
  EXPECT_EQ(s2.cells_skipped, 2U);
  EXPECT_EQ(read_risk_csv(s2.csv).size(), 2U);
}

TEST(Sweep, DeterministicAcrossWorkerCounts) {
  auto a = small_config(fresh_dir("det_a"));
  a.gammas = {1.0, 3.0};
  a.iterations = 2;
  auto b = a;
  b.out_dir = fresh_dir("det_b");
  b.workers = 3;
  run_sweep(a);
  run_sweep(b);
  EXPECT_EQ(strip_wall_seconds(a.csv_path()), strip_wall_seconds(b.csv_path()));
}

TEST(Sweep, RowsCarrySeedAndHash) {
  const auto cfg = small_config(fresh_dir("hash"));
  run_sweep(cfg);
  const auto rows = read_risk_csv(cfg.csv_path());
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_EQ(rows[0].config_hash, cfg.hash());
  EXPECT_EQ(rows[0].seed, cell_seed(cfg.master_seed, 3, 0, 0, 0));
  EXPECT_EQ(rows[1].seed, cell_seed(cfg.master_seed, 3, 0, 1, 0));
  for (const auto& r : rows) EXPECT_LE(r.zero_one_risk, r.hinge_risk);
}

TEST(Sweep, FailedCellsAreCountedNotFatal) {
  auto cfg = small_config(fresh_dir("fail"));
  cfg.train_csv = cfg.out_dir / "tiny_train.csv";
  cfg.test_csv = cfg.out_dir / "tiny_test.csv";
  {
    std::ofstream tr(cfg.train_csv);
    tr << "x_0,x_1,x_2,label,dist\n0.1,0.1,0.1,1,0.45\n0.9,0.9,0.9,0,0.45\n";
    std::ofstream te(cfg.test_csv);
    te << "x_0,x_1,x_2,label,dist\n0.1,0.1,0.1,1,0.45\n0.9,0.9,0.9,0,0.45\n";
  }
  const auto s = run_sweep(cfg);
  EXPECT_FALSE(s.ok());
  EXPECT_EQ(s.cells_failed, 2U);
}

TEST(Config, JsonRoundTripAndOverrides) {
  auto c = small_config("/tmp/x");
  const auto j = config_to_json(c);
  const auto back = config_from_json(j);
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_EQ(back.sizes, c.sizes);
  EXPECT_EQ(back.trainer.max_epochs, 5U);
  const auto partial = config_from_json(nlohmann::json{{"iterations", 7}}, c);
  EXPECT_EQ(partial.iterations, 7U);
  EXPECT_EQ(partial.sizes, c.sizes);
  EXPECT_NE(partial.hash(), c.hash());
  auto w = c;
  w.workers = 8;
  EXPECT_EQ(w.hash(), c.hash());
}

TEST(Config, Validation) {
  auto c = small_config("/tmp/x");
  c.sizes = {100, 50};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config("/tmp/x");
  c.iterations = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config("/tmp/x");
  c.d = 7;
  c.sizes.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"d", "three"}}), ConfigError);
}

TEST(Config, DefaultGrids) {
  ExperimentConfig c;
  EXPECT_EQ(c.gamma_list().size(), 10U);
  EXPECT_EQ(c.size_list().front(), 499U);
  EXPECT_EQ(c.test_target(), 399644U);
  EXPECT_DOUBLE_EQ(c.neighborhood_radius(), 0.48);
}

TEST(MarginPool, ReachesTarget) {
  const auto pool = margin_pool(3, 5.0, 0.48, 3000, 1000, 7);
  EXPECT_GE(pool.size(), 3000U);
  pool.validate();
}

fs::path shipped_spec() { return fs::path(BARRON_SOURCE_DIR) / "tools" / "specs" / "affine_d2.json"; }

TEST(ConstructVerify, ShippedSpecPasses) {
  VerifyOptions o;
  o.n_points = 20000;
  o.n_mc = 100000;
  const auto r = run_construct_verify(shipped_spec(), o);
  ASSERT_TRUE(r.contains("bounds")) << r.dump();
  EXPECT_TRUE(r.at("ok").get<bool>()) << r.dump(2);
  EXPECT_TRUE(r.at("bounds").at("weights_ok").get<bool>());
  EXPECT_GT(r.at("interior").at("qualifying").get<std::size_t>(), 0U);
}

TEST(ConstructVerify, WidthOneSpecStillWithinBounds) {
  ClassifierSpec spec;
  spec.c1 = 0.5;
  spec.width = 1;
  const AffineHorizon f{{0.0}, 0.5};
  spec.pieces.push_back(
      CoverPiece{{{0.0, 1.0}, {0.0, 1.0}}, {0, 1}, 1, Orientation::below, affine_approximant(f, 1), f, 0.0});
  VerifyOptions o;
  o.n_points = 5000;
  o.n_mc = 20000;
  const auto r = construct_verify(spec_to_json(spec), o);
  EXPECT_TRUE(r.at("bounds").at("hidden_layers_ok").get<bool>());
  EXPECT_TRUE(r.at("bounds").at("weights_ok").get<bool>());
  EXPECT_TRUE(r.at("bounds").at("magnitude_ok").get<bool>());
  EXPECT_TRUE(r.at("bounds").at("neurons_ok").get<bool>());
}

TEST(ConstructVerify, CorruptJsonGivesLineAndColumn) {
  const fs::path dir = fresh_dir("corrupt");
  const fs::path p = dir / "bad.json";
  {
    std::ofstream out(p);
    out << "{\n  \"c1\": 0.5,\n  \"width\": 16,,\n}\n";
  }
  const auto r = run_construct_verify(p, {});
  EXPECT_FALSE(r.at("ok").get<bool>());
  EXPECT_EQ(r.at("error").at("kind"), "parse");
  EXPECT_EQ(r.at("error").at("line"), 3);
  EXPECT_EQ(r.at("error").at("column"), 15);   // the second comma
}

TEST(ConstructVerify, InvalidSpecIsStructured) {
  const auto r = construct_verify(nlohmann::json{{"c1", 0.5}, {"width", 4}, {"pieces", nlohmann::json::array()}}, {});
  EXPECT_FALSE(r.at("ok").get<bool>());
  EXPECT_EQ(r.at("error").at("kind"), "spec");
}

}  // namespace
}  // namespace barron
