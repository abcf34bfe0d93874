#include <gtest/gtest.h>

#include <sstream>

#include "../tools/cli_app.hpp"
#include "fixtures.hpp"

using namespace millaccess;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "millaccess");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, HelpExitsZeroEverywhere) {
  for (const auto& args : std::vector<std::vector<std::string>>{{"--help"},
                                                                {"analyze", "--help"},
                                                                {"volume", "--help"},
                                                                {"sample", "--help"},
                                                                {"dataset", "--help"},
                                                                {"dataset", "run", "--help"},
                                                                {"evaluate", "--help"},
                                                                {"colorize", "--help"}}) {
    const CliResult r = run(args);
    EXPECT_EQ(r.code, 0) << args.back();
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << args[0];
  }
  EXPECT_NE(run({"analyze", "--help"}).out.find("--occlusion-frac"), std::string::npos);
  EXPECT_NE(run({"dataset", "run", "--help"}).out.find("--config"), std::string::npos);
}

TEST(Cli, MissingCutterIsUsageError) {
  const fs::path dir = fixtures::temp_dir("cli_nocutter");
  write_obj(fixtures::cube(), dir / "c.obj");
  const CliResult r = run({"analyze", (dir / "c.obj").string(), "--sites", "50"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--cutter"), std::string::npos);
  EXPECT_EQ(run({"analyze"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"analyze", (dir / "c.obj").string(), "--cutter", "1,2,3"}).code, 1);
}

TEST(Cli, PlateHasNoInaccessibleSites) {
  const fs::path dir = fixtures::temp_dir("cli_plate");
  write_obj(fixtures::plate(100.0, 4), dir / "plate.obj");
  const CliResult r = run({"analyze", (dir / "plate.obj").string(), "--sites", "200", "--dirs", "17", "--dir-mode",
                     "latlong", "--azimuths", "8", "--cutter", "1,5,10,5", "--min-edge", "0", "--force", "--lloyd",
                     "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("inaccessible: 0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("occlusion: 0\n"), std::string::npos);
  EXPECT_NE(r.err.find("not watertight"), std::string::npos);
  // Without --force the open plate is rejected.
  EXPECT_EQ(run({"analyze", (dir / "plate.obj").string(), "--cutter", "1,5,10,5", "--min-edge", "0"}).code, 1);
}

TEST(Cli, BruteAndDefaultWriteIdenticalRecords) {
  const fs::path dir = fixtures::temp_dir("cli_brute");
  write_obj(fixtures::u_slot(), dir / "u.obj");
  const std::vector<std::string> common{"analyze", (dir / "u.obj").string(), "--sites", "400", "--dirs", "30",
                                        "--preset", "uniform", "--seed", "3", "--lloyd", "3"};
  auto fast = common, slow = common;
  fast.insert(fast.end(), {"--out", (dir / "fast.dma").string(), "--color", (dir / "u.ply").string()});
  slow.insert(slow.end(), {"--out", (dir / "slow.dma").string(), "--brute"});
  ASSERT_EQ(run(fast).code, 0);
  ASSERT_EQ(run(slow).code, 0);
  EXPECT_EQ(fixtures::read_bytes(dir / "fast.dma"), fixtures::read_bytes(dir / "slow.dma"));
  EXPECT_EQ(load_mesh(dir / "u.ply").triangle_count(), fixtures::u_slot().triangle_count());
  EXPECT_GT(read_record(dir / "fast.dma").size(), 0u);
}

TEST(Cli, VolumeCases) {
  const fs::path dir = fixtures::temp_dir("cli_volume");
  write_obj(fixtures::cube(100.0), dir / "cube.obj");
  write_obj(fixtures::open_cube(100.0), dir / "open.obj");
  write_obj(fixtures::pyramid(), dir / "pyr.obj");
  const CliResult full = run({"volume", (dir / "cube.obj").string(), "--resolution", "8", "--cutter", "1,5,10,5"});
  EXPECT_EQ(full.code, 0) << full.err;
  EXPECT_NE(full.out.find("0 volume points"), std::string::npos);
  const CliResult open = run({"volume", (dir / "open.obj").string(), "--resolution", "8", "--cutter", "1,5,10,5"});
  EXPECT_EQ(open.code, 1);
  EXPECT_NE(open.err.find("not watertight"), std::string::npos);
  const CliResult pyr = run({"volume", (dir / "pyr.obj").string(), "--resolution", "10", "--dirs", "26", "--cutter",
                       "1,5,10,5", "--sites", "500", "--lloyd", "2", "--out", (dir / "pyr.dma").string()});
  ASSERT_EQ(pyr.code, 0) << pyr.err;
  const VolumeSamples v = sample_volume(normalize_scale(load_mesh(dir / "pyr.obj")), 10);
  EXPECT_EQ(read_record(dir / "pyr.dma").size(), v.size());
  EXPECT_NE(pyr.out.find(std::to_string(v.size()) + " volume points"), std::string::npos);
}

TEST(Cli, EvaluateCases) {
  const fs::path dir = fixtures::temp_dir("cli_eval");
  DatasetRecord gt;
  gt.shape_id = "g";
  gt.cutter = Cutter::with_margin(1, 1, 5, 1);
  gt.direction_count = 3;
  for (int i = 0; i < 8; ++i) {
    gt.points.push_back({double(i), 0, 0});
    gt.normals.push_back({0, 0, 1});
    gt.label_i.push_back(i < 2);
    gt.label_o.push_back(i == 5);
  }
  write_record(gt, dir / "g.dma");
  std::string same, zeros;
  for (int i = 0; i < 8; ++i) {
    same += std::to_string(gt.label_i[i]) + " " + std::to_string(gt.label_o[i]) + "\n";
    zeros += "0 0\n";
  }
  fixtures::write_text(dir / "same.txt", same);
  fixtures::write_text(dir / "zeros.txt", zeros);
  fixtures::write_text(dir / "short.txt", "0 0\n");

  const CliResult perfect = run({"evaluate", (dir / "g.dma").string(), (dir / "same.txt").string()});
  EXPECT_EQ(perfect.code, 0);
  EXPECT_EQ(perfect.out, "Acc_i: 1.0000\nF1_i: 1.0000\nAcc_o: 1.0000\nF1_o: 1.0000\n");
  const CliResult z = run({"evaluate", (dir / "g.dma").string(), (dir / "zeros.txt").string()});
  EXPECT_EQ(z.out, "Acc_i: 0.7500\nF1_i: 0.0000\nAcc_o: 0.8750\nF1_o: 0.0000\n");
  EXPECT_EQ(run({"evaluate", (dir / "g.dma").string(), (dir / "short.txt").string()}).code, 1);
  EXPECT_EQ(run({"evaluate", (dir / "g.dma").string()}).code, 1);
  const CliResult two = run({"evaluate", "--per-shape", (dir / "g.dma").string(), (dir / "same.txt").string(),
                       (dir / "g.dma").string(), (dir / "zeros.txt").string()});
  EXPECT_EQ(two.code, 0);
  EXPECT_NE(two.out.find("mean over 2 shapes"), std::string::npos);
  EXPECT_NE(two.out.find("Acc_i: 0.8750\n"), std::string::npos);
}

TEST(Cli, SampleAndColorize) {
  const fs::path dir = fixtures::temp_dir("cli_sample");
  write_obj(fixtures::pyramid(), dir / "p.obj");
  const CliResult s = run({"sample", (dir / "p.obj").string(), "--sites", "100", "--lloyd", "2", "--cutter", "1,1,5,1",
                     "--out", (dir / "sites.txt").string()});
  EXPECT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("sites: 100"), std::string::npos);
  EXPECT_NE(s.out.find("density_ok: no"), std::string::npos);
  ASSERT_EQ(run({"analyze", (dir / "p.obj").string(), "--sites", "200", "--dirs", "20", "--cutter", "1,1,5,1",
                 "--lloyd", "2", "--out", (dir / "p.dma").string()})
                .code,
            0);
  const CliResult c = run({"colorize", (dir / "p.obj").string(), (dir / "p.dma").string(), "--out",
                     (dir / "p_col.ply").string()});
  EXPECT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(load_mesh(dir / "p_col.ply").triangle_count(), 6u);
}

TEST(Cli, DatasetRun) {
  const fs::path in = fixtures::temp_dir("cli_ds_in");
  const fs::path out = fixtures::temp_dir("cli_ds_out");
  write_obj(fixtures::cube(), in / "cube.obj");
  write_obj(fixtures::open_cube(), in / "open.obj");
  fixtures::write_text(in / "cfg.json", R"({"n_sites": 120, "m_directions": 10, "lloyd_iters": 1})");
  const CliResult r = run({"dataset", "run", "--config", (in / "cfg.json").string(), "--input", in.string(), "--output",
                     out.string(), "--seed", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("shapes_ok: 1"), std::string::npos);
  EXPECT_NE(r.out.find("shapes_skipped: 1"), std::string::npos);
  EXPECT_EQ(read_record(out / "cube.dma").size(), 120u);
  fixtures::write_text(in / "bad.json", R"({"n_sitez": 1})");
  EXPECT_EQ(run({"dataset", "run", "--config", (in / "bad.json").string()}).code, 1);
  EXPECT_EQ(run({"dataset", "run", "--input", fixtures::temp_dir("cli_ds_empty").string(), "--output", out.string()})
                .code,
            1);
}
