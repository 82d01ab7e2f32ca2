#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "catdesign/cif.hpp"
#include "catdesign/commands.hpp"
#include "support.hpp"

using namespace catdesign;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("catdesign_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

template <typename Fn>
Run run(Fn&& fn) {
  std::ostringstream out, err;
  const int code = fn(CommandIo{out, err});
  return {code, out.str(), err.str()};
}

// One CIF per failure class, all against target Cu.
void write_four_defects(const fs::path& dir) {
  using fixtures::kMinimalCif;
  using fixtures::replace_line;
  write(dir / "a_pf.cif", replace_line(kMinimalCif, "_cell_length_a", ""));
  write(dir / "b_vf.cif", replace_line(replace_line(kMinimalCif, "_symmetry_space_group_name_H-M", ""),
                                       "_symmetry_Int_Tables_number", ""));
  write(dir / "c_cm.cif", std::string(kMinimalCif) + "Cu2 Cu 0.5 0.5 0.5\n");
  std::string pv = kMinimalCif;
  for (const char* axis : {"_cell_length_a", "_cell_length_b", "_cell_length_c"})
    pv = replace_line(pv, axis, std::string(axis) + " 20.0\n");
  write(dir / "d_pv.cif", pv);
}

const char* kEpoch = "SOURCE_DATE_EPOCH";

}  // namespace

TEST_CASE("validate: one defect per file gives 25% each") {
  TempDir tmp("validate");
  write_four_defects(tmp.path / "");
  GlobalOptions opts;
  opts.out_dir = tmp.path / "out";
  const Run r = run([&](CommandIo io) { return cmd_validate(opts, {{tmp.path}, "Cu"}, io); });
  CHECK(r.code == kExitOk);
  const Json rates = Json::parse(r.out);
  CHECK(rates["PF"] == 25.0);
  CHECK(rates["VF"] == 25.0);
  CHECK(rates["CM"] == 25.0);
  CHECK(rates["PV"] == 25.0);
  CHECK(rates["corpus_size"] == 4);

  std::istringstream lines(slurp(tmp.path / "out" / "reports.jsonl"));
  std::vector<Json> reports;
  for (std::string l; std::getline(lines, l);) reports.push_back(Json::parse(l));
  REQUIRE(reports.size() == 4);
  CHECK(reports[0]["flags"] == Json::array({"PF"}));
  CHECK(reports[1]["flags"] == Json::array({"VF"}));
  CHECK(reports[2]["flags"] == Json::array({"CM"}));
  CHECK(reports[3]["flags"] == Json::array({"PV"}));

  const Json manifest = Json::parse(slurp(tmp.path / "out" / "manifest.json"));
  CHECK(manifest["command"] == "validate");
  CHECK(manifest["tool_version"] == kToolVersion);
  CHECK(manifest["inputs"].size() == 4);
  CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
  CHECK(manifest.contains("config"));
  CHECK(manifest.contains("timestamp"));
  CHECK(manifest.contains("seed"));
  CHECK(Json::parse(slurp(tmp.path / "out" / "failure_rates.json"))["manifest"] == "manifest.json");
}

TEST_CASE("validate: target from sidecar, table output") {
  TempDir tmp("sidecar");
  write(tmp.path / "x.cif", fixtures::kMinimalCif);
  write(tmp.path / "x.target.json", R"({"target": "Cu2"})");
  GlobalOptions opts;
  opts.format = OutputFormat::table;
  const Run r = run([&](CommandIo io) { return cmd_validate(opts, {{tmp.path / "x.cif"}, std::nullopt}, io); });
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("PF(%)") != std::string::npos);
  CHECK(r.out.find("100.00") != std::string::npos);  // CM
}

TEST_CASE("validate: error paths") {
  TempDir tmp("errors");
  fs::create_directories(tmp.path / "empty");
  GlobalOptions opts;
  CHECK(run([&](CommandIo io) { return cmd_validate(opts, {{tmp.path / "empty"}, "Cu"}, io); }).code == kExitUsage);
  CHECK(run([&](CommandIo io) { return cmd_validate(opts, {{}, "Cu"}, io); }).code == kExitUsage);
  CHECK(run([&](CommandIo io) { return cmd_validate(opts, {{tmp.path / "missing.cif"}, "Cu"}, io); }).code ==
        kExitNoInput);

  write(tmp.path / "ok.cif", fixtures::kMinimalCif);
  const Run mixed = run([&](CommandIo io) {
    return cmd_validate(opts, {{tmp.path / "missing.cif", tmp.path / "ok.cif"}, "Cu"}, io);
  });
  CHECK(mixed.code == kExitOk);
  CHECK(mixed.err.find("missing.cif") != std::string::npos);
  CHECK(Json::parse(mixed.out)["errors"] == 1);

  CHECK(run([&](CommandIo io) { return cmd_validate(opts, {{tmp.path / "ok.cif"}, "Qq"}, io); }).code == kExitUsage);
  // No target anywhere: per-file error, nothing processable.
  CHECK(run([&](CommandIo io) { return cmd_validate(opts, {{tmp.path / "ok.cif"}, std::nullopt}, io); }).code ==
        kExitNoInput);
}

TEST_CASE("config file handling") {
  TempDir tmp("config");
  write(tmp.path / "ok.cif", fixtures::kMinimalCif);
  write(tmp.path / "bad.json", R"({"reward": {"w_comp": 0.6, "w_bogus": 1}})");
  write(tmp.path / "weights.json", R"({"reward": {"w_comp": 0.7, "w_parse": 0.1, "w_valid": 0.1, "w_phys": 0.1}})");
  write(tmp.path / "sum.json", R"({"reward": {"w_comp": 0.9}})");
  GlobalOptions opts;
  opts.config_path = tmp.path / "bad.json";
  CHECK(run([&](CommandIo io) { return cmd_validate(opts, {{tmp.path / "ok.cif"}, "Cu"}, io); }).code == kExitUsage);
  opts.config_path = tmp.path / "sum.json";
  CHECK(run([&](CommandIo io) { return cmd_validate(opts, {{tmp.path / "ok.cif"}, "Cu"}, io); }).code == kExitUsage);
  opts.config_path = tmp.path / "nope.json";
  CHECK(run([&](CommandIo io) { return cmd_validate(opts, {{tmp.path / "ok.cif"}, "Cu"}, io); }).code == kExitUsage);

  const AppConfig cfg = AppConfig::load(tmp.path / "weights.json");
  CHECK(cfg.reward.comp == 0.7);
  CHECK(cfg.search.params.reward.comp == 0.7);
  CHECK(AppConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
}

TEST_CASE("textify command") {
  TempDir tmp("textify");
  const auto slab = fixtures::hand_built_slab();
  write(tmp.path / "slab.cif", serialize_cif(slab.structure));
  write(tmp.path / "slab.meta.json",
        R"({"adsorbate": [10, 11], "surface_top": [0,1,2,3,4,5,6,7,8], "catalyst_composition": {"Cu": 12},
            "miller": [1, 1, 1]})");
  write(tmp.path / "lonely.cif", fixtures::kMinimalCif);

  GlobalOptions opts;
  opts.out_dir = tmp.path / "out";
  opts.format = OutputFormat::table;
  setenv(kEpoch, "1700000000", 1);
  const Run r = run([&](CommandIo io) { return cmd_textify(opts, {{tmp.path}}, io); });
  CHECK(r.code == kExitOk);
  CHECK(r.out == std::string(fixtures::kSlabText) + "\n");
  CHECK(r.err.find("missing metadata sidecar") != std::string::npos);
  const std::string first = slurp(tmp.path / "out" / "systems.txt");
  CHECK(first == r.out);
  const std::string manifest = slurp(tmp.path / "out" / "manifest.json");
  CHECK(Json::parse(manifest)["timestamp"] == "2023-11-14T22:13:20Z");

  run([&](CommandIo io) { return cmd_textify(opts, {{tmp.path}}, io); });
  CHECK(slurp(tmp.path / "out" / "systems.txt") == first);
  CHECK(slurp(tmp.path / "out" / "manifest.json") == manifest);
  unsetenv(kEpoch);

  CHECK(run([&](CommandIo io) { return cmd_textify(opts, {{tmp.path / "lonely.cif"}}, io); }).code == kExitNoInput);
}

TEST_CASE("grpo command") {
  TempDir tmp("grpo");
  write(tmp.path / "groups.jsonl",
        R"({"prompt_id": "g1", "members": [{"tokens": ["a"], "logp_current": [-1.0], "logp_reference": [-1.0], "reward": 0.2},)"
        R"( {"tokens": ["b"], "logp_current": [-2.0], "logp_reference": [-2.0], "reward": 0.5},)"
        R"( {"tokens": ["c"], "logp_current": [-0.5], "logp_reference": [-0.5], "reward": 0.8}]})"
        "\n{not json}\n"
        R"({"prompt_id": "g2", "members": [{"logp_current": [-1.0, -3.0], "logp_reference": [-1.0, -1.0], "reward": 1},)"
        R"( {"logp_current": [-0.5], "logp_reference": [-0.7], "reward": 1}]})"
        "\n");
  GlobalOptions opts;
  const Run r = run([&](CommandIo io) { return cmd_grpo(opts, {tmp.path / "groups.jsonl", 0.0, 0.0}, io); });
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("groups.jsonl:2:") != std::string::npos);
  std::istringstream lines(r.out);
  std::vector<Json> out;
  for (std::string l; std::getline(lines, l);) out.push_back(Json::parse(l));
  REQUIRE(out.size() == 3);
  CHECK(out[0]["members"][0]["advantage"].get<double>() == doctest::Approx(-1.22474).epsilon(1e-5));
  CHECK(out[0]["members"][2]["advantage"].get<double>() == doctest::Approx(1.22474).epsilon(1e-5));
  CHECK(out[1]["line"] == 2);
  CHECK(out[2]["loss"] == 0.0);
  for (const auto& m : out[2]["members"]) CHECK(m["advantage"] == 0.0);

  write(tmp.path / "bad.jsonl", "[]\n");
  CHECK(run([&](CommandIo io) { return cmd_grpo(opts, {tmp.path / "bad.jsonl", {}, {}}, io); }).code == kExitNoInput);
}

TEST_CASE("mmtg command") {
  GlobalOptions opts;
  const Run r = run([&](CommandIo io) { return cmd_mmtg(opts, {2.0, 1.0, 1.0, {}}, io); });
  CHECK(r.code == kExitOk);
  CHECK(Json::parse(r.out)["loss"].get<double>() == doctest::Approx(2.47682).epsilon(1e-5));
  CHECK(run([&](CommandIo io) { return cmd_mmtg(opts, {2.0, {}, {}, {}}, io); }).code == kExitUsage);
  CHECK(run([&](CommandIo io) { return cmd_mmtg(opts, {-1.0, 1.0, {}, {}}, io); }).code == kExitUsage);
  CHECK(run([&](CommandIo io) { return cmd_mmtg(opts, {1.0, 1.0, 2.0, {}}, io); }).code == kExitUsage);
}

TEST_CASE("geometry command") {
  TempDir tmp("geometry");
  write(tmp.path / "pair.cif",
        serialize_cif(fixtures::cubic(4, {fixtures::site("A", "Cu", 0, 0, 0), fixtures::site("B", "Cu", 0.5, 0, 0)})));
  GlobalOptions opts;
  const Run r = run([&](CommandIo io) { return cmd_geometry(opts, {tmp.path / "pair.cif", std::nullopt}, io); });
  CHECK(r.code == kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j["min_pair_distance"].get<double>() == doctest::Approx(2.0));
  CHECK(j["volume_per_atom"].get<double>() == doctest::Approx(32.0));
  CHECK(j["neighbors"].size() == 4);  // +-x images of the partner, each direction
  write(tmp.path / "broken.cif", "data_x\n");
  CHECK(run([&](CommandIo io) { return cmd_geometry(opts, {tmp.path / "broken.cif", {}}, io); }).code ==
        kExitNoInput);
}

TEST_CASE("search command") {
  TempDir tmp("search");
  write(tmp.path / "seed.cif", serialize_cif(fixtures::seed_structure()));
  write(tmp.path / "config.json", R"({"search": {"seed_structure": "seed.cif", "iterations": 10}})");
  GlobalOptions opts;
  opts.config_path = tmp.path / "config.json";
  opts.seed = 3;
  opts.out_dir = tmp.path / "out";
  setenv(kEpoch, "0", 1);
  const Run r = run([&](CommandIo io) { return cmd_search(opts, io); });
  CHECK(r.code == kExitOk);
  const Json summary = Json::parse(r.out);
  CHECK(summary["per_iteration"].size() == 10);
  const std::string report = slurp(tmp.path / "out" / "search_report.json");
  const std::string logs = slurp(tmp.path / "out" / "iterations.jsonl");
  CHECK(Json::parse(report)["seed"] == 3);
  CHECK(std::count(logs.begin(), logs.end(), '\n') == 10);

  opts.jobs = 3;
  run([&](CommandIo io) { return cmd_search(opts, io); });
  CHECK(slurp(tmp.path / "out" / "search_report.json") == report);
  CHECK(slurp(tmp.path / "out" / "iterations.jsonl") == logs);
  unsetenv(kEpoch);

  write(tmp.path / "notarget.json", R"({"search": {"iterations": 3}})");
  opts.config_path = tmp.path / "notarget.json";
  CHECK(run([&](CommandIo io) { return cmd_search(opts, io); }).code == kExitUsage);
}
