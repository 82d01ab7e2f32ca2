#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "catdesign/commands.hpp"

using namespace catdesign;

int main(int argc, char** argv) {
  CLI::App app{"catdesign: CIF scoring, textification, policy maths and closed-loop search"};
  app.require_subcommand(1);

  GlobalOptions opts;
  std::string config_path, out_dir, format = "json";
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
  app.add_option("--jobs", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Directory for artifacts and manifest.json");
  app.add_option("--format", format, "Stdout format")->check(CLI::IsMember({"json", "table"}));
  app.set_help_all_flag("--help-all");

  ValidateArgs validate;
  std::vector<std::string> validate_inputs;
  auto* v = app.add_subcommand("validate", "Score CIF files and report PF/VF/CM/PV rates");
  v->add_option("paths", validate_inputs, "CIF files or directories")->required();
  v->add_option("--target", validate.target, "Target formula, e.g. Cu2O");

  TextifyArgs textify;
  std::vector<std::string> textify_inputs;
  auto* t = app.add_subcommand("textify", "Describe tagged adsorbate/slab systems as text");
  t->add_option("paths", textify_inputs, "CIF files or directories; each needs <stem>.meta.json")->required();

  GrpoArgs grpo;
  std::string groups_path;
  auto* g = app.add_subcommand("grpo", "Group advantages and losses from a JSONL groups file");
  g->add_option("groups", groups_path, "JSONL groups file")->required();
  g->add_option("--beta", grpo.beta, "KL coefficient");
  g->add_option("--epsilon", grpo.epsilon, "Added to the group standard deviation");

  MmtgArgs mmtg;
  std::string mmtg_input;
  auto* m = app.add_subcommand("mmtg", "Gated multi-task loss");
  m->add_option("--mae", mmtg.l_mae, "Regression loss");
  m->add_option("--ce", mmtg.l_ce, "Generation loss");
  m->add_option("--lambda", mmtg.lambda, "Gate strength in (0, 1]");
  auto* m_in = m->add_option("--input", mmtg_input, "JSONL of {l_mae, l_ce}");

  auto* s = app.add_subcommand("search", "Closed-loop exemplar-pool search (needs --config)");

  GeometryArgs geometry;
  std::string geometry_input;
  auto* geo = app.add_subcommand("geometry", "Distances and neighbors of one CIF");
  geo->add_option("path", geometry_input, "CIF file")->required();
  geo->add_option("--cutoff", geometry.cutoff, "Plain distance cutoff in A instead of covalent bonds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (!config_path.empty()) opts.config_path = config_path;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (*seed_opt) opts.seed = seed;
  opts.format = format == "table" ? OutputFormat::table : OutputFormat::json;
  CommandIo io{std::cout, std::cerr};

  if (*v) {
    validate.inputs.assign(validate_inputs.begin(), validate_inputs.end());
    return cmd_validate(opts, validate, io);
  }
  if (*t) {
    textify.inputs.assign(textify_inputs.begin(), textify_inputs.end());
    return cmd_textify(opts, textify, io);
  }
  if (*g) {
    grpo.groups = groups_path;
    return cmd_grpo(opts, grpo, io);
  }
  if (*m) {
    if (*m_in) mmtg.input = mmtg_input;
    return cmd_mmtg(opts, mmtg, io);
  }
  if (*s) {
    if (!opts.config_path) {
      std::cerr << "error: search requires --config\n";
      return kExitUsage;
    }
    return cmd_search(opts, io);
  }
  geometry.input = geometry_input;
  return cmd_geometry(opts, geometry, io);
}
