#include "catdesign/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "catdesign/cif.hpp"
#include "catdesign/geometry.hpp"
#include "catdesign/policy_math.hpp"
#include "catdesign/pvcp.hpp"
#include "catdesign/search.hpp"
#include "catdesign/textify.hpp"
#include "parallel.hpp"

namespace fs = std::filesystem;

namespace catdesign {

using Json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string manifest_timestamp() {
  std::time_t t = 0;
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  if (epoch && *epoch) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (*end != '\0' || v < 0) throw ConfigError("SOURCE_DATE_EPOCH must be a non-negative integer");
    t = static_cast<std::time_t>(v);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json make_manifest(std::string_view command, const AppConfig& cfg, std::uint64_t seed,
                   const std::vector<InputDigest>& inputs, const Json& args) {
  Json m;
  m["command"] = command;
  m["tool_version"] = kToolVersion;
  m["timestamp"] = manifest_timestamp();
  m["seed"] = seed;
  m["args"] = args;
  m["config"] = cfg.to_json();
  Json digests = Json::array();
  for (const auto& d : inputs) digests.push_back({{"path", d.path}, {"sha256", d.sha256}});
  m["inputs"] = digests;
  return m;
}

std::vector<fs::path> expand_cif_inputs(const std::vector<fs::path>& paths) {
  if (paths.empty()) throw ConfigError("no input paths given");
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    std::error_code ec;
    if (!fs::is_directory(p, ec)) {
      files.push_back(p);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(p, ec))
      if (entry.is_regular_file() && entry.path().extension() == ".cif") found.push_back(entry.path());
    if (ec) throw ConfigError(fmt::format("cannot list directory '{}': {}", p.string(), ec.message()));
    if (found.empty()) throw ConfigError(fmt::format("directory '{}' contains no .cif files", p.string()));
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  return files;
}

namespace {

std::optional<std::string> read_file(const fs::path& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return std::move(buf).str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
}

std::string dump_jsonl(const std::vector<Json>& lines) {
  std::string s;
  for (const auto& l : lines) s += l.dump() + "\n";
  return s;
}

AppConfig load_config(const GlobalOptions& opts) {
  return opts.config_path ? AppConfig::load(*opts.config_path) : AppConfig{};
}

// Writes artifacts plus manifest.json when --out is set.
void write_artifacts(const GlobalOptions& opts, const Json& manifest,
                     const std::vector<std::pair<std::string, std::string>>& files) {
  if (!opts.out_dir) return;
  std::error_code ec;
  fs::create_directories(*opts.out_dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", opts.out_dir->string(), ec.message()));
  for (const auto& [name, content] : files) write_file(*opts.out_dir / name, content);
  write_file(*opts.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

template <typename Fn>
int guarded(CommandIo io, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitNoInput;
  }
}

Json path_list(const std::vector<fs::path>& paths) {
  Json j = Json::array();
  for (const auto& p : paths) j.push_back(p.string());
  return j;
}

fs::path sidecar(const fs::path& file, std::string_view suffix) {
  return file.parent_path() / (file.stem().string() + std::string(suffix));
}

std::string defect_summary(const ParseOutcome& outcome) {
  std::string s;
  for (const auto& d : outcome.defects) {
    if (!s.empty()) s += "; ";
    s += fmt::format("{} at line {}: {}", to_string(d.code), d.line, d.message);
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_validate(const GlobalOptions& opts, const ValidateArgs& args, CommandIo io) {
  return guarded(io, [&] {
    const AppConfig cfg = load_config(opts);
    const auto files = expand_cif_inputs(args.inputs);
    std::optional<CompositionVector> global_target = cfg.validate_target;
    if (args.target) global_target = parse_formula(*args.target);

    struct Item {
      std::optional<RewardBreakdown> report;
      std::string error;
      std::optional<std::string> digest;
    };
    std::vector<Item> items(files.size());
    detail::parallel_for(files.size(), opts.jobs, [&](std::size_t i) {
      Item& item = items[i];
      const auto text = read_file(files[i]);
      if (!text) {
        item.error = "unreadable file";
        return;
      }
      item.digest = sha256_hex(*text);
      std::optional<CompositionVector> target = global_target;
      if (!target) {
        const fs::path side = sidecar(files[i], ".target.json");
        const auto side_text = read_file(side);
        if (!side_text) {
          item.error = fmt::format("no target composition (expected --target, config or {})", side.string());
          return;
        }
        try {
          const Json j = Json::parse(*side_text);
          const Json& t = j.at("target");
          if (t.is_string()) {
            target = parse_formula(t.get<std::string>());
          } else {
            CompositionVector c;
            for (const auto& [el, n] : t.items()) c[el] = n.get<int>();
            target = c;
          }
        } catch (const std::exception& e) {
          item.error = fmt::format("bad target sidecar {}: {}", side.string(), e.what());
          return;
        }
      }
      try {
        item.report = pvcp(*text, *target, cfg.reward, cfg.phys);
      } catch (const std::invalid_argument& e) {
        item.error = e.what();
      }
    });

    std::vector<Json> lines;
    std::vector<RewardBreakdown> reports;
    std::vector<InputDigest> digests;
    for (std::size_t i = 0; i < files.size(); ++i) {
      const std::string id = files[i].string();
      if (items[i].digest) digests.push_back({id, *items[i].digest});
      if (items[i].report) {
        lines.push_back(to_json(*items[i].report, id));
        reports.push_back(std::move(*items[i].report));
      } else {
        lines.push_back({{"candidate_id", id}, {"error", items[i].error}});
        io.err << id << ": " << items[i].error << "\n";
      }
    }
    if (reports.empty()) {
      io.err << "error: no processable inputs\n";
      return static_cast<int>(kExitNoInput);
    }

    const FailureRates rates = corpus_failure_rates(reports);
    Json rates_json = to_json(rates);
    rates_json["errors"] = files.size() - reports.size();
    rates_json["manifest"] = "manifest.json";

    Json margs;
    margs["inputs"] = path_list(args.inputs);
    if (args.target) margs["target"] = *args.target;
    write_artifacts(opts, make_manifest("validate", cfg, opts.seed.value_or(0), digests, margs),
                    {{"reports.jsonl", dump_jsonl(lines)}, {"failure_rates.json", rates_json.dump(2) + "\n"}});

    if (opts.format == OutputFormat::table) {
      io.out << fmt::format("{:>8} {:>8} {:>8} {:>8} {:>8}\n", "files", "PF(%)", "VF(%)", "CM(%)", "PV(%)");
      io.out << fmt::format("{:>8} {:>8.2f} {:>8.2f} {:>8.2f} {:>8.2f}\n", rates.corpus_size, rates.pf, rates.vf,
                            rates.cm, rates.pv);
    } else {
      rates_json.erase("manifest");
      io.out << rates_json.dump(2) << "\n";
    }
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------------------

int cmd_textify(const GlobalOptions& opts, const TextifyArgs& args, CommandIo io) {
  return guarded(io, [&] {
    const AppConfig cfg = load_config(opts);
    const auto files = expand_cif_inputs(args.inputs);

    struct Item {
      std::optional<SystemText> text;
      std::string error;
      std::vector<InputDigest> digests;
    };
    std::vector<Item> items(files.size());
    detail::parallel_for(files.size(), opts.jobs, [&](std::size_t i) {
      Item& item = items[i];
      const auto cif = read_file(files[i]);
      if (!cif) {
        item.error = "unreadable file";
        return;
      }
      item.digests.push_back({files[i].string(), sha256_hex(*cif)});
      const fs::path meta_path = sidecar(files[i], ".meta.json");
      const auto meta_text = read_file(meta_path);
      if (!meta_text) {
        item.error = fmt::format("missing metadata sidecar {}", meta_path.string());
        return;
      }
      item.digests.push_back({meta_path.string(), sha256_hex(*meta_text)});
      const ParseOutcome parsed = parse_cif(*cif);
      if (!parsed.ok()) {
        item.error = "parse failed: " + defect_summary(parsed);
        return;
      }
      try {
        const SystemMetadata meta = SystemMetadata::from_json(Json::parse(*meta_text));
        item.text = to_system_text(*parsed.structure, meta, CovalentRadiusTable::standard(), cfg.neighbor_scale,
                                   cfg.textify);
      } catch (const std::exception& e) {
        item.error = fmt::format("{}: {}", meta_path.string(), e.what());
      }
    });

    std::string systems;
    std::vector<Json> lines;
    std::vector<InputDigest> digests;
    std::size_t done = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
      const std::string id = files[i].string();
      digests.insert(digests.end(), items[i].digests.begin(), items[i].digests.end());
      if (items[i].text) {
        ++done;
        systems += items[i].text->joined + "\n";
        lines.push_back({{"id", id}, {"text", items[i].text->joined}});
      } else {
        lines.push_back({{"id", id}, {"error", items[i].error}});
        io.err << id << ": " << items[i].error << "\n";
      }
    }
    if (done == 0) {
      io.err << "error: no processable inputs\n";
      return static_cast<int>(kExitNoInput);
    }
    write_artifacts(opts,
                    make_manifest("textify", cfg, opts.seed.value_or(0), digests, {{"inputs", path_list(args.inputs)}}),
                    {{"systems.txt", systems}, {"report.jsonl", dump_jsonl(lines)}});
    if (opts.format == OutputFormat::table)
      io.out << systems;
    else
      io.out << dump_jsonl(lines);
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------------------

namespace {

CandidateGroup group_from_json(const Json& j) {
  CandidateGroup g;
  const Json& id = j.at("prompt_id");
  g.prompt_id = id.is_string() ? id.get<std::string>() : id.dump();
  const Json& members = j.at("members");
  if (!members.is_array()) throw std::invalid_argument("'members' must be an array");
  for (const auto& m : members) {
    SequenceLogProbs seq;
    seq.logp_current = m.at("logp_current").get<std::vector<double>>();
    seq.logp_reference = m.at("logp_reference").get<std::vector<double>>();
    const Json& r = m.at("reward");
    if (!r.is_number()) throw std::invalid_argument("'reward' must be a number");
    g.sequences.push_back(std::move(seq));
    g.rewards.push_back(r.get<double>());
  }
  g.validate();
  return g;
}

}  // namespace

int cmd_grpo(const GlobalOptions& opts, const GrpoArgs& args, CommandIo io) {
  return guarded(io, [&] {
    const AppConfig cfg = load_config(opts);
    GrpoConfig gc = cfg.grpo;
    if (args.beta) gc.beta = *args.beta;
    if (args.epsilon) gc.epsilon = *args.epsilon;
    if (!(gc.beta >= 0) || !(gc.epsilon >= 0)) throw ConfigError("beta and epsilon must be >= 0");

    const auto text = read_file(args.groups);
    if (!text) {
      io.err << "error: cannot read " << args.groups.string() << "\n";
      return static_cast<int>(kExitNoInput);
    }

    std::vector<Json> lines;
    std::size_t done = 0, line_no = 0;
    std::istringstream in(*text);
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const CandidateGroup g = group_from_json(Json::parse(line));
        const GrpoLoss loss = grpo_loss(g, gc);
        Json members = Json::array();
        for (std::size_t k = 0; k < g.size(); ++k) {
          members.push_back({{"reward", g.rewards[k]},
                             {"advantage", loss.advantages[k]},
                             {"normalized_logprob", normalized_logprob(g.sequences[k], Policy::current)},
                             {"kl", kl_estimate(g.sequences[k])},
                             {"loss", loss.per_member[k]}});
        }
        lines.push_back({{"prompt_id", g.prompt_id}, {"members", members}, {"loss", loss.total}});
        ++done;
      } catch (const std::exception& e) {
        const std::string msg = fmt::format("{}:{}: {}", args.groups.string(), line_no, e.what());
        io.err << msg << "\n";
        lines.push_back({{"line", line_no}, {"error", msg}});
      }
    }
    if (done == 0) {
      io.err << "error: no processable groups\n";
      return static_cast<int>(kExitNoInput);
    }
    Json margs = {{"groups", args.groups.string()}, {"beta", gc.beta}, {"epsilon", gc.epsilon}};
    write_artifacts(opts,
                    make_manifest("grpo", cfg, opts.seed.value_or(0), {{args.groups.string(), sha256_hex(*text)}},
                                  margs),
                    {{"grpo.jsonl", dump_jsonl(lines)}});
    if (opts.format == OutputFormat::table) {
      io.out << fmt::format("{:<16} {:>4} {:>14}\n", "prompt_id", "K", "loss");
      for (const auto& l : lines)
        if (l.contains("loss"))
          io.out << fmt::format("{:<16} {:>4} {:>14.8f}\n", l["prompt_id"].get<std::string>(), l["members"].size(),
                                l["loss"].get<double>());
    } else {
      io.out << dump_jsonl(lines);
    }
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------------------

int cmd_mmtg(const GlobalOptions& opts, const MmtgArgs& args, CommandIo io) {
  return guarded(io, [&] {
    const AppConfig cfg = load_config(opts);
    MmtgConfig mc = cfg.mmtg;
    if (args.lambda) mc.lambda = *args.lambda;

    std::vector<std::pair<double, double>> pairs;
    std::vector<InputDigest> digests;
    if (args.input) {
      if (args.l_mae || args.l_ce) throw ConfigError("--input cannot be combined with --mae/--ce");
      const auto text = read_file(*args.input);
      if (!text) {
        io.err << "error: cannot read " << args.input->string() << "\n";
        return static_cast<int>(kExitNoInput);
      }
      digests.push_back({args.input->string(), sha256_hex(*text)});
      std::istringstream in(*text);
      std::size_t line_no = 0;
      for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          const Json j = Json::parse(line);
          pairs.emplace_back(j.at("l_mae").get<double>(), j.at("l_ce").get<double>());
        } catch (const std::exception& e) {
          throw ConfigError(fmt::format("{}:{}: {}", args.input->string(), line_no, e.what()));
        }
      }
      if (pairs.empty()) {
        io.err << "error: no processable records\n";
        return static_cast<int>(kExitNoInput);
      }
    } else {
      if (!args.l_mae || !args.l_ce) throw ConfigError("give --mae and --ce, or --input");
      pairs.emplace_back(*args.l_mae, *args.l_ce);
    }

    std::vector<Json> lines;
    for (const auto& [mae, ce] : pairs) {
      lines.push_back({{"l_mae", mae},
                       {"l_ce", ce},
                       {"lambda", mc.lambda},
                       {"loss", mmtg_loss(mae, ce, mc)},
                       {"loss_additive", mmtg_loss_additive(mae, ce, mc)}});
    }
    Json margs = {{"lambda", mc.lambda}};
    if (args.input) margs["input"] = args.input->string();
    if (args.l_mae) margs["l_mae"] = *args.l_mae;
    if (args.l_ce) margs["l_ce"] = *args.l_ce;
    write_artifacts(opts, make_manifest("mmtg", cfg, opts.seed.value_or(0), digests, margs),
                    {{"mmtg.jsonl", dump_jsonl(lines)}});
    if (opts.format == OutputFormat::table) {
      io.out << fmt::format("{:>12} {:>12} {:>8} {:>14}\n", "l_mae", "l_ce", "lambda", "loss");
      for (const auto& l : lines)
        io.out << fmt::format("{:>12.6f} {:>12.6f} {:>8.4f} {:>14.8f}\n", l["l_mae"].get<double>(),
                              l["l_ce"].get<double>(), l["lambda"].get<double>(), l["loss"].get<double>());
    } else {
      io.out << dump_jsonl(lines);
    }
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------------------

int cmd_search(const GlobalOptions& opts, CommandIo io) {
  return guarded(io, [&] {
    const AppConfig cfg = load_config(opts);
    const SearchSection& sec = cfg.search;
    SearchConfig p = sec.params;
    p.seed = opts.seed.value_or(0);
    p.jobs = opts.jobs;

    std::vector<InputDigest> digests;
    if (opts.config_path) {
      const auto text = read_file(*opts.config_path);
      if (text) digests.push_back({opts.config_path->string(), sha256_hex(*text)});
    }
    std::optional<Structure> base;
    if (sec.seed_structure) {
      const auto text = read_file(*sec.seed_structure);
      if (!text) throw ConfigError(fmt::format("cannot read seed structure '{}'", *sec.seed_structure));
      digests.push_back({*sec.seed_structure, sha256_hex(*text)});
      ParseOutcome parsed = parse_cif(*text);
      if (!parsed.ok())
        throw ConfigError(fmt::format("seed structure does not parse: {}", defect_summary(parsed)));
      base = std::move(*parsed.structure);
    }
    const PairPotentialSurrogate surrogate(sec.surrogate);
    if (!sec.target_energy_set) {
      if (!base) throw ConfigError("search needs target_energy or seed_structure");
      p.target_energy = surrogate.predict(*base);
    }
    if (p.target_composition.empty()) {
      if (!base) throw ConfigError("search needs target_composition or seed_structure");
      p.target_composition = composition_of(*base);
    }
    const MutationGenerator gen(sec.mutation, base);

    SearchReport report;
    try {
      report = run_search(p, gen, surrogate);
    } catch (const InitializationError& e) {
      io.err << "error: " << e.what() << "\n";
      return static_cast<int>(kExitNoInput);
    }

    Json report_json = to_json(report);
    report_json["target_energy"] = p.target_energy;
    report_json["manifest"] = "manifest.json";
    std::vector<Json> log_lines;
    for (const auto& log : report.logs) log_lines.push_back(to_json(log));
    write_artifacts(opts, make_manifest("search", cfg, p.seed, digests, Json::object()),
                    {{"search_report.json", report_json.dump(2) + "\n"}, {"iterations.jsonl", dump_jsonl(log_lines)}});

    if (opts.format == OutputFormat::table) {
      io.out << fmt::format("{:>4} {:>14} {:>10} {:>10} {:>6}\n", "iter", "best|dE|(eV)", "pool_min", "pool_max",
                            "repl");
      for (std::size_t i = 0; i < report.per_iteration.size(); ++i) {
        const auto& s = report.per_iteration[i];
        io.out << fmt::format("{:>4} {:>14.6f} {:>10.6f} {:>10.6f} {:>6}\n", i + 1, s.best_abs_delta_e, s.pool_min,
                              s.pool_max, s.replacements);
      }
      io.out << fmt::format("success: {} (target {:.6f} eV, best energy {:.6f} eV)\n", report.success,
                            p.target_energy, report.best_energy);
    } else {
      Json summary;
      summary["success"] = report.success;
      summary["target_energy"] = p.target_energy;
      summary["best_energy"] = report.best_energy;
      summary["best_abs_delta_e"] = report.best_abs_delta_e;
      summary["per_iteration"] = report_json["per_iteration"];
      io.out << summary.dump(2) << "\n";
    }
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------------------

int cmd_geometry(const GlobalOptions& opts, const GeometryArgs& args, CommandIo io) {
  return guarded(io, [&] {
    const AppConfig cfg = load_config(opts);
    if (args.cutoff && !(*args.cutoff > 0)) throw ConfigError("--cutoff must be positive");
    const auto text = read_file(args.input);
    if (!text) {
      io.err << "error: cannot read " << args.input.string() << "\n";
      return static_cast<int>(kExitNoInput);
    }
    const ParseOutcome parsed = parse_cif(*text);
    if (!parsed.ok()) {
      io.err << args.input.string() << ": " << defect_summary(parsed) << "\n";
      return static_cast<int>(kExitNoInput);
    }
    const Structure& s = *parsed.structure;
    const auto& radii = CovalentRadiusTable::standard();

    Json j;
    j["input"] = args.input.string();
    j["formula"] = format_formula(composition_of(s));
    j["n_sites"] = s.size();
    try {
      const NeighborList nl =
          args.cutoff ? neighbors_within(s, *args.cutoff) : build_neighbor_list(s, radii, cfg.neighbor_scale);
      const Contact c = tightest_contact(s, radii);
      j["volume"] = s.lattice().volume();
      j["volume_per_atom"] = volume_per_atom(s);
      j["min_pair_distance"] = min_pair_distance(s);
      j["tightest_contact"] = {{"site_i", c.i}, {"site_j", c.j}, {"distance", c.distance},
                               {"radius_sum", c.radius_sum}, {"ratio", c.ratio()}};
      if (args.cutoff)
        j["cutoff"] = *args.cutoff;
      else
        j["neighbor_scale"] = cfg.neighbor_scale;
      j["neighbors"] = neighbor_list_to_json(nl);
    } catch (const DegenerateCellError& e) {
      io.err << args.input.string() << ": " << e.what() << "\n";
      return static_cast<int>(kExitNoInput);
    }

    Json margs = {{"input", args.input.string()}};
    if (args.cutoff) margs["cutoff"] = *args.cutoff;
    write_artifacts(opts,
                    make_manifest("geometry", cfg, opts.seed.value_or(0), {{args.input.string(), sha256_hex(*text)}},
                                  margs),
                    {{"geometry.json", j.dump(2) + "\n"}});
    if (opts.format == OutputFormat::table) {
      io.out << fmt::format("{} ({} sites)  V/atom {:.4f} A^3  min distance {:.6f} A\n", j["formula"].get<std::string>(),
                            s.size(), j["volume_per_atom"].get<double>(), j["min_pair_distance"].get<double>());
      io.out << fmt::format("{:>10} {:>10} {:>14} {:>12}\n", "site_i", "site_j", "image", "distance");
      for (const auto& n : j["neighbors"]) {
        const auto& img = n["image"];
        io.out << fmt::format("{:>10} {:>10} {:>14} {:>12.6f}\n", s.site(n["site_i"].get<std::size_t>()).label,
                              s.site(n["site_j"].get<std::size_t>()).label,
                              fmt::format("[{},{},{}]", img[0].get<int>(), img[1].get<int>(), img[2].get<int>()),
                              n["distance"].get<double>());
      }
    } else {
      io.out << j.dump(2) << "\n";
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace catdesign
