#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "fvwigner/io/config.hpp"
#include "fvwigner/io/run.hpp"
#include "fvwigner/version.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw fvw::io::ConfigError({"cannot read config file '" + path + "'"});
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int execute(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
            unsigned threads) {
  using namespace fvw::io;
  ConfigSet set;
  try {
    json doc;
    if (config_path.empty()) {
      doc = json::object();
    } else {
      try {
        doc = json::parse(slurp(config_path));
      } catch (const json::parse_error& e) {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
      }
    }
    if (subcommand != "run") {
      if (!doc.is_object()) throw ConfigError({"document must be a JSON object"});
      if (doc.contains("experiment") && doc["experiment"] != subcommand)
        throw ConfigError({"config experiment '" + doc["experiment"].dump() + "' does not match subcommand '" +
                           subcommand + "'"});
      doc["experiment"] = subcommand;
    }
    set = parse_config_json(doc);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    config_failure(e, out_dir);
    return kExitConfig;
  }
  const RunOutcome res = run_all(set, out_dir, threads);
  const auto& m = res.manifest;
  if (m.contains("checks")) {
    for (const auto& c : m["checks"])
      std::printf("%-4s %-44s measured %-12s tol %g\n", c["pass"].get<bool>() ? "ok" : "FAIL",
                  c["name"].get<std::string>().c_str(), c["measured"].dump().c_str(), c["tolerance"].get<double>());
  }
  if (m.contains("error")) std::fprintf(stderr, "error: %s\n", m["error"].get<std::string>().c_str());
  if (m.contains("children"))
    for (const auto& c : m["children"])
      std::printf("%-6s %s (%s)\n", c["status"].get<std::string>().c_str(), c["directory"].get<std::string>().c_str(),
                  c["label"].get<std::string>().c_str());
  std::printf("status: %s, manifest: %s/manifest.json\n", m["status"].get<std::string>().c_str(), out_dir.c_str());
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic Wigner-function experiments for scalar charged particles"};
  app.set_version_flag("--version", std::string(fvw::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "fvwigner_out";
  unsigned threads = 1;

  const char* kinds[] = {"run",      "free-evolve", "rotator-evolve",   "nlcs-scan",
                         "modulation", "spectrum",  "kernels-selftest", "oracle-verify"};
  for (const char* kind : kinds) {
    auto* sub = app.add_subcommand(kind, std::string(kind) == "run" ? "run the experiment named in --config"
                                                                     : std::string("run the ") + kind + " experiment");
    auto* opt = sub->add_option("--config,-c", config_path, "JSON configuration file");
    if (std::string(kind) == "run") opt->required();
    sub->add_option("--out,-o", out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads,-j", threads, "worker threads for sweep children")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fvw::io::kExitConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return execute(sub, config_path, out_dir, threads);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatal: %s\n", e.what());
    return fvw::io::kExitNumerical;
  }
}
