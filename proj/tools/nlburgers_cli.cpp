// Command-line driver: nlburgers <subcommand> [-c config] [-s key=value]... [-o dir]
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nlburgers/errors.hpp"
#include "nlburgers/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Solver and verification suite for the nonlocal Burgers equation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "flat key = value config file");
  app.add_option("-s,--set", overrides, "override one key, e.g. -s alpha=1.2");
  app.add_option("-o,--out", out_dir, "output directory (overrides output_dir)");
  app.add_flag("-q,--quiet", quiet, "suppress progress output");
  for (const auto& name : nlb::subcommands()) app.add_subcommand(name, "run the " + name + " pipeline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : nlb::kExitConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw nlb::ConfigError("cannot read config file " + config_path);
      std::ostringstream ss;
      ss << is.rdbuf();
      text = ss.str();
    }
    nlb::RunConfig cfg = nlb::parse_config(text);
    for (const auto& o : overrides) nlb::apply_override(cfg, o);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    nlb::validate_config(cfg);
    const auto notes = nlb::apply_env_overrides(cfg);

    std::ostringstream sink;
    std::ostream& log = quiet ? static_cast<std::ostream&>(sink) : std::cerr;
    const auto res = nlb::run_subcommand(sub, cfg, log, notes);
    for (const auto& v : res.verdicts)
      std::cout << v.check_id << ' ' << (v.pass ? "PASS" : "FAIL") << " (" << v.quantity << " vs " << v.threshold
                << ")\n";
    std::cout << "wrote " << res.files.size() + 1 << " files to " << cfg.output_dir << "\n";
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nlb::exit_code_for(e);
  }
}
