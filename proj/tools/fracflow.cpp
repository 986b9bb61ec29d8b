#include <CLI11.hpp>
#include <iostream>

#include "fracflow/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fracflow: mixed finite element runner for fractured porous-media flow"};
  std::string config_path;
  app.add_option("config", config_path, "INI configuration file (see README)")
      ->required()
      ->check(CLI::ExistingFile);
  std::string outdir_override;
  app.add_option("-o,--output", outdir_override,
                 "override the [output] directory from the config");
  CLI11_PARSE(app, argc, argv);

  try {
    fracflow::Config cfg = fracflow::Config::parse_file(config_path);
    if (!outdir_override.empty()) {
      std::string text = "[output]\ndirectory = " + outdir_override + "\n";
      // Re-parse with the override appended so it wins over the file value.
      std::ifstream is(config_path);
      std::stringstream ss;
      ss << is.rdbuf();
      cfg = fracflow::Config::parse_string(ss.str() + "\n" + text, config_path);
    }
    return fracflow::Runner(cfg, std::cout).run();
  } catch (const std::exception& e) {
    std::cout << "FAIL " << e.what() << "\n";
    return 1;
  }
}
