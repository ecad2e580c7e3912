// ko-radial: command-line front end for the koradial library.
//
//   ko-radial <solve|classify|check-envelope|sweep> --config <path> [--set section.key=value]...

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "koradial/koradial.hpp"
#include "koradial/pipeline.hpp"

namespace {

int execute(const std::string& command, const std::string& config_path,
            const std::vector<std::string>& overrides) {
  using namespace koradial;
  RawConfig raw = parse_raw_config(read_text_file(config_path));
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(Errc::ParseError, "--set expects section.key=value, got '" + kv + "'");
    raw.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const RunConfig cfg = build_config(raw);

  RunResult res;
  if (command == "solve") {
    res = run_pipeline(cfg, true);
  } else if (command == "classify") {
    res = run_pipeline(cfg, false);
  } else if (command == "check-envelope") {
    res = run_check_envelope(cfg);
  } else {
    res = run_sweep(cfg);
  }

  if (!cfg.output.csv_path.empty() && !res.csv.empty()) write_text_file(cfg.output.csv_path, res.csv);
  if (cfg.output.report_path.empty()) {
    std::cout << res.report;
  } else {
    write_text_file(cfg.output.report_path, res.report);
    std::cout << "report written to " << cfg.output.report_path << '\n';
  }
  return static_cast<int>(res.exit);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial solutions of a semilinear elliptic system: solve, bound and classify"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  for (const char* name : {"solve", "classify", "check-envelope", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--set", overrides, "override a key, e.g. numerics.r_max=4");
  }
  static const char* help[][2] = {
      {"solve", "Picard solve, oracle check, limits, verdict and bound audits"},
      {"classify", "integral profile and verdict only"},
      {"check-envelope", "audit the growth envelope and monotonicity on a sample lattice"},
      {"sweep", "run every cell of the [sweep] grid"}};
  for (auto& h : help) app.get_subcommand(h[0])->description(h[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return execute(app.get_subcommands().front()->get_name(), config_path, overrides);
  } catch (const koradial::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
