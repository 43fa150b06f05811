#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "uhom/commands.hpp"

namespace {

int env_threads() {
  const char* v = std::getenv("UNFOLD_HOMOG_THREADS");
  if (v == nullptr || *v == '\0') return 1;
  try {
    const int n = std::stoi(v);
    return n > 0 ? n : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic homogenization and unfolding toolkit"};
  app.set_version_flag("--version", std::string(uhom::kToolVersion));
  app.require_subcommand(1);

  uhom::RunOptions opt;
  std::string config;
  int threads = 0;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON config or run manifest");
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads (default: UNFOLD_HOMOG_THREADS or 1)");
    sub->add_option("--seed", seed, "seed overriding the config");
    sub->add_option("--format", opt.format, "stdout summary format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  struct Group {
    const char* name;
    const char* help;
  };
  for (const Group g : {Group{"young", "Young function certificates and norms (check | norm)"},
                        Group{"hom", "homogenized energy density (solve | table)"},
                        Group{"verify", "invariant suites (unfold | two-scale | sweep | relaxation)"}}) {
    CLI::App* sub = app.add_subcommand(g.name, g.help);
    sub->add_option("action", opt.sub, "subcommand or suite")->required();
    common(sub);
    sub->callback([&opt, sub] { opt.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : uhom::kExitConfig;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--config") > 0) opt.config_path = config;
    if (sub->count("--seed") > 0) opt.seed = seed;
    opt.threads = sub->count("--threads") > 0 ? threads : env_threads();
  }
  return uhom::run(opt, std::cout, std::cerr);
}
