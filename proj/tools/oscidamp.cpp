#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oscidamp/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;
constexpr int kExitUsage = 64;

oscidamp::ControllerMode mode_from_flag(const std::string& s) {
  if (s == "fd") return oscidamp::ControllerMode::FD;
  if (s == "sf") return oscidamp::ControllerMode::SF;
  if (s == "sdf" || s == "sdf_exact") return oscidamp::ControllerMode::SdfExact;
  if (s == "sdf_measured") return oscidamp::ControllerMode::SdfMeasured;
  throw oscidamp::ValidationError("unknown controller: " + s);
}

int dispatch(const std::function<int()>& body) {
  try {
    return body();
  } catch (const oscidamp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const oscidamp::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const oscidamp::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const oscidamp::SingularA& e) {
    std::cerr << "numerical error: " << e.what()
              << " (requires a nonsingular state matrix; add self-stiffness eps)\n";
    return kExitNumeric;
  } catch (const oscidamp::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace oscidamp;

  CLI::App app{"Multi-area oscillation damping: controller design, simulation, and comparison"};
  app.require_subcommand(1);

  std::string config_path, out_dir, controller_flag, controllers_flag = "fd,sdf";
  std::string experiment;
  double kd_flag = 0.0;

  auto* design = app.add_subcommand("design", "Design controller gains and report assumptions");
  design->add_option("--config", config_path, "Config file (JSON)")->required();
  design->add_option("--controller", controller_flag, "fd|sf|sdf|sdf_measured");
  design->add_option("--kd", kd_flag, "FD gain override");

  auto* simulate = app.add_subcommand("simulate", "Run the configured scenario and export CSVs");
  simulate->add_option("--config", config_path, "Config file (JSON)")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();

  auto* compare = app.add_subcommand("compare", "Compare two controllers on one scenario");
  compare->add_option("--config", config_path, "Config file (JSON)")->required();
  compare->add_option("--controllers", controllers_flag, "Comma pair, e.g. fd,sdf");
  compare->add_option("--out", out_dir, "Output directory")->required();

  auto* verify = app.add_subcommand("verify", "Run the invariant suite against a config");
  verify->add_option("--config", config_path, "Config file (JSON)")->required();

  auto* reproduce = app.add_subcommand("reproduce", "Run a built-in experiment preset");
  reproduce->add_option("--experiment", experiment, "a|b|c")->required();
  reproduce->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  if (design->parsed()) {
    return dispatch([&] {
      Config cfg = load_config(config_path);
      std::optional<ControllerMode> mode;
      if (!controller_flag.empty()) mode = mode_from_flag(controller_flag);
      if (kd_flag > 0.0) cfg.controller.kd = kd_flag;
      const DesignResult d = design_controller(cfg, mode);
      std::cout << describe_design(d, mode.value_or(cfg.controller.mode));
      return kExitOk;
    });
  }
  if (simulate->parsed()) {
    return dispatch([&] {
      run_simulate(load_config(config_path), out_dir);
      std::cout << "wrote " << out_dir << "/trajectory.csv and metrics.csv\n";
      return kExitOk;
    });
  }
  if (compare->parsed()) {
    return dispatch([&] {
      const Config cfg = load_config(config_path);
      const auto comma = controllers_flag.find(',');
      if (comma == std::string::npos)
        throw ValidationError("--controllers expects two names, e.g. fd,sdf");
      const ControllerMode base = mode_from_flag(controllers_flag.substr(0, comma));
      const ControllerMode test = mode_from_flag(controllers_flag.substr(comma + 1));
      const CompareResult res = run_compare(cfg, base, test);
      std::filesystem::create_directories(out_dir);
      write_text(out_dir + "/comparison.txt", res.rendered.text);
      write_text(out_dir + "/comparison.csv", res.rendered.csv);
      std::cout << res.rendered.text;
      return kExitOk;
    });
  }
  if (verify->parsed()) {
    return dispatch([&] {
      const VerifyReport rep = run_verify(load_config(config_path));
      std::cout << rep.log;
      std::cout << (rep.passed ? "verify: ALL PASS\n" : "verify: FAILURES\n");
      return rep.passed ? kExitOk : kExitNumeric;
    });
  }
  if (reproduce->parsed()) {
    return dispatch([&] {
      if (experiment.size() != 1)
        throw ValidationError("experiment must be one of a|b|c");
      run_reproduce(experiment[0], out_dir);
      std::cout << "wrote experiment_" << experiment << "_* files to " << out_dir << "\n";
      return kExitOk;
    });
  }
  return kExitUsage;
}
