#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uvlc/ber_photon_counting.hpp"
#include "uvlc/constants.hpp"
#include "uvlc/orchestrator.hpp"
#include "uvlc/scenario_io.hpp"
#include "uvlc/sequence_detection.hpp"

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::vector<std::string> overrides;
  std::string out = "-";
  std::optional<uint64_t> seed;
  std::optional<uint64_t> photons;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--scenario", a.scenario_path, "scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", a.overrides,
                  "override a scenario value, section.key=value (repeatable)");
  cmd->add_option("--out", a.out, "output file ('-' = stdout)");
  cmd->add_option("--seed", a.seed, "override the transport seed");
  cmd->add_option("--photons", a.photons, "override the photon count");
  cmd->add_flag("--paper-scale", a.paper_scale,
                "trace 1e8 photons (overrides --photons)");
}

uvlc::Scenario load_scenario(const CommonArgs& a) {
  uvlc::Scenario s = uvlc::parse_scenario_file(a.scenario_path);
  for (const auto& o : a.overrides) uvlc::apply_override(s, o);
  if (a.seed) s.transport.seed = *a.seed;
  if (a.photons) s.transport.photon_count = *a.photons;
  if (a.paper_scale) s.transport.photon_count = 100'000'000;
  return s;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"underwater optical link simulator and analyzer"};
  app.set_version_flag("--version", uvlc::kCodeVersion);
  app.require_subcommand(1);

  // simulate-channel
  CommonArgs ch_args;
  uvlc::EnsureOptions ch_opt;
  auto* ch = app.add_subcommand(
      "simulate-channel",
      "trace photons and report per-link loss and dispersion");
  add_common(ch, ch_args);
  ch->add_flag("--dump-photons", ch_opt.dump_photons,
               "also store raw plane crossings for spatial maps");
  ch->add_flag("--force-retrace", ch_opt.force_retrace,
               "ignore cached responses");
  ch->add_option("--threads", ch_opt.threads, "worker threads (0 = auto)");

  // analyze-ber
  CommonArgs ab_args;
  std::string ab_method = "analytic-ghqf";
  std::string ab_sweep;
  std::optional<double> ab_power;
  uvlc::AveragingOptions ab_avg;
  auto* ab = app.add_subcommand("analyze-ber",
                                "error-rate curves from the stored responses");
  add_common(ab, ab_args);
  ab->add_option("--method", ab_method,
                 "family-averaging: analytic|counting - "
                 "none|ghqf|quadrature|lognormal-sum|mc");
  ab->add_option("--sweep", ab_sweep, "transmit power sweep, dBm start:step:stop");
  ab->add_option("--power", ab_power, "single transmit power, dBm");
  ab->add_option("--ghqf-order", ab_avg.ghqf_order, "quadrature order");
  ab->add_option("--mc-draws", ab_avg.mc_draws, "draws for the mc average");

  // simulate-ber
  CommonArgs sb_args;
  std::string sb_detector = "gmsd";
  std::string sb_sweep;
  std::optional<double> sb_power;
  std::optional<double> sb_fixed_gain;
  uvlc::SequenceDetectorConfig sb_det;
  uvlc::SequenceRunConfig sb_run;
  auto* sb = app.add_subcommand(
      "simulate-ber", "waveform-level detector simulation (single link)");
  add_common(sb, sb_args);
  sb->add_option("--detector", sb_detector, "sbsd | gmsd | msd");
  sb->add_option("--window", sb_det.window, "bits decided jointly");
  sb->add_option("--sweep", sb_sweep, "transmit power sweep, dBm start:step:stop");
  sb->add_option("--power", sb_power, "single transmit power, dBm");
  sb->add_option("--target-errors", sb_run.target_errors,
                 "stop after this many bit errors");
  sb->add_option("--max-bits", sb_run.max_bits, "hard bit budget per point");
  sb->add_option("--windows-per-burst", sb_run.windows_per_burst,
                 "decision windows per fading burst");
  sb->add_option("--fixed-gain", sb_fixed_gain,
                 "genie metric: evaluate at this channel gain");

  // spatial-map
  CommonArgs sm_args;
  uvlc::SpatialMapConfig sm_cfg;
  auto* sm = app.add_subcommand(
      "spatial-map", "received-energy map from a stored photon dump");
  add_common(sm, sm_args);
  sm->add_option("--extent", sm_cfg.extent, "mapped square side, m");
  sm->add_option("--pixels", sm_cfg.pixels, "pixels per side");
  sm->add_option("--map-window", sm_cfg.window,
                 "integration window after the first arrival, s");

  // validate
  CommonArgs va_args;
  auto* va = app.add_subcommand("validate", "check a scenario file");
  add_common(va, va_args);

  CLI11_PARSE(app, argc, argv);

  auto sweep_of = [](const std::string& text, const std::optional<double>& p) {
    if (!text.empty()) return uvlc::parse_sweep(text);
    if (p) return uvlc::SweepSpec{*p, 1.0, *p};
    throw std::invalid_argument("give either --sweep or --power");
  };

  try {
    if (ch->parsed()) {
      uvlc::Scenario s = load_scenario(ch_args);
      return uvlc::run_simulate_channel(s, ch_opt, ch_args.out, std::cerr);
    }
    if (ab->parsed()) {
      uvlc::Scenario s = load_scenario(ab_args);
      ab_avg.seed = s.transport.seed;
      return uvlc::run_analyze_ber(s, ab_method, sweep_of(ab_sweep, ab_power),
                                   ab_avg, ab_args.out, std::cerr);
    }
    if (sb->parsed()) {
      uvlc::Scenario s = load_scenario(sb_args);
      sb_det.kind = uvlc::detector_from_string(sb_detector);
      if (sb_fixed_gain) sb_det.fixed_gain = *sb_fixed_gain;
      sb_run.seed = s.transport.seed;
      return uvlc::run_simulate_ber(s, sb_det, sb_run,
                                    sweep_of(sb_sweep, sb_power), sb_args.out,
                                    std::cerr);
    }
    if (sm->parsed()) {
      uvlc::Scenario s = load_scenario(sm_args);
      return uvlc::run_spatial_map(s, sm_cfg, sm_args.out, std::cerr);
    }
    if (va->parsed()) {
      uvlc::Scenario s = load_scenario(va_args);
      return uvlc::run_validate(s, std::cout);
    }
  } catch (const uvlc::CostGuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uvlc::kExitCostGuard;
  } catch (const uvlc::MissingPrerequisite& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uvlc::kExitMissingPrereq;
  } catch (const uvlc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uvlc::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return uvlc::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
