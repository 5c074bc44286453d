#include "homlab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "homlab/config.hpp"
#include "homlab/csvio.hpp"
#include "homlab/errors.hpp"
#include "homlab/manifest.hpp"
#include "homlab/oracle.hpp"
#include "homlab/svgplot.hpp"
#include "homlab/units.hpp"

#ifndef HOMLAB_VERSION
#define HOMLAB_VERSION "0.0.0"
#endif

namespace homlab {

namespace {

struct CommonOpts {
  std::string preset = "fig3a";
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = ".";
  std::string csv_path;
  std::string svg_path;
  std::string hist_path;
  std::string manifest_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_preset = true) {
  if (with_preset)
    cmd->add_option("--preset", o.preset, "preset name (fig3a..fig3d)");
  cmd->add_option("--config", o.config_path, "key = value config file");
  cmd->add_option("--set", o.sets, "inline override key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "RNG seed (beats HOMLAB_SEED)");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--csv", o.csv_path, "CSV output path");
  cmd->add_option("--svg", o.svg_path, "SVG output path");
  cmd->add_option("--manifest", o.manifest_path, "manifest output path");
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
}

std::vector<ConfigEntry> collect_overrides(const CommonOpts& o) {
  std::vector<ConfigEntry> entries;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in)
      throw ValidationError("cannot read config file '" + o.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    entries = parse_config(buf.str());
  }
  int pseudo_line = -1;
  for (const std::string& s : o.sets) {
    const auto extra = parse_config(s);
    for (ConfigEntry e : extra) {
      e.line = pseudo_line--;  // negative lines mark --set origins
      entries.push_back(std::move(e));
    }
  }
  return entries;
}

ToolConfig build_config(const CommonOpts& o,
                        const std::vector<ConfigEntry>& entries) {
  ToolConfig config{make_preset(o.preset), default_loop_config(), OracleSettings{}};
  apply_overrides(config, entries);
  return config;
}

std::uint64_t resolve_seed(const CommonOpts& o, std::uint64_t preset_default) {
  if (o.seed_given) return o.seed;
  if (const char* env = std::getenv("HOMLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("HOMLAB_SEED is not an unsigned integer");
    }
  }
  return preset_default;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void print_fit(std::ostream& out, const ScanFit& fit) {
  out << "fitted baseline      = " << fit.model.baseline << " counts/point\n";
  out << "fitted depth D       = " << fit.model.depth << " +/- "
      << fit.depth_sigma << "\n";
  out << "fitted visibility V  = " << fit.visibility << " +/- "
      << fit.visibility_sigma << "\n";
  out << "fitted rms width     = " << fit.model.rms_width_s * 1e12 << " ps\n";
  out << "fitted centre        = " << fit.center_s * 1e12 << " ps\n";
  out << "bootstrap resamples  = " << fit.bootstrap_resamples << "\n";
}

int cmd_analytic(const CommonOpts& o, std::ostream& out) {
  const ToolConfig config = build_config(o, collect_overrides(o));
  const DipParams& dip = config.preset.dip;
  const double d = dip_depth(dip);
  const double v = visibility(dip);
  const double w = dip_width(dip);
  out << "preset " << config.preset.name << ": " << config.preset.description
      << "\n";
  out << "sigma_p = " << dip.sigma_p << " rad/s\n";
  out << "sigma_S = " << dip.sigma_s << " rad/s (inferred, "
      << rms_nm_from_omega(SpectralGaussian{788.5e-9, dip.sigma_s})
      << " nm rms at 788.5 nm)\n";
  if (dip.trigger_unfiltered())
    out << "sigma_T = unfiltered (inferred)\n";
  else
    out << "sigma_T = " << dip.sigma_t << " rad/s (inferred)\n";
  out << "sigma_J = " << dip.sigma_j << " s\n";
  out << "depth D      = " << d << "\n";
  out << "visibility V = " << v << "   (V = D/(2-D))\n";
  out << "rms width w  = " << w * 1e12 << " ps   (fwhm "
      << fwhm_from_rms(w) * 1e12 << " ps)\n";
  out << "scenario visibilities at this depth:\n";
  out << "  indistinguishable  "
      << scenario_visibility(Scenario::indistinguishable, d) << "\n";
  out << "  orthogonal         " << scenario_visibility(Scenario::orthogonal, d)
      << "\n";
  out << "  unpolarized        "
      << scenario_visibility(Scenario::unpolarized, d) << "\n";
  out << "  thermal r=1        "
      << scenario_visibility(Scenario::thermal, d, 1.0) << "\n";
  out << "  thermal r=2        "
      << scenario_visibility(Scenario::thermal, d, 2.0) << "\n";
  return 0;
}

int cmd_oracle(const CommonOpts& o, bool run_grid, std::ostream& out) {
  const ToolConfig config = build_config(o, collect_overrides(o));
  bool diverged = false;

  const auto compare = [&](const DipParams& p, const std::string& label) {
    const OracleDipResult oracle = oracle_dip(p, config.oracle);
    const double v_closed = visibility(p);
    const double w_closed = dip_width(p);
    const double v_rel = std::abs(oracle.visibility / v_closed - 1.0);
    const double w_rel = std::abs(oracle.model.rms_width_s / w_closed - 1.0);
    out << label << ": oracle V = " << oracle.visibility
        << ", closed form V = " << v_closed << " (rel diff " << v_rel
        << "); oracle w = " << oracle.model.rms_width_s * 1e12
        << " ps, closed form w = " << w_closed * 1e12 << " ps (rel diff "
        << w_rel << ")\n";
    if (v_rel > 0.02) {
      diverged = true;
      out << "DIVERGENCE " << label << ": oracle and closed form disagree by "
          << v_rel * 100.0 << " % in visibility (tolerance 2 %); sigma_p = "
          << p.sigma_p << ", sigma_S = " << p.sigma_s << ", sigma_T = "
          << p.sigma_t << ", sigma_J = " << p.sigma_j << "\n";
    }
  };

  if (run_grid) {
    const double sigma_p = config.preset.dip.sigma_p;
    int cell = 0;
    for (double s_ratio : {0.05, 0.1, 0.3}) {
      for (double j_product : {0.0, 1.0, 3.4}) {
        for (int t_kind = 0; t_kind < 3; ++t_kind) {
          const double sigma_s = s_ratio * sigma_p;
          const double sigma_t = t_kind == 0   ? 2.0 * sigma_s
                                 : t_kind == 1 ? 10.0 * sigma_s
                                               : DipParams::kUnfilteredTrigger;
          const DipParams p{sigma_p, sigma_s, sigma_t, j_product / sigma_p};
          compare(p, "cell " + std::to_string(cell++));
        }
      }
    }
  } else {
    compare(config.preset.dip, "preset " + config.preset.name);
  }
  if (diverged) throw NumericalError("oracle diverges from the closed form");
  return 0;
}

int cmd_scan(const CommonOpts& o, std::ostream& out) {
  const std::vector<ConfigEntry> entries = collect_overrides(o);
  ToolConfig config = build_config(o, entries);
  ExperimentConfig& exp = config.preset.experiment;
  exp.seed = resolve_seed(o, exp.seed);

  const ScanResult scan =
      exp.scenario == Scenario::thermal
          ? simulate_thermal(exp, config.preset.thermal_intensity_ratio, 4096,
                             o.threads)
          : run_scan(exp, o.threads);
  const ScanFit fit = fit_dip(scan);

  const std::string csv = o.csv_path.empty()
                              ? join_path(o.out_dir, config.preset.name + "_scan.csv")
                              : o.csv_path;
  const std::string svg = o.svg_path.empty()
                              ? join_path(o.out_dir, config.preset.name + "_scan.svg")
                              : o.svg_path;
  const std::string man =
      o.manifest_path.empty()
          ? join_path(o.out_dir, config.preset.name + "_manifest.txt")
          : o.manifest_path;
  write_scan_csv(scan, csv);
  render_dip_svg(scan, fit, svg);

  RunManifest manifest;
  manifest.command = "scan";
  manifest.preset = config.preset.name;
  for (const ConfigEntry& e : entries) manifest.overrides.emplace_back(e.key, e.value);
  manifest.overrides.emplace_back("scan.seed", std::to_string(exp.seed));
  manifest.seed = exp.seed;
  manifest.threads = o.threads;
  manifest.version = HOMLAB_VERSION;
  manifest.outputs = {{"csv", csv}, {"svg", svg}, {"manifest", man}};
  write_manifest(manifest, man);

  out << "scan " << config.preset.name << " ("
      << to_string(exp.scenario) << "), seed " << exp.seed << "\n";
  out << "points = " << scan.points.size()
      << ", blocks/point = " << exp.blocks_per_point() << "\n";
  if (!scan.warning.empty()) out << "warning: " << scan.warning << "\n";
  print_fit(out, fit);
  out << "csv = " << csv << "\nsvg = " << svg << "\nmanifest = " << man << "\n";
  return 0;
}

int cmd_sync(const CommonOpts& o, double duration_s, double discard_s,
             std::ostream& out) {
  const std::vector<ConfigEntry> entries = collect_overrides(o);
  ToolConfig config = build_config(o, entries);
  const std::uint64_t seed = resolve_seed(o, 1);

  const JitterSeries series = simulate_lock(config.loop, duration_s, seed);
  double discard = discard_s;
  if (discard < 0.0)
    discard = series.handover_time_s + 20.0 / config.loop.loop_bandwidth_hz;
  const double rms = rms_jitter(series, discard);

  const std::string csv = o.csv_path.empty()
                              ? join_path(o.out_dir, "sync_jitter.csv")
                              : o.csv_path;
  const std::string man = o.manifest_path.empty()
                              ? join_path(o.out_dir, "sync_manifest.txt")
                              : o.manifest_path;
  write_jitter_csv(series, csv);
  if (!o.hist_path.empty())
    write_jitter_histogram_csv(series, discard, 60, o.hist_path);

  RunManifest manifest;
  manifest.command = "sync";
  for (const ConfigEntry& e : entries) manifest.overrides.emplace_back(e.key, e.value);
  manifest.seed = seed;
  manifest.threads = 1;
  manifest.version = HOMLAB_VERSION;
  manifest.outputs = {{"csv", csv}, {"manifest", man}};
  if (!o.hist_path.empty()) manifest.outputs.emplace_back("hist", o.hist_path);
  write_manifest(manifest, man);

  out << "sync simulation: " << duration_s << " s at harmonic "
      << config.loop.harmonic << ", seed " << seed << "\n";
  out << "coarse lock at " << series.coarse_lock_time_s * 1e3
      << " ms, handover at " << series.handover_time_s * 1e3 << " ms\n";
  out << "residual timing jitter = " << rms * 1e15 << " fs rms (discarding "
      << discard * 1e3 << " ms)\n";
  out << "pair jitter with GVM   = "
      << combined_pair_jitter(rms, kGvmJitterRms) * 1e15 << " fs rms\n";
  out << "csv = " << csv << "\nmanifest = " << man << "\n";
  return 0;
}

int cmd_fit(const std::string& csv_path, std::ostream& out) {
  const ScanResult scan = read_scan_csv(csv_path);
  const ScanFit fit = fit_dip(scan);
  out << "fit of " << csv_path << " (" << scan.points.size() << " points)\n";
  print_fit(out, fit);
  return 0;
}

int cmd_presets(std::ostream& out) {
  for (const std::string& name : preset_names()) {
    const Preset p = make_preset(name);
    out << name << ": " << p.description << "\n";
    for (const ProvenancedValue& v : p.provenance) {
      out << "  " << std::left << std::setw(26) << v.key << std::setw(14)
          << v.value << "[" << v.provenance << "]";
      if (!v.note.empty()) out << " " << v.note;
      out << "\n";
    }
  }
  out << "sync: two-stage repetition-rate lock\n";
  for (const ProvenancedValue& v : loop_provenance()) {
    out << "  " << std::left << std::setw(26) << v.key << std::setw(14)
        << v.value << "[" << v.provenance << "]";
    if (!v.note.empty()) out << " " << v.note;
    out << "\n";
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"two-source interference lab: closed forms, quadrature oracle, "
               "counting-experiment Monte Carlo, synchronization loop"};
  app.set_version_flag("--version", HOMLAB_VERSION);
  app.require_subcommand(1);

  CommonOpts o;
  bool grid = false;
  double duration = 0.1;
  double discard = -1.0;
  std::string fit_csv;

  CLI::App* analytic = app.add_subcommand("analytic", "closed-form predictions");
  add_common(analytic, o);
  CLI::App* oracle =
      app.add_subcommand("oracle", "first-principles check of the closed forms");
  add_common(oracle, o);
  oracle->add_flag("--grid", grid, "run the 27-cell comparison grid");
  CLI::App* scan = app.add_subcommand("scan", "simulate and fit a delay scan");
  add_common(scan, o);
  CLI::App* sync = app.add_subcommand("sync", "simulate the two-stage lock");
  add_common(sync, o, /*with_preset=*/false);
  sync->add_option("--duration", duration, "simulated time, s");
  sync->add_option("--discard", discard, "transient discard, s (default auto)");
  sync->add_option("--hist", o.hist_path, "write a residual histogram CSV");
  CLI::App* fitc = app.add_subcommand("fit", "refit an existing scan CSV");
  fitc->add_option("csv", fit_csv, "scan CSV path")->required();
  CLI::App* presets =
      app.add_subcommand("presets", "list presets with provenance tags");
  (void)presets;

  std::string help_key_block = "config keys (SI units):\n";
  for (const auto& [k, desc] : config_key_help())
    help_key_block += "  " + k + "  " + desc + "\n";
  app.footer(help_key_block);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << HOMLAB_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "homlab: error [usage] " << e.what() << "\n";
    return 2;
  }

  for (CLI::App* sub : {analytic, oracle, scan, sync}) {
    if (sub->parsed() && sub->count("--seed") > 0) o.seed_given = true;
  }

  try {
    if (analytic->parsed()) return cmd_analytic(o, out);
    if (oracle->parsed()) return cmd_oracle(o, grid, out);
    if (scan->parsed()) return cmd_scan(o, out);
    if (sync->parsed()) return cmd_sync(o, duration, discard, out);
    if (fitc->parsed()) return cmd_fit(fit_csv, out);
    return cmd_presets(out);
  } catch (const ValidationError& e) {
    err << "homlab: error [validation] " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "homlab: error [numerical] " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "homlab: error [internal] " << e.what() << "\n";
    return 3;
  }
}

}  // namespace homlab
