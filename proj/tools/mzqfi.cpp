// Command-line front end: landscape, simulate, decohere, susceptibility,
// bias and render subcommands. Exit codes: 0 success, 2 configuration
// error, 3 numerical degeneracy, 4 I/O error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mzqfi/cli/commands.hpp"

namespace {

using namespace mzqfi;
using namespace mzqfi::cli;

constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitIo = 4;

struct Common {
  std::string out = "-";
  std::string format = "csv";
  std::size_t workers = 0;
};

void add_common(CLI::App* sub, Common& c, bool with_format = true) {
  // Consumed by expand_config before parsing; registered for --help.
  sub->add_option("--config", "Flat key = value configuration file; flags override it");
  sub->add_option("--out", c.out, "Output path ('-' for stdout)")->capture_default_str();
  if (with_format)
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads (0 = hardware concurrency)");
}

void add_grid(CLI::App* sub, LandscapeGrid& g) {
  sub->add_option("--beta-min", g.beta_range.lo)->capture_default_str();
  sub->add_option("--beta-max", g.beta_range.hi)->capture_default_str();
  sub->add_option("--x-min", g.x_range.lo)->capture_default_str();
  sub->add_option("--x-max", g.x_range.hi)->capture_default_str();
  sub->add_option("--n-beta", g.n_beta)->capture_default_str();
  sub->add_option("--n-x", g.n_x)->capture_default_str();
}

void add_sld(CLI::App* sub, SldOptions& s) {
  sub->add_option("--fd-step", s.step, "Central-difference step")->capture_default_str();
  sub->add_option("--eigen-floor", s.eigen_floor_rel, "Relative eigenvalue floor")->capture_default_str();
  sub->add_option("--drift-tol", s.drift_tol, "Step-halving tolerance")->capture_default_str();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rewrites `sub ... --config PATH ...` so that each `key = value` line of the
// file becomes `--key value` right after the subcommand. Keys also given as
// flags are skipped, so the command line wins. List values may be written
// space-separated or as [a, b, c].
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string path;
  bool have_path = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
      path = args[++i];
      have_path = true;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      have_path = true;
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!have_path || rest.size() < 2) return args;

  std::set<std::string> given;
  for (const auto& a : rest)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));

  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::vector<std::string> injected;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty() || value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key or value");
    if (given.count(key)) continue;
    if (value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
    std::replace(value.begin(), value.end(), ',', ' ');
    injected.push_back("--" + key);
    std::istringstream vs(value);
    for (std::string tok; vs >> tok;) {
      if (tok.size() >= 2 && (tok.front() == '"' || tok.front() == '\'') && tok.back() == tok.front())
        tok = tok.substr(1, tok.size() - 2);
      injected.push_back(tok);
    }
  }
  // rest[0] is the program name; the subcommand is the first bare word.
  std::size_t at = 1;
  while (at < rest.size() && rest[at].rfind("-", 0) == 0) ++at;
  if (at >= rest.size()) throw ConfigError("--config needs a subcommand");
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(at + 1), injected.begin(), injected.end());
  return rest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher-information toolkit for dispersive Mach-Zehnder thermometry and phase sensing"};
  app.name("mzqfi");
  app.require_subcommand(1);

  Common common;
  std::uint64_t seed = 0;

  LandscapeConfig land;
  auto* s_land = app.add_subcommand("landscape", "Analytic Fisher-information landscape over (beta, x)");
  add_common(s_land, common);
  add_grid(s_land, land.grid);
  s_land->add_option("--n-photons", land.n_photons)->capture_default_str();
  s_land->add_option("--hbar-omega0", land.hbar_omega0)->capture_default_str();
  s_land->add_option("--delta", land.delta, "Plateau tolerance")->capture_default_str();

  SimulateConfig sim;
  auto* s_sim = app.add_subcommand("simulate", "Shot-noise circuit simulation with empirical FIM");
  add_common(s_sim, common);
  add_grid(s_sim, sim.grid);
  s_sim->add_option("--mu", sim.mu, "Shots per grid point")->capture_default_str();
  auto* seed_opt = s_sim->add_option("--seed", seed, "64-bit RNG seed")->required();
  s_sim->add_option("--bootstrap", sim.bootstrap, "Bootstrap resamples")->capture_default_str();
  s_sim->add_option("--hbar-omega0", sim.hbar_omega0)->capture_default_str();

  DecohereConfig dec;
  auto* s_dec = app.add_subcommand("decohere", "QFIM and incompatibility heatmaps over (eta, gamma)");
  add_common(s_dec, common);
  s_dec->add_option("--probes", dec.probes, "Probes: noon, cat, squeezed")->capture_default_str();
  s_dec->add_option("--n", dec.n, "NOON photon number")->capture_default_str();
  s_dec->add_option("--alpha", dec.alpha, "Cat amplitude")->capture_default_str();
  s_dec->add_option("--r", dec.r, "Two-mode squeezing")->capture_default_str();
  s_dec->add_option("--cutoff", dec.cutoff, "Fock cutoff (-1 = default)")->capture_default_str();
  s_dec->add_option("--leakage-bound", dec.leakage_bound)->capture_default_str();
  s_dec->add_option("--eta-min", dec.eta_range.lo)->capture_default_str();
  s_dec->add_option("--eta-max", dec.eta_range.hi)->capture_default_str();
  s_dec->add_option("--gamma-min", dec.gamma_range.lo)->capture_default_str();
  s_dec->add_option("--gamma-max", dec.gamma_range.hi)->capture_default_str();
  s_dec->add_option("--n-eta", dec.n_eta)->capture_default_str();
  s_dec->add_option("--n-gamma", dec.n_gamma)->capture_default_str();
  s_dec->add_option("--beta", dec.op.beta)->capture_default_str();
  s_dec->add_option("--x", dec.op.x)->capture_default_str();
  s_dec->add_option("--phase-scale", dec.op.phase_scale)->capture_default_str();
  add_sld(s_dec, dec.sld);

  SusceptibilityConfig sus;
  auto* s_sus = app.add_subcommand("susceptibility", "Susceptibility scaling and critical photon number");
  add_common(s_sus, common);
  s_sus->add_option("--pairs", sus.pairs, "probe:channel pairs, channel AD or PD")->capture_default_str();
  s_sus->add_option("--sizes", sus.sizes, "Probe sizes (N or mean photon number)")->capture_default_str();
  s_sus->add_option("--window", sus.window, "Noise strengths for the first-order fit")->capture_default_str();
  s_sus->add_option("--retries", sus.retries, "Window shrink retries")->capture_default_str();
  s_sus->add_option("--ncrit-eps", sus.ncrit_eps)->capture_default_str();
  s_sus->add_option("--beta", sus.op.beta)->capture_default_str();
  s_sus->add_option("--x", sus.op.x)->capture_default_str();
  add_sld(s_sus, sus.sld);

  BiasConfig bias;
  double kappa = 0.0;
  auto* s_bias = app.add_subcommand("bias", "Contrast-shrinkage bias sweep and correction");
  add_common(s_bias, common);
  auto* kappa_opt = s_bias->add_option("--kappa", kappa, "Shrinkage weight in (0,1)")->required();
  s_bias->add_option("--beta-min", bias.beta_range.lo)->capture_default_str();
  s_bias->add_option("--beta-max", bias.beta_range.hi)->capture_default_str();
  s_bias->add_option("--n-beta", bias.n_beta)->capture_default_str();
  s_bias->add_option("--hbar-omega0", bias.hbar_omega0)->capture_default_str();

  RenderConfig ren;
  std::string ren_kind = "heatmap";
  auto* s_ren = app.add_subcommand("render", "Render a landscape/decohere/simulate CSV as SVG");
  add_common(s_ren, common, false);
  s_ren->add_option("input", ren.input, "Input CSV")->required();
  s_ren->add_option("--kind", ren_kind)->check(CLI::IsMember({"heatmap", "contour"}))->capture_default_str();
  s_ren->add_option("--column", ren.column, "Value column");
  s_ren->add_option("--probe", ren.probe, "Probe to draw from a decohere file");
  s_ren->add_option("--levels", ren.levels, "Contour levels")->capture_default_str();

  try {
    std::vector<std::string> args = expand_config(std::vector<std::string>(argv, argv + argc));
    // CLI11 takes the arguments reversed and without the program name.
    args.erase(args.begin());
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    const OutputFormat fmt = parse_format(common.format);
    land.workers = sim.workers = dec.workers = sus.workers = common.workers;
    if (s_land->parsed()) {
      write_text(common.out, render_report(cmd_landscape(land), fmt));
    } else if (s_sim->parsed()) {
      if (seed_opt->count() > 0) sim.seed = seed;
      write_text(common.out, render_report(cmd_simulate(sim), fmt));
    } else if (s_dec->parsed()) {
      write_text(common.out, render_report(cmd_decohere(dec), fmt));
    } else if (s_sus->parsed()) {
      write_text(common.out, render_report(cmd_susceptibility(sus), fmt));
    } else if (s_bias->parsed()) {
      if (kappa_opt->count() > 0) bias.kappa = kappa;
      write_text(common.out, render_report(cmd_bias(bias), fmt));
    } else if (s_ren->parsed()) {
      ren.kind = ren_kind == "heatmap" ? RenderKind::heatmap : RenderKind::contour;
      write_text(common.out, cmd_render(ren));
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    // Degenerate points, out-of-domain inversions, cutoff and fit failures.
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitDegenerate;
  }
  return 0;
}
