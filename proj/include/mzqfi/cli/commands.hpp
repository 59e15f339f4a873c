#pragma once

// Subcommand bodies of the command-line tool. Each command turns a validated
// config into a Report (typed table plus optional JSON extras); the tool
// itself only parses flags and writes the report.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mzqfi/analysis.hpp"
#include "mzqfi/analytic.hpp"
#include "mzqfi/circuit.hpp"
#include "mzqfi/estimate.hpp"
#include "mzqfi/io/csv.hpp"
#include "mzqfi/io/svg.hpp"
#include "mzqfi/parallel.hpp"

namespace mzqfi::cli {

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw InvalidArgument("format must be csv or json, got '" + s + "'");
}

using Value = std::variant<double, std::int64_t, std::string>;

struct Report {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  nlohmann::ordered_json extras = nlohmann::ordered_json::object();

  void add(std::vector<Value> row) {
    if (row.size() != columns.size()) throw std::logic_error("report row width mismatch");
    rows.push_back(std::move(row));
  }
};

inline std::string value_text(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return io::format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

inline nlohmann::ordered_json value_json(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

inline std::string render_report(const Report& r, OutputFormat f) {
  std::ostringstream os;
  if (f == OutputFormat::csv) {
    io::CsvTable t;
    t.kind = r.kind;
    t.columns = r.columns;
    for (const auto& row : r.rows) {
      std::vector<std::string> cells;
      for (const auto& v : row) cells.push_back(value_text(v));
      t.rows.push_back(std::move(cells));
    }
    io::write_csv(os, t);
    return os.str();
  }
  nlohmann::ordered_json j;
  j["schema"] = "mzqfi-json";
  j["version"] = io::kCsvVersion;
  j["kind"] = r.kind;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < row.size(); ++i) o[r.columns[i]] = value_json(row[i]);
    j["rows"].push_back(std::move(o));
  }
  for (const auto& [k, v] : r.extras.items()) j[k] = v;
  os << j.dump(2) << "\n";
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline std::int64_t flag(bool b) { return b ? 1 : 0; }

// ----------------------------------------------------------------- landscape

struct LandscapeConfig {
  LandscapeGrid grid;
  double hbar_omega0 = 1.0;
  int n_photons = 1;
  double delta = 0.05;
  std::size_t workers = 0;

  void validate() const {
    grid.validate();
    ModelParams{0.0, hbar_omega0, 0.0, n_photons}.validate();
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
  }
};

inline const std::vector<std::string>& landscape_columns() {
  static const std::vector<std::string> c{"beta", "x", "p0", "f_bb", "f_xx", "f_bx",
                                          "f_eff", "f_x_fraction", "trace", "plateau_flag"};
  return c;
}

inline Report cmd_landscape(const LandscapeConfig& cfg) {
  cfg.validate();
  const auto& g = cfg.grid;
  const ModelParams tmpl{0.0, cfg.hbar_omega0, 0.0, cfg.n_photons};
  const auto mask = plateau_mask(g, tmpl, cfg.delta);
  std::vector<std::vector<Value>> rows(g.n_beta * g.n_x);
  parallel_for(rows.size(), [&](std::size_t k) {
    const std::size_t i = k / g.n_x, j = k % g.n_x;
    ModelParams p = tmpl;
    p.beta = g.beta_at(i);
    p.x = g.x_at(j);
    const auto pr = output_probabilities(p);
    const auto f = fim_analytic(p);
    const auto s = scalar_figures(f);
    rows[k] = {p.beta, p.x, pr.p0, f.bb, f.xx, f.bx, s.f_eff, s.f_x_fraction, s.trace,
               flag(mask(i, j) != 0)};
  }, cfg.workers);
  Report r;
  r.kind = "landscape";
  r.columns = landscape_columns();
  r.rows = std::move(rows);
  r.extras["n_photons"] = cfg.n_photons;
  r.extras["hbar_omega0"] = cfg.hbar_omega0;
  r.extras["delta"] = cfg.delta;
  return r;
}

// ------------------------------------------------------------------ simulate

struct SimulateConfig {
  LandscapeGrid grid;
  double hbar_omega0 = 1.0;
  std::int64_t mu = 10000;
  std::optional<std::uint64_t> seed;
  int bootstrap = 200;
  std::size_t workers = 0;

  void validate() const {
    grid.validate();
    detail::require(hbar_omega0 > 0.0, "hbar_omega0 must be > 0");
    detail::require(mu >= 1, "mu must be >= 1");
    detail::require(seed.has_value(), "simulate needs --seed");
    detail::require(bootstrap >= 100, "bootstrap must be >= 100");
  }
};

inline Report cmd_simulate(const SimulateConfig& cfg) {
  cfg.validate();
  const auto& g = cfg.grid;
  const std::uint64_t seed = *cfg.seed;
  struct Cell {
    ShotRecord rec;
    double p0_exact = 0;
    FisherMatrix fim;
    std::string fim_flag = "ok";
    ElementStats boot;
    std::string boot_flag = "ok";
  };
  std::vector<Cell> cells(g.n_beta * g.n_x);
  parallel_for(cells.size(), [&](std::size_t k) {
    const std::size_t i = k / g.n_x, j = k % g.n_x;
    Cell& c = cells[k];
    const double b = g.beta_at(i), x = g.x_at(j);
    c.rec = sample_shots(b, x, cfg.mu, seed, i, j, cfg.hbar_omega0);
    c.p0_exact = exact_probability(b, x, cfg.hbar_omega0).p0;
    const ModelParams p{b, cfg.hbar_omega0, x, 1};
    try {
      c.fim = empirical_fim(c.rec, p);
    } catch (const DegenerateError&) {
      c.fim_flag = "degenerate";
      c.fim = {std::nan(""), std::nan(""), std::nan("")};
    }
    try {
      c.boot = bootstrap_fim(c.rec, p, cfg.bootstrap, derive_key(seed, {i, j}));
    } catch (const DegenerateError&) {
      c.boot_flag = "degenerate";
      c.boot.std = {std::nan(""), std::nan(""), std::nan("")};
    }
  }, cfg.workers);

  Report r;
  r.kind = "simulate";
  r.columns = {"beta", "x", "n0", "n1", "mu", "p0_hat", "p0_exact", "f_bb", "f_xx", "f_bx",
               "fim_flag", "boot_std_bb", "boot_std_xx", "boot_std_bx", "boot_flag",
               "v_meas", "beta_hat", "fit_flag", "x_hat", "x_clamped"};
  for (std::size_t i = 0; i < g.n_beta; ++i) {
    // beta_hat is a property of the fitted fringe, shared by the whole row.
    std::vector<double> xs, ps;
    for (std::size_t j = 0; j < g.n_x; ++j) {
      xs.push_back(g.x_at(j));
      ps.push_back(empirical_probability(cells[i * g.n_x + j].rec));
    }
    double v = std::nan(""), bh = std::nan("");
    std::string fit_flag = "ok";
    try {
      const auto fit = fit_fringe(xs, ps, 1);
      v = fit.v_meas;
      if (fit.out_of_model) fit_flag = "out_of_model";
      bh = invert_visibility(v, cfg.hbar_omega0);
    } catch (const std::exception&) {
      if (fit_flag == "ok") fit_flag = "failed";
    }
    for (std::size_t j = 0; j < g.n_x; ++j) {
      const Cell& c = cells[i * g.n_x + j];
      double xh = std::nan("");
      std::int64_t clamped = 0;
      if (v > 0.0) {
        const auto e = estimate_x(ps[j], v, 1, xs[j] < 0.0 ? -1.0 : 1.0);
        xh = e.x_hat;
        clamped = flag(e.clamped);
      }
      r.add({c.rec.beta, c.rec.x, c.rec.n0, c.rec.n1, c.rec.mu, ps[j], c.p0_exact, c.fim.bb,
             c.fim.xx, c.fim.bx, c.fim_flag, c.boot.std.bb, c.boot.std.xx, c.boot.std.bx,
             c.boot_flag, v, bh, fit_flag, xh, clamped});
    }
  }
  r.extras["seed"] = seed;
  r.extras["mu"] = cfg.mu;
  r.extras["bootstrap"] = cfg.bootstrap;
  return r;
}

// ------------------------------------------------------------------ decohere

struct DecohereConfig {
  std::vector<std::string> probes{"noon", "cat", "squeezed"};
  int n = 4;
  double alpha = 2.0;
  double r = 1.1;
  int cutoff = -1;
  double leakage_bound = kDefaultLeakageBound;
  Interval eta_range{0.5, 1.0};
  Interval gamma_range{0.0, 0.1};
  std::size_t n_eta = 20;
  std::size_t n_gamma = 20;
  OperatingPoint op = figure_operating_point();
  SldOptions sld;
  std::size_t workers = 0;

  std::vector<HeatmapSpec> specs() const {
    detail::require(!probes.empty(), "at least one probe is required");
    std::vector<HeatmapSpec> out;
    for (const auto& name : probes) {
      HeatmapSpec s;
      const ProbeKind k = parse_probe_kind(name);
      s.probe = k == ProbeKind::noon ? ProbeSpec::noon(n)
              : k == ProbeKind::cat  ? ProbeSpec::cat(cplx(alpha, 0.0))
                                     : ProbeSpec::squeezed(r);
      s.probe.cutoff = cutoff;
      s.probe.leakage_bound = leakage_bound;
      s.eta_range = eta_range;
      s.gamma_range = gamma_range;
      s.n_eta = n_eta;
      s.n_gamma = n_gamma;
      s.op = op;
      s.sld = sld;
      s.validate();
      out.push_back(s);
    }
    return out;
  }

  void validate() const {
    detail::require(n >= 1, "n must be >= 1");
    detail::require(std::isfinite(alpha), "alpha must be finite");
    detail::require(r >= 0.0, "r must be >= 0");
    detail::require(leakage_bound > 0.0, "leakage bound must be > 0");
    detail::require(std::isfinite(op.beta) && std::isfinite(op.x), "operating point must be finite");
    detail::require(op.phase_scale > 0.0, "phase scale must be > 0");
    (void)specs();
  }
};

inline Report cmd_decohere(const DecohereConfig& cfg) {
  cfg.validate();
  Report r;
  r.kind = "decohere";
  r.columns = {"probe", "eta", "gamma", "is_reference", "f_bb", "f_xx", "f_bx", "f_eff",
               "incompatibility", "error"};
  auto emit = [&](const std::string& probe, const HeatmapCell& c, bool ref) {
    const double nan = std::nan("");
    r.add({probe, c.eta, c.gamma, flag(ref), c.ok ? c.q.bb : nan, c.ok ? c.q.xx : nan,
           c.ok ? c.q.bx : nan, c.ok ? c.f_eff : nan, c.ok ? c.incompatibility : nan, c.error});
  };
  for (const auto& spec : cfg.specs()) {
    const std::string name = to_string(spec.probe.kind);
    const FockDensity probe = make_probe(spec.probe);
    emit(name, heatmap_cell(probe, spec, 1.0, 0.0), true);
    const auto grid = decoherence_heatmap(spec, cfg.workers);
    for (std::size_t i = 0; i < grid.rows(); ++i)
      for (std::size_t j = 0; j < grid.cols(); ++j) emit(name, grid(i, j), false);
  }
  r.extras["beta"] = cfg.op.beta;
  r.extras["x"] = cfg.op.x;
  r.extras["phase_scale"] = cfg.op.phase_scale;
  return r;
}

// ------------------------------------------------------------ susceptibility

struct SusceptibilityConfig {
  std::vector<std::string> pairs{"noon:AD", "noon:PD", "squeezed:AD"};
  std::vector<double> sizes{2, 3, 4, 5, 6};
  std::vector<double> window = default_susceptibility_window();
  int retries = 2;
  std::vector<double> ncrit_eps{0.02, 0.05, 0.1};
  OperatingPoint op = pure_phase_operating_point();
  SldOptions sld;
  std::size_t workers = 0;

  std::vector<std::pair<ProbeKind, Channel>> parsed_pairs() const {
    std::vector<std::pair<ProbeKind, Channel>> out;
    for (const auto& p : pairs) {
      const auto colon = p.find(':');
      detail::require(colon != std::string::npos, "pair '" + p + "' must look like probe:channel");
      out.emplace_back(parse_probe_kind(p.substr(0, colon)), parse_channel(p.substr(colon + 1)));
    }
    return out;
  }

  void validate() const {
    detail::require(!pairs.empty(), "at least one probe:channel pair is required");
    (void)parsed_pairs();
    detail::require(sizes.size() >= 4, "sizes needs at least 4 entries");
    for (double s : sizes) detail::require(s > 0.0, "sizes must be > 0");
    detail::require(window.size() >= 3, "window needs at least 3 eps values");
    for (double e : window) detail::require(e > 0.0 && e <= 0.05, "window values must lie in (0, 0.05]");
    detail::require(retries >= 0, "retries must be >= 0");
    for (double e : ncrit_eps) detail::require(e > 0.0 && e < 0.5, "ncrit eps must lie in (0, 0.5)");
    sld.validate();
  }
};

inline Report cmd_susceptibility(const SusceptibilityConfig& cfg) {
  cfg.validate();
  Report r;
  r.kind = "susceptibility";
  r.columns = {"record", "probe", "channel", "size", "eps", "chi", "f0", "exponent", "fit_r2",
               "n_crit", "error"};
  r.extras["fits"] = nlohmann::ordered_json::array();
  const double nan = std::nan("");
  for (const auto& [kind, channel] : cfg.parsed_pairs()) {
    const std::string pn = to_string(kind), cn = to_string(channel);
    std::vector<SusceptibilityEstimate> est(cfg.sizes.size());
    std::vector<std::string> err(cfg.sizes.size());
    parallel_for(cfg.sizes.size(), [&](std::size_t i) {
      std::vector<double> w = cfg.window;
      for (int attempt = 0;; ++attempt) {
        try {
          est[i] = susceptibility(ProbeSpec::with_size(kind, cfg.sizes[i]), channel, w, cfg.op, cfg.sld);
          return;
        } catch (const NonlinearityError& e) {
          if (attempt >= cfg.retries) {
            err[i] = e.what();
            return;
          }
          for (double& v : w) v *= 0.1;
        } catch (const std::exception& e) {
          err[i] = e.what();
          return;
        }
      }
    }, cfg.workers);
    SusceptibilityFit fit;
    fit.probe = kind;
    fit.channel = channel;
    for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
      if (!err[i].empty()) continue;
      fit.n_values.push_back(cfg.sizes[i]);
      fit.chi_values.push_back(est[i].chi);
      fit.f0_values.push_back(est[i].f0);
      fit.windows.push_back(est[i].eps);
    }
    std::string fit_err;
    try {
      const auto f = fit_scaling_exponent(fit.n_values, fit.chi_values);
      fit.exponent = f.exponent;
      fit.prefactor = f.prefactor;
      fit.fit_r2 = f.fit_r2;
    } catch (const std::exception& e) {
      fit_err = e.what();
      fit.exponent = fit.fit_r2 = nan;
    }
    for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
      if (err[i].empty())
        r.add({std::string("chi"), pn, cn, cfg.sizes[i], est[i].eps.back(), est[i].chi, est[i].f0,
               fit.exponent, fit.fit_r2, std::int64_t{-1}, std::string()});
      else
        r.add({std::string("chi"), pn, cn, cfg.sizes[i], nan, nan, nan, fit.exponent, fit.fit_r2,
               std::int64_t{-1}, err[i]});
    }
    nlohmann::ordered_json ncrit = nlohmann::ordered_json::array();
    for (double e : cfg.ncrit_eps) {
      std::int64_t nc = -1;
      std::string ne = fit_err;
      if (ne.empty()) {
        try {
          nc = critical_photon_number(fit, e);
        } catch (const std::exception& ex) {
          ne = ex.what();
        }
      }
      r.add({std::string("ncrit"), pn, cn, nan, e, nan, nan, fit.exponent, fit.fit_r2, nc, ne});
      ncrit.push_back({{"eps", e}, {"n_crit", nc}, {"error", ne}});
    }
    nlohmann::ordered_json j;
    j["probe"] = pn;
    j["channel"] = cn;
    j["n_values"] = fit.n_values;
    j["chi_values"] = fit.chi_values;
    j["f0_values"] = fit.f0_values;
    j["windows"] = fit.windows;
    j["exponent"] = std::isfinite(fit.exponent) ? nlohmann::ordered_json(fit.exponent) : nullptr;
    j["fit_r2"] = std::isfinite(fit.fit_r2) ? nlohmann::ordered_json(fit.fit_r2) : nullptr;
    j["error"] = fit_err;
    j["n_crit"] = ncrit;
    r.extras["fits"].push_back(std::move(j));
  }
  return r;
}

// ---------------------------------------------------------------------- bias

struct BiasConfig {
  std::optional<double> kappa;
  Interval beta_range{-4.0, 4.0};
  std::size_t n_beta = 17;
  double hbar_omega0 = 1.0;

  void validate() const {
    detail::require(kappa.has_value(), "bias needs --kappa");
    detail::require(*kappa > 0.0 && *kappa < 1.0, "kappa must lie in (0,1)");
    detail::require(n_beta >= 2, "n_beta must be >= 2");
    detail::require(beta_range.hi > beta_range.lo, "beta range must be non-degenerate");
    detail::require(hbar_omega0 > 0.0, "hbar_omega0 must be > 0");
  }
};

inline Report cmd_bias(const BiasConfig& cfg) {
  cfg.validate();
  const auto rows = bias_sweep(linspace(cfg.beta_range, cfg.n_beta), *cfg.kappa, cfg.hbar_omega0);
  Report r;
  r.kind = "bias";
  r.columns = {"beta_true", "v_true", "v_meas", "beta_hat", "beta_corr", "in_domain", "contracted"};
  bool all_contracted = true;
  double worst_round_trip = 0.0;
  for (const auto& b : rows) {
    r.add({b.beta_true, b.v_true, b.v_meas, b.beta_hat, b.beta_corr, flag(b.in_domain), flag(b.contracted)});
    all_contracted = all_contracted && b.contracted;
    if (b.in_domain) worst_round_trip = std::max(worst_round_trip, std::abs(b.beta_corr - b.beta_true));
  }
  r.extras["kappa"] = *cfg.kappa;
  r.extras["all_contracted"] = all_contracted;
  r.extras["max_correction_error"] = worst_round_trip;
  return r;
}

// -------------------------------------------------------------------- render

enum class RenderKind { heatmap, contour };

struct RenderConfig {
  std::string input;
  RenderKind kind = RenderKind::heatmap;
  std::string column;  // empty: default for the input kind
  std::string probe;   // decohere inputs: which probe (default the first)
  int levels = 10;
};

inline io::ScalarField field_from_table(const io::CsvTable& t, const RenderConfig& cfg) {
  if (t.rows.empty()) throw SchemaError("render: input has no data rows");
  std::string xcol, ycol, vcol = cfg.column;
  std::vector<std::size_t> keep;
  if (t.kind == "landscape" || t.kind == "simulate") {
    xcol = "x";
    ycol = "beta";
    if (vcol.empty()) vcol = t.kind == "landscape" ? "trace" : "p0_hat";
    for (std::size_t i = 0; i < t.rows.size(); ++i) keep.push_back(i);
  } else if (t.kind == "decohere") {
    xcol = "gamma";
    ycol = "eta";
    if (vcol.empty()) vcol = "f_eff";
    const auto pc = t.column("probe"), rc = t.column("is_reference");
    const std::string probe = cfg.probe.empty() ? t.rows.front()[pc] : cfg.probe;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      if (t.rows[i][pc] == probe && t.rows[i][rc] == "0") keep.push_back(i);
    if (keep.empty()) throw SchemaError("render: no rows for probe '" + probe + "'");
  } else {
    throw SchemaError("render: cannot render csv kind '" + t.kind + "'");
  }
  const auto xc = t.column(xcol), yc = t.column(ycol), vc = t.column(vcol);
  std::vector<double> xs, ys;
  for (auto i : keep) xs.push_back(t.number(i, xc)), ys.push_back(t.number(i, yc));
  auto uniq = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  io::ScalarField f;
  f.xs = uniq(xs);
  f.ys = uniq(ys);
  if (f.xs.size() * f.ys.size() != keep.size())
    throw SchemaError("render: rows do not form a complete rectangular grid");
  f.values = Grid2D<double>(f.ys.size(), f.xs.size(), std::nan(""));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto c = static_cast<std::size_t>(std::lower_bound(f.xs.begin(), f.xs.end(), xs[k]) - f.xs.begin());
    const auto r = static_cast<std::size_t>(std::lower_bound(f.ys.begin(), f.ys.end(), ys[k]) - f.ys.begin());
    const std::string& s = t.rows[keep[k]][vc];
    f.values(r, c) = s == "nan" || s.empty() ? std::nan("") : t.number(keep[k], vc);
  }
  f.x_label = xcol;
  f.y_label = ycol;
  f.value_label = vcol;
  f.title = t.kind + ": " + vcol;
  return f;
}

inline std::string cmd_render(const RenderConfig& cfg) {
  detail::require(!cfg.input.empty(), "render needs an input file");
  detail::require(cfg.levels >= 1, "levels must be >= 1");
  const auto table = io::read_csv_file(cfg.input);
  const auto field = field_from_table(table, cfg);
  return cfg.kind == RenderKind::heatmap ? io::render_heatmap_svg(field)
                                         : io::render_contour_svg(field, cfg.levels);
}

}  // namespace mzqfi::cli
