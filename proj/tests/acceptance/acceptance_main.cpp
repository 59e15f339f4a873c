// Acceptance runner: one PASS/FAIL line per criterion. `--only N` runs a
// single criterion; the exit status is nonzero when any selected criterion
// fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mzqfi/mzqfi.hpp"
#include "../property_checks.hpp"

namespace {

using namespace mzqfi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Log-log least-squares slope.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_power_law(x, y).exponent;
}

Outcome circuit_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const double b = -4.0 + 8.0 * i / 49.0, x = -M_PI / 2 + M_PI * j / 49.0;
      const double v = visibility({b, 1.0, 0.0, 1});
      const double closed = (1.0 + v * std::cos(2.0 * x)) / (1.0 + v);
      worst = std::max(worst, std::abs(exact_probability(b, x).p0 - closed));
    }
  const double t = seconds_since(t0);
  return {worst < 1e-12 && t < 10.0, "max |P0 circuit - closed form| = " + fmt("%.3g", worst) +
                                         " over 50x50, " + fmt("%.2f s", t)};
}

Outcome saturation() {
  const auto t0 = std::chrono::steady_clock::now();
  const DensityFamily fam = [](double b, double x) { return readout_state(b, x); };
  double worst = 0.0, worst_inc = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double b = -4.0 + 8.0 * i / 9.0, x = -M_PI / 2 + M_PI * j / 9.0;
      const auto q = qfim_with_guard(fam, b, x);
      const auto f = fim_analytic({b, 1.0, x, 1});
      worst = std::max({worst, std::abs(q.q.bb - f.bb), std::abs(q.q.xx - f.xx), std::abs(q.q.bx - f.bx)});
      worst_inc = std::max(worst_inc, q.incompatibility);
    }
  const double t = seconds_since(t0);
  return {worst < 1e-6 && worst_inc < 1e-8 && t < 60.0,
          "max |Q - F| = " + fmt("%.3g", worst) + ", max incompatibility = " + fmt("%.3g", worst_inc) +
              ", " + fmt("%.2f s", t)};
}

Outcome qxx_ceiling() {
  bool ok = true;
  std::string d;
  for (int n : {1, 5, 10}) {
    const double r = fim_analytic({-50.0, 1.0, 1e-6, n}).xx / (n * n);
    ok = ok && std::abs(r - 4.0) < 1e-3;
    d += "N=" + std::to_string(n) + ": f_xx/N^2 = " + fmt("%.6f", r) + "  ";
  }
  return {ok, d};
}

Outcome reference_simulator_column() {
  // (beta, x) on the 20x20 grid and the listed ideal-simulator P0.
  struct Row {
    int i, j;
    double listed;
  };
  const Row rows[] = {{0, 0, 0.017},  {0, 9, 0.993},  {0, 19, 0.021},
                      {10, 0, 0.548}, {10, 9, 0.999}, {10, 19, 0.520},
                      {19, 0, 0.977}, {19, 9, 1.000}, {19, 19, 0.979}};
  LandscapeGrid g;
  const double mu = 1e4;
  double worst = 0.0;
  std::string d;
  for (const auto& r : rows) {
    const double b = g.beta_at(static_cast<std::size_t>(r.i)), x = g.x_at(static_cast<std::size_t>(r.j));
    const double p = output_probabilities({b, 1.0, x, 1}).p0;
    // A listed 1.000 with p -> 1 still admits one rounding unit.
    const double sigma = std::max(std::sqrt(p * (1 - p) / mu), 0.5e-3);
    const double z = std::abs(p - r.listed) / sigma;
    worst = std::max(worst, z);
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.3f,%.3f) %.5f vs %.3f: %.1f sigma; ", b, x, p, r.listed, z);
    d += buf;
  }
  return {worst <= 3.0, d + "worst " + fmt("%.2f sigma", worst)};
}

Outcome effective_visibility_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n)
    for (int a = 0; a < 5; ++a)
      for (int c = 0; c < 5; ++c) {
        NoiseParams np;
        np.eta = 0.5 + 0.5 * a / 4.0;
        np.gamma = 0.1 * c / 4.0;
        const double closed = effective_visibility(0.5, n, np);
        const double pipe = pipeline_visibility(0.5, n, np).visibility;
        worst = std::max(worst, std::abs(pipe - closed));
      }
  const double t = seconds_since(t0);
  return {worst < 1e-8 && t < 120.0,
          "max |V_pipeline - V_closed| = " + fmt("%.3g", worst) + " over N=1..6, 5x5 (eta, gamma), " + fmt("%.2f s", t)};
}

SusceptibilityFit scan(ProbeKind k, Channel c) {
  return susceptibility_scan(k, c, {2, 3, 4, 5, 6});
}

Outcome susceptibility_scalings() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ad = scan(ProbeKind::noon, Channel::amplitude_damping);
  const auto pd = scan(ProbeKind::noon, Channel::phase_damping);
  const auto sq = scan(ProbeKind::squeezed, Channel::amplitude_damping);
  const double t = seconds_since(t0);
  const bool ok = std::abs(ad.exponent - 3.0) <= 0.2 && std::abs(pd.exponent - 4.0) <= 0.2 &&
                  std::abs(sq.exponent - 1.0) <= 0.3 && t < 300.0;
  return {ok, "NOON/AD " + fmt("%.4f", ad.exponent) + " (3 +- 0.2), NOON/PD " + fmt("%.4f", pd.exponent) +
                  " (4 +- 0.2), Squeezed/AD " + fmt("%.4f", sq.exponent) + " (1 +- 0.3), " + fmt("%.1f s", t)};
}

Outcome critical_number_scaling() {
  const auto ad = scan(ProbeKind::noon, Channel::amplitude_damping);
  std::vector<double> eps{0.02, 0.05, 0.1}, nc;
  std::string d;
  for (double e : eps) {
    nc.push_back(critical_photon_number(ad, e));
    d += "N_crit(" + fmt("%g", e) + ") = " + fmt("%.0f", nc.back()) + "  ";
  }
  const double slope = loglog_slope(eps, nc);
  return {std::abs(slope + 1.0) <= 0.2, d + "slope " + fmt("%.4f", slope)};
}

Outcome hierarchy_ordering() {
  const double eps = 0.1;
  const double rn = robustness_index(ProbeSpec::noon(4), eps);
  const double rc = robustness_index(ProbeSpec::cat(cplx(2.0, 0.0)), eps);
  const double rs = robustness_index(ProbeSpec::squeezed(1.1), eps);
  const bool ok = rs > rc && rc > rn && rs >= 0.8 && rs <= 1.0 && rn < 0.1;
  return {ok, "R_Squeezed = " + fmt("%.4f", rs) + ", R_Cat = " + fmt("%.4f", rc) + ", R_NOON = " + fmt("%.4f", rn) +
                  " (need R_Sq > R_Cat > R_NOON, R_Sq in [0.8, 1], R_NOON < 0.1)"};
}

Outcome bias_model() {
  const auto rows = bias_sweep({-4, -2, -1, 1, 2, 4}, 0.5);
  bool ok = true;
  double worst = 0.0;
  for (const auto& r : rows) {
    ok = ok && r.contracted && r.in_domain;
    worst = std::max(worst, std::abs(r.beta_corr - r.beta_true));
  }
  const double b4 = rows.front().beta_hat;
  ok = ok && worst < 1e-9 && std::abs(b4 - (-1.3083)) <= 1e-3;
  return {ok, "all contracted: " + std::string(ok ? "yes" : "no") + ", max |beta_corr - beta_true| = " +
                  fmt("%.3g", worst) + ", beta_hat(-4) = " + fmt("%.5f", b4)};
}

Outcome statistical_consistency() {
  const double beta = 0.0, x = M_PI / 4;
  const ModelParams p{beta, 1.0, x, 1};
  const auto a = fim_analytic(p);
  std::vector<double> mus{1e3, 1e4, 1e5, 1e6}, err;
  std::string d;
  for (double mu : mus) {
    double s = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto e = empirical_fim(sample_shots(beta, x, static_cast<std::int64_t>(mu), seed), p);
      s += (std::abs(e.bb - a.bb) / a.bb + std::abs(e.xx - a.xx) / a.xx + std::abs(e.bx - a.bx) / std::abs(a.bx)) / 3.0;
    }
    err.push_back(s / 50.0);
    d += "mu=" + fmt("%.0e", mu) + ": " + fmt("%.3g", err.back()) + "  ";
  }
  const double slope = loglog_slope(mus, err);
  return {std::abs(slope + 0.5) <= 0.1, d + "slope " + fmt("%.4f", slope)};
}

Outcome property_suites() {
  const auto results = props::run_all(20240611);
  int failed = 0, min_cases = 1 << 30;
  std::string d;
  for (const auto& r : results) {
    min_cases = std::min(min_cases, r.cases);
    if (!r.ok()) {
      ++failed;
      d += r.name + " [" + r.first_failure + "] ";
    }
  }
  return {failed == 0 && min_cases >= 500,
          std::to_string(results.size()) + " properties, " + std::to_string(min_cases) + " cases each, " +
              std::to_string(failed) + " failing " + d};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "Run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"circuit-analytic equivalence", circuit_equivalence},
      {"F = Q saturation", saturation},
      {"Q_xx ceiling", qxx_ceiling},
      {"reference simulator column", reference_simulator_column},
      {"effective visibility oracle", effective_visibility_oracle},
      {"susceptibility scalings", susceptibility_scalings},
      {"N_crit scaling", critical_number_scaling},
      {"hierarchy ordering", hierarchy_ordering},
      {"bias model", bias_model},
      {"statistical consistency", statistical_consistency},
      {"property suites", property_suites},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<int>(k + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
