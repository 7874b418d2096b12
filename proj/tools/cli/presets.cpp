#include "presets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace activemedia::cli {

namespace {

// Desk-scale resolutions; publication figures used finer grids.
constexpr int kPhaseGrid = 40;
constexpr int kMLGrid = 20;
constexpr int kHomotopySamples = 25;

int scaled(int base, double scale) { return std::max(2, static_cast<int>(std::lround(base * scale))); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

/// Centres of n equal cells covering [lo, hi].
std::vector<double> centres(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * (i + 0.5) / n;
  return v;
}

ExperimentConfig base(const std::string& name, ExperimentKind kind, ChainSpec chain) {
  ExperimentConfig c;
  c.name = name;
  c.kind = kind;
  c.chain = chain;
  return c;
}

ChainSpec oe_pair() { return ChainSpec::oe_pair(0.5, 0.1); }
ChainSpec oeo() { return ChainSpec::chain(1, 0.5, 0.1, 0.0); }
ChainSpec oeeo(double c_oe = 0.5, double c_eo = 0.1) { return ChainSpec::chain(2, c_oe, c_eo, 0.5); }

void add_boundaries(std::vector<ExperimentConfig>& out, const std::string& fig, const ChainSpec& chain, double scale) {
  const std::vector<double> grid = linspace(0.1, 0.99, scaled(kPhaseGrid, scale));
  const std::pair<const char*, const char*> curves[] = {
      {"fires", "fires"},
      {"one_to_one", "one-to-one"},
      {"one_to_two_lower", "ratio>=0.5"},
      {"one_to_two_upper", "ratio>0.5"},
  };
  for (const auto& [suffix, predicate] : curves) {
    ExperimentConfig c = base(fig + "_" + suffix, ExperimentKind::Boundary, chain);
    c.c_oe_values = grid;
    c.c_eo_lo = 0.0;
    c.c_eo_hi = 1.0;
    c.predicate = predicate;
    out.push_back(c);
  }
}

void add_homotopy(std::vector<ExperimentConfig>& out, const std::string& name, const ChainSpec& chain,
                  std::pair<double, double> start, std::pair<double, double> end, const std::string& target,
                  double scale) {
  ExperimentConfig c = base(name, ExperimentKind::Heterogeneity, chain);
  c.line_start = start;
  c.line_end = end;
  c.samples = scaled(kHomotopySamples, scale);
  c.target = target;
  c.d_lo = 0.0;
  c.d_hi = 0.5;
  out.push_back(c);
}

std::vector<ExperimentConfig> fig1(double scale) {
  std::vector<ExperimentConfig> out;
  add_boundaries(out, "fig1", oe_pair(), scale);
  ExperimentConfig rot = base("fig1_rotation", ExperimentKind::Rotation, oe_pair());
  rot.c_oe_values = {0.1, 0.3, 0.5, 0.7};
  rot.c_eo_values = linspace(0.0, 0.6, scaled(kPhaseGrid, scale) + 1);
  rot.integrator.t_record = 4500.0;
  out.push_back(rot);
  ExperimentConfig sn = base("fig1_saddle_node", ExperimentKind::Boundary, oe_pair());
  sn.c_oe_values = linspace(1.1, 2.0, std::max(10, scaled(10, scale)));
  sn.c_eo_lo = 0.0;
  sn.c_eo_hi = 0.4;
  sn.predicate = "fixed-point";
  out.push_back(sn);
  return out;
}

std::vector<ExperimentConfig> fig2(double scale) {
  std::vector<ExperimentConfig> out;
  add_boundaries(out, "fig2", oeo(), scale);
  ExperimentConfig sync = base("fig2_synchrony", ExperimentKind::Bistability, oeo());
  const int n = scaled(kPhaseGrid, scale);
  sync.c_oe_values = centres(0.05, 0.95, n);
  sync.c_eo_values = centres(0.05, 0.95, n);
  sync.n_ic = 4;
  out.push_back(sync);
  return out;
}

std::vector<ExperimentConfig> fig3(double scale) {
  std::vector<ExperimentConfig> out;
  add_homotopy(out, "fig3_zero_to_one", oeo(), {0.1, 0.15}, {0.95, 0.05}, "0:1-s", scale);
  add_homotopy(out, "fig3_one_to_two", oeo(), {0.1, 0.22}, {0.95, 0.06}, "1:2-s", scale);
  add_homotopy(out, "fig3_one_to_one", oeo(), {0.1, 0.3}, {0.95, 0.075}, "1:1-s", scale);
  return out;
}

std::vector<ExperimentConfig> fig4(double scale) {
  ExperimentConfig c = base("fig4_regions", ExperimentKind::Bistability, oeeo());
  const int n = scaled(kPhaseGrid, scale);
  c.c_oe_values = centres(0.0, 1.0, n);
  c.c_eo_values = centres(0.0, 1.0, n);
  c.n_ic = 8;
  return {c};
}

std::vector<ExperimentConfig> fig5(double scale) {
  std::vector<ExperimentConfig> out;
  const std::pair<const char*, double> panels[] = {{"a", 0.10}, {"b", 0.13}, {"c", 0.15}};
  for (const auto& [panel, c_eo] : panels) {
    ExperimentConfig c = base(std::string("fig5_") + panel, ExperimentKind::Classify, oeeo(0.78, c_eo));
    // An asymmetric start; symmetric data stay on the synchronous subspace.
    c.z0 = 1.0;
    c.integrator.t_transient = 3000.0;
    c.integrator.t_record = 3000.0;
    out.push_back(c);
  }
  ExperimentConfig pf = base("fig5_pitchfork", ExperimentKind::Pitchfork, oeeo(0.78, 0.1));
  pf.c_eo_values = linspace(0.09, 0.16, scaled(15, scale));
  out.push_back(pf);
  return out;
}

std::vector<ExperimentConfig> fig6(double) {
  ExperimentConfig c = base("fig6_chaos", ExperimentKind::Classify, oeeo(0.11, 0.49));
  // Off the synchrony manifold, which is invariant and only quasi-periodic here.
  c.z0 = 1.0;
  c.poincare = true;
  c.poincare_coordinate = 0;
  c.poincare_level = 1.0;
  c.lyapunov = true;
  c.integrator.t_transient = 500.0;
  c.integrator.t_record = 20000.0;
  c.integrator.sample_interval = 0.01;
  return {c};
}

std::vector<ExperimentConfig> fig7(double scale) {
  std::vector<ExperimentConfig> out;
  const ChainSpec chain = oeeo();
  add_homotopy(out, "fig7_one_to_one", chain, {0.1, 0.6}, {0.95, 0.2}, "1:1-s", scale);
  add_homotopy(out, "fig7_antiphase", chain, {0.1, 0.35}, {0.7, 0.15}, "0:1-a", scale);
  add_homotopy(out, "fig7_one_to_two", chain, {0.1, 0.44}, {0.8, 0.174}, "1:2-s", scale);
  add_homotopy(out, "fig7_one_to_three", chain, {0.2, 0.36}, {0.71, 0.19}, "1:3-s", scale);
  // Bistable regions: each line is run once per coexisting pattern.
  add_homotopy(out, "fig7_beta_first_one_to_two", chain, {0.15, 0.422}, {0.406, 0.308}, "1:2-s", scale);
  add_homotopy(out, "fig7_beta_first_antiphase", chain, {0.15, 0.422}, {0.406, 0.308}, "0:1-a", scale);
  add_homotopy(out, "fig7_beta_second_one_to_two", chain, {0.406, 0.308}, {0.82, 0.167}, "1:2-s", scale);
  add_homotopy(out, "fig7_beta_second_antiphase", chain, {0.406, 0.308}, {0.82, 0.167}, "0:1-a", scale);
  add_homotopy(out, "fig7_alpha_one_to_one", chain, {0.836, 0.17}, {0.981, 0.109}, "1:1-s", scale);
  add_homotopy(out, "fig7_alpha_antiphase", chain, {0.836, 0.17}, {0.981, 0.109}, "0:1-a", scale);
  return out;
}

std::vector<ExperimentConfig> fig8w(double scale) {
  ExperimentConfig c = base("fig8w_reduction", ExperimentKind::WeakCoupling, oeeo());
  c.c_oe_values = {0.3, 0.5, 0.7, 0.9};
  c.critical = true;
  c.b_values = linspace(1.02, 1.3, scaled(15, scale));
  c.c_ee_values = linspace(0.05, 1.0, scaled(20, scale));
  return {c};
}

std::vector<ExperimentConfig> fig9(double) {
  ExperimentConfig c = base("fig9_bistability", ExperimentKind::Bistability, ChainSpec::chain(3, 0.75, 0.25, 0.18));
  c.n_ic = 32;
  return {c};
}

std::vector<ExperimentConfig> fig10(double) {
  std::vector<ExperimentConfig> out;
  const std::pair<const char*, std::pair<double, double>> panels[] = {
      {"a", {1.0, 1.0}}, {"b", {1.1, 0.9}}, {"c", {1.5, 0.5}}};
  for (const auto& [panel, freqs] : panels) {
    ChainSpec chain = ChainSpec::chain(100, 0.7, 2.0, 3.0);
    chain.end_frequencies = freqs;
    ExperimentConfig c = base(std::string("fig10_") + panel, ExperimentKind::LongChain, chain);
    c.n_seeds = 4;
    c.integrator.t_transient = 1000.0;
    c.integrator.t_record = 1000.0;
    out.push_back(c);
  }
  return out;
}

std::vector<ExperimentConfig> fig11_points(double) {
  std::vector<ExperimentConfig> out;
  const std::pair<const char*, std::pair<double, double>> panels[] = {
      {"b", {0.4, 0.05}}, {"c", {0.5, 0.057}}, {"d", {0.63, 0.05}}, {"e", {0.1, 0.065}}};
  for (const auto& [panel, g] : panels) {
    ExperimentConfig scan;
    scan.name = std::string("fig11_") + panel;
    scan.kind = ExperimentKind::MLScan;
    scan.model = Model::MorrisLecar;
    scan.ml.g_ee = 0.1;
    scan.ml.g_oe = g.first;
    scan.ml.g_eo = g.second;
    scan.g_oe_values = {g.first};
    scan.g_eo_values = {g.second};
    scan.n_ic = 8;
    scan.integrator = IntegratorConfig::ml_defaults();
    out.push_back(scan);

    ExperimentConfig trace = scan;
    trace.name = std::string("fig11_") + panel + "_trace";
    trace.kind = ExperimentKind::Simulate;
    trace.g_oe_values.clear();
    trace.g_eo_values.clear();
    trace.n_ic = 1;
    trace.integrator.t_record = 300.0;
    trace.integrator.sample_interval = 0.1;
    out.push_back(trace);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"fig1", "fig2", "fig3", "fig4",  "fig5",  "fig6",
                                            "fig7", "fig8w", "fig9", "fig10", "fig11-points"};
  return ids;
}

std::vector<ExperimentConfig> preset(const std::string& id, const PresetOptions& options) {
  if (!(options.scale > 0.0) || !std::isfinite(options.scale)) {
    throw std::invalid_argument("reproduce: scale must be positive");
  }
  const double s = options.scale;
  std::vector<ExperimentConfig> out;
  if (id == "fig1") out = fig1(s);
  else if (id == "fig2") out = fig2(s);
  else if (id == "fig3") out = fig3(s);
  else if (id == "fig4") out = fig4(s);
  else if (id == "fig5") out = fig5(s);
  else if (id == "fig6") out = fig6(s);
  else if (id == "fig7") out = fig7(s);
  else if (id == "fig8w") out = fig8w(s);
  else if (id == "fig9") out = fig9(s);
  else if (id == "fig10") out = fig10(s);
  else if (id == "fig11-points") out = fig11_points(s);
  else throw std::invalid_argument("reproduce: unknown figure id '" + id + "'");
  for (auto& c : out) {
    c.out_dir = options.out_dir;
    if (options.seed) c.seed = *options.seed;
  }
  return out;
}

}  // namespace activemedia::cli
