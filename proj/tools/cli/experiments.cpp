#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <type_traits>

#include "activemedia/analysis.hpp"
#include "activemedia/integrator.hpp"
#include "activemedia/ml_model.hpp"
#include "activemedia/parallel.hpp"
#include "activemedia/phase_model.hpp"
#include "activemedia/sweep.hpp"
#include "activemedia/weak_coupling.hpp"

namespace activemedia::cli {

using Json = nlohmann::json;

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::logic_error("Table::add: row width does not match header of " + name);
  rows.push_back(std::move(row));
}

namespace {

std::string num(double v) { return format_double(v); }
template <class I>
  requires std::is_integral_v<I>
std::string num(I v) {
  return std::to_string(v);
}
std::string flag(bool v) { return v ? "1" : "0"; }

/// JSON has no infinities or NaN; those become null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json pattern_json(const LockPattern& p) {
  return {{"label", p.label()},
          {"n", p.n},
          {"m", p.m},
          {"relation", to_string(p.relation)},
          {"phase_difference", p.phase_difference},
          {"ratio_locked", p.ratio_locked},
          {"firing_ratio", p.firing_ratio},
          {"excitable_rates", p.excitable_rates}};
}

std::vector<std::string> phase_names(const ChainSpec& spec) {
  std::vector<std::string> names{"x"};
  for (int j = 1; j <= spec.n_excitable; ++j) names.push_back("y" + std::to_string(j));
  if (spec.second_oscillator) names.emplace_back("z");
  return names;
}

std::vector<std::string> ml_names(const MLNetwork& net) {
  std::vector<std::string> cells{"x"};
  for (int j = 1; j <= net.n_excitable; ++j) cells.push_back("y" + std::to_string(j));
  cells.emplace_back("z");
  std::vector<std::string> names;
  for (const auto& c : cells) {
    names.push_back("v_" + c);
    names.push_back("w_" + c);
  }
  return names;
}

std::vector<std::string> cell_names(const ExperimentConfig& c) {
  if (c.model == Model::Phase) return phase_names(c.chain);
  std::vector<std::string> cells{"x"};
  for (int j = 1; j <= c.ml.n_excitable; ++j) cells.push_back("y" + std::to_string(j));
  cells.emplace_back("z");
  return cells;
}

ProbeSettings probe_settings(const ExperimentConfig& c) {
  ProbeSettings s;
  s.integrator = c.integrator;
  return s;
}

Table trajectory_table(const Trajectory& tr, const std::vector<std::string>& names) {
  Table t{"trajectory", "state samples after the transient; phases unwrapped (phase model) or V in mV and w (ML)", {"t"}, {}};
  t.columns.insert(t.columns.end(), names.begin(), names.end());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    std::vector<std::string> row{num(tr.times[i])};
    for (std::size_t k = 0; k < tr.dimension; ++k) row.push_back(num(tr.at(i, k)));
    t.add(std::move(row));
  }
  return t;
}

Table firings_table(const Trajectory& tr, const std::vector<std::string>& cells) {
  Table t{"firings", "firing times per cell during the recorded window", {"cell", "t"}, {}};
  for (std::size_t cell = 0; cell < tr.firings.size(); ++cell) {
    for (double time : tr.firings[cell]) t.add({cells.at(cell), num(time)});
  }
  return t;
}

Table section_table(const PoincareSection& sec, const std::vector<std::string>& names) {
  Table t{"poincare", "Poincare section crossings; phase coordinates wrapped to [0, 2pi)", {"t"}, {}};
  t.columns.insert(t.columns.end(), names.begin(), names.end());
  for (std::size_t i = 0; i < sec.points.size(); ++i) {
    std::vector<std::string> row{num(sec.times[i])};
    for (double v : sec.points[i]) row.push_back(num(v));
    t.add(std::move(row));
  }
  return t;
}

struct Run {
  Trajectory trajectory;
  std::vector<double> initial;
};

Run integrate_configured(const ExperimentConfig& c, const IntegratorConfig& cfg) {
  Run run;
  if (c.model == Model::Phase) {
    run.initial = rest_state(c.chain, c.x0, c.z0);
    run.trajectory = integrate(PhaseChain(c.chain), run.initial, cfg);
  } else {
    run.initial = ml_initials(c.ml, 1, c.seed).front();
    run.trajectory = integrate(MLSystem(c.ml), run.initial, cfg);
  }
  return run;
}

LockPattern classify_configured(const ExperimentConfig& c, const Trajectory& tr) {
  return c.model == Model::Phase ? classify_locking(tr, c.chain.layout()) : ml_classify(c.ml, tr);
}

void add_section_outputs(const ExperimentConfig& c, const Trajectory& tr, ExperimentResult& res) {
  const auto coord = static_cast<std::size_t>(c.poincare_coordinate);
  const PoincareSection sec = poincare_section(tr, coord, c.poincare_level, c.model == Model::Phase);
  const std::vector<std::string> names = c.model == Model::Phase ? phase_names(c.chain) : ml_names(c.ml);
  res.tables.push_back(section_table(sec, names));
  res.outputs["poincare"] = {{"coordinate", names.at(coord)},
                             {"level", c.poincare_level},
                             {"points", sec.points.size()},
                             {"distinct_points", distinct_points(sec.points, c.section_tol)},
                             {"cycle_period_at_most_8", has_cycle(sec.points, 8, c.section_tol)},
                             {"tolerance", c.section_tol}};
}

ExperimentResult simulate(const ExperimentConfig& c) {
  ExperimentResult res;
  IntegratorConfig cfg = c.integrator;
  cfg.record_states = cfg.record_states && (c.write_trajectory || c.poincare);
  const Run run = integrate_configured(c, cfg);
  const Trajectory& tr = run.trajectory;
  res.outputs["initial_state"] = run.initial;
  res.outputs["final_state"] = tr.final_state;
  std::vector<std::size_t> counts;
  for (const auto& f : tr.firings) counts.push_back(f.size());
  res.outputs["firing_counts"] = counts;
  try {
    res.outputs["pattern"] = pattern_json(classify_configured(c, tr));
  } catch (const std::invalid_argument& e) {
    res.outputs["pattern"] = nullptr;
    res.outputs["pattern_note"] = e.what();
  }
  const std::vector<std::string> names = c.model == Model::Phase ? phase_names(c.chain) : ml_names(c.ml);
  if (c.write_trajectory && cfg.record_states) res.tables.push_back(trajectory_table(tr, names));
  res.tables.push_back(firings_table(tr, cell_names(c)));
  if (c.poincare && cfg.record_states) add_section_outputs(c, tr, res);
  return res;
}

ExperimentResult classify(const ExperimentConfig& c) {
  ExperimentResult res;
  const bool ml = c.model == Model::MorrisLecar;
  IntegratorConfig cfg = c.integrator;
  cfg.record_states = c.poincare || ml;
  const Run run = integrate_configured(c, cfg);
  const Trajectory& tr = run.trajectory;
  const LockPattern pattern = classify_configured(c, tr);
  res.outputs["pattern"] = pattern_json(pattern);
  std::vector<std::size_t> counts;
  for (const auto& f : tr.firings) counts.push_back(f.size());
  res.outputs["firing_counts"] = counts;
  if (ml) {
    const std::size_t vz = 2 * (c.ml.cell_count() - 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) worst = std::max(worst, std::abs(tr.at(i, 0) - tr.at(i, vz)));
    res.outputs["max_abs_vx_minus_vz"] = worst;
  }
  if (c.poincare) add_section_outputs(c, tr, res);
  if (c.lyapunov) {
    LyapunovOptions opt;
    opt.t_transient = c.integrator.t_transient;
    opt.t_window = c.integrator.t_record;
    opt.integrator = c.integrator;
    const LyapunovEstimate est = lyapunov_exponent(PhaseChain(c.chain), run.initial, opt);
    res.outputs["lyapunov"] = {{"lambda", est.lambda}, {"std_error", est.std_error}, {"quarter_means", est.quarter_means}};
  }
  return res;
}

ExperimentResult rotation(const ExperimentConfig& c) {
  ExperimentResult res;
  const std::vector<double> coe = c.c_oe_values.empty() ? std::vector<double>{c.chain.c_oe} : c.c_oe_values;
  const std::vector<double> ceo = c.c_eo_values.empty() ? std::vector<double>{c.chain.c_eo} : c.c_eo_values;
  RotationOptions opt;
  opt.t_transient = c.integrator.t_transient;
  opt.horizon = c.integrator.t_transient + c.integrator.t_record;
  opt.dt = c.integrator.dt;
  std::vector<RotationEstimate> est(coe.size() * ceo.size());
  parallel_for(est.size(), [&](std::size_t k) {
    ChainSpec spec = c.chain;
    spec.c_oe = coe[k / ceo.size()];
    spec.c_eo = ceo[k % ceo.size()];
    est[k] = rotation_number(spec, opt, rest_state(spec, c.x0, c.z0));
  });
  Table t{"rotation", "rotation number of the reference E cell per oscillator cycle",
          {"c_oe", "c_eo", "rho", "half_width", "converged", "fixed_point"}, {}};
  for (std::size_t k = 0; k < est.size(); ++k) {
    t.add({num(coe[k / ceo.size()]), num(ceo[k % ceo.size()]), num(est[k].rho), num(est[k].half_width),
           flag(est[k].converged), flag(est[k].fixed_point)});
  }
  if (est.size() == 1) {
    res.outputs["rho"] = est[0].rho;
    res.outputs["half_width"] = est[0].half_width;
    res.outputs["converged"] = est[0].converged;
    res.outputs["fixed_point"] = est[0].fixed_point;
  }
  res.outputs["points"] = est.size();
  res.tables.push_back(std::move(t));
  return res;
}

ExperimentResult boundary(const ExperimentConfig& c) {
  ExperimentResult res;
  BoundaryOptions opt;
  opt.c_oe_grid = c.c_oe_values;
  opt.c_eo_lo = c.c_eo_lo;
  opt.c_eo_hi = c.c_eo_hi;
  opt.tol = c.tol;
  opt.warm_start = c.warm_start == "cold" ? WarmStart::Cold : WarmStart::Branch;
  opt.probe = probe_settings(c);
  const ChainSpec base = c.chain;
  const SpecFamily family = [base](double c_oe, double c_eo) {
    ChainSpec s = base;
    s.c_oe = c_oe;
    s.c_eo = c_eo;
    return s;
  };
  const double x0 = c.x0;
  const double z0 = c.z0;
  const BoundaryCurve curve = trace_boundary(
      family, make_predicate(c.predicate), opt, [x0, z0](const ChainSpec& s) { return rest_state(s, x0, z0); },
      c.predicate);
  Table t{"boundary", "c_eo where the predicate flips, bisected per c_oe; labels are the patterns on either side",
          {"c_oe", "c_eo", "below_label", "above_label"}, {}};
  for (const auto& p : curve.points) t.add({num(p.c_oe), num(p.c_eo), p.below_label, p.above_label});
  res.outputs["predicate"] = c.predicate;
  res.outputs["points"] = curve.points.size();
  res.outputs["omitted_c_oe"] = curve.omitted;
  res.tables.push_back(std::move(t));
  return res;
}

ExperimentResult heterogeneity(const ExperimentConfig& c) {
  ExperimentResult res;
  HeterogeneityOptions opt;
  opt.d_lo = c.d_lo;
  opt.d_hi = c.d_hi;
  opt.tol = c.tol;
  opt.probe = probe_settings(c);
  opt.seed = c.seed;
  const HomotopyLine line{c.line_start, c.line_end, c.samples};
  const auto points = max_heterogeneity(c.chain, line, pattern_from_label(c.target), opt);
  Table t{"heterogeneity", "largest detuning d keeping the target pattern, along the homotopy line",
          {"p", "c_oe", "c_eo", "d_max", "present"}, {}};
  for (const auto& p : points) t.add({num(p.p), num(p.c_oe), num(p.c_eo), num(p.d_max), flag(p.present)});
  res.outputs["target"] = c.target;
  res.outputs["absent_at_d_lo"] = std::count_if(points.begin(), points.end(), [](const auto& p) { return !p.present; });
  res.tables.push_back(std::move(t));
  return res;
}

Json attractors_json(const AttractorSet& set) {
  Json list = Json::array();
  for (const auto& a : set.attractors) {
    list.push_back({{"label", a.pattern.label()},
                    {"count", a.count},
                    {"basin_fraction", a.basin_fraction},
                    {"phase_difference", a.pattern.phase_difference},
                    {"excitable_rates", a.pattern.excitable_rates}});
  }
  return list;
}

ExperimentResult bistability(const ExperimentConfig& c) {
  ExperimentResult res;
  const ProbeSettings settings = probe_settings(c);
  if (c.c_oe_values.empty()) {
    const AttractorSet set = bistability_scan(c.chain, c.n_ic, c.seed, settings);
    Table t{"attractors", "distinct locked patterns and their share of the sampled initial conditions",
            {"label", "count", "basin_fraction", "phase_difference"}, {}};
    for (const auto& a : set.attractors) {
      t.add({a.pattern.label(), num(a.count), num(a.basin_fraction), num(a.pattern.phase_difference)});
    }
    res.outputs["region_label"] = set.region_label();
    res.outputs["n_ic"] = set.n_ic;
    res.outputs["unclassified"] = set.unclassified;
    res.outputs["attractors"] = attractors_json(set);
    res.tables.push_back(std::move(t));
    return res;
  }
  const auto& coe = c.c_oe_values;
  const auto& ceo = c.c_eo_values;
  std::vector<AttractorSet> sets(coe.size() * ceo.size());
  parallel_for(sets.size(), [&](std::size_t k) {
    ChainSpec spec = c.chain;
    spec.c_oe = coe[k % coe.size()];
    spec.c_eo = ceo[k / coe.size()];
    sets[k] = bistability_scan(spec, c.n_ic, c.seed, settings);
  });
  Table t{"region", "attractor labels per grid point ('|' separates coexisting patterns)",
          {"c_oe", "c_eo", "label", "n_attractors", "unclassified"}, {}};
  std::set<std::string> labels;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const std::string label = sets[k].region_label();
    labels.insert(label);
    t.add({num(coe[k % coe.size()]), num(ceo[k / coe.size()]), label, num(sets[k].attractors.size()),
           num(sets[k].unclassified)});
  }
  res.outputs["grid"] = {coe.size(), ceo.size()};
  res.outputs["region_labels"] = labels;
  res.tables.push_back(std::move(t));
  return res;
}

ExperimentResult pitchfork(const ExperimentConfig& c) {
  ExperimentResult res;
  PitchforkOptions opt;
  opt.dt = c.integrator.dt;
  const auto rows = pitchfork_diagram(c.chain, c.c_eo_values, opt);
  Table t{"pitchfork", "subthreshold periodic orbits per c_eo: offset x - z, period and stability",
          {"c_eo", "branch", "found", "phase_difference", "stable", "period", "max_multiplier"}, {}};
  for (const auto& b : rows) {
    if (!b.found) {
      t.add({num(b.c_eo), to_string(b.kind), flag(false), "", "", "", ""});
      continue;
    }
    t.add({num(b.c_eo), to_string(b.kind), flag(true), num(b.phase_difference), flag(b.stable), num(b.period),
           num(b.max_multiplier)});
  }
  res.outputs["rows"] = rows.size();
  res.tables.push_back(std::move(t));
  return res;
}

ExperimentResult weak_coupling(const ExperimentConfig& c) {
  ExperimentResult res;
  const std::vector<double> coe = c.c_oe_values.empty() ? std::vector<double>{c.chain.c_oe} : c.c_oe_values;
  std::vector<GFunctionTable> tables(coe.size());
  parallel_for(coe.size(), [&](std::size_t k) {
    ReductionInputs in;
    in.c_oe = coe[k];
    in.c_ee = c.chain.c_ee;
    in.b = c.chain.b;
    in.second_harmonic = c.chain.second_harmonic;
    tables[k] = reduce(in);
  });
  Table g{"g_function", "interaction function H and G(phi) = H(-phi) - H(phi) over one period",
          {"c_oe", "phi", "h", "g"}, {}};
  Table zeros{"zeros", "zeros of G with stability (stable when G' < 0)", {"c_oe", "phi", "stable"}, {}};
  Table summary{"summary", "period and slopes of G at synchrony and anti-phase",
                {"c_oe", "period", "g_prime_zero", "g_prime_half", "synchrony_stable", "antiphase_stable"}, {}};
  for (std::size_t k = 0; k < coe.size(); ++k) {
    const GFunctionTable& tab = tables[k];
    const std::size_t n = tab.g.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 512);
    for (std::size_t i = 0; i < n; i += stride) {
      g.add({num(coe[k]), num(tab.period * static_cast<double>(i) / static_cast<double>(n)), num(tab.h[i]), num(tab.g[i])});
    }
    for (const auto& z : tab.zeros) zeros.add({num(coe[k]), num(z.phi), flag(z.stable)});
    summary.add({num(coe[k]), num(tab.period), num(tab.g_prime_zero), num(tab.g_prime_half),
                 flag(tab.g_prime_zero < 0.0), flag(tab.g_prime_half < 0.0)});
  }
  res.tables.push_back(std::move(summary));
  res.tables.push_back(std::move(g));
  res.tables.push_back(std::move(zeros));

  if (c.critical) {
    try {
      res.outputs["c_oe_critical"] = critical_coe(c.chain.b, c.chain.c_ee, {}, c.chain.second_harmonic);
    } catch (const std::domain_error& e) {
      res.outputs["c_oe_critical"] = nullptr;
      res.outputs["c_oe_critical_note"] = e.what();
    }
  }
  if (!c.b_values.empty() || !c.c_ee_values.empty()) {
    struct Job {
      std::string parameter;
      double b;
      double c_ee;
      double c_star = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Job> jobs;
    for (double b : c.b_values) jobs.push_back({"b", b, c.chain.c_ee});
    for (double cee : c.c_ee_values) jobs.push_back({"c_ee", c.chain.b, cee});
    parallel_for(jobs.size(), [&](std::size_t k) {
      try {
        jobs[k].c_star = critical_coe(jobs[k].b, jobs[k].c_ee, {}, c.chain.second_harmonic);
      } catch (const std::domain_error&) {
      }
    });
    Table t{"critical", "c_oe where G'(0) changes sign, as b or c_ee varies; found = 0 when no sign change in [0.3, 0.9]",
            {"parameter", "b", "c_ee", "c_oe_critical", "found"}, {}};
    for (const auto& j : jobs) {
      const bool found = std::isfinite(j.c_star);
      t.add({j.parameter, num(j.b), num(j.c_ee), found ? num(j.c_star) : "", flag(found)});
    }
    res.tables.push_back(std::move(t));
  }
  return res;
}

ExperimentResult ml_scan(const ExperimentConfig& c) {
  ExperimentResult res;
  const auto points = ml_region_scan(c.ml, c.g_oe_values, c.g_eo_values, c.n_ic, c.seed, probe_settings(c));
  Table region{"region", "attractor labels per (g_oe, g_eo) point ('|' separates coexisting patterns)",
               {"g_oe", "g_eo", "label", "n_attractors", "unclassified"}, {}};
  Table attractors{"attractors", "each attractor found per point with its basin share",
                   {"g_oe", "g_eo", "label", "count", "basin_fraction", "phase_difference"}, {}};
  Json list = Json::array();
  for (const auto& p : points) {
    region.add({num(p.g_oe), num(p.g_eo), p.attractors.region_label(), num(p.attractors.attractors.size()),
                num(p.attractors.unclassified)});
    for (const auto& a : p.attractors.attractors) {
      attractors.add({num(p.g_oe), num(p.g_eo), a.pattern.label(), num(a.count), num(a.basin_fraction),
                      num(a.pattern.phase_difference)});
    }
    list.push_back({{"g_oe", p.g_oe}, {"g_eo", p.g_eo}, {"region_label", p.attractors.region_label()},
                    {"attractors", attractors_json(p.attractors)}});
  }
  res.outputs["points"] = list;
  res.tables.push_back(std::move(region));
  res.tables.push_back(std::move(attractors));
  return res;
}

ExperimentResult long_chain(const ExperimentConfig& c) {
  ExperimentResult res;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < c.n_seeds; ++i) seeds.push_back(c.seed + static_cast<std::uint64_t>(i));
  const auto runs = long_chain_runs(c.chain, seeds, probe_settings(c));
  Table t{"runs", "one run per seed: random oscillator phases, E cells at rest",
          {"seed", "x0", "z0", "label", "phase_difference", "firing_ratio"}, {}};
  std::vector<double> offsets;
  Json labels = Json::array();
  for (const auto& r : runs) {
    const std::string label = r.classified ? r.pattern.label() : "unclassified";
    t.add({num(r.seed), num(r.x0), num(r.z0), label, num(r.pattern.phase_difference), num(r.pattern.firing_ratio)});
    labels.push_back(label);
    if (r.classified && r.pattern.ratio_locked) offsets.push_back(r.pattern.phase_difference);
  }
  res.outputs["labels"] = labels;
  res.outputs["offsets"] = offsets;
  res.outputs["min_pairwise_offset"] = finite_or_null(min_pairwise_offset(offsets));
  res.outputs["max_pairwise_offset"] = max_pairwise_offset(offsets);
  res.tables.push_back(std::move(t));
  return res;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("output.dir: cannot write " + path.string());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  switch (config.kind) {
    case ExperimentKind::Simulate: return simulate(config);
    case ExperimentKind::Rotation: return rotation(config);
    case ExperimentKind::Classify: return classify(config);
    case ExperimentKind::Boundary: return boundary(config);
    case ExperimentKind::Heterogeneity: return heterogeneity(config);
    case ExperimentKind::Bistability: return bistability(config);
    case ExperimentKind::Pitchfork: return pitchfork(config);
    case ExperimentKind::WeakCoupling: return weak_coupling(config);
    case ExperimentKind::MLScan: return ml_scan(config);
    case ExperimentKind::LongChain: return long_chain(config);
  }
  throw std::logic_error("run_experiment: unhandled kind");
}

std::string csv_text(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += '\n';
  }
  return out;
}

nlohmann::json result_record(const ExperimentConfig& config, const ExperimentResult& result) {
  Json files = Json::array();
  for (const auto& t : result.tables) {
    files.push_back({{"path", config.file_stem() + "_" + t.name + ".csv"},
                     {"description", t.description},
                     {"columns", t.columns},
                     {"rows", t.rows.size()}});
  }
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"config", to_json(config)},
          {"outputs", result.outputs},
          {"files", files}};
}

std::filesystem::path write_result(const ExperimentConfig& config, const ExperimentResult& result) {
  const std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("output.dir: cannot create " + dir.string());
  }
  for (const auto& t : result.tables) write_text(dir / (config.file_stem() + "_" + t.name + ".csv"), csv_text(t));
  write_text(dir / (config.file_stem() + ".ini"), to_ini(config));
  const std::filesystem::path record = dir / (config.file_stem() + ".json");
  write_text(record, result_record(config, result).dump(2) + "\n");
  return record;
}

}  // namespace activemedia::cli
