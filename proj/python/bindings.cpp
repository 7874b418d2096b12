#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "activemedia/analysis.hpp"
#include "activemedia/integrator.hpp"
#include "activemedia/ml_model.hpp"
#include "activemedia/phase_model.hpp"
#include "activemedia/sweep.hpp"
#include "activemedia/weak_coupling.hpp"
#include "cli/config.hpp"
#include "cli/experiments.hpp"

namespace py = pybind11;
using namespace activemedia;

namespace {

using Release = py::call_guard<py::gil_scoped_release>;

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> states_of(const Trajectory& tr) {
  py::array_t<double> out({tr.size(), tr.dimension});
  std::copy(tr.samples.begin(), tr.samples.end(), out.mutable_data());
  return out;
}

ProbeSettings settings_from(const IntegratorConfig& cfg) {
  ProbeSettings s;
  s.integrator = cfg;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Phase oscillators coupled through chains of excitable cells";

  py::class_<ChainSpec>(m, "ChainSpec")
      .def(py::init<>())
      .def_static("chain", &ChainSpec::chain, py::arg("n_excitable"), py::arg("c_oe"), py::arg("c_eo"), py::arg("c_ee"),
                  py::arg("omega") = 1.0, py::arg("d") = 0.0, py::arg("b") = 1.1)
      .def_static("oe_pair", &ChainSpec::oe_pair, py::arg("c_oe"), py::arg("c_eo"), py::arg("omega") = 1.0,
                  py::arg("b") = 1.1)
      .def_readwrite("omega", &ChainSpec::omega)
      .def_readwrite("d", &ChainSpec::d)
      .def_readwrite("n_excitable", &ChainSpec::n_excitable)
      .def_readwrite("b", &ChainSpec::b)
      .def_readwrite("c_oe", &ChainSpec::c_oe)
      .def_readwrite("c_eo", &ChainSpec::c_eo)
      .def_readwrite("c_ee", &ChainSpec::c_ee)
      .def_readwrite("end_frequencies", &ChainSpec::end_frequencies)
      .def_readwrite("second_oscillator", &ChainSpec::second_oscillator)
      .def_readwrite("second_harmonic", &ChainSpec::second_harmonic)
      .def_property_readonly("dimension", &ChainSpec::dimension)
      .def("validate", &ChainSpec::validate)
      .def("__repr__", [](const ChainSpec& s) {
        std::ostringstream os;
        os << "ChainSpec(n_excitable=" << s.n_excitable << ", c_oe=" << s.c_oe << ", c_eo=" << s.c_eo
           << ", c_ee=" << s.c_ee << ", b=" << s.b << ", d=" << s.d << ")";
        return os.str();
      });

  m.def("rest_state", &rest_state, py::arg("spec"), py::arg("x0") = 0.0, py::arg("z0") = 0.0);
  m.def("vector_field", [](const ChainSpec& spec, const std::vector<double>& state) {
    return as_array(chain_vector_field(spec, state));
  });

  py::class_<IntegratorConfig> cfg(m, "IntegratorConfig");
  py::enum_<IntegratorConfig::Method>(cfg, "Method")
      .value("RK4", IntegratorConfig::Method::Rk4)
      .value("DP45", IntegratorConfig::Method::DormandPrince45);
  cfg.def(py::init<>())
      .def_static("ml_defaults", &IntegratorConfig::ml_defaults)
      .def_readwrite("method", &IntegratorConfig::method)
      .def_readwrite("dt", &IntegratorConfig::dt)
      .def_readwrite("abs_tol", &IntegratorConfig::abs_tol)
      .def_readwrite("rel_tol", &IntegratorConfig::rel_tol)
      .def_readwrite("t_transient", &IntegratorConfig::t_transient)
      .def_readwrite("t_record", &IntegratorConfig::t_record)
      .def_readwrite("sample_interval", &IntegratorConfig::sample_interval)
      .def_readwrite("record_states", &IntegratorConfig::record_states);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("times", [](const Trajectory& t) { return as_array(t.times); })
      .def_property_readonly("states", &states_of)
      .def_readonly("firings", &Trajectory::firings)
      .def_readonly("final_state", &Trajectory::final_state)
      .def_readonly("dimension", &Trajectory::dimension);

  py::enum_<Relation>(m, "Relation")
      .value("Single", Relation::Single)
      .value("Synchronous", Relation::Synchronous)
      .value("AntiPhase", Relation::AntiPhase)
      .value("Mixed", Relation::Mixed)
      .value("Unlocked", Relation::Unlocked)
      .value("FixedPoint", Relation::FixedPoint);

  py::class_<LockPattern>(m, "LockPattern")
      .def_readonly("n", &LockPattern::n)
      .def_readonly("m", &LockPattern::m)
      .def_readonly("relation", &LockPattern::relation)
      .def_readonly("phase_difference", &LockPattern::phase_difference)
      .def_readonly("ratio_locked", &LockPattern::ratio_locked)
      .def_readonly("firing_ratio", &LockPattern::firing_ratio)
      .def_readonly("excitable_rates", &LockPattern::excitable_rates)
      .def_property_readonly("label", &LockPattern::label)
      .def("__repr__", [](const LockPattern& p) { return "LockPattern('" + p.label() + "')"; });

  m.def(
      "integrate",
      [](const ChainSpec& spec, std::vector<double> state, const IntegratorConfig& config) {
        return integrate(PhaseChain(spec), std::move(state), config);
      },
      py::arg("spec"), py::arg("state"), py::arg("config") = IntegratorConfig{}, Release());
  m.def(
      "classify",
      [](const ChainSpec& spec, const Trajectory& tr) { return classify_locking(tr, spec.layout()); },
      py::arg("spec"), py::arg("trajectory"));
  m.def(
      "rotation_number",
      [](const ChainSpec& spec, double t_transient, double horizon) {
        RotationOptions o;
        o.t_transient = t_transient;
        o.horizon = horizon;
        const RotationEstimate e = rotation_number(spec, o);
        return py::dict(py::arg("rho") = e.rho, py::arg("half_width") = e.half_width,
                        py::arg("converged") = e.converged, py::arg("fixed_point") = e.fixed_point);
      },
      py::arg("spec"), py::arg("t_transient") = 500.0, py::arg("horizon") = 5000.0);
  m.def(
      "lyapunov_exponent",
      [](const ChainSpec& spec, std::vector<double> state, double t_transient, double t_window) {
        LyapunovOptions o;
        o.t_transient = t_transient;
        o.t_window = t_window;
        LyapunovEstimate e;
        {
          py::gil_scoped_release release;
          e = lyapunov_exponent(PhaseChain(spec), std::move(state), o);
        }
        return py::dict(py::arg("lambda_") = e.lambda, py::arg("std_error") = e.std_error);
      },
      py::arg("spec"), py::arg("state"), py::arg("t_transient") = 500.0, py::arg("t_window") = 2000.0);
  m.def(
      "poincare_section",
      [](const Trajectory& tr, std::size_t coordinate, double level) {
        const PoincareSection s = poincare_section(tr, coordinate, level, true);
        return py::make_tuple(as_array(s.times), s.points);
      },
      py::arg("trajectory"), py::arg("coordinate"), py::arg("level"));
  m.def("distinct_points", &distinct_points, py::arg("points"), py::arg("tol"));
  m.def("has_cycle", &has_cycle, py::arg("points"), py::arg("max_period"), py::arg("tol"));

  m.def(
      "trace_boundary",
      [](const ChainSpec& base, const std::vector<double>& c_oe_grid, const std::string& predicate, double c_eo_lo,
         double c_eo_hi, double tol) {
        BoundaryOptions o;
        o.c_oe_grid = c_oe_grid;
        o.c_eo_lo = c_eo_lo;
        o.c_eo_hi = c_eo_hi;
        o.tol = tol;
        const ProbePredicate pred = cli::make_predicate(predicate);
        py::gil_scoped_release release;
        const BoundaryCurve c = trace_boundary(
            [&](double a, double b) {
              ChainSpec s = base;
              s.c_oe = a;
              s.c_eo = b;
              return s;
            },
            pred, o);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : c.points) pts.emplace_back(p.c_oe, p.c_eo);
        return pts;
      },
      py::arg("base"), py::arg("c_oe_grid"), py::arg("predicate"), py::arg("c_eo_lo") = 0.0, py::arg("c_eo_hi") = 1.0,
      py::arg("tol") = 1e-3);

  m.def(
      "bistability_scan",
      [](const ChainSpec& spec, int n_ic, std::uint64_t seed, const IntegratorConfig& config) {
        AttractorSet set;
        {
          py::gil_scoped_release release;
          set = bistability_scan(spec, n_ic, seed, settings_from(config));
        }
        py::list out;
        for (const auto& a : set.attractors) {
          out.append(py::dict(py::arg("pattern") = a.pattern, py::arg("count") = a.count,
                              py::arg("basin_fraction") = a.basin_fraction));
        }
        return out;
      },
      py::arg("spec"), py::arg("n_ic") = 32, py::arg("seed") = 1, py::arg("config") = IntegratorConfig{});

  m.def(
      "max_heterogeneity",
      [](const ChainSpec& base, std::pair<double, double> start, std::pair<double, double> end, int samples,
         const std::string& target, std::uint64_t seed) {
        HeterogeneityOptions o;
        o.seed = seed;
        const LockPattern pattern = pattern_from_label(target);
        py::gil_scoped_release release;
        const auto pts = max_heterogeneity(base, HomotopyLine{start, end, samples}, pattern, o);
        std::vector<std::tuple<double, double, double, double, bool>> out;
        for (const auto& p : pts) out.emplace_back(p.p, p.c_oe, p.c_eo, p.d_max, p.present);
        return out;
      },
      py::arg("base"), py::arg("start"), py::arg("end"), py::arg("samples"), py::arg("target"), py::arg("seed") = 1);

  m.def(
      "pitchfork_diagram",
      [](const ChainSpec& base, const std::vector<double>& c_eo_values) {
        std::vector<PitchforkBranch> rows;
        {
          py::gil_scoped_release release;
          rows = pitchfork_diagram(base, c_eo_values);
        }
        py::list out;
        for (const auto& r : rows) {
          out.append(py::dict(py::arg("c_eo") = r.c_eo, py::arg("branch") = to_string(r.kind),
                              py::arg("found") = r.found, py::arg("phase_difference") = r.phase_difference,
                              py::arg("stable") = r.stable, py::arg("period") = r.period));
        }
        return out;
      },
      py::arg("base"), py::arg("c_eo_values"));

  m.def(
      "long_chain_runs",
      [](const ChainSpec& spec, const std::vector<std::uint64_t>& seeds, const IntegratorConfig& config) {
        std::vector<LongChainRun> runs;
        {
          py::gil_scoped_release release;
          runs = long_chain_runs(spec, seeds, settings_from(config));
        }
        py::list out;
        for (const auto& r : runs) {
          out.append(py::dict(py::arg("seed") = r.seed, py::arg("classified") = r.classified,
                              py::arg("pattern") = r.pattern));
        }
        return out;
      },
      py::arg("spec"), py::arg("seeds"), py::arg("config") = IntegratorConfig{});

  py::class_<GFunctionTable>(m, "GFunctionTable")
      .def_readonly("period", &GFunctionTable::period)
      .def_property_readonly("s", [](const GFunctionTable& t) { return as_array(t.s); })
      .def_property_readonly("h", [](const GFunctionTable& t) { return as_array(t.h); })
      .def_property_readonly("g", [](const GFunctionTable& t) { return as_array(t.g); })
      .def_readonly("g_prime_zero", &GFunctionTable::g_prime_zero)
      .def_readonly("g_prime_half", &GFunctionTable::g_prime_half)
      .def_property_readonly("zeros", [](const GFunctionTable& t) {
        std::vector<std::pair<double, bool>> z;
        for (const auto& e : t.zeros) z.emplace_back(e.phi, e.stable);
        return z;
      });
  m.def(
      "reduce",
      [](double c_oe, double c_ee, double b, double second_harmonic) {
        ReductionInputs in;
        in.c_oe = c_oe;
        in.c_ee = c_ee;
        in.b = b;
        in.second_harmonic = second_harmonic;
        return reduce(in);
      },
      py::arg("c_oe"), py::arg("c_ee") = 0.5, py::arg("b") = 1.1, py::arg("second_harmonic") = 0.0, Release());
  m.def(
      "critical_coe", [](double b, double c_ee) { return critical_coe(b, c_ee); }, py::arg("b") = 1.1,
      py::arg("c_ee") = 0.5, Release());

  py::class_<MLNetwork>(m, "MLNetwork")
      .def(py::init<>())
      .def_readwrite("n_excitable", &MLNetwork::n_excitable)
      .def_readwrite("I_oscillator", &MLNetwork::I_oscillator)
      .def_readwrite("I_excitable", &MLNetwork::I_excitable)
      .def_readwrite("g_oe", &MLNetwork::g_oe)
      .def_readwrite("g_eo", &MLNetwork::g_eo)
      .def_readwrite("g_ee", &MLNetwork::g_ee);
  m.def("ml_initials", &ml_initials, py::arg("net"), py::arg("n_ic"), py::arg("seed"));
  m.def(
      "ml_integrate",
      [](const MLNetwork& net, std::vector<double> state, const IntegratorConfig& config) {
        return integrate(MLSystem(net), std::move(state), config);
      },
      py::arg("net"), py::arg("state"), py::arg("config") = IntegratorConfig::ml_defaults(), Release());
  m.def(
      "ml_classify", [](const MLNetwork& net, const Trajectory& tr) { return ml_classify(net, tr); }, py::arg("net"),
      py::arg("trajectory"));

  m.def(
      "run_config",
      [](const std::string& ini_text) {
        std::istringstream in(ini_text);
        const cli::ExperimentConfig c = cli::parse_config(in);
        cli::ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = cli::run_experiment(c);
        }
        return cli::result_record(c, r).dump();
      },
      py::arg("ini_text"), "Runs an INI experiment config and returns its JSON record as text.");

  py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);
}
