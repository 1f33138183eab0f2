#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rif/checks.hpp"
#include "rif/critical.hpp"
#include "rif/functional.hpp"
#include "rif/io.hpp"
#include "rif/report.hpp"

namespace {

using nlohmann::ordered_json;

rif::CellSet parse_cell_set(const std::string& text) {
  rif::CellSet out;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stoll(token));
  }
  std::sort(out.begin(), out.end());
  return out;
}

rif::Vector parse_reals(const std::string& text) {
  std::vector<rif::Scalar> vals;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) vals.push_back(std::stod(token));
  return Eigen::Map<const rif::Vector>(vals.data(), static_cast<rif::Index>(vals.size()));
}

void emit(const ordered_json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open '" + out_path + "'");
  out << doc.dump(2) << "\n";
}

void load_config_file(const std::string& path, rif::RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  nlohmann::json doc;
  in >> doc;
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("format"))
    config.format = doc["format"] == "csv" ? rif::RunConfig::Format::Csv
                                           : rif::RunConfig::Format::Json;
  if (doc.contains("tolerances"))
    for (const auto& [key, value] : doc["tolerances"].items())
      config.tolerance_overrides[key] = value.get<rif::Scalar>();
}

ordered_json location_json(const rif::Vector& z) {
  ordered_json arr = ordered_json::array();
  for (rif::Index i = 0; i < z.size(); ++i) arr.push_back(z[i]);
  return arr;
}

ordered_json critical_points_json(const std::vector<rif::CriticalPoint>& points) {
  ordered_json arr = ordered_json::array();
  for (const auto& cp : points) {
    ordered_json item;
    item["location"] = location_json(cp.location);
    item["det"] = cp.det_q;
    item["t"] = cp.t_q;
    item["phi_t"] = rif::cutoff_phi(cp.det_q) * cp.t_q;
    arr.push_back(std::move(item));
  }
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rearrangement-invariant functionals toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  rif::RunConfig config;
  std::string config_path, out_path, format = "json";
  bool timings = false;
  app.add_option("--seed", config.seed, "seed for all randomized suites");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--timings", timings, "include runtime_ms in reports");

  // rearrange -------------------------------------------------------------
  auto* rearrange = app.add_subcommand("rearrange", "rearrangement operations");
  std::string r_file, r_op, r_a, r_b, r_set_s, r_set_t;
  rif::Scalar r_epsilon = 0.5, r_tol = 1e-9;
  rif::Index r_max_cells = 4096;
  rearrange->add_option("--file", r_file, "function-spec file")->required();
  rearrange
      ->add_option("--op", r_op, "operation")
      ->required()
      ->check(CLI::IsMember({"sup_pairing", "invariance", "chebyshev", "abs_sup",
                             "product_abs", "conv1_avg", "conv1_two_block",
                             "pairing_lower", "katok"}));
  rearrange->add_option("--a", r_a, "first function name")->required();
  rearrange->add_option("--b", r_b, "second function name");
  rearrange->add_option("--set-s", r_set_s, "cell set S, comma separated");
  rearrange->add_option("--set-t", r_set_t, "cell set T, comma separated");
  rearrange->add_option("--epsilon", r_epsilon, "transport quantization scale");
  rearrange->add_option("--tol", r_tol, "inequality tolerance");
  rearrange->add_option("--max-cells", r_max_cells, "equal-mass refinement limit");

  // functional --------------------------------------------------------------
  auto* functional = app.add_subcommand("functional", "support-family functionals");
  functional->require_subcommand(1);
  std::string fn_file, fn_xi, fn_mode = "rearranged";
  rif::Scalar fn_level = 1, fn_radius = 1, fn_tol = 1e-9;
  int fn_trials = 1000;
  rif::Index fn_max_cells = 4096;
  for (const char* name : {"eval", "bound", "minkowski", "rinorm", "axioms", "lipschitz"}) {
    auto* sub = functional->add_subcommand(name);
    sub->add_option("--file", fn_file, "family-spec file")->required();
    if (std::string(name) != "axioms" && std::string(name) != "lipschitz")
      sub->add_option("--xi", fn_xi, "function name")->required();
    if (std::string(name) == "eval")
      sub->add_option("--mode", fn_mode, "fixed or rearranged")
          ->check(CLI::IsMember({"fixed", "rearranged"}));
    if (std::string(name) == "minkowski")
      sub->add_option("--level", fn_level, "sublevel c")->required();
    if (std::string(name) == "axioms" || std::string(name) == "lipschitz")
      sub->add_option("--trials", fn_trials, "trial count");
    if (std::string(name) == "lipschitz")
      sub->add_option("--radius", fn_radius, "sup-norm radius");
    sub->add_option("--tol", fn_tol, "tolerance");
    sub->add_option("--max-cells", fn_max_cells, "equal-mass refinement limit");
  }

  // flow ---------------------------------------------------------------------
  auto* flow_cmd = app.add_subcommand("flow", "Hamiltonian flows on a chart");
  std::string flow_h, flow_method = "exact_linear", flow_pullback, flow_out_field;
  rif::Scalar flow_duration = 1;
  int flow_steps = 100, flow_samples = 100;
  bool flow_volume = false;
  flow_cmd->add_option("--hamiltonian", flow_h, "grid field file or quad:q1,q2,...")
      ->required();
  flow_cmd->add_option("--duration", flow_duration, "flow time");
  flow_cmd->add_option("--steps", flow_steps, "integrator steps");
  flow_cmd->add_option("--method", flow_method, "exact_linear or leapfrog")
      ->check(CLI::IsMember({"exact_linear", "leapfrog"}));
  flow_cmd->add_flag("--check-volume", flow_volume, "report the Jacobian deviation");
  flow_cmd->add_option("--volume-samples", flow_samples, "sample count for the check");
  flow_cmd->add_option("--pullback", flow_pullback, "grid field to pull back");
  flow_cmd->add_option("--out-field", flow_out_field, "path for the pulled-back field");

  // hessian -------------------------------------------------------------------
  auto* hessian = app.add_subcommand("hessian", "critical-point invariants");
  std::string h_field, h_map;
  rif::Scalar h_threshold = 0.5;
  hessian->add_option("--field", h_field, "grid field file")->required();
  hessian->add_option("--threshold", h_threshold, "determinant cutoff");
  hessian->add_option("--map", h_map, "scaling exponents c1,c2,... (sum zero)");

  // suite -----------------------------------------------------------------------
  auto* suite = app.add_subcommand("suite", "named verification suites");
  std::string suite_checks;
  bool suite_all = false;
  suite->add_option("--checks", suite_checks, "comma-separated check ids");
  suite->add_flag("--all", suite_all, "run every registered check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) load_config_file(config_path, config);
    if (const char* env_seed = std::getenv("RL_SEED")) config.seed = std::stoull(env_seed);
    config.output_path = out_path;
    config.format =
        format == "csv" ? rif::RunConfig::Format::Csv : rif::RunConfig::Format::Json;
    config.include_timings = timings;

    if (rearrange->parsed()) {
      const rif::FunctionFile file = rif::parse_function_file(r_file);
      ordered_json doc;
      doc["op"] = r_op;
      doc["inputs"] = ordered_json{{"file", r_file}, {"a", r_a}, {"b", r_b}};
      doc["tolerance"] = r_tol;

      auto equalized = [&](const std::string& first, const std::string& second) {
        return rif::split_to_equal_mass({file.get(first), file.get(second)}, r_max_cells);
      };

      if (r_op == "sup_pairing") {
        const auto fs = equalized(r_a, r_b);
        const rif::PairingResult res = rif::sup_pairing(fs[0], fs[1]);
        doc["value"] = res.value;
        doc["witness"] = res.witness;
      } else if (r_op == "invariance") {
        const auto fs = equalized(r_a, r_b);
        rif::CounterRng rng(config.seed, 1);
        doc["holds"] = rif::pairing_value_invariance(fs[0], fs[1], &rng);
      } else if (r_op == "chebyshev") {
        const auto fs = equalized(r_a, r_b);
        const auto [lhs, rhs] = rif::chebyshev_lower(rif::OrderedPair(fs[0], fs[1]));
        doc["value"] = lhs;
        doc["bound"] = rhs;
        doc["holds"] = lhs >= rhs - r_tol;
      } else if (r_op == "abs_sup" || r_op == "product_abs") {
        const auto fs = equalized(r_a, r_b);
        const rif::InequalityReport rep = r_op == "abs_sup"
                                              ? rif::abs_sup_bound_check(fs[0], fs[1], r_tol)
                                              : rif::product_abs_bound_check(fs[0], fs[1], r_tol);
        doc["value"] = rep.lhs;
        doc["bound"] = rep.rhs;
        doc["holds"] = rep.holds;
      } else if (r_op == "conv1_avg") {
        const rif::DiscreteFunction out =
            rif::conv1_average_on(file.get(r_a), parse_cell_set(r_set_s));
        doc["value"] = std::vector<rif::Scalar>(out.values().data(),
                                                out.values().data() + out.cells());
      } else if (r_op == "conv1_two_block") {
        const rif::DiscreteFunction out = rif::conv1_two_block(
            file.get(r_a), parse_cell_set(r_set_s), parse_cell_set(r_set_t));
        doc["value"] = std::vector<rif::Scalar>(out.values().data(),
                                                out.values().data() + out.cells());
      } else if (r_op == "pairing_lower") {
        const auto fs = equalized(r_a, r_b);
        const rif::PairingBound pb = rif::pairing_lower_bound(
            fs[0], fs[1], parse_cell_set(r_set_s), parse_cell_set(r_set_t));
        doc["value"] = pb.sup;
        doc["bound"] = pb.bound;
        doc["holds"] = pb.sup >= pb.bound - r_tol;
      } else if (r_op == "katok") {
        const auto fs = equalized(r_a, r_b);
        const rif::TransportPlan plan = rif::katok_transport(fs[0], fs[1], r_epsilon);
        const rif::Scalar err = rif::transport_error(fs[0], fs[1], plan);
        doc["value"] = err;
        doc["bound"] = 3 * r_epsilon;
        doc["holds"] = err < 3 * r_epsilon;
        doc["witness"] = plan.permutation;
        doc["intervals"] = plan.intervals.size();
      }
      emit(doc, out_path);
      return 0;
    }

    if (functional->parsed()) {
      const rif::FunctionFile file = rif::parse_function_file(fn_file);
      rif::SupportFamily family = file.build_family();
      const std::string sub = functional->get_subcommands().front()->get_name();
      ordered_json doc;
      doc["op"] = "functional_" + sub;
      doc["inputs"] = ordered_json{{"file", fn_file}, {"xi", fn_xi}};
      doc["tolerance"] = fn_tol;

      // refine everything onto one equal-mass space
      std::vector<rif::DiscreteFunction> fs;
      for (const auto& p : family.pairs()) fs.push_back(p.density);
      const bool with_xi = !fn_xi.empty();
      if (with_xi) fs.push_back(file.get(fn_xi));
      fs = rif::split_to_equal_mass(fs, fn_max_cells);
      std::vector<rif::SupportPair> pairs;
      for (std::size_t k = 0; k < family.pairs().size(); ++k)
        pairs.push_back({family.pairs()[k].offset, fs[k]});
      family = rif::SupportFamily(std::move(pairs));

      if (sub == "eval") {
        doc["value"] = rif::evaluate(family, fs.back(),
                                     fn_mode == "fixed"
                                         ? rif::EvalMode::Fixed
                                         : rif::EvalMode::OverRearrangements);
      } else if (sub == "bound") {
        const rif::L1BoundReport rep = rif::l1_lower_bound(family, fs.back(), fn_tol);
        doc["value"] = rep.q_value;
        doc["bound"] = rep.bound;
        doc["holds"] = rep.holds;
        doc["branch"] = rep.branch == rif::L1Branch::ZeroMean
                            ? "zero_mean"
                            : (rep.branch == rif::L1Branch::NonnegativeMean
                                   ? "nonnegative_mean"
                                   : "nonpositive_mean");
        doc["a0"] = rep.a0;
        doc["b"] = rep.b;
      } else if (sub == "minkowski") {
        doc["value"] = rif::minkowski_functional(family, fn_level, fs.back());
        doc["level"] = fn_level;
      } else if (sub == "rinorm") {
        doc["value"] = rif::ri_norm(family, fs.back());
      } else if (sub == "axioms") {
        const rif::AxiomReport rep =
            rif::ri_norm_axiom_report(family, fn_trials, config.seed, fn_tol);
        doc["holds"] = rep.holds();
        doc["trials"] = rep.trials;
        doc["b_embedding"] = rep.b_embedding;
        doc["equivalence_factor"] = rep.equivalence_factor;
        doc["max_violation"] = rep.max_violation;
      } else if (sub == "lipschitz") {
        const rif::LipschitzReport rep =
            rif::lipschitz_report(family, fn_radius, fn_trials, config.seed, fn_tol);
        doc["value"] = rep.max_ratio;
        doc["bound"] = rep.bound;
        doc["holds"] = rep.holds;
      }
      emit(doc, out_path);
      return 0;
    }

    if (flow_cmd->parsed()) {
      rif::FlowSpec spec;
      spec.duration = flow_duration;
      spec.steps = flow_steps;
      spec.method = flow_method == "leapfrog" ? rif::FlowSpec::Method::Leapfrog
                                              : rif::FlowSpec::Method::ExactLinear;
      rif::DarbouxBox sample_box;
      bool have_box = false;
      if (flow_h.rfind("quad:", 0) == 0) {
        const rif::Vector q = parse_reals(flow_h.substr(5));
        spec.hamiltonian = rif::QuadraticForm::diagonal_type(q);
        sample_box.n = static_cast<int>(q.size());
        sample_box.lo = rif::Vector::Constant(2 * q.size(), -3.0);
        sample_box.hi = rif::Vector::Constant(2 * q.size(), 3.0);
        sample_box.res = rif::IndexVector::Constant(2 * q.size(), 8);
        have_box = true;
      } else {
        rif::GridField h = rif::read_grid_field(flow_h);
        sample_box = h.box();
        have_box = true;
        spec.hamiltonian = std::move(h);
      }
      const rif::Diffeomorphism g = rif::flow(spec);

      ordered_json doc;
      doc["op"] = "flow";
      doc["method"] = flow_method;
      doc["duration"] = flow_duration;
      doc["steps"] = flow_steps;
      if (g.is_linear()) {
        ordered_json rows = ordered_json::array();
        for (rif::Index i = 0; i < g.matrix().rows(); ++i) {
          ordered_json row = ordered_json::array();
          for (rif::Index j = 0; j < g.matrix().cols(); ++j) row.push_back(g.matrix()(i, j));
          rows.push_back(std::move(row));
        }
        doc["matrix"] = std::move(rows);
      }
      if (flow_volume && have_box) {
        const rif::VolumeReport rep = rif::volume_check(g, sample_box, flow_samples, config.seed);
        doc["max_jacobian_deviation"] = rep.max_jacobian_deviation;
        doc["volume_samples"] = rep.samples;
      }
      if (!flow_pullback.empty()) {
        const rif::GridField xi = rif::read_grid_field(flow_pullback);
        const rif::GridField out_field = rif::pullback(g, xi);
        if (flow_out_field.empty()) throw std::runtime_error("--out-field required with --pullback");
        rif::write_grid_field(flow_out_field, out_field);
        doc["pullback_written"] = flow_out_field;
      }
      emit(doc, out_path);
      return 0;
    }

    if (hessian->parsed()) {
      const rif::GridField field = rif::read_grid_field(h_field);
      ordered_json doc;
      doc["op"] = "hessian";
      doc["threshold"] = h_threshold;
      const auto points = rif::find_critical_points(field, h_threshold);
      doc["critical_points"] = critical_points_json(points);
      doc["p"] = rif::p_functional(field, h_threshold);
      if (!h_map.empty()) {
        const rif::Vector c = parse_reals(h_map);
        const rif::GridField moved = rif::pullback(rif::counterexample_map(c), field);
        ordered_json after;
        const auto moved_points = rif::find_critical_points(moved, h_threshold);
        after["critical_points"] = critical_points_json(moved_points);
        const rif::Scalar p_moved = rif::p_functional(moved, h_threshold);
        after["p"] = p_moved;
        doc["mapped"] = std::move(after);
        doc["difference"] = p_moved - doc["p"].get<rif::Scalar>();
      }
      emit(doc, out_path);
      return 0;
    }

    if (suite->parsed()) {
      std::vector<std::string> names;
      if (suite_all) {
        names = rif::all_check_ids();
      } else {
        std::istringstream in(suite_checks);
        std::string token;
        while (std::getline(in, token, ','))
          if (!token.empty()) names.push_back(token);
      }
      const std::vector<rif::CheckReport> reports = rif::run_suite(names, config);
      rif::write_reports(reports, config);
      for (const auto& rep : reports)
        if (!rep.holds) return 1;
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
