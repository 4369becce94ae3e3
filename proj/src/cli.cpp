#include "groupsample/cli.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "groupsample/antialias.hpp"
#include "groupsample/io.hpp"
#include "groupsample/rng.hpp"

namespace groupsample::cli {

namespace {

struct Options {
  std::string kind;
  int n = 0;
  int rate = 0;  // 0 = not given
  std::string members_csv;
  double lambda = 5.0;
  std::uint64_t seed = 0;
  int trials = 128;
  std::string out;
  std::string dot;
  bool svg = false;
  bool canonical = false;
};

std::vector<Element> parse_members(const std::string& csv) {
  std::vector<Element> members;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) members.push_back(std::stoi(cell));
  }
  if (members.empty()) throw std::invalid_argument("--members: empty member list");
  return members;
}

FiniteGroup make_group(const Options& o) {
  if (o.kind == "cyclic") return make_cyclic(o.n);
  if (o.kind == "dihedral") return make_dihedral(o.n);
  throw std::invalid_argument("--kind must be cyclic or dihedral");
}

/// Everything needed to run one downsampling experiment.
struct Pipeline {
  FiniteGroup group;
  GeneratorSpec gens;
  SubgroupEmbedding sub;
  FourierBasis basis_parent;
  FourierBasis basis_sub;
  SamplingMatrix sampling;
  SmoothnessWeights weights;
  int rate = 1;
  std::optional<SamplingPlan> plan;
};

Pipeline build_pipeline(const FiniteGroup& group, std::optional<int> rate, const std::vector<Element>& members) {
  Pipeline p;
  p.group = group;
  p.gens = default_generators(group);
  if (!members.empty()) {
    p.sub = induced_subgroup(group, members);
    if (group.order % static_cast<int>(p.sub.members.size()) != 0) {
      throw std::invalid_argument("member list size does not divide the group order");
    }
    p.rate = group.order / static_cast<int>(p.sub.members.size());
  } else {
    p.plan = general_subsample(group, p.gens, rate.value_or(1));
    p.sub = p.plan->result;
    p.rate = rate.value_or(1);
  }
  p.basis_parent = real_fourier_basis(p.group);
  p.basis_sub = real_fourier_basis(p.sub.induced);
  p.sampling = sampling_matrix(p.group, p.sub);
  p.weights = smoothness_weights(p.basis_parent, cayley_laplacian(p.group, p.gens));
  return p;
}

bool is_canonical_subgroup(const Pipeline& p) {
  if (p.group.kind != GroupKind::cyclic || p.group.order % 2 != 0) return false;
  if (static_cast<int>(p.sub.members.size()) != p.group.order / 2) return false;
  for (std::size_t j = 0; j < p.sub.members.size(); ++j) {
    if (p.sub.members[j] != static_cast<Element>(2 * j)) return false;
  }
  return true;
}

nlohmann::json diagnostics_json(const Pipeline& p, const BandlimitSolution& sol, bool canonical) {
  const auto& d = sol.diagnostics;
  nlohmann::json j;
  j["group"] = p.group.label;
  j["subgroup"] = p.sub.induced.label;
  j["rate"] = p.rate;
  j["lambda"] = d.lambda;
  j["seed"] = d.seed;
  j["iterations"] = d.iterations;
  j["constraint_residual"] = d.constraint_residual;
  j["equivariance_objective"] = d.equivariance_objective;
  j["smooth_objective"] = d.smooth_objective;
  j["equivariance_error_of_projector"] = d.equivariance_error;
  j["converged"] = d.converged;
  j["gradient_norm"] = d.gradient_norm;
  j["max_iterate_constraint_residual"] = d.max_iterate_constraint_residual;
  j["canonical"] = canonical;
  return j;
}

int cmd_group_info(const Options& o, std::ostream& out) {
  const FiniteGroup group = make_group(o);
  const GeneratorSpec gens = default_generators(group);

  std::ostringstream gen_text;
  if (gens.generators.empty()) {
    gen_text << "(none)";
  } else {
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (i) gen_text << ", ";
      gen_text << element_word(group, gens.generators[i]) << "(" << gens.orders[i] << ")";
    }
  }

  std::vector<int> dims;
  const auto irreps = group.kind == GroupKind::cyclic ? irreps_cyclic(group.kind_n) : irreps_dihedral(group.kind_n);
  for (const auto& phi : irreps) dims.push_back(phi.dim);
  std::sort(dims.begin(), dims.end());
  std::ostringstream dim_text;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) dim_text << ",";
    dim_text << dims[i];
  }

  out << group.label << ": order " << group.order << "; generators " << gen_text.str() << "; irrep dims "
      << dim_text.str() << "\n";

  if (!o.dot.empty()) {
    const CayleyGraph graph = build_cayley(group, gens);
    auto f = std::ofstream(o.dot);
    if (!f) throw std::runtime_error("cannot write " + o.dot);
    f << io::to_dot(graph);
    out << "wrote Cayley graph to " << o.dot << "\n";
  }
  if (!o.out.empty()) {
    io::write_mul_table_csv(o.out, group);
    out << "wrote multiplication table to " << o.out << "\n";
  }
  return kExitOk;
}

int cmd_subsample(const Options& o, std::ostream& out) {
  const FiniteGroup group = make_group(o);
  const GeneratorSpec gens = default_generators(group);
  const SamplingPlan plan = general_subsample(group, gens, o.rate);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    out << "factor " << step.rate << ": subsample along " << step.word << " -> "
        << plan.per_step_subgroups[i].induced.label << "\n";
  }
  out << group.label << " / " << plan.result.induced.label << " / rate " << plan.total_rate() << " (order "
      << plan.result.induced.order << ")\n";
  if (!o.out.empty()) {
    io::write_json(o.out, io::sampling_plan_json(plan));
    out << "wrote plan to " << o.out << "\n";
  }
  return kExitOk;
}

BandlimitSolution solve_pipeline(const Pipeline& p, const Options& o) {
  if (o.canonical) {
    if (!is_canonical_subgroup(p)) {
      throw std::invalid_argument(
          "--canonical requires an even cyclic group downsampled by 2 (the even-index subgroup)");
    }
    return finalize_solution(cyclic_canonical_M(p.group.order), p.group, p.weights, o.lambda, o.seed);
  }
  OptimizerConfig cfg;
  cfg.lambda = o.lambda;
  cfg.seed = o.seed;
  return solve_M(p.group, p.sub, p.basis_parent, p.basis_sub, p.sampling, p.weights, cfg);
}

int cmd_solve_aa(const Options& o, std::ostream& out) {
  const FiniteGroup group = make_group(o);
  const Pipeline p = build_pipeline(group, o.rate > 0 ? std::optional<int>(o.rate) : std::nullopt,
                                    o.members_csv.empty() ? std::vector<Element>{} : parse_members(o.members_csv));
  const BandlimitSolution sol = solve_pipeline(p, o);

  const std::filesystem::path dir = o.out.empty() ? "aa_solution" : o.out;
  std::filesystem::create_directories(dir);
  io::write_matrix_csv(dir / "M.csv", sol.map.m);
  io::write_matrix_csv(dir / "P.csv", sol.projector);
  io::write_json(dir / "diagnostics.json", diagnostics_json(p, sol, o.canonical));

  out << p.group.label << " -> " << p.sub.induced.label << " (rate " << p.rate << ")\n"
      << "constraint residual: " << io::fp17(sol.diagnostics.constraint_residual) << "\n"
      << "equivariance objective: " << io::fp17(sol.diagnostics.equivariance_objective) << "\n"
      << "smooth objective: " << io::fp17(sol.diagnostics.smooth_objective) << "\n"
      << "projector equivariance error: " << io::fp17(sol.diagnostics.equivariance_error) << "\n"
      << "artifacts in " << dir.string() << "\n";

  return sol.diagnostics.converged ? kExitOk : kExitNonConvergence;
}

int cmd_filter_response(const Options& o, std::ostream& out) {
  const FiniteGroup group = make_group(o);
  const Pipeline p = build_pipeline(group, o.rate > 0 ? std::optional<int>(o.rate) : std::nullopt,
                                    o.members_csv.empty() ? std::vector<Element>{} : parse_members(o.members_csv));

  const std::filesystem::path dir = o.out.empty() ? "aa_solution" : o.out;
  BandlimitSolution sol;
  if (o.canonical) {
    if (!is_canonical_subgroup(p)) {
      throw std::invalid_argument("--canonical requires an even cyclic group downsampled by 2");
    }
    sol = make_solution(cyclic_canonical_M(p.group.order));
  } else {
    const auto m_path = dir / "M.csv";
    if (!std::filesystem::exists(m_path)) {
      throw std::invalid_argument("missing solution file " + m_path.string() + " (run solve-aa first or pass --canonical)");
    }
    sol = make_solution(make_bandlimit_map(io::read_matrix_csv(m_path), p.basis_parent, p.basis_sub, p.sampling));
  }

  const Eigen::VectorXd resp = filter_response(sol);
  io::write_filter_response_csv(dir / "filter_response.csv", p.group, resp);
  out << "wrote " << (dir / "filter_response.csv").string() << "\n";
  if (o.svg) {
    io::write_filter_response_svg(dir / "filter_response.svg", p.group, resp);
    out << "wrote " << (dir / "filter_response.svg").string() << "\n";
  }
  return kExitOk;
}

int cmd_report_table1(const Options& o, std::ostream& out, std::ostream& err) {
  struct RowSpec {
    std::string kind;
    int n;
    int rate;
    std::vector<Element> members;  // empty: use the general_subsample heuristic
  };
  auto range = [](int count, int step) {
    std::vector<Element> v(count);
    for (int i = 0; i < count; ++i) v[i] = i * step;
    return v;
  };
  // Cyclic subgroups of dihedral parents are passed as explicit member lists;
  // the max-order heuristic would pick the dihedral subgroup instead.
  const std::vector<RowSpec> specs = {
      {"dihedral", 14, 2, {}},            // D_28 -> D_14
      {"dihedral", 14, 2, range(14, 1)},  // D_28 -> C_14
      {"dihedral", 14, 4, range(7, 2)},   // D_28 -> C_7
      {"dihedral", 10, 2, {}},            // D_20 -> D_10
      {"dihedral", 10, 2, range(10, 1)},  // D_20 -> C_10
      {"dihedral", 10, 5, {}},            // D_20 -> D_4
      {"cyclic", 30, 2, {}},              // C_30 -> C_15
      {"cyclic", 30, 6, {}},              // C_30 -> C_5
  };

  std::vector<io::ReportRow> rows;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    const FiniteGroup group = spec.kind == "cyclic" ? make_cyclic(spec.n) : make_dihedral(spec.n);
    try {
      const auto start = std::chrono::steady_clock::now();
      const Pipeline p = build_pipeline(group, spec.members.empty() ? std::optional<int>(spec.rate) : std::nullopt,
                                        spec.members);
      OptimizerConfig cfg;
      cfg.lambda = o.lambda;
      cfg.seed = derive_seed(o.seed, i);
      const BandlimitSolution sol = solve_M(p.group, p.sub, p.basis_parent, p.basis_sub, p.sampling, p.weights, cfg);
      const ReconstructionErrors errs = verify_reconstruction(sol, p.sampling, o.trials, derive_seed(o.seed, 100 + i));
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      io::ReportRow row;
      row.group = p.group.label;
      row.subgroup = p.sub.induced.label;
      row.rate = spec.rate;
      row.err_with_aa = errs.with_aa;
      row.err_without_aa = errs.without_aa;
      row.equivariance_error = sol.diagnostics.equivariance_error;
      row.wall_time_s = wall;
      row.seed = cfg.seed;
      row.trials = o.trials;
      rows.push_back(row);

      out << row.group << " / " << row.subgroup << " / " << row.rate << ": err " << io::fp17(row.err_with_aa) << " / "
          << io::fp17(row.err_without_aa) << ", equivariance " << io::fp17(row.equivariance_error) << " ("
          << io::fp17(wall) << " s)\n";
    } catch (const std::exception& e) {
      err << "report-table1: row " << group.label << " rate " << spec.rate << " failed: " << e.what() << "\n";
      throw;
    }
  }

  const std::string path = o.out.empty() ? "table1.csv" : o.out;
  io::write_report_csv(path, rows);
  out << "wrote " << path << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uniform subsampling and anti-aliased downsampling of signals on finite groups"};
  app.name("groupresample");
  app.require_subcommand(1);

  Options o;
  auto add_group_flags = [&](CLI::App* cmd) {
    cmd->add_option("--kind", o.kind, "group kind: cyclic | dihedral")->required();
    cmd->add_option("--n", o.n, "group parameter n (C_n, or D_2n for dihedral)")->required()->check(CLI::PositiveNumber);
  };
  auto add_subgroup_flags = [&](CLI::App* cmd) {
    cmd->add_option("--rate", o.rate, "total subsampling rate (subgroup chosen by the max-order heuristic)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--members", o.members_csv, "explicit subgroup member list, e.g. 0,2,4");
  };

  CLI::App* info = app.add_subcommand("group-info", "print order, generator orders, and irrep dimensions");
  add_group_flags(info);
  info->add_option("--dot", o.dot, "write the Cayley graph in Graphviz DOT format");
  info->add_option("--out", o.out, "write the multiplication table as CSV");

  CLI::App* sub = app.add_subcommand("subsample", "choose a subgroup for a subsampling rate");
  add_group_flags(sub);
  sub->add_option("--rate", o.rate, "total subsampling rate")->required()->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "write the sampling plan as JSON");

  CLI::App* solve = app.add_subcommand("solve-aa", "solve for the anti-aliasing bandlimit map");
  add_group_flags(solve);
  add_subgroup_flags(solve);
  solve->add_option("--lambda", o.lambda, "smooth-selection weight (default 5)");
  solve->add_option("--seed", o.seed, "random seed, recorded in diagnostics");
  solve->add_flag("--canonical", o.canonical, "use the closed-form cyclic map instead of optimizing");
  solve->add_option("--out", o.out, "output directory (default aa_solution)");

  CLI::App* report = app.add_subcommand("report-table1", "run the eight reconstruction experiments");
  report->add_option("--seed", o.seed, "master seed");
  report->add_option("--trials", o.trials, "random trials per row (default 128)")->check(CLI::PositiveNumber);
  report->add_option("--lambda", o.lambda, "smooth-selection weight (default 5)");
  report->add_option("--out", o.out, "output CSV path (default table1.csv)");

  CLI::App* resp = app.add_subcommand("filter-response", "export the anti-aliasing filter response");
  add_group_flags(resp);
  add_subgroup_flags(resp);
  resp->add_flag("--canonical", o.canonical, "use the closed-form cyclic map");
  resp->add_flag("--svg", o.svg, "also render an SVG bar chart");
  resp->add_option("--out", o.out, "solution directory (default aa_solution)");

  std::vector<std::string> argv_storage;
  argv_storage.push_back("groupresample");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "groupresample: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (info->parsed()) return cmd_group_info(o, out);
    if (sub->parsed()) return cmd_subsample(o, out);
    if (solve->parsed() || resp->parsed()) {
      const bool has_rate = o.rate > 0;
      const bool has_members = !o.members_csv.empty();
      if (has_rate == has_members) {
        err << "groupresample: exactly one of --rate / --members must be given\n";
        return kExitUsage;
      }
      return solve->parsed() ? cmd_solve_aa(o, out) : cmd_filter_response(o, out);
    }
    if (report->parsed()) return cmd_report_table1(o, out, err);
    err << "groupresample: no subcommand\n";
    return kExitUsage;
  } catch (const NoCompliantGeneratorError& e) {
    err << "groupresample: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InfeasibleConstraintError& e) {
    err << "groupresample: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "groupresample: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "groupresample: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace groupsample::cli
