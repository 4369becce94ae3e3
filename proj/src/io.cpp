#include "groupsample/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace groupsample::io {

namespace {

const char* kEdgePalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628"};

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  return f;
}

}  // namespace

std::string fp17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto f = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) f << ',';
      f << fp17(m(i, j));
    }
    f << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXcd& m) {
  auto f = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) f << ',';
      f << fp17(m(i, j).real()) << ',' << fp17(m(i, j).imag());
    }
    f << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && rows.front().size() != row.size()) {
      throw std::runtime_error("ragged CSV: " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV: " + path.string());
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_mul_table_csv(const std::filesystem::path& path, const FiniteGroup& g) {
  auto f = open_out(path);
  for (Element a = 0; a < g.order; ++a) {
    for (Element b = 0; b < g.order; ++b) {
      if (b) f << ',';
      f << g.mul[a][b];
    }
    f << '\n';
  }
}

nlohmann::json group_spec_json(const FiniteGroup& g) {
  nlohmann::json j;
  switch (g.kind) {
    case GroupKind::cyclic:
      j["kind"] = "cyclic";
      j["n"] = g.kind_n;
      break;
    case GroupKind::dihedral:
      j["kind"] = "dihedral";
      j["n"] = g.kind_n;
      break;
    default:
      throw std::invalid_argument("group_spec_json: unrecognized group kind");
  }
  j["label"] = g.label;
  return j;
}

FiniteGroup group_from_spec_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  FiniteGroup g;
  if (kind == "cyclic") {
    g = make_cyclic(n);
  } else if (kind == "dihedral") {
    g = make_dihedral(n);
  } else {
    throw std::invalid_argument("group_from_spec_json: unknown kind '" + kind + "'");
  }
  if (j.contains("label")) g.label = j.at("label").get<std::string>();
  return g;
}

nlohmann::json sampling_plan_json(const SamplingPlan& plan) {
  nlohmann::json j;
  j["group"] = plan.parent.label;
  j["total_rate"] = plan.total_rate();
  j["steps"] = nlohmann::json::array();
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    nlohmann::json js;
    js["generator_word"] = step.word;
    js["generator_index"] = step.generator;
    js["rate"] = step.rate;
    js["members"] = plan.per_step_subgroups[i].members;
    js["subgroup"] = plan.per_step_subgroups[i].induced.label;
    j["steps"].push_back(std::move(js));
  }
  j["result"] = plan.result.induced.label;
  j["result_members"] = plan.result.members;
  return j;
}

std::string to_dot(const CayleyGraph& graph) {
  std::ostringstream out;
  out << "digraph \"" << graph.group.label << "\" {\n";
  out << "  layout=circo;\n  node [shape=circle];\n";
  for (Element a = 0; a < graph.group.order; ++a) {
    out << "  n" << a << " [label=\"" << element_word(graph.group, a) << "\"];\n";
  }
  const std::size_t palette = sizeof(kEdgePalette) / sizeof(kEdgePalette[0]);
  for (const auto& e : graph.edges) {
    out << "  n" << e.src << " -> n" << e.dst << " [color=\"" << kEdgePalette[e.gen % palette] << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

void write_report_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
  for (const auto& r : rows) {
    for (double v : {r.err_with_aa, r.err_without_aa, r.equivariance_error, r.wall_time_s}) {
      if (!std::isfinite(v) || v < 0) throw std::invalid_argument("write_report_csv: non-finite or negative value");
    }
  }
  auto f = open_out(path);
  f << "group,subgroup,rate,err_with_aa,err_without_aa,equivariance_error,wall_time_s,seed,trials\n";
  for (const auto& r : rows) {
    f << r.group << ',' << r.subgroup << ',' << r.rate << ',' << fp17(r.err_with_aa) << ',' << fp17(r.err_without_aa)
      << ',' << fp17(r.equivariance_error) << ',' << fp17(r.wall_time_s) << ',' << r.seed << ',' << r.trials << '\n';
  }
}

void write_filter_response_csv(const std::filesystem::path& path, const FiniteGroup& g,
                               const Eigen::VectorXd& values) {
  if (values.size() != g.order) throw std::invalid_argument("write_filter_response_csv: length mismatch");
  auto f = open_out(path);
  f << "element_index,element_word,value\n";
  for (Element a = 0; a < g.order; ++a) {
    f << a << ',' << element_word(g, a) << ',' << fp17(values[a]) << '\n';
  }
}

void write_filter_response_svg(const std::filesystem::path& path, const FiniteGroup& g,
                               const Eigen::VectorXd& values) {
  if (values.size() != g.order) throw std::invalid_argument("write_filter_response_svg: length mismatch");
  const double width = 560, height = 560, cx = width / 2, cy = height / 2;
  const double vmax = std::max(1e-12, values.cwiseAbs().maxCoeff());
  const double bar_scale = 70.0 / vmax;

  struct Node {
    double x, y;
  };
  std::vector<Node> nodes(g.order);
  const bool dihedral = g.kind == GroupKind::dihedral;
  const int ring_size = dihedral ? g.kind_n : g.order;
  for (Element a = 0; a < g.order; ++a) {
    const bool inner = dihedral && a >= ring_size;
    const int k = inner ? a - ring_size : a;
    const double radius = inner ? 100.0 : 190.0;
    const double theta = 2.0 * std::numbers::pi * k / ring_size - std::numbers::pi / 2;
    nodes[a] = {cx + radius * std::cos(theta), cy + radius * std::sin(theta)};
  }

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"12\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">" << g.label
    << " anti-aliasing filter response</text>\n";
  for (Element a = 0; a < g.order; ++a) {
    const auto& nd = nodes[a];
    const double h = values[a] * bar_scale;
    const char* color = values[a] >= 0 ? "#377eb8" : "#ff7f00";
    s << "<line x1=\"" << nd.x << "\" y1=\"" << nd.y << "\" x2=\"" << nd.x << "\" y2=\"" << nd.y - h << "\" stroke=\""
      << color << "\" stroke-width=\"6\"/>\n";
    s << "<circle cx=\"" << nd.x << "\" cy=\"" << nd.y << "\" r=\"3.5\" fill=\"#444\"/>\n";
    s << "<text x=\"" << nd.x + 6 << "\" y=\"" << nd.y + 14
      << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#333\">" << element_word(g, a) << "</text>\n";
  }
  s << "</svg>\n";

  auto f = open_out(path);
  f << s.str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

}  // namespace groupsample::io
