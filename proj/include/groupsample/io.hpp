#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "groupsample/cayley.hpp"
#include "groupsample/group.hpp"
#include "groupsample/sampling.hpp"

#include "json.hpp"

namespace groupsample::io {

/// 17-significant-digit formatting used for every float written to CSV, so
/// reruns are byte-identical and values round-trip exactly.
std::string fp17(double v);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Complex export with real/imag parts interleaved column-wise
/// (re0, im0, re1, im1, ...).
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXcd& m);

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

void write_mul_table_csv(const std::filesystem::path& path, const FiniteGroup& g);

/// {"kind": "cyclic"|"dihedral", "n": int, "label": string}
nlohmann::json group_spec_json(const FiniteGroup& g);
FiniteGroup group_from_spec_json(const nlohmann::json& j);

nlohmann::json sampling_plan_json(const SamplingPlan& plan);

/// Graphviz export with edges colored by generator index.
std::string to_dot(const CayleyGraph& graph);

struct ReportRow {
  std::string group;
  std::string subgroup;
  int rate = 1;
  double err_with_aa = 0.0;
  double err_without_aa = 0.0;
  double equivariance_error = 0.0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  int trials = 0;
};

void write_report_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows);

void write_filter_response_csv(const std::filesystem::path& path, const FiniteGroup& g, const Eigen::VectorXd& values);

/// Bar chart of the filter response over the group layout: one ring of nodes
/// for cyclic groups, rotations outside and reflections inside for dihedral
/// ones. Downward bars are negative values.
void write_filter_response_svg(const std::filesystem::path& path, const FiniteGroup& g, const Eigen::VectorXd& values);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace groupsample::io
