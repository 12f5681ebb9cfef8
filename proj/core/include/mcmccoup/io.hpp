#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmccoup/diagnostics.hpp"
#include "mcmccoup/fixed_points.hpp"
#include "mcmccoup/ode_limits.hpp"

namespace mcmccoup {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest round-trip representation, locale independent.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header);
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& cell(double v);
  CsvWriter& cell(long v);
  CsvWriter& cell(int v) { return cell(static_cast<long>(v)); }
  CsvWriter& cell(const std::string& v);
  void end_row();
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t ncol_;
  std::size_t col_ = 0;
};

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<OdeSample>& traj);
void write_bound_curves_csv(const std::filesystem::path& path, const std::vector<BoundCurve>& curves);
void write_fixed_points_csv(const std::filesystem::path& path,
                            const std::vector<FixedPointResult>& rows);

void write_svm_data_csv(const std::filesystem::path& path, const std::vector<double>& y);
std::vector<double> read_svm_data_csv(const std::filesystem::path& path);

struct GaussianFit {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
};

// JSON {"mu": [...], "sigma": [[...], ...]} or CSV (first row mu, then d rows of sigma).
GaussianFit read_gaussian_fit(const std::filesystem::path& path);
void write_gaussian_fit_json(const std::filesystem::path& path, const GaussianFit& fit);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace mcmccoup
