#include "mcmccoup/io.hpp"

#include <charconv>
#include <sstream>

#include "json.hpp"

namespace mcmccoup {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header)
    : CsvWriter(path, std::vector<std::string>(header)) {}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), ncol_(header.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }
CsvWriter& CsvWriter::cell(long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (col_ == ncol_) throw IoError(path_.string() + ": too many cells in row");
  out_ << (col_ ? "," : "") << v;
  ++col_;
  return *this;
}

void CsvWriter::end_row() {
  if (col_ != ncol_) throw IoError(path_.string() + ": short row");
  out_ << '\n';
  col_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("write failed for " + path_.string());
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<OdeSample>& traj) {
  CsvWriter w(path, {"t", "x", "y", "v", "s"});
  for (const auto& s : traj) {
    w.cell(s.t).cell(s.w.x).cell(s.w.y).cell(s.w.v).cell(s.w.s());
    w.end_row();
  }
  w.close();
}

void write_bound_curves_csv(const std::filesystem::path& path, const std::vector<BoundCurve>& curves) {
  CsvWriter w(path, {"metric", "t", "estimate", "ci_low", "ci_high", "n_replicates", "n_capped"});
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.t.size(); ++i) {
      w.cell(to_string(c.metric)).cell(c.t[i]).cell(c.estimate[i]).cell(c.ci_low[i]).cell(c.ci_high[i]);
      w.cell(c.n_replicates).cell(c.n_capped);
      w.end_row();
    }
  }
  w.close();
}

void write_fixed_points_csv(const std::filesystem::path& path,
                            const std::vector<FixedPointResult>& rows) {
  CsvWriter w(path, {"l", "eps", "kind", "v_star", "s_inf"});
  for (const auto& r : rows) {
    w.cell(r.l).cell(r.eps).cell(to_string(r.kind)).cell(r.v_star).cell(r.s_inf);
    w.end_row();
  }
  w.close();
}

void write_svm_data_csv(const std::filesystem::path& path, const std::vector<double>& y) {
  CsvWriter w(path, {"t", "Y_t"});
  for (std::size_t t = 0; t < y.size(); ++t) {
    w.cell(static_cast<long>(t + 1)).cell(y[t]);
    w.end_row();
  }
  w.close();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw IoError(where + ": not a number: '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw IoError(where + ": trailing characters in '" + s + "'");
  return v;
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path, bool skip_header) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (skip_header && rows.empty() && lineno == 1) continue;
    std::vector<double> row;
    for (const auto& f : split(line, ','))
      row.push_back(parse_double(f, path.string() + ":" + std::to_string(lineno)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<double> read_svm_data_csv(const std::filesystem::path& path) {
  const auto rows = read_numeric_csv(path, true);
  std::vector<double> y;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2) throw IoError(path.string() + ": expected columns t,Y_t");
    y.push_back(rows[i][1]);
  }
  if (y.empty()) throw IoError(path.string() + ": no observations");
  return y;
}

GaussianFit read_gaussian_fit(const std::filesystem::path& path) {
  GaussianFit fit;
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path.string() + ": " + e.what());
    }
    if (!j.contains("mu") || !j.contains("sigma")) throw IoError(path.string() + ": need keys mu and sigma");
    const auto mu = j.at("mu").get<std::vector<double>>();
    const auto sig = j.at("sigma").get<std::vector<std::vector<double>>>();
    const Eigen::Index d = static_cast<Eigen::Index>(mu.size());
    fit.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), d);
    if (static_cast<Eigen::Index>(sig.size()) != d) throw IoError(path.string() + ": sigma has wrong shape");
    fit.sigma.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (static_cast<Eigen::Index>(sig[i].size()) != d) throw IoError(path.string() + ": sigma has wrong shape");
      for (Eigen::Index k = 0; k < d; ++k) fit.sigma(i, k) = sig[i][k];
    }
    return fit;
  }
  const auto rows = read_numeric_csv(path, false);
  if (rows.empty()) throw IoError(path.string() + ": empty file");
  const Eigen::Index d = static_cast<Eigen::Index>(rows[0].size());
  if (static_cast<Eigen::Index>(rows.size()) != d + 1) throw IoError(path.string() + ": expected 1 + d rows");
  fit.mu = Eigen::Map<const Eigen::VectorXd>(rows[0].data(), d);
  fit.sigma.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (static_cast<Eigen::Index>(rows[i + 1].size()) != d) throw IoError(path.string() + ": ragged sigma row");
    for (Eigen::Index k = 0; k < d; ++k) fit.sigma(i, k) = rows[i + 1][k];
  }
  return fit;
}

void write_gaussian_fit_json(const std::filesystem::path& path, const GaussianFit& fit) {
  nlohmann::json j;
  j["mu"] = std::vector<double>(fit.mu.data(), fit.mu.data() + fit.mu.size());
  std::vector<std::vector<double>> s(fit.sigma.rows());
  for (Eigen::Index i = 0; i < fit.sigma.rows(); ++i)
    for (Eigen::Index k = 0; k < fit.sigma.cols(); ++k) s[i].push_back(fit.sigma(i, k));
  j["sigma"] = s;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out << j.dump(1) << '\n';
}

}  // namespace mcmccoup
