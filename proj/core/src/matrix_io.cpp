#include "bloc/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bloc/corrspace.hpp"

namespace bloc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_number(const std::string& field, double& out) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string join_header(const std::vector<std::string>& header) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) s += ',';
    s += header[i];
  }
  return s + '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool first = true;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::vector<std::string> fields = split(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_number(fields[i], row[i])) {
        numeric = false;
        bad = i;
        break;
      }
    }
    if (first) {
      first = false;
      width = fields.size();
      if (!numeric) {
        table.header = fields;
        continue;
      }
    }
    if (fields.size() != width) {
      throw CsvError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(width) +
                     " fields, found " + std::to_string(fields.size()));
    }
    if (!numeric) {
      throw CsvError(source + ":" + std::to_string(lineno) + ": field " + std::to_string(bad + 1) +
                     " is not a number ('" + fields[bad] + "')");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(source + ": no numeric rows");

  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  return parse_csv(read_file(path), path.string());
}

void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
               const std::vector<std::string>& header) {
  std::string text = header.empty() ? std::string() : join_header(header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) text += ',';
      text += format_double(m(i, j));
    }
    text += '\n';
  }
  write_file(path, text);
}

void write_csv(const std::filesystem::path& path, const Eigen::MatrixXi& m,
               const std::vector<std::string>& header) {
  std::string text = header.empty() ? std::string() : join_header(header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) text += ',';
      text += std::to_string(m(i, j));
    }
    text += '\n';
  }
  write_file(path, text);
}

DataMatrix read_data(const std::filesystem::path& path) {
  CsvTable t = read_csv(path);
  DataMatrix x;
  x.values = std::move(t.values);
  x.names = std::move(t.header);
  return x;
}

Eigen::MatrixXd read_square(const std::filesystem::path& path) {
  CsvTable t = read_csv(path);
  if (t.values.rows() != t.values.cols()) {
    throw CsvError(path.string() + ": expected a square matrix, found " +
                   std::to_string(t.values.rows()) + "x" + std::to_string(t.values.cols()));
  }
  return t.values;
}

void write_angles(const std::filesystem::path& path, const Eigen::VectorXd& phi, std::size_t d) {
  if (static_cast<std::size_t>(phi.size()) != angle_count(d)) {
    throw std::invalid_argument("write_angles: length does not match d(d-1)/2");
  }
  std::string text = "# d=" + std::to_string(d) + '\n';
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    if (i) text += ',';
    text += format_double(phi(i));
  }
  write_file(path, text + '\n');
}

Eigen::VectorXd read_angles(const std::filesystem::path& path, std::size_t* d) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::vector<double> values;
  std::size_t dim = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto pos = t.find("d=");
      if (pos != std::string::npos) dim = std::stoul(t.substr(pos + 2));
      continue;
    }
    for (const std::string& field : split(t)) {
      double v = 0.0;
      if (!parse_number(field, v)) {
        throw CsvError(path.string() + ":" + std::to_string(lineno) + ": not a number ('" +
                       field + "')");
      }
      values.push_back(v);
    }
  }
  if (dim == 0) dim = dimension_for_angle_count(values.size());
  if (angle_count(dim) != values.size()) {
    throw CsvError(path.string() + ": " + std::to_string(values.size()) +
                   " angles do not match d=" + std::to_string(dim));
  }
  if (d) *d = dim;
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace bloc
