#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bloc/estimate.hpp"

namespace bloc {

/// Malformed CSV input; the message names the file, line and field.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;  ///< empty when the first row is numeric
  Eigen::MatrixXd values;
};

/// Reads a rectangular numeric table. Blank lines and lines starting with '#'
/// are skipped. A first row with any non-numeric field is taken as a header.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& source = "<string>");

/// Writes with %.17g so values re-read bit-identically.
void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
               const std::vector<std::string>& header = {});
void write_csv(const std::filesystem::path& path, const Eigen::MatrixXi& m,
               const std::vector<std::string>& header = {});
std::string format_double(double v);

DataMatrix read_data(const std::filesystem::path& path);

/// Square matrix; throws CsvError when not square.
Eigen::MatrixXd read_square(const std::filesystem::path& path);

/// One comma-separated line of angles after a "# d=<dim>" line. The reader
/// also accepts one angle per line.
void write_angles(const std::filesystem::path& path, const Eigen::VectorXd& phi, std::size_t d);
Eigen::VectorXd read_angles(const std::filesystem::path& path, std::size_t* d = nullptr);

}  // namespace bloc
