#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "evapore/field.hpp"

namespace evapore {

/// Thrown when an output file cannot be created or an input file cannot be parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric table with a header row. Footer entries (run summaries such as
/// slopes and errors) are written after the rows as "# name=value" lines.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> footer;

  void add(std::vector<double> row);
};

/// Decimal text that reads back to the same double (17 significant digits).
std::string format_double(double x);

void write_csv(const Table& table, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);

/// A named cell field for VTK output.
struct NamedField {
  std::string name;
  std::variant<ScalarField, VectorField> field;
};

/// Legacy ASCII STRUCTURED_POINTS file with one POINT_DATA block per field,
/// cell centres as points. Throws FieldError when the fields do not share a grid.
void write_vtk(const std::vector<NamedField>& fields, const std::filesystem::path& path);

/// Write `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace evapore
