#include "evapore/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace evapore {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

const GeometryPtr& grid_of(const NamedField& f) {
  return std::visit([](const auto& x) -> const GeometryPtr& { return x.geom; }, f.field);
}

}  // namespace

void Table::add(std::vector<double> row) {
  if (row.size() != header.size()) throw std::invalid_argument("Table::add: row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(const Table& table, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(row[j]);
    out << "\n";
  }
  for (const auto& [name, value] : table.footer) out << "# " << name << "=" << format_double(value) << "\n";
  close_output(out, path);
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Table t;
  std::string line;
  auto number = [&](const std::string& cell, int line_no) {
    double v = 0.0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": not a number '" + cell + "'");
    }
    return v;
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
  };
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing header row");
  t.header = split(line);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad footer");
      t.footer.emplace_back(line.substr(2, eq - 2), number(line.substr(eq + 1), line_no));
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(number(cell, line_no));
    if (row.size() != t.header.size()) throw IoError(path.string() + ":" + std::to_string(line_no) + ": wrong width");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_vtk(const std::vector<NamedField>& fields, const std::filesystem::path& path) {
  if (fields.empty()) throw FieldError("write_vtk: no fields");
  const GeometryPtr& g = grid_of(fields.front());
  for (const auto& f : fields) {
    if (!grid_of(f)->same_grid(*g)) throw FieldError("write_vtk: field '" + f.name + "' lives on a different grid");
  }
  const int n = g->resolution(), d = g->dim();
  const double h = g->cell_size();
  auto out = open_output(path);
  out << "# vtk DataFile Version 3.0\nevapore\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << n << " " << (d >= 2 ? n : 1) << " " << (d >= 3 ? n : 1) << "\n";
  out << "ORIGIN " << format_double(0.5 * h) << " " << format_double(d >= 2 ? 0.5 * h : 0.0) << " "
      << format_double(d >= 3 ? 0.5 * h : 0.0) << "\n";
  out << "SPACING " << format_double(h) << " " << format_double(h) << " " << format_double(h) << "\n";
  out << "POINT_DATA " << g->num_cells() << "\n";
  // Cell index c runs with axis 0 fastest, which is the VTK point order.
  for (const auto& f : fields) {
    if (const auto* s = std::get_if<ScalarField>(&f.field)) {
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (Index c = 0; c < g->num_cells(); ++c) out << format_double(s->values[c]) << "\n";
    } else {
      const auto& v = std::get<VectorField>(f.field);
      out << "VECTORS " << f.name << " double\n";
      for (Index c = 0; c < g->num_cells(); ++c) {
        for (int a = 0; a < 3; ++a) out << (a ? " " : "") << format_double(a < d ? v.values(c, a) : 0.0);
        out << "\n";
      }
    }
  }
  close_output(out, path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  close_output(out, path);
}

}  // namespace evapore
