#include "evapore/grid.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <queue>
#include <sstream>

#include "evapore/hash.hpp"

namespace evapore {

namespace {

Index ipow(int base, int exp) {
  Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Periodic wrap of an integer coordinate into [0, n).
int wrap(int i, int n) {
  const int m = i % n;
  return m < 0 ? m + n : m;
}

Index flat(const std::array<int, 3>& ijk, int n) {
  return static_cast<Index>(ijk[0]) + static_cast<Index>(n) * (ijk[1] + static_cast<Index>(n) * ijk[2]);
}

std::array<int, 3> unflat(Index c, int n) {
  std::array<int, 3> ijk{0, 0, 0};
  ijk[0] = static_cast<int>(c % n);
  c /= n;
  ijk[1] = static_cast<int>(c % n);
  ijk[2] = static_cast<int>(c / n);
  return ijk;
}

}  // namespace

int count_pore_components(int dim, int resolution, const std::vector<std::uint8_t>& solid_mask) {
  const Index n = ipow(resolution, dim);
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int components = 0;
  std::queue<Index> work;
  for (Index start = 0; start < n; ++start) {
    if (solid_mask[static_cast<std::size_t>(start)] || label[static_cast<std::size_t>(start)] >= 0) continue;
    label[static_cast<std::size_t>(start)] = components;
    work.push(start);
    while (!work.empty()) {
      const Index c = work.front();
      work.pop();
      const auto ijk = unflat(c, resolution);
      for (int a = 0; a < dim; ++a) {
        for (int s : {-1, 1}) {
          auto nb = ijk;
          nb[static_cast<std::size_t>(a)] = wrap(nb[static_cast<std::size_t>(a)] + s, resolution);
          const Index m = flat(nb, resolution);
          if (solid_mask[static_cast<std::size_t>(m)] || label[static_cast<std::size_t>(m)] >= 0) continue;
          label[static_cast<std::size_t>(m)] = components;
          work.push(m);
        }
      }
    }
    ++components;
  }
  return components;
}

UnitCell::UnitCell(int dim, int resolution, std::vector<std::uint8_t> solid_mask)
    : dim_(dim), resolution_(resolution), solid_(std::move(solid_mask)) {
  if (dim < 1 || dim > 3) throw GeometryError("dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (resolution < 2) throw GeometryError("resolution must be at least 2, got " + std::to_string(resolution));
  num_cells_ = ipow(resolution, dim);
  if (static_cast<Index>(solid_.size()) != num_cells_) {
    throw GeometryError("solid mask has " + std::to_string(solid_.size()) + " entries, expected " +
                        std::to_string(num_cells_));
  }
  volume_ = std::pow(1.0 / resolution, dim);
  for (auto& s : solid_) s = s ? 1 : 0;
  for (auto s : solid_) solid_count_ += s;
  if (solid_count_ == num_cells_) throw GeometryError("pore space is empty");

  const int components = count_pore_components(dim_, resolution_, solid_);
  if (components != 1) {
    throw GeometryError("pore space is disconnected: " + std::to_string(components) + " components");
  }

  for (Index c = 0; c < num_cells_; ++c) {
    if (is_solid(c)) continue;
    for (int a = 0; a < dim_; ++a) {
      for (int s : {-1, 1}) {
        const Index m = neighbor(c, a, s);
        if (is_solid(m)) interface_.push_back({c, m, a, s});
      }
    }
  }

  std::string key = std::to_string(dim_) + ":" + std::to_string(resolution_) + ":";
  key.append(solid_.begin(), solid_.end());
  hash_ = sha256_hex(key);
}

Index UnitCell::neighbor(Index c, int axis, int step) const {
  auto ijk = unflat(c, resolution_);
  auto& i = ijk[static_cast<std::size_t>(axis)];
  i = wrap(i + step, resolution_);
  return flat(ijk, resolution_);
}

std::array<int, 3> UnitCell::coords(Index c) const { return unflat(c, resolution_); }

Index UnitCell::index(std::array<int, 3> ijk) const {
  for (int a = 0; a < 3; ++a) {
    ijk[static_cast<std::size_t>(a)] = a < dim_ ? wrap(ijk[static_cast<std::size_t>(a)], resolution_) : 0;
  }
  return flat(ijk, resolution_);
}

GeometryPtr build_geometry(const GeometrySpec& spec) {
  if (spec.kind == GeometryKind::Raster) return read_pgm_geometry(spec.raster_path);
  if (spec.resolution < 8) {
    throw GeometryError("resolution must be at least 8, got " + std::to_string(spec.resolution));
  }
  if (spec.dim < 1 || spec.dim > 3) throw GeometryError("dimension must be 1, 2 or 3");
  const int n = spec.resolution;
  const Index cells = ipow(n, spec.dim);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(cells), 0);
  const double h = 1.0 / n;

  switch (spec.kind) {
    case GeometryKind::NoSolid:
      break;
    case GeometryKind::CenteredDisk: {
      if (!(spec.radius > 0.0 && spec.radius < 0.5)) throw GeometryError("disk radius must lie in (0, 0.5)");
      for (Index c = 0; c < cells; ++c) {
        const auto ijk = unflat(c, n);
        double r2 = 0.0;
        for (int a = 0; a < spec.dim; ++a) {
          const double x = (ijk[static_cast<std::size_t>(a)] + 0.5) * h - 0.5;
          r2 += x * x;
        }
        mask[static_cast<std::size_t>(c)] = r2 <= spec.radius * spec.radius ? 1 : 0;
      }
      break;
    }
    case GeometryKind::Stripes: {
      if (spec.axis < 0 || spec.axis >= spec.dim) throw GeometryError("stripe axis out of range");
      if (!(spec.solid_fraction > 0.0 && spec.solid_fraction < 1.0)) {
        throw GeometryError("stripe solid_fraction must lie in (0, 1)");
      }
      // Solid band of m cells centred in the cell along the stripe normal.
      const int m = static_cast<int>(std::lround(spec.solid_fraction * n));
      const int lo = (n - m) / 2;
      for (Index c = 0; c < cells; ++c) {
        const int i = unflat(c, n)[static_cast<std::size_t>(spec.axis)];
        mask[static_cast<std::size_t>(c)] = (i >= lo && i < lo + m) ? 1 : 0;
      }
      break;
    }
    case GeometryKind::Channel: {
      if (spec.dim < 2) throw GeometryError("channel geometry needs dim >= 2");
      if (spec.axis < 0 || spec.axis >= spec.dim) throw GeometryError("channel axis out of range");
      if (!(spec.width > 0.0 && spec.width < 1.0)) throw GeometryError("channel width must lie in (0, 1)");
      // Pore band of the given width centred across every axis other than the flow axis.
      const int w = static_cast<int>(std::lround(spec.width * n));
      const int lo = (n - w) / 2;
      for (Index c = 0; c < cells; ++c) {
        const auto ijk = unflat(c, n);
        bool pore = true;
        for (int a = 0; a < spec.dim; ++a) {
          if (a == spec.axis) continue;
          const int i = ijk[static_cast<std::size_t>(a)];
          pore = pore && i >= lo && i < lo + w;
        }
        mask[static_cast<std::size_t>(c)] = pore ? 0 : 1;
      }
      break;
    }
    case GeometryKind::Raster:
      break;
  }
  return std::make_shared<const UnitCell>(spec.dim, n, std::move(mask));
}

GeometryPtr parse_pgm_geometry(const std::string& text) {
  // Strip comments before tokenizing.
  std::string clean;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto hash = line.find('#');
    clean += line.substr(0, hash);
    clean += '\n';
  }
  std::istringstream in(clean);
  std::string magic;
  int width = 0, height = 0, maxval = 0;
  if (!(in >> magic) || magic != "P2") throw GeometryError("raster is not a plain PGM (P2) file");
  if (!(in >> width >> height >> maxval)) throw GeometryError("raster header is truncated");
  if (width != height) throw GeometryError("raster must be square, got " + std::to_string(width) + "x" +
                                           std::to_string(height));
  if (width < 8) throw GeometryError("raster resolution must be at least 8");
  if (maxval != 255) throw GeometryError("raster maxval must be 255");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      int v = 0;
      if (!(in >> v)) throw GeometryError("raster pixel data is truncated");
      if (v != 0 && v != 255) {
        throw GeometryError("raster pixel (" + std::to_string(row) + "," + std::to_string(col) + ") has value " +
                            std::to_string(v) + "; only 0 (solid) and 255 (pore) are allowed");
      }
      // Image rows run top to bottom; y_2 grows upward.
      const std::size_t c = static_cast<std::size_t>(col) + static_cast<std::size_t>(width) * (height - 1 - row);
      mask[c] = v == 0 ? 1 : 0;
    }
  }
  return std::make_shared<const UnitCell>(2, width, std::move(mask));
}

GeometryPtr read_pgm_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GeometryError("cannot open raster " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pgm_geometry(buf.str());
}

std::string geometry_kind_name(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::NoSolid: return "no-solid";
    case GeometryKind::CenteredDisk: return "centered-disk";
    case GeometryKind::Stripes: return "stripes";
    case GeometryKind::Channel: return "channel";
    case GeometryKind::Raster: return "raster";
  }
  return "unknown";
}

GeometryKind geometry_kind_from_name(const std::string& name) {
  for (auto k : {GeometryKind::NoSolid, GeometryKind::CenteredDisk, GeometryKind::Stripes, GeometryKind::Channel,
                 GeometryKind::Raster}) {
    if (geometry_kind_name(k) == name) return k;
  }
  throw GeometryError("unknown geometry kind '" + name + "'");
}

}  // namespace evapore
