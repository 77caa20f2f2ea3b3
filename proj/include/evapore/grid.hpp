#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace evapore {

using Index = Eigen::Index;

/// Thrown for invalid unit-cell descriptions (bad resolution, disconnected pores, bad raster).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A face separating a pore cell from a solid cell (the internal boundary Gamma_P).
struct InterfaceFace {
  Index pore_cell;
  Index solid_cell;
  int axis;
  /// +1 when the solid cell sits on the positive side of the pore cell along `axis`.
  int side;
};

/// Periodic unit cell Y = [0,1]^d discretized with `resolution` cells per axis.
///
/// Every cell is either pore (P) or solid (S). The mask is fixed at construction;
/// the pore space is checked to be edge-connected under periodic wrapping.
class UnitCell {
 public:
  UnitCell(int dim, int resolution, std::vector<std::uint8_t> solid_mask);

  int dim() const { return dim_; }
  int resolution() const { return resolution_; }
  double cell_size() const { return 1.0 / resolution_; }
  double cell_volume() const { return volume_; }
  Index num_cells() const { return num_cells_; }

  bool is_solid(Index c) const { return solid_[static_cast<std::size_t>(c)] != 0; }
  bool is_pore(Index c) const { return solid_[static_cast<std::size_t>(c)] == 0; }
  bool has_solid() const { return solid_count_ > 0; }
  Index pore_count() const { return num_cells_ - solid_count_; }
  Index solid_count() const { return solid_count_; }
  double porosity() const { return static_cast<double>(pore_count()) / static_cast<double>(num_cells_); }

  /// Periodic neighbour of `c` offset by `step` cells along `axis`.
  Index neighbor(Index c, int axis, int step) const;
  std::array<int, 3> coords(Index c) const;
  Index index(std::array<int, 3> ijk) const;
  /// Cell-centre coordinate along `axis`.
  double center(Index c, int axis) const { return (coords(c)[static_cast<std::size_t>(axis)] + 0.5) / resolution_; }

  const std::vector<InterfaceFace>& interface_faces() const { return interface_; }
  const std::vector<std::uint8_t>& solid_mask() const { return solid_; }

  /// Hex digest identifying dimension, resolution and mask.
  const std::string& hash() const { return hash_; }

  bool same_grid(const UnitCell& other) const {
    return dim_ == other.dim_ && resolution_ == other.resolution_ && solid_ == other.solid_;
  }

 private:
  int dim_;
  int resolution_;
  Index num_cells_;
  double volume_;
  std::vector<std::uint8_t> solid_;
  Index solid_count_ = 0;
  std::vector<InterfaceFace> interface_;
  std::string hash_;
};

using GeometryPtr = std::shared_ptr<const UnitCell>;

enum class GeometryKind { NoSolid, CenteredDisk, Stripes, Channel, Raster };

/// Descriptor accepted by build_geometry.
struct GeometrySpec {
  GeometryKind kind = GeometryKind::NoSolid;
  int dim = 2;
  int resolution = 32;
  /// Disk (or sphere) radius for CenteredDisk.
  double radius = 0.25;
  /// Stripes: axis normal to the layers. Channel: flow axis.
  int axis = 0;
  double solid_fraction = 0.5;
  /// Channel width (pore band across the normal axis).
  double width = 0.5;
  std::filesystem::path raster_path;
};

/// Build and validate a unit cell; throws GeometryError on invalid input.
GeometryPtr build_geometry(const GeometrySpec& spec);

/// Parse a plain (P2) portable graymap: 0 = solid, 255 = pore.
GeometryPtr read_pgm_geometry(const std::filesystem::path& path);
GeometryPtr parse_pgm_geometry(const std::string& text);

/// Number of edge-connected pore components under periodic wrapping.
int count_pore_components(int dim, int resolution, const std::vector<std::uint8_t>& solid_mask);

std::string geometry_kind_name(GeometryKind kind);
GeometryKind geometry_kind_from_name(const std::string& name);

}  // namespace evapore
