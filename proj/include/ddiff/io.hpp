#ifndef DDIFF_IO_HPP
#define DDIFF_IO_HPP

#include "ddiff/diagnostics.hpp"
#include "ddiff/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ddiff {

/// Binary field snapshot, little-endian:
///   "DDIF" | u16 version = 1 | u32 nx | u32 ny | f64 t | nx*ny f64 (row-major)
struct SnapshotFile
{
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  double t = 0.0;
  std::vector<double> values;

  bool operator==(const SnapshotFile&) const = default;
};

inline constexpr std::uint16_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const SnapshotFile& snap);
void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double t);

/// Throws FormatError on a bad magic, version, or truncated payload.
SnapshotFile read_snapshot(const std::filesystem::path& path);

/// Header of the series CSV.
inline constexpr const char* kSeriesHeader =
  "t,dt,mass,energy,rel_energy,pos_l1,max_val,min_val,n_components,hm1_sq";

/// 17 significant digits; an absent hm1_sq is an empty cell.
void write_series_csv(const std::filesystem::path& path, const std::vector<SeriesRecord>& series);

/// Column name -> values; empty cells read as NaN. Throws FormatError.
std::map<std::string, std::vector<double>> read_csv_columns(const std::filesystem::path& path);

/// %.17g
std::string format_double(double v);

} // namespace ddiff

#endif
