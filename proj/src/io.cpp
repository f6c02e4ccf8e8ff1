#include "ddiff/io.hpp"

#include "ddiff/errors.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace ddiff {

namespace {

template <class T>
void put_le(std::ostream& out, T value)
{
  std::array<unsigned char, sizeof(T)> bytes;
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t k = 0; k < sizeof(T); ++k)
    bytes[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xffu);
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <class T>
T get_le(std::istream& in)
{
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw FormatError("snapshot: truncated file");
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k)
    bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

} // namespace

void write_snapshot(const std::filesystem::path& path, const SnapshotFile& snap)
{
  if (snap.values.size() != static_cast<std::size_t>(snap.nx) * snap.ny)
    throw InvalidArgument("write_snapshot: payload length does not match header");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw FormatError("snapshot: cannot open '" + path.string() + "' for writing");
  out.write("DDIF", 4);
  put_le<std::uint16_t>(out, kSnapshotVersion);
  put_le<std::uint32_t>(out, snap.nx);
  put_le<std::uint32_t>(out, snap.ny);
  put_le<double>(out, snap.t);
  for (double v : snap.values)
    put_le<double>(out, v);
  if (!out)
    throw FormatError("snapshot: write failed for '" + path.string() + "'");
}

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double t)
{
  SnapshotFile s;
  s.nx = static_cast<std::uint32_t>(field.grid().nx());
  s.ny = static_cast<std::uint32_t>(field.grid().ny());
  s.t = t;
  s.values = field.data();
  write_snapshot(path, s);
}

SnapshotFile read_snapshot(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError("snapshot: cannot open '" + path.string() + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "DDIF", 4) != 0)
    throw FormatError("snapshot: bad magic in '" + path.string() + "'");
  const auto version = get_le<std::uint16_t>(in);
  if (version != kSnapshotVersion)
    throw FormatError("snapshot: unsupported version " + std::to_string(version));
  SnapshotFile s;
  s.nx = get_le<std::uint32_t>(in);
  s.ny = get_le<std::uint32_t>(in);
  s.t = get_le<double>(in);
  const std::size_t n = static_cast<std::size_t>(s.nx) * s.ny;
  s.values.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    s.values[k] = get_le<double>(in);
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError("snapshot: trailing bytes after payload");
  return s;
}

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series_csv(const std::filesystem::path& path, const std::vector<SeriesRecord>& series)
{
  std::ofstream out(path);
  if (!out)
    throw FormatError("series: cannot open '" + path.string() + "' for writing");
  out << kSeriesHeader << '\n';
  for (const SeriesRecord& r : series) {
    out << format_double(r.t) << ',' << format_double(r.dt) << ',' << format_double(r.mass) << ','
        << format_double(r.energy) << ',' << format_double(r.rel_energy) << ',' << format_double(r.pos_l1)
        << ',' << format_double(r.max_val) << ',' << format_double(r.min_val) << ',' << r.n_components
        << ',';
    if (r.hm1_sq)
      out << format_double(*r.hm1_sq);
    out << '\n';
  }
}

std::map<std::string, std::vector<double>> read_csv_columns(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw FormatError("csv: cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line))
    throw FormatError("csv: empty file '" + path.string() + "'");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ','))
      cells.push_back(cell);
    if (!s.empty() && s.back() == ',')
      cells.emplace_back();
    return cells;
  };
  const std::vector<std::string> header = split(line);
  std::map<std::string, std::vector<double>> cols;
  for (const std::string& h : header)
    cols[h];
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty())
      continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size())
      throw FormatError("csv: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(header.size()));
    for (std::size_t k = 0; k < cells.size(); ++k) {
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!cells[k].empty()) {
        char* end = nullptr;
        v = std::strtod(cells[k].c_str(), &end);
        if (end == cells[k].c_str())
          throw FormatError("csv: bad number '" + cells[k] + "' in row " + std::to_string(row));
      }
      cols[header[k]].push_back(v);
    }
  }
  return cols;
}

} // namespace ddiff
