#include "geomech/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace geomech {

namespace {

std::string validated_name(const std::string& name) {
  if (name.empty() || name.find_first_of(",\n\r ") != std::string::npos) {
    throw FormatError("field name must be non-empty without commas, spaces or newlines");
  }
  return name;
}

}  // namespace

void write_field_csv(std::ostream& os, const ScalarField& f, const std::string& name) {
  const int n = f.grid.n();
  os << n << ',' << validated_name(name) << '\n';
  std::string line;
  for (int i = 0; i < n; ++i) {
    line.clear();
    for (int j = 0; j < n; ++j) {
      if (j) line += ',';
      line += fmt::format("{:.17g}", f.values(i, j));
    }
    os << line << '\n';
  }
}

NamedField read_field_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FormatError("field csv: missing header");
  const auto comma = header.find(',');
  if (comma == std::string::npos) throw FormatError("field csv: header must be '<n>,<name>'");
  int n = 0;
  try {
    n = std::stoi(header.substr(0, comma));
  } catch (const std::exception&) {
    throw FormatError("field csv: bad grid size in header");
  }
  NamedField out{header.substr(comma + 1), ScalarField(Grid(n))};
  std::string line;
  for (int i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw FormatError("field csv: expected " + std::to_string(n) + " rows");
    std::istringstream row(line);
    std::string cell;
    int j = 0;
    while (std::getline(row, cell, ',')) {
      if (j >= n) throw FormatError("field csv: too many columns in row " + std::to_string(i));
      try {
        out.field.values(i, j++) = std::stod(cell);
      } catch (const std::exception&) {
        throw FormatError("field csv: bad value in row " + std::to_string(i));
      }
    }
    if (j != n) throw FormatError("field csv: too few columns in row " + std::to_string(i));
  }
  return out;
}

void write_field_binary(std::ostream& os, const ScalarField& f, const std::string& name) {
  static_assert(std::endian::native == std::endian::little, "binary field format assumes a little-endian host");
  const int n = f.grid.n();
  os << n << ' ' << validated_name(name) << '\n';
  os.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(sizeof(double)) * n * n);
}

NamedField read_field_binary(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FormatError("field binary: missing header");
  std::istringstream hs(header);
  int n = 0;
  std::string name;
  if (!(hs >> n >> name)) throw FormatError("field binary: header must be '<n> <name>'");
  NamedField out{name, ScalarField(Grid(n))};
  is.read(reinterpret_cast<char*>(out.field.values.data()), static_cast<std::streamsize>(sizeof(double)) * n * n);
  if (is.gcount() != static_cast<std::streamsize>(sizeof(double)) * n * n) {
    throw FormatError("field binary: truncated payload");
  }
  return out;
}

void write_particles_csv(std::ostream& os, const FlowMap& fm, bool header) {
  if (header) os << "id,label_x,label_y,x,y,t\n";
  for (Eigen::Index p = 0; p < fm.positions.rows(); ++p) {
    os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", p, fm.labels(p, 0), fm.labels(p, 1),
                      fm.positions(p, 0), fm.positions(p, 1), fm.time);
  }
}

}  // namespace geomech
