#pragma once

// Field and particle serialization.
//
// Field CSV:    first line "<n>,<name>", then n rows of n comma-separated
//               values (row i holds x = i h), printed with 17 significant digits.
// Field binary: first line "<n> <name>\n", then n*n little-endian doubles,
//               row-major.
// Particle CSV: header "id,label_x,label_y,x,y,t", one row per particle.

#include <iosfwd>
#include <string>

#include "geomech/fieldcalc.hpp"
#include "geomech/fluid2d.hpp"

namespace geomech {

struct NamedField {
  std::string name;
  ScalarField field;
};

void write_field_csv(std::ostream& os, const ScalarField& f, const std::string& name);
NamedField read_field_csv(std::istream& is);

void write_field_binary(std::ostream& os, const ScalarField& f, const std::string& name);
NamedField read_field_binary(std::istream& is);

void write_particles_csv(std::ostream& os, const FlowMap& fm, bool header = true);

}  // namespace geomech
