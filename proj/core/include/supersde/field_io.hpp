#pragma once

#include <string>

#include "supersde/field.hpp"

namespace supersde {

/// Binary field snapshot, format "SSL1":
///   bytes 0..3   magic "SSL1"
///   uint32       dim (little-endian)
///   uint32       N
///   float64      L
///   float64[N^dim] values, row-major (last axis fastest)
void write_field(const std::string& path, const ScalarField& f);
ScalarField read_field(const std::string& path);

}  // namespace supersde
