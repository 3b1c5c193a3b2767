#pragma once

#include <string>

#include "acma/field.hpp"

namespace acma {

/// CSV with grid metadata in '#' comment lines, then one row per active point:
///   index,x1,y1,...,value,trace
/// The trace column is empty except on band points of fields carrying one.
/// Numbers use the shortest round-trip decimal form, so import(export(u)) == u bit for bit.
void export_field(const ScalarField& field, const std::string& path);

/// Reads a field written by export_field onto `grid`. Throws GridMismatch when
/// the metadata or the active set differ, ParseError (with line number) on
/// malformed or non-finite entries, IoError when the file cannot be read.
ScalarField import_field(const std::string& path, GridPtr grid);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace acma
