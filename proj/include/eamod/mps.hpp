#pragma once

#include <string>

#include "eamod/milp_core.hpp"

namespace eamod {

/// Writes the model in fixed-format MPS with 8-character mangled names
/// (R<index> / C<index>) plus a sidecar `<path>.names.json` mapping mangled
/// names back to the original ones. Values are printed with just enough
/// digits to round-trip exactly, so re-importing reproduces the model
/// bit for bit. Binaries are wrapped in INTORG/INTEND marker pairs.
void write_mps(const MilpModel& model, const std::string& path);

/// Reads an MPS file written by write_mps (or a compatible subset: N/L/G/E
/// rows, COLUMNS with integer markers, RHS, BOUNDS with UP/LO/FX/BV/MI/PL).
/// Restores original names from the sidecar when present. Integer variables
/// must be binary-bounded. The result carries no fleet variable keys.
MilpModel read_mps(const std::string& path);

}  // namespace eamod
