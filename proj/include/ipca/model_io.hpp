#pragma once

#include "ipca/ipca.hpp"

#include <filesystem>
#include <iosfwd>

namespace ipca {

// Binary container, all integers and doubles little-endian:
//   "IPCAMODL" | u32 version | i32 degree | f64 theta | i32 dim | u8 centered
//   | X | Z | kzz_inv_sqrt | U | S | V | kxz_mean
// Matrices are i64 rows, i64 cols, then row-major f64 entries; vectors are
// i64 length then entries. Doubles are stored as raw IEEE-754 bit patterns.

void write_model(std::ostream& os, const IpcaModel& model);
IpcaModel read_model(std::istream& is);

/// Writes to a temporary sibling and renames over `path`.
void save_model(const std::filesystem::path& path, const IpcaModel& model);
IpcaModel load_model(const std::filesystem::path& path);

}  // namespace ipca
