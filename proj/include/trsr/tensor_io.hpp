#pragma once

#include <filesystem>
#include <iosfwd>

#include "trsr/tensor.hpp"

namespace trsr {

// Text tensor format used by the `decompose` command:
//
//   shape: d1 d2 ... dN
//   v0 v1 v2 ...
//
// Values are whitespace separated in storage order (first mode fastest).

DenseTensor read_tensor(std::istream& in);
DenseTensor read_tensor(const std::filesystem::path& path);
void write_tensor(std::ostream& out, const DenseTensor& t);
void write_tensor(const std::filesystem::path& path, const DenseTensor& t);

}  // namespace trsr
