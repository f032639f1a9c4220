#pragma once

// Flat binary snapshot: little-endian header
//   int64 nx, int64 ny, float64 Lx, float64 Ly, float64 time, float64 nu
// followed by nx*ny float64 samples, row-major (rows of fixed y).

#include <filesystem>

#include "shearlab/spectral.hpp"

namespace shearlab {

struct Snapshot {
    ScalarField field;
    double time = 0.0;
    double nu = 0.0;
};

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double time, double nu);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace shearlab
