#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qkin/density_grid.hpp"
#include "qkin/rmt.hpp"

namespace qkin {

// Binary snapshot container: 16-byte magic, then version, config hash, seed,
// grid dims as 64-bit little-endian integers, extents and time stamp as
// 64-bit little-endian floats, then row-major (re, im) float64 pairs.
struct SnapshotMeta {
    std::uint64_t version = 1;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

void write_snapshot(const std::filesystem::path& path, const DensityMatrixGrid& grid,
                    const SnapshotMeta& meta);

DensityMatrixGrid read_snapshot(const std::filesystem::path& path, SnapshotMeta* meta = nullptr);

// Bath sample container: same header scheme, then the shared spectrum and
// one dense complex matrix per parameter point.
void write_bath_sample(const std::filesystem::path& path, const BathSample& sample,
                       SymmetryClass symmetry, const SnapshotMeta& meta);

BathSample read_bath_sample(const std::filesystem::path& path, SymmetryClass* symmetry = nullptr,
                            SnapshotMeta* meta = nullptr);

// Columnar text with a provenance header line; one row per line.
class TableWriter {
  public:
    TableWriter(const std::filesystem::path& path, const SnapshotMeta& meta,
                const std::vector<std::string>& columns);
    ~TableWriter();
    void row(const std::vector<double>& values);

  private:
    struct Impl;
    Impl* impl_;
};

}  // namespace qkin
