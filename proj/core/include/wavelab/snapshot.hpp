#pragma once

#include <string>

#include "wavelab/fields.hpp"

namespace wavelab {

/// One grid slice with enough header context to rebuild its geometry.
/// File layout: 8-byte magic "WFGRID1\0", u32 little-endian byte length of a
/// UTF-8 JSON header, the header, then row-major little-endian f64 payload.
struct Snapshot {
    int dim = 2;
    std::array<int, 3> dims{};
    Vec3 origin{};
    Vec3 extent{};
    double h = 0.0;
    double dt = 0.0;
    int time_index = 0;
    std::vector<double> data;
};

void write_snapshot(const Snapshot& snap, const std::string& path);
Snapshot read_snapshot(const std::string& path);

/// Slice k of a field, with grid geometry copied into the header.
Snapshot slice_snapshot(const WaveField& field, int k);

}  // namespace wavelab
