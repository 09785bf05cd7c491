#include "wavelab/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace wavelab {

static_assert(std::endian::native == std::endian::little,
              "snapshot payload is written as native little-endian doubles");

namespace {

constexpr char kMagic[8] = {'W', 'F', 'G', 'R', 'I', 'D', '1', '\0'};

}  // namespace

void write_snapshot(const Snapshot& snap, const std::string& path) {
    std::size_t cells = 1;
    for (int a = 0; a < snap.dim; ++a) cells *= static_cast<std::size_t>(snap.dims[a]);
    if (snap.data.size() != cells)
        throw ValidationError("snapshot payload size does not match dims", "data");
    for (double v : snap.data)
        if (!std::isfinite(v)) throw ValidationError("snapshot payload must be finite", "data");

    nlohmann::ordered_json hdr;
    hdr["dims"] = std::vector<int>(snap.dims.begin(), snap.dims.begin() + snap.dim);
    hdr["origin"] = std::vector<double>(snap.origin.begin(), snap.origin.begin() + snap.dim);
    hdr["extent"] = std::vector<double>(snap.extent.begin(), snap.extent.begin() + snap.dim);
    hdr["h"] = snap.h;
    hdr["dt"] = snap.dt;
    hdr["time_index"] = snap.time_index;
    hdr["endianness"] = "LE";
    hdr["dtype"] = "f64";
    const std::string hs = hdr.dump();

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open snapshot file for writing: " + path, "path");
    f.write(kMagic, 8);
    const std::uint32_t len = static_cast<std::uint32_t>(hs.size());
    f.write(reinterpret_cast<const char*>(&len), 4);
    f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    f.write(reinterpret_cast<const char*>(snap.data.data()),
            static_cast<std::streamsize>(snap.data.size() * sizeof(double)));
    if (!f) throw ValidationError("short write on snapshot file: " + path, "path");
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open snapshot file: " + path, "path");
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kMagic, 8) != 0)
        throw BadMagic("snapshot magic mismatch in " + path);
    std::uint32_t len = 0;
    f.read(reinterpret_cast<char*>(&len), 4);
    if (!f) throw HeaderMismatch("snapshot header length truncated in " + path);
    std::string hs(len, '\0');
    f.read(hs.data(), static_cast<std::streamsize>(len));
    if (!f) throw HeaderMismatch("snapshot header truncated in " + path);

    nlohmann::json hdr;
    try {
        hdr = nlohmann::json::parse(hs);
    } catch (const nlohmann::json::exception& e) {
        throw HeaderMismatch(std::string("snapshot header is not valid JSON: ") + e.what());
    }

    Snapshot snap;
    try {
        if (hdr.at("endianness").get<std::string>() != "LE")
            throw HeaderMismatch("snapshot endianness must be LE");
        if (hdr.at("dtype").get<std::string>() != "f64")
            throw HeaderMismatch("snapshot dtype must be f64");
        auto dims = hdr.at("dims").get<std::vector<int>>();
        auto origin = hdr.at("origin").get<std::vector<double>>();
        auto extent = hdr.at("extent").get<std::vector<double>>();
        if (dims.size() < 2 || dims.size() > 3 || origin.size() != dims.size() ||
            extent.size() != dims.size())
            throw HeaderMismatch("snapshot dims/origin/extent are inconsistent");
        snap.dim = static_cast<int>(dims.size());
        for (int a = 0; a < snap.dim; ++a) {
            if (dims[static_cast<std::size_t>(a)] <= 0)
                throw HeaderMismatch("snapshot dims must be positive");
            snap.dims[a] = dims[static_cast<std::size_t>(a)];
            snap.origin[a] = origin[static_cast<std::size_t>(a)];
            snap.extent[a] = extent[static_cast<std::size_t>(a)];
        }
        for (int a = snap.dim; a < 3; ++a) snap.dims[a] = 1;  // grid convention
        snap.h = hdr.at("h").get<double>();
        snap.dt = hdr.at("dt").get<double>();
        snap.time_index = hdr.at("time_index").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw HeaderMismatch(std::string("snapshot header field error: ") + e.what());
    }

    std::size_t cells = 1;
    for (int a = 0; a < snap.dim; ++a) cells *= static_cast<std::size_t>(snap.dims[a]);
    snap.data.resize(cells);
    f.read(reinterpret_cast<char*>(snap.data.data()),
           static_cast<std::streamsize>(cells * sizeof(double)));
    if (static_cast<std::size_t>(f.gcount()) != cells * sizeof(double))
        throw TruncatedPayload("snapshot payload shorter than header dims in " + path);
    return snap;
}

Snapshot slice_snapshot(const WaveField& field, int k) {
    if (k < 0 || static_cast<std::size_t>(k) >= field.slices.size())
        throw ValidationError("slice index out of range", "k");
    Snapshot s;
    s.dim = field.grid.dim;
    s.dims = field.grid.n;
    s.origin = field.grid.origin;
    s.extent = field.grid.extent;
    s.h = field.grid.h;
    s.dt = field.grid.dt;
    s.time_index = k;
    s.data = field.slices[static_cast<std::size_t>(k)];
    return s;
}

}  // namespace wavelab
