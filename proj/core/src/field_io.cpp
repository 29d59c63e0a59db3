#include "supersde/field_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace supersde {

namespace {

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field: cannot open " + path);
    out.write("SSL1", 4);
    write_raw(out, std::uint32_t(f.grid().dim));
    write_raw(out, std::uint32_t(f.grid().N));
    write_raw(out, double(f.grid().L));
    out.write(reinterpret_cast<const char*>(f.values().data()),
              std::streamsize(f.values().size() * sizeof(double)));
    if (!out) throw std::runtime_error("write_field: short write to " + path);
}

ScalarField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SSL1", 4) != 0)
        throw std::runtime_error("read_field: bad magic in " + path);
    const auto dim = read_raw<std::uint32_t>(in);
    const auto N = read_raw<std::uint32_t>(in);
    const auto L = read_raw<double>(in);
    TorusGrid grid(int(dim), int(N), L);
    std::vector<double> values(grid.size());
    in.read(reinterpret_cast<char*>(values.data()),
            std::streamsize(values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("read_field: truncated file " + path);
    return ScalarField(grid, std::move(values));
}

}  // namespace supersde
