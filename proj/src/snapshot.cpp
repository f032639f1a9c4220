#include "shearlab/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "shearlab/csv.hpp"
#include "shearlab/error.hpp"

namespace shearlab {

namespace {

template <typename T>
void put_le(std::string& out, T v) {
    std::uint64_t bits;
    static_assert(sizeof(T) == 8);
    std::memcpy(&bits, &v, 8);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
    if (pos + 8 > in.size()) throw Error("snapshot: truncated file");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
    pos += 8;
    T v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double time, double nu) {
    const auto& g = field.grid();
    std::string out;
    out.reserve(48 + 8 * g.size());
    put_le<std::int64_t>(out, g.nx());
    put_le<std::int64_t>(out, g.ny());
    put_le<double>(out, g.lx());
    put_le<double>(out, g.ly());
    put_le<double>(out, time);
    put_le<double>(out, nu);
    for (double v : field.values()) put_le<double>(out, v);
    csv::write_atomic(path, out);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open snapshot " + path.string());
    std::string in((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    const auto nx = get_le<std::int64_t>(in, pos);
    const auto ny = get_le<std::int64_t>(in, pos);
    const double lx = get_le<double>(in, pos);
    const double ly = get_le<double>(in, pos);
    const double time = get_le<double>(in, pos);
    const double nu = get_le<double>(in, pos);
    if (nx <= 0 || ny <= 0 || nx > (1 << 20) || ny > (1 << 20)) throw Error("snapshot: bad dimensions");
    GridSpec grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
    if (in.size() != 48 + 8 * grid.size()) throw Error("snapshot: size does not match header");
    std::vector<double> values(grid.size());
    for (auto& v : values) v = get_le<double>(in, pos);
    return {ScalarField(grid, std::move(values)), time, nu};
}

}  // namespace shearlab
