#include "pshenv/grid_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "pshenv/error.hpp"

namespace pshenv {

static_assert(std::endian::native == std::endian::little,
              "PSHG files are little-endian; add byte swapping for this target");

namespace {

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
        throw Error(ErrorCode::IoError, "truncated grid file " + path.string());
    return v;
}

void write_header(std::ostream& os, const Grid& g) {
    os.write("PSHG", 4);
    put<std::uint32_t>(os, kGridFileVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
    for (auto c : g.counts()) put<std::uint32_t>(os, static_cast<std::uint32_t>(c));
    put<double>(os, g.spacing());
    for (auto b : g.base()) put<double>(os, static_cast<double>(b) * g.spacing());
    for (NodeClass c : g.classes()) put<std::uint8_t>(os, static_cast<std::uint8_t>(c));
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    return os;
}

}  // namespace

void write_grid(const std::filesystem::path& path, const Grid& grid) {
    auto os = open_out(path);
    write_header(os, grid);
    if (!os) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

void write_grid_function(const std::filesystem::path& path, const GridFunction& u) {
    auto os = open_out(path);
    write_header(os, u.grid());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto& g = u.grid();
    for (std::size_t i = 0; i < g.size(); ++i)
        put<double>(os, g.cls(i) == NodeClass::Exterior ? nan : u[i]);
    if (!os) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

GridFile read_grid_file(const std::filesystem::path& path, const StencilSet* stencil) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "PSHG", 4) != 0)
        throw Error(ErrorCode::IoError, path.string() + " is not a PSHG file");
    auto version = get<std::uint32_t>(is, path);
    if (version != kGridFileVersion)
        throw Error(ErrorCode::IoError, "unsupported PSHG version " + std::to_string(version));
    auto n = static_cast<int>(get<std::uint32_t>(is, path));
    if (n != 1 && n != 2) throw Error(ErrorCode::IoError, "bad dimension in " + path.string());
    std::array<std::int64_t, 4> counts{1, 1, 1, 1}, base{};
    std::size_t total = 1;
    for (int a = 0; a < 2 * n; ++a) {
        counts[a] = get<std::uint32_t>(is, path);
        if (counts[a] == 0) throw Error(ErrorCode::IoError, "zero axis length in " + path.string());
        total *= static_cast<std::size_t>(counts[a]);
    }
    double h = get<double>(is, path);
    if (!(h > 0.0)) throw Error(ErrorCode::IoError, "bad spacing in " + path.string());
    for (int a = 0; a < 2 * n; ++a) {
        double origin = get<double>(is, path);
        double k = std::round(origin / h);
        base[a] = static_cast<std::int64_t>(k);
    }
    std::vector<NodeClass> cls(total);
    for (auto& c : cls) {
        auto b = get<std::uint8_t>(is, path);
        if (b > 2) throw Error(ErrorCode::IoError, "bad node class in " + path.string());
        c = static_cast<NodeClass>(b);
    }
    StencilSet st = stencil ? *stencil : StencilSet::standard(n);
    GridFile out;
    out.grid = Grid::assemble(n, h, base, counts, std::move(cls), std::move(st));

    if (is.peek() == std::char_traits<char>::eof()) return out;
    std::vector<double> values(total);
    if (!is.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(total * sizeof(double))))
        throw Error(ErrorCode::IoError, "truncated values in " + path.string());
    out.values = GridFunction(out.grid, std::move(values));
    return out;
}

}  // namespace pshenv
