#include "nlh/io.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlh/errors.hpp"

namespace nlh {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[16] = {'N', 'L', 'H', 'F', 'I', 'E', 'L', 'D', '\0', '\0', '\0', '\0', '\0', '\0', '\0', '\1'};

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, size_t pos) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    return v;
}

void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(const std::string& in, size_t pos) { return std::bit_cast<double>(get_u64(in, pos)); }

std::uint64_t geometry_tag(Geometry g) {
    switch (g) {
        case Geometry::OneD: return 1;
        case Geometry::Cartesian: return 2;
        case Geometry::Cylindrical: return 3;
    }
    return 0;
}

Geometry tag_geometry(std::uint64_t t) {
    if (t == 1) return Geometry::OneD;
    if (t == 2) return Geometry::Cartesian;
    if (t == 3) return Geometry::Cylindrical;
    throw Error(ErrorCode::IoError, "unknown geometry tag in field file");
}

constexpr size_t kHeaderBytes = 16 + 6 * 8;

}  // namespace

void write_atomic(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw Error(ErrorCode::IoError, "short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot rename onto '" + path.string() + "': " + ec.message());
}

std::string encode_field(const FieldHeader& h, const ComplexField2D& E) {
    std::string out(kMagic, kMagic + 16);
    out.reserve(kHeaderBytes + E.size() * 16);
    put_u64(out, geometry_tag(h.geometry));
    put_u64(out, static_cast<std::uint64_t>(h.N));
    put_u64(out, static_cast<std::uint64_t>(h.M));
    put_f64(out, h.hz);
    put_f64(out, h.hp);
    put_f64(out, h.k0);
    for (const cd& v : E.values()) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
    return out;
}

ComplexField2D decode_field(const std::string& in, FieldHeader* header) {
    if (in.size() < kHeaderBytes || std::memcmp(in.data(), kMagic, 16) != 0)
        throw Error(ErrorCode::IoError, "not a field file");
    FieldHeader h;
    h.geometry = tag_geometry(get_u64(in, 16));
    h.N = static_cast<int>(get_u64(in, 24));
    h.M = static_cast<int>(get_u64(in, 32));
    h.hz = get_f64(in, 40);
    h.hp = get_f64(in, 48);
    h.k0 = get_f64(in, 56);
    ComplexField2D E(h.N, h.M);
    if (in.size() != kHeaderBytes + E.size() * 16) throw Error(ErrorCode::IoError, "field file has the wrong length");
    size_t pos = kHeaderBytes;
    for (cd& v : E.values()) {
        v = cd(get_f64(in, pos), get_f64(in, pos + 8));
        pos += 16;
    }
    if (header) *header = h;
    return E;
}

void write_field(const fs::path& bin, const FieldHeader& h, const ComplexField2D& E) {
    write_atomic(bin, encode_field(h, E));
    nlohmann::json j = {{"format", "NLHFIELD v1, little-endian"},
                        {"geometry", geometry_name(h.geometry)},
                        {"N", h.N},
                        {"M", h.M},
                        {"rows", h.N + 7},
                        {"firstRow", -3},
                        {"hz", h.hz},
                        {"hp", h.hp},
                        {"k0", h.k0},
                        {"layout", "n-major, complex pairs (re, im)"}};
    fs::path side = bin;
    side.replace_extension(".json");
    write_atomic(side, j.dump(2) + "\n");
}

ComplexField2D read_field(const fs::path& bin, FieldHeader* header) {
    std::ifstream in(bin, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + bin.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return decode_field(ss.str(), header);
}

fs::path resolve_output(const std::string& dir) {
    fs::path p(dir);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("NLH_OUTPUT_ROOT"); root && *root) return fs::path(root) / p;
    return p;
}

}  // namespace nlh
