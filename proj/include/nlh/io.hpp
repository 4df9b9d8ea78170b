#pragma once

#include <filesystem>
#include <string>

#include "nlh/field.hpp"
#include "nlh/grid.hpp"

namespace nlh {

struct FieldHeader {
    Geometry geometry = Geometry::Cartesian;
    int N = 0;
    int M = 0;
    double hz = 0.0;
    double hp = 0.0;
    double k0 = 0.0;
};

/// Writes `text` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// 16-byte magic, six little-endian 64-bit header words, then (re, im) pairs n-major.
std::string encode_field(const FieldHeader& h, const ComplexField2D& E);
ComplexField2D decode_field(const std::string& bytes, FieldHeader* header = nullptr);

/// field.bin plus a JSON sidecar field.json duplicating the header.
void write_field(const std::filesystem::path& bin, const FieldHeader& h, const ComplexField2D& E);
ComplexField2D read_field(const std::filesystem::path& bin, FieldHeader* header = nullptr);

/// Resolves a relative output directory against $NLH_OUTPUT_ROOT when set.
std::filesystem::path resolve_output(const std::string& dir);

}  // namespace nlh
