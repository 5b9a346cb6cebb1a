#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scatter/forward.hpp"
#include "scatter/inverse.hpp"

namespace scatter::cli {

// 17 significant digits: enough for double round trips, stable formatting for
// byte-identical reruns.
std::string format_double(double x);

// FNV-1a (64 bit) content digest used in report provenance; deterministic,
// unlike wall-clock stamps.
std::string fnv1a_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a half-written file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    size_t columns() const { return header.size(); }
};

Csv parse_csv(std::string_view text);

// --- domain tables ---------------------------------------------------------

// Full grid, header q,re,im.
std::string forward_csv(const ForwardData& data);

// Accepts either the full grid (first q < 0) or just the q >= 0 half, which
// is then extended with F(-q) = conj F(q). Validates uniform ascending
// spacing and (for full tables) the Hermitian symmetry.
ForwardData parse_forward_csv(const Csv& csv);

// Full grid, header q,xi (real even data).
std::string xi_csv(const Xi& xi);

// Half grid, header q,re,im.
std::string denominator_csv(const Denominator& d);

// Half grid, header q,m.
std::string modulus_csv(const Reconstruction& rec);

// Tabulated radial shape, header r,value.
TabulatedProfile parse_table_csv(const Csv& csv);

// Sample points, header x1,x2,x3.
std::vector<Vec3> parse_points_csv(const Csv& csv);

} // namespace scatter::cli
