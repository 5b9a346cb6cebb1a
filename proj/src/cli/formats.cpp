#include "formats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace scatter::cli {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void atomic_write(const fs::path& path, std::string_view content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ValidationError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw ValidationError("cannot rename into place: " + path.string());
}

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string trimmed(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

double parse_number(const std::string& field) {
    const std::string t = trimmed(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ValidationError("malformed number in table: '" + field + "'");
    }
    return value;
}

} // namespace

Csv parse_csv(std::string_view text) {
    Csv csv;
    size_t start = 0;
    bool have_header = false;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line = trimmed(std::string(text.substr(start, end - start)));
        start = end + 1;
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> fields = split(line, ',');
        if (!have_header) {
            for (const std::string& f : fields) csv.header.push_back(trimmed(f));
            have_header = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) row.push_back(parse_number(f));
        if (row.size() != csv.header.size()) {
            throw ValidationError("row width does not match header");
        }
        csv.rows.push_back(std::move(row));
    }
    if (!have_header) throw ValidationError("empty table");
    return csv;
}

// ---------------------------------------------------------------------------
// Domain tables
// ---------------------------------------------------------------------------

namespace {

void require_header(const Csv& csv, std::initializer_list<const char*> names) {
    if (csv.header.size() != names.size()) {
        throw ValidationError("unexpected table header");
    }
    size_t i = 0;
    for (const char* name : names) {
        if (csv.header[i++] != name) {
            throw ValidationError(std::string("expected header column '") + name + "'");
        }
    }
}

void require_uniform_ascending(const std::vector<double>& q) {
    if (q.size() < 2) throw ValidationError("table needs at least two rows");
    const double dq = q[1] - q[0];
    if (!(dq > 0.0)) throw ValidationError("momenta must be strictly ascending");
    for (size_t i = 1; i < q.size(); ++i) {
        const double step = q[i] - q[i - 1];
        if (std::abs(step - dq) > 1e-9 * std::max(1.0, std::abs(dq))) {
            throw ValidationError("momenta are not uniformly spaced");
        }
    }
}

} // namespace

std::string forward_csv(const ForwardData& data) {
    std::string out = "q,re,im\n";
    const UniformGrid& grid = data.samples.grid;
    for (int j = 0; j < grid.count; ++j) {
        const Complex v = data.samples.values[static_cast<size_t>(j)];
        out += format_double(grid.point(j));
        out += ',';
        out += format_double(v.real());
        out += ',';
        out += format_double(v.imag());
        out += '\n';
    }
    return out;
}

ForwardData parse_forward_csv(const Csv& csv) {
    require_header(csv, {"q", "re", "im"});
    if (csv.rows.empty()) throw ValidationError("forward data table has no rows");
    std::vector<double> q;
    std::vector<Complex> v;
    q.reserve(csv.rows.size());
    v.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        q.push_back(row[0]);
        v.emplace_back(row[1], row[2]);
    }
    require_uniform_ascending(q);

    ForwardData data;
    if (q.front() < 0.0) {
        // Full grid: q_j = (j - N/2) dq with the -L endpoint present and +L
        // absent.
        const int n = static_cast<int>(q.size());
        if (n % 2 != 0) throw ValidationError("full-grid table must have an even row count");
        const double dq = q[1] - q[0];
        const double l = -q.front();
        const UniformGrid grid = make_uniform_grid(l, n);
        if (std::abs(grid.spacing() - dq) > 1e-9 * dq ||
            std::abs(q[static_cast<size_t>(n / 2)]) > 1e-9 * dq) {
            throw ValidationError("rows do not form a symmetric grid around q = 0");
        }
        SampledFunction f{grid, std::move(v), Symmetry::hermitian};
        double scale = 1e-300;
        for (const Complex& z : f.values) scale = std::max(scale, std::abs(z));
        if (symmetry_defect(f, Symmetry::hermitian) > 1e-6 * scale) {
            throw ValidationError("forward data is not Hermitian-even");
        }
        data.samples = std::move(f);
    } else {
        // Half data starting at q = 0; mirror with conjugation.
        if (q.front() != 0.0) throw ValidationError("half-grid table must start at q = 0");
        const int m = static_cast<int>(q.size());
        if (m < 3) throw ValidationError("half-grid table needs at least three rows");
        const UniformGrid grid = make_uniform_grid(q.back(), 2 * (m - 1));
        data.samples = extend_hermitian(grid, v, 1e-6);
    }
    return data;
}

std::string xi_csv(const Xi& xi) {
    std::string out = "q,xi\n";
    const UniformGrid& grid = xi.samples.grid;
    for (int j = 0; j < grid.count; ++j) {
        out += format_double(grid.point(j));
        out += ',';
        out += format_double(xi.samples.values[static_cast<size_t>(j)].real());
        out += '\n';
    }
    return out;
}

std::string denominator_csv(const Denominator& d) {
    std::string out = "q,re,im\n";
    for (int k = 0; k < d.grid.radial_count(); ++k) {
        const Complex v = d.at_index(k);
        out += format_double(d.grid.radial_point(k));
        out += ',';
        out += format_double(v.real());
        out += ',';
        out += format_double(v.imag());
        out += '\n';
    }
    return out;
}

std::string modulus_csv(const Reconstruction& rec) {
    std::string out = "q,m\n";
    for (int k = 0; k < rec.grid.radial_count(); ++k) {
        out += format_double(rec.grid.radial_point(k));
        out += ',';
        out += format_double(rec.modulus[static_cast<size_t>(k)]);
        out += '\n';
    }
    return out;
}

TabulatedProfile parse_table_csv(const Csv& csv) {
    require_header(csv, {"r", "value"});
    TabulatedProfile t;
    for (const auto& row : csv.rows) {
        t.radius.push_back(row[0]);
        t.value.push_back(row[1]);
    }
    return t;
}

std::vector<Vec3> parse_points_csv(const Csv& csv) {
    require_header(csv, {"x1", "x2", "x3"});
    if (csv.rows.empty()) throw ValidationError("points table has no rows");
    std::vector<Vec3> pts;
    pts.reserve(csv.rows.size());
    for (const auto& row : csv.rows) pts.push_back({row[0], row[1], row[2]});
    return pts;
}

} // namespace scatter::cli
