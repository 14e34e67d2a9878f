#include "glacier/grid_io.hpp"

#include "glacier/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace glacier {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return (char)std::tolower(c); });
    return s;
}

// Shortest representation that parses back to the same bits.
template <typename T>
std::string num_to_string(T v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok, const std::string& where) {
    double v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw io_error(where + ": bad numeric value '" + tok + "'");
    return v;
}

} // namespace

Grid read_esri_ascii(const std::string& path) {
    std::string text = read_file(path);
    std::istringstream in(text);

    Grid g;
    bool have_ncols = false, have_nrows = false, have_xll = false,
         have_yll = false, have_cell = false;
    long long ncols = 0, nrows = 0;

    // Header lines start with a keyword; the first numeric token ends the
    // header. Line numbers are tracked for error messages only.
    std::string line;
    int line_no = 0;
    std::streampos data_start = 0;
    while (true) {
        data_start = in.tellg();
        if (!std::getline(in, line)) break;
        ++line_no;
        std::istringstream ls(line);
        std::string key, val, extra;
        if (!(ls >> key)) continue; // blank line
        if (!std::isalpha((unsigned char)key[0])) break;
        std::string where = path + ":" + std::to_string(line_no);
        if (!(ls >> val))
            throw io_error(where + ": header field '" + key + "' has no value");
        if (ls >> extra)
            throw io_error(where + ": trailing token '" + extra + "' after '" + key + "'");
        std::string k = lower(key);
        if (k == "ncols") {
            ncols = (long long)parse_double(val, where + " (ncols)");
            have_ncols = true;
        } else if (k == "nrows") {
            nrows = (long long)parse_double(val, where + " (nrows)");
            have_nrows = true;
        } else if (k == "xllcorner") {
            g.origin_x = parse_double(val, where + " (xllcorner)");
            have_xll = true;
        } else if (k == "yllcorner") {
            g.origin_y = parse_double(val, where + " (yllcorner)");
            have_yll = true;
        } else if (k == "cellsize") {
            g.cellsize = parse_double(val, where + " (cellsize)");
            have_cell = true;
        } else if (k == "nodata_value") {
            g.nodata = (float)parse_double(val, where + " (NODATA_value)");
        } else {
            throw io_error(where + ": unknown header field '" + key + "'");
        }
    }
    auto require = [&](bool have, const char* field) {
        if (!have) throw io_error(path + ": header is missing '" + std::string(field) + "'");
    };
    require(have_ncols, "ncols");
    require(have_nrows, "nrows");
    require(have_xll, "xllcorner");
    require(have_yll, "yllcorner");
    require(have_cell, "cellsize");
    if (ncols <= 0 || nrows <= 0)
        throw io_error(path + ": non-positive grid dimensions");
    if (g.cellsize <= 0)
        throw io_error(path + ": non-positive cellsize");

    g.width = (int)ncols;
    g.height = (int)nrows;
    size_t expect = (size_t)ncols * (size_t)nrows;
    g.cells.reserve(expect);

    // Cell values: free-form whitespace separation from the first
    // non-header line onward.
    const char* p = text.data() + (data_start < 0 ? text.size() : (size_t)data_start);
    const char* end = text.data() + text.size();
    while (p < end) {
        while (p < end && std::isspace((unsigned char)*p)) ++p;
        if (p >= end) break;
        float v = 0;
        auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc()) {
            const char* q = p;
            while (q < end && !std::isspace((unsigned char)*q)) ++q;
            throw io_error(path + ": bad cell value '" + std::string(p, q) + "' at index " +
                           std::to_string(g.cells.size()));
        }
        if (g.cells.size() == expect)
            throw structural_error(path + ": more than " + std::to_string(expect) +
                                   " cell values for " + std::to_string(ncols) + "x" +
                                   std::to_string(nrows));
        g.cells.push_back(v);
        p = res.ptr;
    }
    if (g.cells.size() != expect)
        throw structural_error(path + ": expected " + std::to_string(expect) +
                               " cell values, got " + std::to_string(g.cells.size()));
    return g;
}

void write_esri_ascii(const Grid& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "ncols " << g.width << "\n";
    out << "nrows " << g.height << "\n";
    out << "xllcorner " << num_to_string(g.origin_x) << "\n";
    out << "yllcorner " << num_to_string(g.origin_y) << "\n";
    out << "cellsize " << num_to_string(g.cellsize) << "\n";
    out << "NODATA_value " << num_to_string(g.nodata) << "\n";
    std::string row;
    for (int r = 0; r < g.height; ++r) {
        row.clear();
        for (int c = 0; c < g.width; ++c) {
            if (c) row.push_back(' ');
            row += num_to_string(g.at(r, c));
        }
        row.push_back('\n');
        out << row;
    }
    if (!out) throw io_error("short write to '" + path + "'");
}

namespace {

constexpr bool kLittle = std::endian::native == std::endian::little;

float load_le_f32(const unsigned char* p) {
    uint32_t u;
    if constexpr (kLittle) {
        std::memcpy(&u, p, 4);
    } else {
        u = (uint32_t)p[0] | (uint32_t)p[1] << 8 | (uint32_t)p[2] << 16 | (uint32_t)p[3] << 24;
    }
    return std::bit_cast<float>(u);
}

void store_le_f32(unsigned char* p, float v) {
    uint32_t u = std::bit_cast<uint32_t>(v);
    if constexpr (kLittle) {
        std::memcpy(p, &u, 4);
    } else {
        p[0] = (unsigned char)(u & 0xff);
        p[1] = (unsigned char)(u >> 8 & 0xff);
        p[2] = (unsigned char)(u >> 16 & 0xff);
        p[3] = (unsigned char)(u >> 24 & 0xff);
    }
}

} // namespace

Grid read_raw_f32(const std::string& path) {
    std::string sidecar_path = path + ".json";
    std::ifstream sc(sidecar_path);
    if (!sc) throw io_error("missing sidecar '" + sidecar_path + "'");
    nlohmann::json j;
    try {
        sc >> j;
    } catch (const nlohmann::json::exception& e) {
        throw io_error(sidecar_path + ": " + e.what());
    }
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key))
            throw io_error(sidecar_path + ": missing key '" + std::string(key) + "'");
        if (!j[key].is_number())
            throw io_error(sidecar_path + ": key '" + std::string(key) + "' is not a number");
        return j[key];
    };
    Grid g;
    g.width = need("width").get<int>();
    g.height = need("height").get<int>();
    g.cellsize = need("cellsize").get<double>();
    g.origin_x = need("xllcorner").get<double>();
    g.origin_y = need("yllcorner").get<double>();
    g.nodata = need("nodata").get<float>();
    if (g.width <= 0 || g.height <= 0)
        throw io_error(sidecar_path + ": non-positive grid dimensions");
    if (g.cellsize <= 0)
        throw io_error(sidecar_path + ": non-positive cellsize");

    std::string payload = read_file(path);
    size_t expect = (size_t)g.width * g.height * 4;
    if (payload.size() != expect)
        throw structural_error(path + ": payload is " + std::to_string(payload.size()) +
                               " bytes, sidecar dimensions need " + std::to_string(expect));
    g.cells.resize((size_t)g.width * g.height);
    const unsigned char* p = (const unsigned char*)payload.data();
    for (size_t i = 0; i < g.cells.size(); ++i) g.cells[i] = load_le_f32(p + i * 4);
    return g;
}

void write_raw_f32(const Grid& g, const std::string& path) {
    std::string bytes(g.cells.size() * 4, '\0');
    unsigned char* p = (unsigned char*)bytes.data();
    for (size_t i = 0; i < g.cells.size(); ++i) store_le_f32(p + i * 4, g.cells[i]);
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw io_error("cannot write '" + path + "'");
        out.write(bytes.data(), (std::streamsize)bytes.size());
        if (!out) throw io_error("short write to '" + path + "'");
    }
    nlohmann::json j;
    j["width"] = g.width;
    j["height"] = g.height;
    j["cellsize"] = g.cellsize;
    j["xllcorner"] = g.origin_x;
    j["yllcorner"] = g.origin_y;
    j["nodata"] = g.nodata;
    std::ofstream sc(path + ".json", std::ios::binary);
    if (!sc) throw io_error("cannot write '" + path + ".json'");
    sc << j.dump(2) << "\n";
    if (!sc) throw io_error("short write to '" + path + ".json'");
}

namespace {
bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
} // namespace

Grid read_grid(const std::string& path) {
    if (ends_with(path, ".asc")) return read_esri_ascii(path);
    if (ends_with(path, ".raw")) return read_raw_f32(path);
    throw io_error("unsupported raster extension on '" + path + "' (use .asc or .raw)");
}

void write_grid(const Grid& g, const std::string& path) {
    if (ends_with(path, ".asc")) return write_esri_ascii(g, path);
    if (ends_with(path, ".raw")) return write_raw_f32(g, path);
    throw io_error("unsupported raster extension on '" + path + "' (use .asc or .raw)");
}

void require_mask(const Grid& g, const std::string& name) {
    for (size_t i = 0; i < g.cells.size(); ++i) {
        float v = g.cells[i];
        if (v == 0.0f || v == 1.0f || g.is_nodata(v)) continue;
        throw structural_error("mask '" + name + "' holds non-binary value " +
                               std::to_string(v) + " at cell " + std::to_string(i));
    }
}

} // namespace glacier
