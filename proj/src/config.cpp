#include "glacier/config.hpp"

#include "glacier/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace glacier {

namespace {

// Every recognized key with its default. Empty string means "not set".
const std::pair<const char*, const char*> kDefaults[] = {
    {"io.out_dir", "out"},
    {"io.format", "esri_ascii"},
    {"io.write_normalized", "false"},
    {"grid.target_cellsize", "15"},
    {"grid.window", "512"},
    {"grid.stride", "32"},
    {"terrain.sad_radius", "5"},
    {"terrain.smooth_radius", "2"},
    {"spectral.snow_thresh", "-0.4"},
    {"spectral.veg_thresh", "0.3"},
    {"spectral.slope_max", "24"},
    {"morphology.min_area", "445"},
    {"morphology.hole_max_area", "2000"},
    {"morphology.hole_max_slope", "24"},
    {"morphology.close_radius", "2"},
    {"terminus.low_alt_fraction", "0.15"},
    {"terminus.box_pad", "10"},
    {"terminus.iou_thresh", "0.7"},
    {"terminus.knn_k", "5"},
    {"terminus.ring_width", "5"},
    {"scaz.min_isolated_area", "445"},
    {"eval.margin", "32"},
    {"eval.sus_elevation", ""},
    {"segment.baseline_enabled", "false"},
    {"inputs.dem", ""},
    {"inputs.b1", ""},
    {"inputs.b2", ""},
    {"inputs.b3", ""},
    {"inputs.b4", ""},
    {"inputs.b5", ""},
    {"inputs.b6", ""},
    {"inputs.b7", ""},
    {"inputs.b8", ""},
    {"inputs.b9", ""},
    {"inputs.b10", ""},
    {"inputs.b11", ""},
    {"inputs.d1", ""},
    {"inputs.d2", ""},
    {"inputs.features", ""},
    {"inputs.pred", ""},
    {"inputs.ref", ""},
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::defaults() {
    Config cfg;
    for (auto& [key, value] : kDefaults) cfg.values_.emplace(key, value);
    return cfg;
}

Config Config::parse(const std::string& text, const std::string& base_dir,
                     const std::string& source_name) {
    Config cfg = defaults();
    cfg.base_dir_ = base_dir.empty() ? "." : base_dir;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = source_name + ":" + std::to_string(lineno);
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error(where + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw config_error(where + ": empty section name");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw config_error(where + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error(where + ": empty key");
        if (section.empty()) throw config_error(where + ": key outside any section");
        std::string full = section + "." + key;
        auto it = cfg.values_.find(full);
        if (it == cfg.values_.end()) throw config_error(where + ": unknown config key: " + full);
        it->second = value;
    }
    cfg.validate();
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    size_t slash = path.find_last_of('/');
    std::string dir = slash == std::string::npos ? "." : path.substr(0, slash);
    return parse(buf.str(), dir, path);
}

bool Config::is_set(const std::string& key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

const std::string& Config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw config_error("unknown config key: " + key);
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

int Config::get_int(const std::string& key) const {
    const std::string& v = raw(key);
    int out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw config_error(key + ": not an integer: '" + v + "'");
    return out;
}

double Config::get_double(const std::string& key) const {
    const std::string& v = raw(key);
    double out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw config_error(key + ": not a number: '" + v + "'");
    return out;
}

float Config::get_float(const std::string& key) const { return (float)get_double(key); }

bool Config::get_bool(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw config_error(key + ": not a boolean: '" + v + "'");
}

std::string Config::resolve_path(const std::string& key) const {
    const std::string& v = raw(key);
    if (v.empty() || v.front() == '/') return v;
    return base_dir_ + "/" + v;
}

std::vector<std::string> Config::resolve_path_list(const std::string& key) const {
    std::vector<std::string> out;
    const std::string& v = raw(key);
    size_t pos = 0;
    while (pos <= v.size()) {
        size_t comma = v.find(',', pos);
        std::string item = trim(comma == std::string::npos ? v.substr(pos)
                                                           : v.substr(pos, comma - pos));
        if (!item.empty()) out.push_back(item.front() == '/' ? item : base_dir_ + "/" + item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw config_error("unknown config key: " + key);
    it->second = value;
}

void Config::validate() const {
    auto positive_int = [&](const std::string& key) {
        if (get_int(key) < 1) throw config_error(key + " must be >= 1");
    };
    auto nonneg_int = [&](const std::string& key) {
        if (get_int(key) < 0) throw config_error(key + " must be >= 0");
    };
    auto unit_open = [&](const std::string& key) {
        double v = get_double(key);
        if (!(v > 0.0 && v < 1.0)) throw config_error(key + " must lie strictly between 0 and 1");
    };
    if (!(get_double("grid.target_cellsize") > 0.0))
        throw config_error("grid.target_cellsize must be > 0");
    positive_int("grid.window");
    positive_int("grid.stride");
    nonneg_int("terrain.sad_radius");
    nonneg_int("terrain.smooth_radius");
    double snow = get_double("spectral.snow_thresh");
    if (!(snow > -1.0 && snow < 1.0))
        throw config_error("spectral.snow_thresh must lie strictly between -1 and 1");
    nonneg_int("morphology.min_area");
    nonneg_int("morphology.hole_max_area");
    nonneg_int("morphology.close_radius");
    unit_open("terminus.low_alt_fraction");
    unit_open("terminus.iou_thresh");
    nonneg_int("terminus.box_pad");
    positive_int("terminus.knn_k");
    positive_int("terminus.ring_width");
    nonneg_int("scaz.min_isolated_area");
    nonneg_int("eval.margin");
    std::string fmt = get_string("io.format");
    if (fmt != "esri_ascii" && fmt != "raw_f32")
        throw config_error("io.format must be esri_ascii or raw_f32");
    get_bool("io.write_normalized");
    get_bool("segment.baseline_enabled");
    if (is_set("eval.sus_elevation")) get_double("eval.sus_elevation");
    for (auto& [key, value] : values_) {
        if (key.rfind("inputs.", 0) != 0 || value.empty()) continue;
        for (const std::string& path : resolve_path_list(key)) {
            std::ifstream probe(path, std::ios::binary);
            if (!probe) throw config_error(key + ": file not found: " + path);
        }
    }
}

std::string Config::serialize() const {
    std::string out, section;
    for (auto& [key, value] : values_) {
        size_t dot = key.find('.');
        std::string sec = key.substr(0, dot);
        if (sec != section) {
            if (!out.empty()) out += '\n';
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += key.substr(dot + 1) + " = " + value + "\n";
    }
    return out;
}

} // namespace glacier
