#pragma once

#include <map>
#include <string>
#include <vector>

namespace glacier {

// Sectioned key/value configuration. Keys are fixed: parsing starts from the
// default set and rejects anything outside it, so typos surface as errors
// instead of silently reverting to defaults. Values keep their source text;
// typed getters parse on access. Relative input paths resolve against the
// directory containing the config file.
class Config {
public:
    static Config defaults();
    static Config load(const std::string& path);
    // Parse from text; relative paths resolve against base_dir.
    static Config parse(const std::string& text, const std::string& base_dir,
                        const std::string& source_name = "<config>");

    bool is_set(const std::string& key) const; // key exists and value nonempty
    const std::string& raw(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    float get_float(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    // Empty stays empty; absolute paths pass through.
    std::string resolve_path(const std::string& key) const;
    std::vector<std::string> resolve_path_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value); // key must exist

    // Canonical text form: sections and keys in sorted order. Two configs
    // with equal effective values serialize identically.
    std::string serialize() const;
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    void validate() const;

    std::map<std::string, std::string> values_;
    std::string base_dir_ = ".";
};

} // namespace glacier
