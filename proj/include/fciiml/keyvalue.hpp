#pragma once

#include <map>
#include <string>
#include <vector>

namespace fciiml {

/// Ordered `key = value` text store used for constants, configs, truth specs
/// and manifests. Lines starting with `#` are comments. Keys are unique.
class KeyValueFile {
public:
    static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
    static KeyValueFile load(const std::string& path);

    void save(const std::string& path) const;
    std::string to_string() const;

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
    void set_comment(const std::string& comment);

    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int_or(const std::string& key, long long fallback) const;

    const std::vector<std::string>& keys() const { return order_; }
    const std::string& origin() const { return origin_; }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
    std::vector<std::string> comments_;
    std::string origin_ = "<memory>";
};

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);

/// Strict parse of a full string as double; throws DataError naming `what`.
double parse_double(const std::string& s, const std::string& what);

} // namespace fciiml
