#include "fciiml/keyvalue.hpp"

#include "fciiml/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fciiml {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

double parse_double(const std::string& s, const std::string& what)
{
    const std::string t = trim(s);
    if (t.empty())
        throw DataError(what + ": empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw DataError(what + ": not a number: '" + t + "'");
    return v;
}

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin)
{
    KeyValueFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (kv.has(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv.set(key, value);
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void KeyValueFile::save(const std::string& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path);
    out << to_string();
}

std::string KeyValueFile::to_string() const
{
    std::ostringstream out;
    for (const auto& c : comments_)
        out << "# " << c << '\n';
    for (const auto& k : order_)
        out << k << " = " << values_.at(k) << '\n';
    return out.str();
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) != 0; }

void KeyValueFile::set(const std::string& key, const std::string& value)
{
    if (!has(key))
        order_.push_back(key);
    values_[key] = value;
}

void KeyValueFile::set(const std::string& key, double value) { set(key, format_double(value)); }

void KeyValueFile::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

void KeyValueFile::set_comment(const std::string& comment) { comments_.push_back(comment); }

const std::string& KeyValueFile::get(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError(origin_ + ": missing key '" + key + "'");
    return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const
{
    return has(key) ? get(key) : fallback;
}

double KeyValueFile::get_double(const std::string& key) const
{
    try {
        return parse_double(get(key), origin_ + ": key '" + key + "'");
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

double KeyValueFile::get_double_or(const std::string& key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

long long KeyValueFile::get_int(const std::string& key) const
{
    const std::string& s = get(key);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError(origin_ + ": key '" + key + "' is not an integer: '" + s + "'");
    return v;
}

long long KeyValueFile::get_int_or(const std::string& key, long long fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

} // namespace fciiml
