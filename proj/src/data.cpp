#include "fciiml/data.hpp"

#include "fciiml/errors.hpp"
#include "fciiml/parallel.hpp"
#include "fciiml/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace fciiml {

bool CaseRecord::operator==(const CaseRecord& o) const
{
    auto same_oc = [](const OperatingConditions& a, const OperatingConditions& b) {
        return a.T_in == b.T_in && a.dT == b.dT && a.p_in_an == b.p_in_an && a.dp_an == b.dp_an &&
               a.p_in_ca == b.p_in_ca && a.dp_ca == b.dp_ca && a.RH_an_in == b.RH_an_in &&
               a.RH_ca_in == b.RH_ca_in && a.stoich_an == b.stoich_an &&
               a.stoich_ca == b.stoich_ca && a.i_cell == b.i_cell && a.case_id == b.case_id;
    };
    return same_oc(oc, o.oc) && lambda_data == o.lambda_data && j_data == o.j_data &&
           provenance == o.provenance;
}

double TruthGeneratorSpec::beta(double lambda_mb) const
{
    return beta_base + beta_amplitude / (1.0 + std::exp(-beta_slope * (lambda_mb - beta_center)));
}

namespace {

const std::vector<std::pair<const char*, Range TruthGeneratorSpec::*>>& range_fields()
{
    static const std::vector<std::pair<const char*, Range TruthGeneratorSpec::*>> f{
        {"T_in", &TruthGeneratorSpec::T_in},     {"dT", &TruthGeneratorSpec::dT},
        {"RH", &TruthGeneratorSpec::RH},         {"i_cell", &TruthGeneratorSpec::i_cell},
        {"stoich", &TruthGeneratorSpec::stoich}, {"p_in", &TruthGeneratorSpec::p_in},
        {"dp", &TruthGeneratorSpec::dp}};
    return f;
}

const std::vector<std::pair<const char*, double TruthGeneratorSpec::*>>& beta_fields()
{
    static const std::vector<std::pair<const char*, double TruthGeneratorSpec::*>> f{
        {"beta_base", &TruthGeneratorSpec::beta_base},
        {"beta_amplitude", &TruthGeneratorSpec::beta_amplitude},
        {"beta_slope", &TruthGeneratorSpec::beta_slope},
        {"beta_center", &TruthGeneratorSpec::beta_center}};
    return f;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

TruthGeneratorSpec TruthGeneratorSpec::from_keyvalue(const KeyValueFile& kv)
{
    TruthGeneratorSpec s;
    std::set<std::string> known{"case_count", "seed", "max_retries", "record_current"};
    s.case_count = static_cast<int>(kv.get_int_or("case_count", s.case_count));
    s.seed = static_cast<std::uint64_t>(kv.get_int_or("seed", static_cast<long long>(s.seed)));
    s.max_retries = static_cast<int>(kv.get_int_or("max_retries", s.max_retries));
    s.record_current = kv.get_int_or("record_current", s.record_current ? 1 : 0) != 0;
    for (const auto& [name, ptr] : beta_fields()) {
        known.insert(name);
        s.*ptr = kv.get_double_or(name, s.*ptr);
    }
    for (const auto& [name, ptr] : range_fields()) {
        const std::string lo = std::string(name) + "_min", hi = std::string(name) + "_max";
        known.insert(lo);
        known.insert(hi);
        (s.*ptr).lo = kv.get_double_or(lo, (s.*ptr).lo);
        (s.*ptr).hi = kv.get_double_or(hi, (s.*ptr).hi);
        if (!((s.*ptr).lo <= (s.*ptr).hi))
            throw ConfigError(kv.origin() + ": range " + name + " has min > max");
    }
    for (const auto& k : kv.keys())
        if (!known.count(k))
            throw ConfigError(kv.origin() + ": unknown key '" + k + "'");
    if (s.case_count < 1)
        throw ConfigError(kv.origin() + ": case_count must be >= 1");
    if (s.beta_base < 0.0 || s.beta_base + std::min(s.beta_amplitude, 0.0) < 0.0)
        throw ConfigError(kv.origin() + ": hidden augmentation must be nonnegative");
    return s;
}

KeyValueFile TruthGeneratorSpec::to_keyvalue() const
{
    KeyValueFile kv;
    kv.set("case_count", case_count);
    kv.set("seed", static_cast<long long>(seed));
    kv.set("max_retries", max_retries);
    kv.set("record_current", record_current ? 1 : 0);
    for (const auto& [name, ptr] : beta_fields())
        kv.set(name, this->*ptr);
    for (const auto& [name, ptr] : range_fields()) {
        kv.set(std::string(name) + "_min", (this->*ptr).lo);
        kv.set(std::string(name) + "_max", (this->*ptr).hi);
    }
    return kv;
}

OperatingConditions sample_conditions(const TruthGeneratorSpec& spec, int index, int attempt)
{
    Rng rng(splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(index) * 1000003ULL +
                                              static_cast<std::uint64_t>(attempt))));
    auto draw = [&](const Range& r) { return rng.uniform(r.lo, r.hi); };
    OperatingConditions oc;
    oc.case_id = index;
    oc.T_in = draw(spec.T_in);
    oc.dT = draw(spec.dT);
    oc.RH_an_in = draw(spec.RH);
    oc.RH_ca_in = draw(spec.RH);
    oc.i_cell = draw(spec.i_cell);
    oc.stoich_an = draw(spec.stoich);
    oc.stoich_ca = draw(spec.stoich);
    oc.p_in_an = draw(spec.p_in);
    oc.p_in_ca = draw(spec.p_in);
    oc.dp_an = draw(spec.dp);
    oc.dp_ca = draw(spec.dp);
    return oc;
}

TruthResult generate_truth(const TruthGeneratorSpec& spec, const ModelParameters& params,
                           const SolverSettings& solver, const FixedPointSettings& fp, int workers)
{
    struct Slot {
        bool ok = false;
        CaseRecord rec;
        std::vector<std::string> warnings;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(spec.case_count));
    const AugmentationFunction hidden = [&spec](const FuelCellModel&, const CellState& s) {
        std::vector<double> b(static_cast<std::size_t>(s.nodes()));
        for (int n = 0; n < s.nodes(); ++n)
            b[n] = spec.beta(s.lambda_mb(n));
        return b;
    };
    parallel_for(slots.size(), workers, [&](std::size_t k) {
        Slot& slot = slots[k];
        for (int attempt = 0; attempt <= spec.max_retries && !slot.ok; ++attempt) {
            const OperatingConditions oc = sample_conditions(spec, static_cast<int>(k), attempt);
            try {
                const auto sol = fixed_point_solve(params, oc, hidden, fp, solver);
                slot.rec.oc = oc;
                slot.rec.lambda_data = sol.state.lambda_mb();
                if (spec.record_current)
                    slot.rec.j_data = sol.state.i_loc();
                slot.rec.provenance = "synthetic";
                slot.ok = true;
            } catch (const std::exception& e) {
                slot.warnings.push_back("case " + std::to_string(k) + " attempt " +
                                        std::to_string(attempt) + ": " + e.what());
            }
        }
    });
    TruthResult out;
    for (auto& s : slots) {
        for (auto& w : s.warnings)
            out.warnings.push_back(std::move(w));
        if (s.ok)
            out.cases.push_back(std::move(s.rec));
        else
            ++out.dropped;
    }
    return out;
}

// ---- CSV persistence -------------------------------------------------------

namespace {

const std::vector<std::string> kConditionColumns{
    "case_id", "T_in", "dT", "p_in_an", "dp_an", "p_in_ca", "dp_ca", "RH_an_in",
    "RH_ca_in", "stoich_an", "stoich_ca", "i_cell", "provenance"};

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string where(const fs::path& file, int line, const std::string& column)
{
    return file.string() + ":" + std::to_string(line) + (column.empty() ? "" : " column '" + column + "'");
}

double cell_double(const std::string& s, const fs::path& file, int line, const std::string& col)
{
    try {
        return parse_double(s, col);
    } catch (const DataError&) {
        throw DataError(where(file, line, col) + ": not a number: '" + s + "'");
    }
}

fs::path profile_path(const std::string& dir, int id)
{
    return fs::path(dir) / "profiles" / ("case_" + std::to_string(id) + ".csv");
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream os(p, std::ios::binary);
    if (!os)
        throw DataError("cannot write " + p.string());
    os << text;
    if (!os)
        throw DataError("write failed for " + p.string());
}

std::string read_file(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    if (!is)
        throw DataError("cannot open " + p.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

void save_cases(const std::string& dir, const std::vector<CaseRecord>& cases)
{
    fs::create_directories(fs::path(dir) / "profiles");
    std::ostringstream cs;
    for (std::size_t i = 0; i < kConditionColumns.size(); ++i)
        cs << (i ? "," : "") << kConditionColumns[i];
    cs << '\n';
    for (const auto& c : cases) {
        const auto& o = c.oc;
        cs << o.case_id;
        for (double v : {o.T_in, o.dT, o.p_in_an, o.dp_an, o.p_in_ca, o.dp_ca, o.RH_an_in,
                         o.RH_ca_in, o.stoich_an, o.stoich_ca, o.i_cell})
            cs << ',' << format_double(v);
        cs << ',' << c.provenance << '\n';

        const int N = static_cast<int>(c.lambda_data.size());
        if (!c.j_data.empty() && static_cast<int>(c.j_data.size()) != N)
            throw DataError("case " + std::to_string(o.case_id) + ": j_data length differs");
        std::ostringstream ps;
        ps << "y,lambda_data" << (c.j_data.empty() ? "" : ",j_data") << '\n';
        const auto y = uniform_grid(N);
        for (int n = 0; n < N; ++n) {
            ps << format_double(y[n]) << ',' << format_double(c.lambda_data[n]);
            if (!c.j_data.empty())
                ps << ',' << format_double(c.j_data[n]);
            ps << '\n';
        }
        write_file(profile_path(dir, o.case_id), ps.str());
    }
    write_file(fs::path(dir) / "conditions.csv", cs.str());
}

std::vector<CaseRecord> load_cases(const std::string& dir, int N_y)
{
    const fs::path cond = fs::path(dir) / "conditions.csv";
    std::istringstream is(read_file(cond));
    std::string line;
    int ln = 1;
    if (!std::getline(is, line))
        throw DataError(where(cond, 1, "") + ": empty file");
    const auto header = split_csv(line);
    for (const auto& col : kConditionColumns)
        if (std::find(header.begin(), header.end(), col) == header.end())
            throw DataError(where(cond, 1, col) + ": missing column");
    if (header.size() != kConditionColumns.size())
        throw DataError(where(cond, 1, "") + ": unexpected column count");
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i)
        col[header[i]] = i;

    std::vector<CaseRecord> out;
    std::set<int> seen;
    const auto grid = uniform_grid(N_y);
    while (std::getline(is, line)) {
        ++ln;
        if (line.empty() || line == "\r")
            continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw DataError(where(cond, ln, "") + ": expected " + std::to_string(header.size()) +
                            " fields, found " + std::to_string(cells.size()));
        auto num = [&](const char* name) { return cell_double(cells[col[name]], cond, ln, name); };
        CaseRecord c;
        const double id = num("case_id");
        if (id != std::floor(id) || id < 0)
            throw DataError(where(cond, ln, "case_id") + ": not a nonnegative integer");
        c.oc.case_id = static_cast<int>(id);
        if (!seen.insert(c.oc.case_id).second)
            throw DataError(where(cond, ln, "case_id") + ": duplicate id " + cells[col["case_id"]]);
        c.oc.T_in = num("T_in");
        c.oc.dT = num("dT");
        c.oc.p_in_an = num("p_in_an");
        c.oc.dp_an = num("dp_an");
        c.oc.p_in_ca = num("p_in_ca");
        c.oc.dp_ca = num("dp_ca");
        c.oc.RH_an_in = num("RH_an_in");
        c.oc.RH_ca_in = num("RH_ca_in");
        c.oc.stoich_an = num("stoich_an");
        c.oc.stoich_ca = num("stoich_ca");
        c.oc.i_cell = num("i_cell");
        c.provenance = cells[col["provenance"]];
        if (c.provenance != "synthetic" && c.provenance != "external")
            throw DataError(where(cond, ln, "provenance") + ": must be 'synthetic' or 'external'");
        try {
            c.oc.validate();
        } catch (const DomainError& e) {
            throw DataError(where(cond, ln, "") + ": " + e.what());
        }

        const fs::path pf = profile_path(dir, c.oc.case_id);
        std::istringstream ps(read_file(pf));
        std::string pl;
        if (!std::getline(ps, pl))
            throw DataError(where(pf, 1, "") + ": empty file");
        const auto ph = split_csv(pl);
        if (ph.size() < 2 || ph[0] != "y")
            throw DataError(where(pf, 1, "y") + ": missing column");
        if (ph[1] != "lambda_data")
            throw DataError(where(pf, 1, "lambda_data") + ": missing column");
        const bool has_j = ph.size() == 3;
        if (ph.size() > 3 || (has_j && ph[2] != "j_data"))
            throw DataError(where(pf, 1, "") + ": unexpected columns");
        int pln = 1;
        while (std::getline(ps, pl)) {
            ++pln;
            if (pl.empty() || pl == "\r")
                continue;
            const auto f = split_csv(pl);
            if (f.size() != ph.size())
                throw DataError(where(pf, pln, "") + ": wrong field count");
            const int n = static_cast<int>(c.lambda_data.size());
            const double y = cell_double(f[0], pf, pln, "y");
            if (n >= N_y || std::abs(y - grid[n]) > 1.0e-12)
                throw DataError(where(pf, pln, "y") + ": grid does not match the " +
                                std::to_string(N_y) + "-node grid");
            const double lam = cell_double(f[1], pf, pln, "lambda_data");
            if (!(lam >= 0.0 && lam <= 22.0))
                throw DataError(where(pf, pln, "lambda_data") + ": outside [0, 22]");
            c.lambda_data.push_back(lam);
            if (has_j)
                c.j_data.push_back(cell_double(f[2], pf, pln, "j_data"));
        }
        if (static_cast<int>(c.lambda_data.size()) != N_y)
            throw DataError(pf.string() + ": expected " + std::to_string(N_y) + " rows, found " +
                            std::to_string(c.lambda_data.size()));
        out.push_back(std::move(c));
    }
    return out;
}

Split select_training(const std::vector<CaseRecord>& cases, const std::vector<int>& ids)
{
    std::set<int> want;
    for (int id : ids)
        if (!want.insert(id).second)
            throw DataError("duplicate training id " + std::to_string(id));
    std::set<int> present;
    for (const auto& c : cases)
        present.insert(c.id());
    for (int id : want)
        if (!present.count(id))
            throw DataError("unknown training id " + std::to_string(id));
    Split s;
    for (const auto& c : cases)
        (want.count(c.id()) ? s.training : s.test).push_back(c);
    auto by_id = [](const CaseRecord& a, const CaseRecord& b) { return a.id() < b.id(); };
    std::sort(s.training.begin(), s.training.end(), by_id);
    return s;
}

// ---- sealed truth sidecar --------------------------------------------------

void write_truth_sidecar(const std::string& path, const TruthGeneratorSpec& spec)
{
    KeyValueFile kv = spec.to_keyvalue();
    kv.set("format_version", kFormatVersion);
    kv.set_comment("sealed hidden augmentation; read only by verify-truth");
    kv.save(path);
}

TruthGeneratorSpec read_truth_sidecar(const std::string& path)
{
    KeyValueFile kv = KeyValueFile::load(path);
    if (kv.get_int_or("format_version", -1) != kFormatVersion)
        throw DataError(path + ": unsupported format_version");
    KeyValueFile body;
    for (const auto& k : kv.keys())
        if (k != "format_version")
            body.set(k, kv.get(k));
    return TruthGeneratorSpec::from_keyvalue(body);
}

// ---- weights -----------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string join(const double* v, std::size_t n)
{
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i)
            s += ' ';
        s += format_double(v[i]);
    }
    return s;
}

std::vector<double> split_doubles(const std::string& s, const std::string& what)
{
    std::istringstream is(s);
    std::vector<double> out;
    std::string tok;
    while (is >> tok)
        out.push_back(parse_double(tok, what));
    return out;
}

KeyValueFile weights_body(const MlpModel& m, const std::string& provenance)
{
    KeyValueFile kv;
    kv.set("format_version", kFormatVersion);
    std::string sizes;
    for (int s : MlpModel::kSizes)
        sizes += (sizes.empty() ? "" : " ") + std::to_string(s);
    kv.set("layer_sizes", sizes);
    kv.set("activations", std::string("sigmoid sigmoid relu"));
    kv.set("seed", std::to_string(m.seed));
    kv.set("provenance", provenance.empty() ? std::string("none") : provenance);
    kv.set("bounds_lo", join(m.bounds.lo.data(), kFeatureCount));
    kv.set("bounds_hi", join(m.bounds.hi.data(), kFeatureCount));
    for (int l = 0; l < MlpModel::kLayers; ++l) {
        const auto& p = m.parameters();
        const std::size_t nw = static_cast<std::size_t>(MlpModel::kSizes[l + 1]) * MlpModel::kSizes[l];
        kv.set("W" + std::to_string(l), join(p.data() + MlpModel::weight_offset(l), nw));
        kv.set("b" + std::to_string(l),
               join(p.data() + MlpModel::bias_offset(l), static_cast<std::size_t>(MlpModel::kSizes[l + 1])));
    }
    return kv;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

std::string weights_to_string(const MlpModel& model, const std::string& provenance)
{
    KeyValueFile kv = weights_body(model, provenance);
    const std::string body = kv.to_string();
    return "# network weights; checksum is FNV-1a 64 over the preceding lines\n" + body +
           "checksum = " + hex64(fnv1a64(body)) + "\n";
}

MlpModel weights_from_string(const std::string& text, const std::string& origin)
{
    const KeyValueFile kv = KeyValueFile::parse(text, origin);
    if (!kv.has("format_version") || kv.get("format_version") != std::to_string(kFormatVersion))
        throw DataError(origin + ": unsupported weights format_version");
    if (!kv.has("checksum"))
        throw DataError(origin + ": missing checksum");
    KeyValueFile body;
    for (const auto& k : kv.keys())
        if (k != "checksum")
            body.set(k, kv.get(k));
    if (hex64(fnv1a64(body.to_string())) != kv.get("checksum"))
        throw DataError(origin + ": checksum mismatch, refusing to load");
    if (kv.get("layer_sizes") != "8 7 7 1" || kv.get("activations") != "sigmoid sigmoid relu")
        throw DataError(origin + ": unsupported network shape");

    MlpModel m;
    try {
        m.seed = std::stoull(kv.get("seed"));
    } catch (const std::exception&) {
        throw DataError(origin + ": bad seed");
    }
    const auto lo = split_doubles(kv.get("bounds_lo"), "bounds_lo");
    const auto hi = split_doubles(kv.get("bounds_hi"), "bounds_hi");
    if (lo.size() != kFeatureCount || hi.size() != kFeatureCount)
        throw DataError(origin + ": bounds must have 8 entries");
    std::copy(lo.begin(), lo.end(), m.bounds.lo.begin());
    std::copy(hi.begin(), hi.end(), m.bounds.hi.begin());
    auto& p = m.parameters();
    for (int l = 0; l < MlpModel::kLayers; ++l) {
        const auto W = split_doubles(kv.get("W" + std::to_string(l)), "W");
        const auto b = split_doubles(kv.get("b" + std::to_string(l)), "b");
        if (W.size() != static_cast<std::size_t>(MlpModel::kSizes[l + 1]) * MlpModel::kSizes[l] ||
            b.size() != static_cast<std::size_t>(MlpModel::kSizes[l + 1]))
            throw DataError(origin + ": layer " + std::to_string(l) + " has the wrong shape");
        std::copy(W.begin(), W.end(), p.begin() + static_cast<std::ptrdiff_t>(MlpModel::weight_offset(l)));
        std::copy(b.begin(), b.end(), p.begin() + static_cast<std::ptrdiff_t>(MlpModel::bias_offset(l)));
    }
    return m;
}

void save_weights(const std::string& path, const MlpModel& model, const std::string& provenance)
{
    write_file(path, weights_to_string(model, provenance));
}

MlpModel load_weights(const std::string& path)
{
    return weights_from_string(read_file(path), path);
}

} // namespace fciiml
