#include "chtx/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace chtx {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct Entry {
    std::string value;
    int line = 0;
};

// Keys shared by run and sweep configurations.
const std::set<std::string> kRunKeys = {
    "dim", "cells_x", "cells_y", "cells_z", "length_x", "length_y", "length_z",
    "chi", "r", "mu", "alpha", "beta", "k",
    "scheme", "t_end", "dt_max", "dt_min", "cfl_diffusion", "cfl_advection",
    "blowup_threshold", "eps_v", "hard_floor",
    "ic_kind", "ic_u0", "ic_v0", "ic_center_x", "ic_center_y", "ic_center_z",
    "ic_width", "ic_amplitude", "ic_floor", "ic_snapshot",
    "seed", "p", "q", "diag_every_steps", "diag_every_time",
    "out_csv", "out_snapshot"};

const std::set<std::string> kSweepOnlyKeys = {
    "mu_list", "chi_list", "k_list", "workers", "max_bisect_iters", "out_json"};

class Cfg {
public:
    Cfg(const std::string& path, const std::set<std::string>& extra_keys) {
        std::ifstream f(path);
        if (!f) throw IoError("cannot open config: " + path);
        std::string raw;
        int line = 0;
        while (std::getline(f, raw)) {
            ++line;
            const std::size_t hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string text = trim(raw);
            if (text.empty()) continue;
            const std::size_t eq = text.find('=');
            if (eq == std::string::npos)
                throw ValidationError("config line " + std::to_string(line) +
                                      ": expected key = value");
            const std::string key = trim(text.substr(0, eq));
            const std::string value = trim(text.substr(eq + 1));
            if (key.empty())
                throw ValidationError("config line " + std::to_string(line) + ": empty key");
            auto it = kv_.find(key);
            if (it != kv_.end())
                throw ValidationError("duplicate key '" + key + "' at lines " +
                                      std::to_string(it->second.line) + " and " +
                                      std::to_string(line));
            if (kRunKeys.count(key) == 0 && extra_keys.count(key) == 0)
                throw ValidationError("unknown key '" + key + "' at line " +
                                      std::to_string(line));
            kv_[key] = {value, line};
        }
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    double get_double(const std::string& key, double fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        return parse_double(key, it->second);
    }

    long long get_int(const std::string& key, long long fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        const Entry& e = it->second;
        char* end = nullptr;
        const long long v = std::strtoll(e.value.c_str(), &end, 10);
        if (e.value.empty() || end == nullptr || *end != '\0')
            throw ValidationError("key '" + key + "': cannot parse '" + e.value +
                                  "' as an integer (line " + std::to_string(e.line) + ")");
        return v;
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        const Entry& e = it->second;
        if (!e.value.empty() && e.value[0] == '-')
            throw ValidationError("key '" + key + "': must be nonnegative (line " +
                                  std::to_string(e.line) + ")");
        char* end = nullptr;
        const std::uint64_t v = std::strtoull(e.value.c_str(), &end, 10);
        if (e.value.empty() || end == nullptr || *end != '\0')
            throw ValidationError("key '" + key + "': cannot parse '" + e.value +
                                  "' as an integer (line " + std::to_string(e.line) + ")");
        return v;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second.value;
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        auto it = kv_.find(key);
        if (it == kv_.end()) return out;
        std::stringstream ss(it->second.value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            Entry e{trim(item), it->second.line};
            if (e.value.empty())
                throw ValidationError("key '" + key + "': empty list element (line " +
                                      std::to_string(e.line) + ")");
            out.push_back(parse_double(key, e));
        }
        if (out.empty())
            throw ValidationError("key '" + key + "': empty list (line " +
                                  std::to_string(it->second.line) + ")");
        return out;
    }

    void require(const std::string& key) const {
        if (!has(key)) throw ValidationError("missing required key '" + key + "'");
    }

private:
    static double parse_double(const std::string& key, const Entry& e) {
        char* end = nullptr;
        const double v = std::strtod(e.value.c_str(), &end);
        if (e.value.empty() || end == nullptr || *end != '\0')
            throw ValidationError("key '" + key + "': cannot parse '" + e.value +
                                  "' as a number (line " + std::to_string(e.line) + ")");
        return v;
    }

    std::map<std::string, Entry> kv_;
};

Scheme parse_scheme(const std::string& s) {
    if (s == "explicit-euler") return Scheme::explicit_euler;
    if (s == "imex-diffusion") return Scheme::imex_diffusion;
    throw ValidationError("scheme must be explicit-euler or imex-diffusion, got '" + s + "'");
}

const char* scheme_name(Scheme s) {
    return s == Scheme::explicit_euler ? "explicit-euler" : "imex-diffusion";
}

IcKind parse_ic_kind(const std::string& s) {
    if (s == "constant") return IcKind::constant;
    if (s == "gaussian-bump") return IcKind::gaussian_bump;
    if (s == "random-smooth") return IcKind::random_smooth;
    if (s == "from-snapshot") return IcKind::from_snapshot;
    throw ValidationError(
        "ic_kind must be constant, gaussian-bump, random-smooth, or from-snapshot, got '" + s +
        "'");
}

const char* ic_kind_name(IcKind k) {
    switch (k) {
        case IcKind::constant: return "constant";
        case IcKind::gaussian_bump: return "gaussian-bump";
        case IcKind::random_smooth: return "random-smooth";
        case IcKind::from_snapshot: return "from-snapshot";
    }
    return "unknown";
}

RunConfig build_run_config(const Cfg& cfg) {
    RunConfig rc;
    cfg.require("t_end");

    Params p;
    p.dim = static_cast<int>(cfg.get_int("dim", 1));
    p.cells = {static_cast<int>(cfg.get_int("cells_x", 64)),
               static_cast<int>(cfg.get_int("cells_y", 64)),
               static_cast<int>(cfg.get_int("cells_z", 64))};
    p.lengths = {cfg.get_double("length_x", 1.0), cfg.get_double("length_y", 1.0),
                 cfg.get_double("length_z", 1.0)};
    p.chi = cfg.get_double("chi", 1.0);
    p.r = cfg.get_double("r", 1.0);
    p.mu = cfg.get_double("mu", 1.0);
    p.alpha = cfg.get_double("alpha", 1.0);
    p.beta = cfg.get_double("beta", 1.0);
    p.k = cfg.get_double("k", 0.5);
    rc.params = validate_params(p);

    SchemeConfig sc;
    sc.scheme = parse_scheme(cfg.get_string("scheme", "imex-diffusion"));
    sc.t_end = cfg.get_double("t_end", 1.0);
    sc.dt_max = cfg.get_double("dt_max", 0.1);
    sc.dt_min = cfg.get_double("dt_min", 1e-12);
    sc.cfl_diffusion = cfg.get_double("cfl_diffusion", 0.9);
    sc.cfl_advection = cfg.get_double("cfl_advection", 0.5);
    sc.blowup_threshold = cfg.get_double("blowup_threshold", 1e6);
    rc.scheme = validate_scheme_config(sc);

    rc.floor.eps_v = cfg.get_double("eps_v", 1e-10);
    rc.floor.hard_floor = cfg.get_double("hard_floor", 1e-12);
    if (!(rc.floor.eps_v > 0.0)) throw ValidationError("eps_v must be positive");
    if (!(rc.floor.hard_floor > 0.0)) throw ValidationError("hard_floor must be positive");
    if (!(rc.floor.hard_floor <= rc.floor.eps_v))
        throw ValidationError("hard_floor must not exceed eps_v");

    rc.ic.kind = parse_ic_kind(cfg.get_string("ic_kind", "constant"));
    rc.ic.u0 = cfg.get_double("ic_u0", 0.5);
    rc.ic.v0 = cfg.get_double("ic_v0", 1.0);
    rc.ic.center = {cfg.get_double("ic_center_x", 0.5), cfg.get_double("ic_center_y", 0.5),
                    cfg.get_double("ic_center_z", 0.5)};
    rc.ic.width = cfg.get_double("ic_width", 0.15);
    rc.ic.amplitude = cfg.get_double("ic_amplitude", 1.0);
    rc.ic.floor = cfg.get_double("ic_floor", 0.1);
    rc.ic.snapshot_path = cfg.get_string("ic_snapshot", "");
    if (rc.ic.kind == IcKind::from_snapshot) cfg.require("ic_snapshot");

    rc.seed = cfg.get_u64("seed", 1);
    rc.p = cfg.get_double("p", 4.0);
    rc.q = cfg.get_double("q", 2.0);
    validate_functional_spec(rc.p, rc.q, rc.params);

    rc.diag.every_steps = cfg.get_int("diag_every_steps", 10);
    rc.diag.every_time = cfg.get_double("diag_every_time", 0.0);
    if (rc.diag.every_steps < 0) throw ValidationError("diag_every_steps must be nonnegative");
    if (rc.diag.every_time < 0.0) throw ValidationError("diag_every_time must be nonnegative");

    rc.out_csv = cfg.get_string("out_csv", "diagnostics.csv");
    rc.out_snapshot = cfg.get_string("out_snapshot", "");
    return rc;
}

}  // namespace

RunConfig parse_config(const std::string& path) {
    Cfg cfg(path, {});
    return build_run_config(cfg);
}

SweepConfig parse_sweep_config(const std::string& path) {
    Cfg cfg(path, kSweepOnlyKeys);
    const RunConfig rc = build_run_config(cfg);

    SweepConfig sw;
    sw.spec.base = rc.params;
    sw.spec.scheme = rc.scheme;
    sw.spec.floor = rc.floor;
    sw.spec.ic = rc.ic;
    sw.spec.seed = rc.seed;
    sw.spec.p = rc.p;
    sw.spec.q = rc.q;
    sw.spec.diag = rc.diag;
    sw.spec.mu = cfg.has("mu_list") ? cfg.get_double_list("mu_list")
                                    : std::vector<double>{rc.params.mu};
    sw.spec.chi = cfg.has("chi_list") ? cfg.get_double_list("chi_list")
                                      : std::vector<double>{rc.params.chi};
    sw.spec.k = cfg.has("k_list") ? cfg.get_double_list("k_list")
                                  : std::vector<double>{rc.params.k};
    sw.spec.workers = static_cast<int>(cfg.get_int("workers", 1));
    if (sw.spec.workers < 1) throw ValidationError("workers must be at least 1");
    sw.max_bisect_iters = static_cast<int>(cfg.get_int("max_bisect_iters", 6));
    if (sw.max_bisect_iters < 1)
        throw ValidationError("max_bisect_iters must be at least 1");
    sw.out_csv = cfg.get_string("out_csv", "sweep.csv");
    sw.out_json = cfg.get_string("out_json", "sweep.json");
    return sw;
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream os;
    const Params& p = cfg.params;
    os << "dim = " << p.dim << "\n";
    os << "cells_x = " << p.cells[0] << "\n";
    os << "cells_y = " << p.cells[1] << "\n";
    os << "cells_z = " << p.cells[2] << "\n";
    os << "length_x = " << fmt17(p.lengths[0]) << "\n";
    os << "length_y = " << fmt17(p.lengths[1]) << "\n";
    os << "length_z = " << fmt17(p.lengths[2]) << "\n";
    os << "chi = " << fmt17(p.chi) << "\n";
    os << "r = " << fmt17(p.r) << "\n";
    os << "mu = " << fmt17(p.mu) << "\n";
    os << "alpha = " << fmt17(p.alpha) << "\n";
    os << "beta = " << fmt17(p.beta) << "\n";
    os << "k = " << fmt17(p.k) << "\n";
    os << "scheme = " << scheme_name(cfg.scheme.scheme) << "\n";
    os << "t_end = " << fmt17(cfg.scheme.t_end) << "\n";
    os << "dt_max = " << fmt17(cfg.scheme.dt_max) << "\n";
    os << "dt_min = " << fmt17(cfg.scheme.dt_min) << "\n";
    os << "cfl_diffusion = " << fmt17(cfg.scheme.cfl_diffusion) << "\n";
    os << "cfl_advection = " << fmt17(cfg.scheme.cfl_advection) << "\n";
    os << "blowup_threshold = " << fmt17(cfg.scheme.blowup_threshold) << "\n";
    os << "eps_v = " << fmt17(cfg.floor.eps_v) << "\n";
    os << "hard_floor = " << fmt17(cfg.floor.hard_floor) << "\n";
    os << "ic_kind = " << ic_kind_name(cfg.ic.kind) << "\n";
    os << "ic_u0 = " << fmt17(cfg.ic.u0) << "\n";
    os << "ic_v0 = " << fmt17(cfg.ic.v0) << "\n";
    os << "ic_center_x = " << fmt17(cfg.ic.center[0]) << "\n";
    os << "ic_center_y = " << fmt17(cfg.ic.center[1]) << "\n";
    os << "ic_center_z = " << fmt17(cfg.ic.center[2]) << "\n";
    os << "ic_width = " << fmt17(cfg.ic.width) << "\n";
    os << "ic_amplitude = " << fmt17(cfg.ic.amplitude) << "\n";
    os << "ic_floor = " << fmt17(cfg.ic.floor) << "\n";
    if (!cfg.ic.snapshot_path.empty()) os << "ic_snapshot = " << cfg.ic.snapshot_path << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "p = " << fmt17(cfg.p) << "\n";
    os << "q = " << fmt17(cfg.q) << "\n";
    os << "diag_every_steps = " << cfg.diag.every_steps << "\n";
    os << "diag_every_time = " << fmt17(cfg.diag.every_time) << "\n";
    os << "out_csv = " << cfg.out_csv << "\n";
    if (!cfg.out_snapshot.empty()) os << "out_snapshot = " << cfg.out_snapshot << "\n";
    return os.str();
}

namespace {

FILE* open_or_throw(const std::string& path, const char* mode) {
    FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw IoError("cannot open " + path);
    return f;
}

void write_record(FILE* f, const DiagRecord& r) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%lld\n",
                 r.t, r.mass_u, r.mass_v, r.linf_u, r.linf_v, r.min_v, r.linf_grad_v, r.y_pq,
                 r.h_pq, r.sing_p, r.dt, r.step);
}

std::string csv_header() {
    std::string h;
    for (int i = 0; i < kDiagColumnCount; ++i) {
        if (i) h += ',';
        h += kDiagColumns[i];
    }
    return h;
}

}  // namespace

void write_csv(const std::vector<DiagRecord>& records, const std::string& path) {
    FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "%s\n", csv_header().c_str());
    for (const DiagRecord& r : records) write_record(f, r);
    if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

std::vector<DiagRecord> read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty CSV: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header()) throw IoError("unexpected CSV header in " + path);

    std::vector<DiagRecord> out;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        if (parts.size() != static_cast<std::size_t>(kDiagColumnCount))
            throw IoError("malformed CSV row at line " + std::to_string(lineno) + " in " + path);
        double vals[11];
        for (int i = 0; i < 11; ++i) {
            char* end = nullptr;
            vals[i] = std::strtod(parts[i].c_str(), &end);
            if (parts[i].empty() || *end != '\0')
                throw IoError("malformed CSV value at line " + std::to_string(lineno) + " in " +
                              path);
        }
        DiagRecord r;
        r.t = vals[0];
        r.mass_u = vals[1];
        r.mass_v = vals[2];
        r.linf_u = vals[3];
        r.linf_v = vals[4];
        r.min_v = vals[5];
        r.linf_grad_v = vals[6];
        r.y_pq = vals[7];
        r.h_pq = vals[8];
        r.sing_p = vals[9];
        r.dt = vals[10];
        char* end = nullptr;
        r.step = std::strtoll(parts[11].c_str(), &end, 10);
        if (parts[11].empty() || *end != '\0')
            throw IoError("malformed CSV value at line " + std::to_string(lineno) + " in " +
                          path);
        out.push_back(r);
    }
    return out;
}

CsvSink::CsvSink(const std::string& path) : path_(path) {
    FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "%s\n", csv_header().c_str());
    file_ = f;
}

CsvSink::~CsvSink() {
    if (file_) std::fclose(static_cast<FILE*>(file_));
}

void CsvSink::write(const DiagRecord& rec) {
    if (!file_) throw IoError("CSV sink already closed: " + path_);
    write_record(static_cast<FILE*>(file_), rec);
}

void CsvSink::close() {
    if (!file_) return;
    FILE* f = static_cast<FILE*>(file_);
    file_ = nullptr;
    const bool bad = std::ferror(f) != 0;
    if (std::fclose(f) != 0 || bad) throw IoError("write failed: " + path_);
}

namespace {

void write_bytes(FILE* f, const void* data, std::size_t n, const std::string& path) {
    if (std::fwrite(data, 1, n, f) != n) {
        std::fclose(f);
        throw IoError("write failed: " + path);
    }
}

}  // namespace

void write_snapshot(const State& s, const Grid& g, const std::string& path) {
    FILE* f = open_or_throw(path, "wb");
    write_bytes(f, "CHTX1", 5, path);
    const std::uint32_t dim = static_cast<std::uint32_t>(g.dim);
    write_bytes(f, &dim, sizeof(dim), path);
    for (int a = 0; a < g.dim; ++a) {
        const std::uint64_t n = static_cast<std::uint64_t>(g.cells[a]);
        write_bytes(f, &n, sizeof(n), path);
    }
    for (int a = 0; a < g.dim; ++a) write_bytes(f, &g.lengths[a], sizeof(double), path);
    write_bytes(f, &s.t, sizeof(double), path);
    write_bytes(f, s.u.data(), s.u.size() * sizeof(double), path);
    write_bytes(f, s.v.data(), s.v.size() * sizeof(double), path);
    if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

std::pair<State, Grid> read_snapshot(const std::string& path) {
    FILE* f = open_or_throw(path, "rb");
    auto fail = [&](const std::string& msg) -> IoError {
        std::fclose(f);
        return IoError(msg);
    };
    char magic[5];
    if (std::fread(magic, 1, 5, f) != 5 || std::memcmp(magic, "CHTX1", 5) != 0)
        throw fail("not a CHTX1 snapshot: " + path);
    std::uint32_t dim = 0;
    if (std::fread(&dim, sizeof(dim), 1, f) != 1 || dim < 1 || dim > 3)
        throw fail("corrupt snapshot header: " + path);

    Params p;
    p.dim = static_cast<int>(dim);
    for (std::uint32_t a = 0; a < dim; ++a) {
        std::uint64_t n = 0;
        if (std::fread(&n, sizeof(n), 1, f) != 1 || n < 1 || n > (1ull << 30))
            throw fail("corrupt snapshot header: " + path);
        p.cells[a] = static_cast<int>(n);
    }
    for (std::uint32_t a = 0; a < dim; ++a) {
        double len = 0.0;
        if (std::fread(&len, sizeof(len), 1, f) != 1 || !(len > 0.0) || !std::isfinite(len))
            throw fail("corrupt snapshot header: " + path);
        p.lengths[a] = len;
    }
    double t = 0.0;
    if (std::fread(&t, sizeof(t), 1, f) != 1) throw fail("truncated payload: " + path);

    const Grid g = Grid::from_params(p);
    State s;
    s.t = t;
    s.u.resize(g.total);
    s.v.resize(g.total);
    if (std::fread(s.u.data(), sizeof(double), g.total, f) != g.total)
        throw fail("truncated payload: " + path);
    if (std::fread(s.v.data(), sizeof(double), g.total, f) != g.total)
        throw fail("truncated payload: " + path);
    if (std::fgetc(f) != EOF) throw fail("oversized payload: " + path);
    std::fclose(f);
    return {std::move(s), g};
}

State load_initial_state(const IcSpec& ic, const Grid& g, const Params& p, std::uint64_t seed) {
    if (ic.kind != IcKind::from_snapshot) return make_initial_condition(ic, g, p, seed);
    auto [s, sg] = read_snapshot(ic.snapshot_path);
    bool match = sg.dim == g.dim;
    for (int a = 0; match && a < g.dim; ++a)
        match = sg.cells[a] == g.cells[a] && sg.lengths[a] == g.lengths[a];
    if (!match)
        throw ValidationError("snapshot grid does not match configuration: " + ic.snapshot_path);
    validate_state(s, g);
    return s;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
    FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "mu,chi,k,status,class,sup_linf_u,sup_h_pq,abort_time\n");
    for (const SweepCell& c : result.cells)
        std::fprintf(f, "%.17g,%.17g,%.17g,%s,%s,%.17g,%.17g,%.17g\n", c.mu, c.chi, c.k,
                     to_string(c.status).c_str(), to_string(c.cls).c_str(), c.sup_linf_u,
                     c.sup_h_pq, c.abort_time);
    if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

namespace {

nlohmann::json cell_json(const SweepCell& c) {
    nlohmann::json j{{"mu", c.mu},
                     {"chi", c.chi},
                     {"k", c.k},
                     {"status", to_string(c.status)},
                     {"class", to_string(c.cls)},
                     {"sup_linf_u", c.sup_linf_u},
                     {"sup_h_pq", c.sup_h_pq}};
    if (std::isnan(c.abort_time))
        j["abort_time"] = nullptr;
    else
        j["abort_time"] = c.abort_time;
    return j;
}

void dump_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path);
    f << j.dump(2) << "\n";
    if (!f.good()) throw IoError("write failed: " + path);
}

}  // namespace

void write_sweep_json(const SweepSpec& spec, const SweepResult& result,
                      const std::string& path) {
    nlohmann::json j;
    j["axes"] = {{"mu", spec.mu}, {"chi", spec.chi}, {"k", spec.k}};
    j["base"] = {{"r", spec.base.r},       {"alpha", spec.base.alpha},
                 {"beta", spec.base.beta}, {"dim", spec.base.dim},
                 {"seed", spec.seed},      {"t_end", spec.scheme.t_end},
                 {"p", spec.p},            {"q", spec.q}};
    j["cells"] = nlohmann::json::array();
    for (const SweepCell& c : result.cells) j["cells"].push_back(cell_json(c));
    dump_json(j, path);
}

void write_bisect_json(const SweepSpec& spec, const BisectResult& result,
                       const std::string& path) {
    nlohmann::json j;
    j["conclusive"] = result.conclusive;
    j["message"] = result.message;
    if (result.conclusive) {
        j["mu_low"] = result.mu_low;
        j["mu_high"] = result.mu_high;
        j["width"] = result.mu_high - result.mu_low;
    }
    j["chi"] = spec.chi.front();
    j["k"] = spec.k.front();
    j["t_end"] = spec.scheme.t_end;
    j["transcript"] = nlohmann::json::array();
    for (const BisectStep& s : result.transcript)
        j["transcript"].push_back({{"mu", s.mu}, {"class", to_string(s.cls)}});
    dump_json(j, path);
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path) {
    FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "cells,h,err_u,err_v,order_u,order_v\n");
    for (const ConvergenceRow& r : rows)
        std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.cells, r.h, r.err_u, r.err_v,
                     r.order_u, r.order_v);
    if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

void write_inequality_csv(const std::vector<InequalityEntry>& entries, const std::string& path) {
    FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "p,lhs,rhs_lap,rhs_mass,ratio\n");
    for (const InequalityEntry& e : entries)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", e.p, e.lhs, e.rhs_lap, e.rhs_mass,
                     e.ratio);
    if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

}  // namespace chtx
