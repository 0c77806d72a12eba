#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "chtx/io.hpp"

using namespace chtx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("chtx_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_text(const TempDir& dir, const std::string& name, const std::string& body) {
    const std::string p = dir.file(name);
    std::ofstream out(p);
    out << body;
    return p;
}

const char* kMinimalConfig = "t_end = 1.5\n";

}  // namespace

TEST_CASE("minimal config relies on defaults") {
    TempDir dir;
    const RunConfig cfg = parse_config(write_text(dir, "min.cfg", kMinimalConfig));
    CHECK(cfg.scheme.t_end == 1.5);
    CHECK(cfg.params.dim == 1);
    CHECK(cfg.params.cells[0] == 64);
    CHECK(cfg.params.chi == 1.0);
    CHECK(cfg.params.k == 0.5);
    CHECK(cfg.scheme.scheme == Scheme::imex_diffusion);
    CHECK(cfg.ic.kind == IcKind::constant);
    CHECK(cfg.seed == 1);
    CHECK(cfg.p == 4.0);
    CHECK(cfg.q == 2.0);
    CHECK(cfg.out_csv == "diagnostics.csv");
    CHECK(cfg.out_snapshot.empty());
}

TEST_CASE("config accepts comments, blank lines, and every documented key") {
    TempDir dir;
    const std::string body =
        "# full configuration\n"
        "dim = 3\n"
        "cells_x = 8\ncells_y = 12\ncells_z = 16\n"
        "length_x = 2.0\nlength_y = 1.0\nlength_z = 0.5\n"
        "chi = 0.7\nr = 1.1\nmu = 3.0\nalpha = 0.9\nbeta = 1.3\nk = 0.25\n"
        "scheme = explicit-euler\n"
        "t_end = 2.0\ndt_max = 0.05\ndt_min = 1e-10\n"
        "cfl_diffusion = 0.8\ncfl_advection = 0.4\nblowup_threshold = 1e5\n"
        "eps_v = 1e-9\nhard_floor = 1e-11\n"
        "ic_kind = gaussian-bump\nic_u0 = 0.4\nic_v0 = 1.2\n"
        "ic_center_x = 0.5\nic_center_y = 0.25\nic_center_z = 0.75\n"
        "ic_width = 0.2\nic_amplitude = 1.5\nic_floor = 0.2\n"
        "seed = 99\np = 5.0\nq = 2.5\n"
        "diag_every_steps = 25\ndiag_every_time = 0.1\n"
        "out_csv = out.csv\nout_snapshot = final.chtx\n";
    const RunConfig cfg = parse_config(write_text(dir, "full.cfg", body));
    CHECK(cfg.params.dim == 3);
    CHECK(cfg.params.cells[2] == 16);
    CHECK(cfg.params.lengths[0] == 2.0);
    CHECK(cfg.params.k == 0.25);
    CHECK(cfg.scheme.scheme == Scheme::explicit_euler);
    CHECK(cfg.scheme.cfl_diffusion == 0.8);
    CHECK(cfg.floor.eps_v == 1e-9);
    CHECK(cfg.ic.kind == IcKind::gaussian_bump);
    CHECK(cfg.ic.center[1] == 0.25);
    CHECK(cfg.seed == 99);
    CHECK(cfg.diag.every_steps == 25);
    CHECK(cfg.diag.every_time == 0.1);
    CHECK(cfg.out_snapshot == "final.chtx");
}

TEST_CASE("config errors carry key names and line numbers") {
    TempDir dir;
    CHECK_THROWS_WITH_AS(parse_config(write_text(dir, "a.cfg", "t_end = 1\nwhat = 3\n")),
                         "unknown key 'what' at line 2", ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_config(write_text(dir, "b.cfg", "t_end = 1\nmu = 2\nmu = 3\n")),
        "duplicate key 'mu' at lines 2 and 3", ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(write_text(dir, "c.cfg", "mu = 2\n")),
                         "missing required key 't_end'", ValidationError);
    CHECK_THROWS_AS(parse_config(write_text(dir, "d.cfg", "t_end\n")), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(write_text(dir, "e.cfg", "t_end = soon\n")),
                         "key 't_end': cannot parse 'soon' as a number (line 1)",
                         ValidationError);
    // module validators speak through the parser
    CHECK_THROWS_WITH_AS(parse_config(write_text(dir, "f.cfg", "t_end = 1\nk = 1.5\n")),
                         "k must lie in (0,1)", ValidationError);
    CHECK_THROWS_AS(parse_config(dir.file("missing.cfg")), IoError);
}

TEST_CASE("from-snapshot configs require the path key") {
    TempDir dir;
    CHECK_THROWS_AS(
        parse_config(write_text(dir, "snap.cfg", "t_end = 1\nic_kind = from-snapshot\n")),
        ValidationError);
}

TEST_CASE("render_config round-trips bit-identically") {
    TempDir dir;
    const std::string body =
        "t_end = 0.30000000000000004\nchi = 0.1\nmu = 2.718281828459045\n"
        "ic_kind = random-smooth\nseed = 7\ndiag_every_steps = 3\n";
    const RunConfig cfg = parse_config(write_text(dir, "r.cfg", body));
    const std::string rendered = render_config(cfg);
    const RunConfig again = parse_config(write_text(dir, "r2.cfg", rendered));
    CHECK(again.scheme.t_end == cfg.scheme.t_end);
    CHECK(again.params.chi == cfg.params.chi);
    CHECK(again.params.mu == cfg.params.mu);
    CHECK(again.seed == cfg.seed);
    CHECK(again.ic.kind == cfg.ic.kind);
    CHECK(render_config(again) == rendered);
}

TEST_CASE("diagnostics CSV round-trips exactly") {
    TempDir dir;
    std::vector<DiagRecord> recs(3);
    recs[0].t = 0.0;
    recs[0].mass_u = 0.1 + 0.2;  // not exactly 0.3
    recs[0].sing_p = 1e-300;
    recs[1].t = 0.30000000000000004;
    recs[1].linf_u = 1.0 / 3.0;
    recs[1].step = 123456789012345LL;
    recs[2].t = 2.5;
    recs[2].dt = 4.9e-324;  // denormal survives
    const std::string path = dir.file("diag.csv");
    write_csv(recs, path);
    const std::vector<DiagRecord> back = read_csv(path);
    REQUIRE(back.size() == 3);
    CHECK(back[0].mass_u == recs[0].mass_u);
    CHECK(back[0].sing_p == recs[0].sing_p);
    CHECK(back[1].t == recs[1].t);
    CHECK(back[1].linf_u == recs[1].linf_u);
    CHECK(back[1].step == recs[1].step);
    CHECK(back[2].dt == recs[2].dt);

    // header line carries the exact column names
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "t,mass_u,mass_v,linf_u,linf_v,min_v,linf_grad_v,y_pq,h_pq,sing_p,dt,step");
}

TEST_CASE("empty record list yields a header-only file") {
    TempDir dir;
    const std::string path = dir.file("empty.csv");
    write_csv({}, path);
    CHECK(read_csv(path).empty());
}

TEST_CASE("csv reader rejects malformed input") {
    TempDir dir;
    const std::string bad_header = write_text(dir, "h.csv", "a,b,c\n");
    CHECK_THROWS_AS(read_csv(bad_header), IoError);
    const std::string short_row = write_text(
        dir, "s.csv",
        "t,mass_u,mass_v,linf_u,linf_v,min_v,linf_grad_v,y_pq,h_pq,sing_p,dt,step\n1,2,3\n");
    CHECK_THROWS_AS(read_csv(short_row), IoError);
    CHECK_THROWS_AS(read_csv(dir.file("nope.csv")), IoError);
}

TEST_CASE("CsvSink streams the same bytes as write_csv") {
    TempDir dir;
    std::vector<DiagRecord> recs(2);
    recs[0].t = 0.1;
    recs[0].h_pq = 3.333333333333333;
    recs[1].t = 0.2;
    recs[1].step = 42;
    const std::string batch = dir.file("batch.csv");
    const std::string stream = dir.file("stream.csv");
    write_csv(recs, batch);
    {
        CsvSink sink(stream);
        for (const DiagRecord& r : recs) sink.write(r);
        sink.close();
    }
    std::ifstream a(batch), b(stream);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("snapshot round-trips state and grid") {
    TempDir dir;
    Params p;
    p.chi = 1.0;
    p.r = 1.0;
    p.mu = 1.0;
    p.alpha = 1.0;
    p.beta = 1.0;
    p.k = 0.5;
    p.dim = 2;
    p.cells = {6, 4, 1};
    p.lengths = {2.0, 1.0, 1.0};
    p = validate_params(p);
    const Grid g = Grid::from_params(p);
    State s;
    s.t = 1.25;
    s.u.resize(g.total);
    s.v.resize(g.total);
    for (std::size_t c = 0; c < g.total; ++c) {
        s.u[c] = 0.1 * static_cast<double>(c) + 0.01;
        s.v[c] = 1.0 + 1.0 / (1.0 + static_cast<double>(c));
    }
    const std::string path = dir.file("state.chtx");
    write_snapshot(s, g, path);
    const auto [back, gback] = read_snapshot(path);
    CHECK(gback.dim == g.dim);
    CHECK(gback.cells[0] == g.cells[0]);
    CHECK(gback.cells[1] == g.cells[1]);
    CHECK(gback.lengths[0] == g.lengths[0]);
    CHECK(back.t == s.t);
    REQUIRE(back.u.size() == s.u.size());
    for (std::size_t c = 0; c < g.total; ++c) {
        CHECK(back.u[c] == s.u[c]);
        CHECK(back.v[c] == s.v[c]);
    }
}

TEST_CASE("snapshot reader rejects corrupt files") {
    TempDir dir;
    const std::string bad_magic = write_text(dir, "m.chtx", "NOPE!rest");
    CHECK_THROWS_WITH_AS(read_snapshot(bad_magic), doctest::Contains("not a CHTX1 snapshot"),
                         IoError);

    const std::string truncated_header = write_text(dir, "t.chtx", "CHTX1\x02");
    CHECK_THROWS_AS(read_snapshot(truncated_header), IoError);

    // valid header, payload cut short
    Params p;
    p.chi = p.r = p.mu = p.alpha = p.beta = 1.0;
    p.k = 0.5;
    p.dim = 1;
    p.cells = {8, 1, 1};
    p = validate_params(p);
    const Grid g = Grid::from_params(p);
    State s;
    s.u.assign(g.total, 1.0);
    s.v.assign(g.total, 2.0);
    const std::string path = dir.file("cut.chtx");
    write_snapshot(s, g, path);
    fs::resize_file(path, fs::file_size(path) - 8);
    CHECK_THROWS_WITH_AS(read_snapshot(path), doctest::Contains("truncated payload"), IoError);

    // trailing garbage
    write_snapshot(s, g, path);
    {
        std::ofstream out(path, std::ios::app | std::ios::binary);
        out << "extra";
    }
    CHECK_THROWS_WITH_AS(read_snapshot(path), doctest::Contains("oversized payload"), IoError);
}

TEST_CASE("load_initial_state resumes from a matching snapshot") {
    TempDir dir;
    Params p;
    p.chi = p.r = p.mu = p.alpha = p.beta = 1.0;
    p.k = 0.5;
    p.dim = 1;
    p.cells = {8, 1, 1};
    p = validate_params(p);
    const Grid g = Grid::from_params(p);
    State s;
    s.t = 0.75;
    s.u.assign(g.total, 0.5);
    s.v.assign(g.total, 1.5);
    const std::string path = dir.file("resume.chtx");
    write_snapshot(s, g, path);

    IcSpec ic;
    ic.kind = IcKind::from_snapshot;
    ic.snapshot_path = path;
    const State loaded = load_initial_state(ic, g, p, 1);
    CHECK(loaded.t == 0.75);
    CHECK(loaded.u[0] == 0.5);

    Params other = p;
    other.cells = {16, 1, 1};
    other = validate_params(other);
    const Grid g2 = Grid::from_params(other);
    CHECK_THROWS_WITH_AS(load_initial_state(ic, g2, other, 1),
                         doctest::Contains("snapshot grid does not match configuration"),
                         ValidationError);
}

TEST_CASE("load_initial_state passes generative kinds through") {
    Params p;
    p.chi = p.r = p.mu = p.alpha = p.beta = 1.0;
    p.k = 0.5;
    p.dim = 1;
    p.cells = {8, 1, 1};
    p = validate_params(p);
    const Grid g = Grid::from_params(p);
    IcSpec ic;
    ic.kind = IcKind::constant;
    ic.u0 = 0.25;
    ic.v0 = 2.0;
    const State s = load_initial_state(ic, g, p, 1);
    CHECK(s.u[0] == 0.25);
    CHECK(s.v[0] == 2.0);
}

TEST_CASE("sweep config parses lists and falls back to scalars") {
    TempDir dir;
    const std::string body =
        "t_end = 1.0\n"
        "mu_list = 0.5, 1.0, 2.0\n"
        "chi_list = 0.5,1.5\n"
        "workers = 3\n"
        "max_bisect_iters = 9\n"
        "out_json = custom.json\n"
        "seed = 11\n";
    const SweepConfig sc = parse_sweep_config(write_text(dir, "sweep.cfg", body));
    REQUIRE(sc.spec.mu.size() == 3);
    CHECK(sc.spec.mu[1] == 1.0);
    REQUIRE(sc.spec.chi.size() == 2);
    CHECK(sc.spec.chi[1] == 1.5);
    REQUIRE(sc.spec.k.size() == 1);  // scalar base fallback
    CHECK(sc.spec.k[0] == 0.5);
    CHECK(sc.spec.workers == 3);
    CHECK(sc.max_bisect_iters == 9);
    CHECK(sc.out_json == "custom.json");
    CHECK(sc.out_csv == "sweep.csv");
    CHECK(sc.spec.seed == 11);

    // sweep-only keys are rejected by the plain run parser
    CHECK_THROWS_AS(parse_config(write_text(dir, "rsweep.cfg", "t_end = 1\nmu_list = 1,2\n")),
                    ValidationError);
}

TEST_CASE("experiment outputs land on disk") {
    TempDir dir;
    SweepResult result;
    SweepCell cell;
    cell.mu = 1.0;
    cell.chi = 0.5;
    cell.k = 0.5;
    cell.status = RunStatus::completed;
    cell.cls = BoundednessClass::bounded;
    cell.sup_linf_u = 2.0;
    cell.sup_h_pq = 5.0;
    cell.abort_time = std::numeric_limits<double>::quiet_NaN();
    result.cells.push_back(cell);
    cell.mu = 0.1;
    cell.status = RunStatus::blowup_detected;
    cell.cls = BoundednessClass::aborted;
    cell.abort_time = 1.5;
    result.cells.push_back(cell);

    SweepSpec spec;
    spec.mu = {0.1, 1.0};
    spec.base.dim = 1;
    const std::string cpath = dir.file("sweep.csv");
    const std::string jpath = dir.file("sweep.json");
    write_sweep_csv(result, cpath);
    write_sweep_json(spec, result, jpath);
    CHECK(fs::file_size(cpath) > 0);
    std::ifstream jin(jpath);
    std::string js((std::istreambuf_iterator<char>(jin)), std::istreambuf_iterator<char>());
    CHECK(js.find("\"bounded\"") != std::string::npos);
    CHECK(js.find("\"aborted\"") != std::string::npos);
    CHECK(js.find("null") != std::string::npos);  // NaN abort time serializes as null

    BisectResult br;
    br.conclusive = true;
    br.mu_low = 0.4;
    br.mu_high = 0.5;
    br.transcript = {{0.1, BoundednessClass::aborted}, {1.0, BoundednessClass::bounded}};
    const std::string bpath = dir.file("bisect.json");
    write_bisect_json(spec, br, bpath);
    std::ifstream bin(bpath);
    std::string bs((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
    CHECK(bs.find("\"conclusive\": true") != std::string::npos);

    std::vector<ConvergenceRow> rows(2);
    rows[0].cells = 64;
    rows[1].cells = 128;
    rows[1].order_u = 1.0;
    const std::string cvpath = dir.file("mms.csv");
    write_convergence_csv(rows, cvpath);
    CHECK(fs::file_size(cvpath) > 0);

    std::vector<InequalityEntry> entries(1);
    entries[0].p = 2.0;
    entries[0].ratio = 0.19;
    const std::string ipath = dir.file("lemma.csv");
    write_inequality_csv(entries, ipath);
    CHECK(fs::file_size(ipath) > 0);
}
