#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chtx/experiments.hpp"
#include "chtx/integrator.hpp"

namespace chtx {

// Everything a single run needs, assembled from a flat key=value file.
struct RunConfig {
    Params params;
    SchemeConfig scheme;
    VFloorPolicy floor;
    IcSpec ic;
    std::uint64_t seed = 1;
    double p = 4.0;
    double q = 2.0;
    DiagSpec diag;
    std::string out_csv = "diagnostics.csv";
    std::string out_snapshot;  // empty: no final snapshot
};

// Flat key=value grammar, one pair per line, "#" starts a comment. Unknown
// and duplicate keys are rejected (duplicates name both lines); t_end is the
// only required key; all other keys default. Values are routed through the
// module validators, so errors name the offending key/constraint.
RunConfig parse_config(const std::string& path);

// Sweep/bisect mode: run keys plus mu_list / chi_list / k_list (comma
// separated), workers, and max_bisect_iters. A missing list falls back to
// the scalar base value.
struct SweepConfig {
    SweepSpec spec;
    int max_bisect_iters = 6;
    std::string out_csv = "sweep.csv";
    std::string out_json = "sweep.json";
};
SweepConfig parse_sweep_config(const std::string& path);

// Canonical echo of an effective configuration: every key explicit, doubles
// at 17 significant digits. parse_config(render) reproduces the run
// bit-identically.
std::string render_config(const RunConfig& cfg);

// DiagRecord CSV: header row with the exact column names in declared order,
// doubles at 17 significant digits (round-trip exact).
void write_csv(const std::vector<DiagRecord>& records, const std::string& path);
std::vector<DiagRecord> read_csv(const std::string& path);

// Streaming variant of write_csv for long runs.
class CsvSink : public RecordSink {
public:
    explicit CsvSink(const std::string& path);
    ~CsvSink() override;
    void write(const DiagRecord& rec) override;
    void close();  // flush and fail loudly instead of silently in the destructor

private:
    std::string path_;
    void* file_ = nullptr;  // FILE*
};

// Snapshot: "CHTX1" magic, u32 dim, u64 cells and f64 length per axis,
// f64 time, then u and v as little-endian f64 in row-major order. The
// payload must be exactly 2 * total * 8 bytes.
void write_snapshot(const State& s, const Grid& g, const std::string& path);
std::pair<State, Grid> read_snapshot(const std::string& path);

// Resolves any IcSpec into a State: generative kinds via
// make_initial_condition, from_snapshot by loading and checking that the
// stored grid matches the configured one (the stored time is kept, so runs
// resume where the snapshot left off).
State load_initial_state(const IcSpec& ic, const Grid& g, const Params& p, std::uint64_t seed);

// Experiment outputs.
void write_sweep_csv(const SweepResult& result, const std::string& path);
void write_sweep_json(const SweepSpec& spec, const SweepResult& result, const std::string& path);
void write_bisect_json(const SweepSpec& spec, const BisectResult& result,
                       const std::string& path);
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path);
void write_inequality_csv(const std::vector<InequalityEntry>& entries, const std::string& path);

}  // namespace chtx
