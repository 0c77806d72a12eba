#pragma once

#include <string>
#include <vector>

#include "chtx/model.hpp"

namespace chtx {

// One monitored sample. Field order here is the CSV column contract.
struct DiagRecord {
    double t = 0.0;
    double mass_u = 0.0;       // integral of u
    double mass_v = 0.0;       // integral of v
    double linf_u = 0.0;
    double linf_v = 0.0;
    double min_v = 0.0;
    double linf_grad_v = 0.0;  // max face-gradient magnitude
    double y_pq = 0.0;         // integral of u^p + u^p v^{-q}
    double h_pq = 0.0;         // y_pq + integral of v^{p+1}
    double sing_p = 0.0;       // integral of u^p |grad v|^p / v^{kp}, 0 unless strong_eligible
    double dt = 0.0;
    long long step = 0;
};

inline constexpr const char* kDiagColumns[] = {
    "t", "mass_u", "mass_v", "linf_u", "linf_v", "min_v", "linf_grad_v",
    "y_pq", "h_pq", "sing_p", "dt", "step"};
inline constexpr int kDiagColumnCount = 12;

// Receives records from exactly one producer.
class RecordSink {
public:
    virtual ~RecordSink() = default;
    virtual void write(const DiagRecord& rec) = 0;
};

class VectorSink : public RecordSink {
public:
    void write(const DiagRecord& rec) override { records.push_back(rec); }
    std::vector<DiagRecord> records;
};

// Evaluates every monitored functional on a snapshot. Quadratures are cell
// sums times cell volume; |grad v| at a cell is the Euclidean norm of the
// averaged adjacent face gradients; v^{-q} and v^{-kp} use the raw field.
// Throws DiagnosticOverflow naming the first non-finite quantity.
DiagRecord eval_record(const State& s, const Grid& g, const FunctionalSpec& spec,
                       const Params& params, double dt = 0.0, long long step = 0);

// Outcome of a record-stream check. pass == no record violated the bound;
// worst_margin is the smallest slack seen (negative on failure);
// first_violation_t identifies the earliest offender (only when !pass).
struct CheckResult {
    bool pass = true;
    double worst_margin = 0.0;
    double first_violation_t = 0.0;
};

// mass_u(t) <= c1 (1 + tol), c1 = max{r |Omega| / mu, u0_mass}, per-record
// tol = 1e-6 + 2 dt r (one step of logistic drift).
double mass_bound_c1(const Params& p, const Grid& g, double u0_mass);
CheckResult check_mass_bound(const std::vector<DiagRecord>& records, const Params& p,
                             const Grid& g, double u0_mass);

// min_v(t) >= e^{-alpha t} v0_min (1 - tol), tol = 1e-8. Decay rate alpha:
// the ODE subsolution v' = -alpha v that the comparison argument supports.
CheckResult check_v_floor(const std::vector<DiagRecord>& records, const Params& p,
                          double v0_min, double tol = 1e-8);

// One corpus sample of the gradient-interpolation inequality
//   integral |grad w|^{2p} / w^p  <=  C1 integral |Delta w|^p + C2 integral w^p.
// ratio = lhs / (rhs_lap + rhs_mass); invariant under w -> c w.
struct InequalityEntry {
    double p = 0.0;
    double lhs = 0.0;       // integral |grad w|^{2p} / w^p
    double rhs_lap = 0.0;   // integral |Delta w|^p
    double rhs_mass = 0.0;  // integral w^p
    double ratio = 0.0;
};

InequalityEntry lemma24_ratio(const Field& w, double p, const Grid& g);

enum class BoundednessClass { bounded, growing, aborted, inconclusive };
std::string to_string(BoundednessClass c);

// Window comparison over the record stream: growing when max linf_u over the
// last window_fraction of records exceeds growth_tol times the max over the
// preceding window of the same length. Fewer than 10 records -> inconclusive.
BoundednessClass classify_boundedness(const std::vector<DiagRecord>& records, bool completed,
                                      double window_fraction = 0.2, double growth_tol = 1.05);

}  // namespace chtx
