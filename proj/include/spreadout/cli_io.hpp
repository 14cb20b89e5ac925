// cli_io.hpp -- experiment configuration, field (de)serialization, the
// content-addressed result store, and the experiment runner gluing the
// engines into reproducible pipelines.
//
// Config files are INI-style ([section] / key = value, '#' comments).  Field
// artifacts are CSV (header t_index,offset0..offset{d-1},value[,stderr], 17
// significant digits, decimal round-trip exact) with a JSON metadata sidecar
// at <path>.json.  Every artifact is stamped with the config hash and code
// version.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spreadout/field.hpp"
#include "spreadout/induction.hpp"
#include "spreadout/model.hpp"

namespace spreadout {

inline constexpr const char* kCodeVersion = "1.0.0";

struct ExperimentConfig {
    // [run]
    std::string kind;            // simulate exact invert diagrams induct critical
                                 // fit rw continuum scaled-range triangle
    std::string backend = "exact";  // mc | exact
    long samples = 1000;
    std::uint64_t seed = 1;
    int threads = 0;
    int n_cut = -1;      // triangle cutoff (default n_max)
    int N_max = 2;       // diagram levels
    int halvings = 3;    // continuum halvings
    int grid_m = 64;     // dual-grid size per axis
    double t = 1.0;      // continuum target time
    double T = 8.0;      // scaled-range time scale
    double b = 1.0;      // scaled-range exponent
    double L1 = 1.0;     // scaled-range base range
    double lo = 0.0, hi = 0.0, tol = 1e-4;  // critical bisection bracket
    std::string input;   // input field file (invert, fit)

    // [model]
    int d = 1, L = 1;
    double eps = 1.0, lambda = 1.0;
    int n_max = 0, R = 0;
    std::vector<double> lambda_grid;  // fit kind

    // [constants]
    InductionConstants constants;
    bool constants_given = false;

    // [output]
    std::string out_field;    // main field artifact
    std::string out_summary;  // JSON summary record
    std::string out_report;   // CSV report (induct)

    // Raw entries in file order, for hashing and error reporting.
    std::vector<std::pair<std::string, std::string>> entries;  // section.key -> value
};

// Parse / load; unknown keys are rejected by validate_config with the
// offending "section.key" named.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

// Hash over all non-output entries (output paths excluded by contract).
std::string config_hash(const ExperimentConfig& cfg);

// --- field files ------------------------------------------------------------------

struct FieldMetadata {
    int d = 1, L = 1;
    double eps = 1.0, lambda = 1.0;
    int n_max = 0, R = 0;
    std::uint64_t seed = 0;
    long samples = 0;
    std::string kind;
    std::string config_hash;
    std::string code_version = kCodeVersion;
};

std::string field_to_csv(const SpaceTimeField& f, const SpaceTimeField* stderr_ = nullptr);
// Throws ValidationError with the line number on malformed input or a header
// that does not announce d offset columns.
SpaceTimeField field_from_csv(const std::string& text, SpaceTimeField* stderr_out = nullptr,
                              bool* has_stderr = nullptr);

void write_field_file(const std::string& path, const SpaceTimeField& f, const FieldMetadata& meta,
                      const SpaceTimeField* stderr_ = nullptr);

struct LoadedField {
    SpaceTimeField field;
    SpaceTimeField stderr_;
    bool has_stderr = false;
    FieldMetadata meta;
};
LoadedField read_field_file(const std::string& path);

// --- result store -----------------------------------------------------------------

// Content-addressed blob store under root (argument, else $SPREADOUT_STORE,
// else ".spreadout-store").  Entries are checksummed; a corrupt entry is a
// miss with a warning on stderr.
class ResultStore {
public:
    explicit ResultStore(std::string root = "");
    const std::string& root() const { return root_; }
    void store(const std::string& key, const std::string& bytes) const;
    std::optional<std::string> lookup(const std::string& key) const;
    // Remove corrupt entries; returns the number removed.
    int gc() const;

private:
    std::string root_;
    std::string path_for(const std::string& key) const;
};

// --- runner -----------------------------------------------------------------------

struct RunSummary {
    std::string kind;
    std::string config_hash;
    std::string json;  // the full summary record (also written to out_summary)
};

// Dispatch on cfg.kind; deterministic given (config, seed).  Cached pi
// extractions (critical, induct) go through the store.
RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& store_root = "");

}  // namespace spreadout
