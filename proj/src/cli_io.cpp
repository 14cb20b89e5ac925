// cli_io.cpp -- config parsing, field serialization, result store, runner.

#include "spreadout/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spreadout/analysis.hpp"
#include "spreadout/diagrams.hpp"
#include "spreadout/exact.hpp"
#include "spreadout/lace.hpp"
#include "spreadout/simulate.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace spreadout {

namespace {

const std::vector<std::string> kKinds = {"simulate", "exact",     "invert",       "diagrams",
                                         "induct",   "critical",  "fit",          "rw",
                                         "continuum", "scaled-range", "triangle"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw ValidationError("config: key '" + key + "' " + why);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        bad_key(key, "is not a number: '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        bad_key(key, "is not an integer: '" + v + "'");
    }
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ModelParams make_params(const ExperimentConfig& cfg) {
    ModelParams p;
    p.kernel = make_uniform_kernel(cfg.d, cfg.L);
    p.eps = cfg.eps;
    p.lambda = cfg.lambda;
    p.n_max = cfg.n_max;
    p.R = cfg.R;
    validate_params(p);
    return p;
}

void write_text(const std::string& path, const std::string& text) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json meta_to_json(const FieldMetadata& m) {
    return json{{"d", m.d},           {"L", m.L},
                {"eps", m.eps},       {"lambda", m.lambda},
                {"n_max", m.n_max},   {"R", m.R},
                {"seed", m.seed},     {"samples", m.samples},
                {"kind", m.kind},     {"config_hash", m.config_hash},
                {"code_version", m.code_version}};
}

FieldMetadata meta_from_json(const json& j) {
    FieldMetadata m;
    m.d = j.at("d").get<int>();
    m.L = j.at("L").get<int>();
    m.eps = j.at("eps").get<double>();
    m.lambda = j.at("lambda").get<double>();
    m.n_max = j.at("n_max").get<int>();
    m.R = j.at("R").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.samples = j.at("samples").get<long>();
    m.kind = j.value("kind", "");
    m.config_hash = j.value("config_hash", "");
    m.code_version = j.value("code_version", "");
    return m;
}

FieldMetadata make_meta(const ExperimentConfig& cfg, const std::string& kind) {
    FieldMetadata m;
    m.d = cfg.d;
    m.L = cfg.L;
    m.eps = cfg.eps;
    m.lambda = cfg.lambda;
    m.n_max = cfg.n_max;
    m.R = cfg.R;
    m.seed = cfg.seed;
    m.samples = cfg.samples;
    m.kind = kind;
    m.config_hash = config_hash(cfg);
    return m;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config line " + std::to_string(line_no) +
                                      ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        cfg.entries.emplace_back(key, value);
    }

    for (const auto& [key, value] : cfg.entries) {
        if (key == "run.kind") cfg.kind = value;
        else if (key == "run.backend") cfg.backend = value;
        else if (key == "run.samples") cfg.samples = to_long(key, value);
        else if (key == "run.seed") cfg.seed = static_cast<std::uint64_t>(to_long(key, value));
        else if (key == "run.threads") cfg.threads = static_cast<int>(to_long(key, value));
        else if (key == "run.n_cut") cfg.n_cut = static_cast<int>(to_long(key, value));
        else if (key == "run.N_max") cfg.N_max = static_cast<int>(to_long(key, value));
        else if (key == "run.halvings") cfg.halvings = static_cast<int>(to_long(key, value));
        else if (key == "run.grid_m") cfg.grid_m = static_cast<int>(to_long(key, value));
        else if (key == "run.t") cfg.t = to_double(key, value);
        else if (key == "run.T") cfg.T = to_double(key, value);
        else if (key == "run.b") cfg.b = to_double(key, value);
        else if (key == "run.L1") cfg.L1 = to_double(key, value);
        else if (key == "run.lo") cfg.lo = to_double(key, value);
        else if (key == "run.hi") cfg.hi = to_double(key, value);
        else if (key == "run.tol") cfg.tol = to_double(key, value);
        else if (key == "run.input") cfg.input = value;
        else if (key == "model.d") cfg.d = static_cast<int>(to_long(key, value));
        else if (key == "model.L") cfg.L = static_cast<int>(to_long(key, value));
        else if (key == "model.eps") cfg.eps = to_double(key, value);
        else if (key == "model.lambda") cfg.lambda = to_double(key, value);
        else if (key == "model.n_max") cfg.n_max = static_cast<int>(to_long(key, value));
        else if (key == "model.R") cfg.R = static_cast<int>(to_long(key, value));
        else if (key == "model.lambda_grid") {
            std::istringstream gs(value);
            std::string tok;
            while (std::getline(gs, tok, ',')) {
                tok = trim(tok);
                if (!tok.empty()) cfg.lambda_grid.push_back(to_double(key, tok));
            }
        } else if (key == "constants.K1") { cfg.constants.K1 = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.K2") { cfg.constants.K2 = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.K3") { cfg.constants.K3 = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.K4") { cfg.constants.K4 = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.K5") { cfg.constants.K5 = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.gamma") { cfg.constants.gamma = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.delta") { cfg.constants.delta = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.rho") { cfg.constants.rho = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.Delta") { cfg.constants.Delta = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.omega") { cfg.constants.omega = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.beta_hat") { cfg.constants.beta_hat = to_double(key, value); cfg.constants_given = true; }
        else if (key == "constants.low_dim") { cfg.constants.low_dim = to_long(key, value) != 0; cfg.constants_given = true; }
        else if (key == "output.field") cfg.out_field = value;
        else if (key == "output.summary") cfg.out_summary = value;
        else if (key == "output.report") cfg.out_report = value;
        else bad_key(key, "is not recognized");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

void validate_config(const ExperimentConfig& cfg) {
    if (std::find(kKinds.begin(), kKinds.end(), cfg.kind) == kKinds.end())
        bad_key("run.kind", "must be one of simulate exact invert diagrams induct critical fit "
                            "rw continuum scaled-range triangle");
    if (cfg.backend != "mc" && cfg.backend != "exact")
        bad_key("run.backend", "must be mc or exact");
    if (cfg.samples < 1) bad_key("run.samples", "must be >= 1");
    if (cfg.d < 1) bad_key("model.d", "must be >= 1");
    if (cfg.L < 1) bad_key("model.L", "must be >= 1");
    if (cfg.eps <= 0.0 || cfg.eps > 1.0) bad_key("model.eps", "must lie in (0, 1]");
    if (cfg.lambda < 0.0) bad_key("model.lambda", "must be >= 0");
    if (cfg.n_max < 0) bad_key("model.n_max", "must be >= 0");
    if (cfg.R < 0) bad_key("model.R", "must be >= 0");
    if (cfg.grid_m < 2 || cfg.grid_m % 2 != 0) bad_key("run.grid_m", "must be even and >= 2");
    if (cfg.halvings < 1) bad_key("run.halvings", "must be >= 1");
    if ((cfg.kind == "invert" || cfg.kind == "fit") && cfg.input.empty())
        bad_key("run.input", "is required for this kind");
    if (cfg.kind == "critical" && !(cfg.lo < cfg.hi))
        bad_key("run.lo", "bisection bracket needs lo < hi");
    if (cfg.kind == "scaled-range" && cfg.b * cfg.d + 0.5 * (cfg.d - 4.0) <= 0.0)
        bad_key("run.b", "needs alpha = b*d + (d-4)/2 > 0");
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::vector<std::string> lines;
    for (const auto& [key, value] : cfg.entries)
        if (key.rfind("output.", 0) != 0) lines.push_back(key + "=" + value);
    std::sort(lines.begin(), lines.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& l : lines) h = fnv1a(l + "\n", h);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- field files --------------------------------------------------------------------

std::string field_to_csv(const SpaceTimeField& f, const SpaceTimeField* stderr_) {
    if (stderr_ && (stderr_->d != f.d || stderr_->n_max != f.n_max || stderr_->R != f.R))
        throw ValidationError("field_to_csv: stderr window does not match field");
    std::ostringstream out;
    out << "t_index";
    for (int c = 0; c < f.d; ++c) out << ",offset" << c;
    out << ",value";
    if (stderr_) out << ",stderr";
    out << "\n";
    const Box box = f.box();
    const long S = box.size();
    std::vector<int> x(f.d);
    for (int n = 0; n <= f.n_max; ++n)
        for (long s = 0; s < S; ++s) {
            box.coords(s, x.data());
            out << n;
            for (int c = 0; c < f.d; ++c) out << ',' << x[c];
            out << ',' << fmt17(f.at(n, s));
            if (stderr_) out << ',' << fmt17(stderr_->at(n, s));
            out << "\n";
        }
    return out.str();
}

SpaceTimeField field_from_csv(const std::string& text, SpaceTimeField* stderr_out,
                              bool* has_stderr_out) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ValidationError("field csv: empty file");
    ++line_no;
    std::vector<std::string> cols;
    {
        std::istringstream hs(trim(line));
        std::string tok;
        while (std::getline(hs, tok, ',')) cols.push_back(trim(tok));
    }
    bool has_stderr = !cols.empty() && cols.back() == "stderr";
    const int d = static_cast<int>(cols.size()) - 2 - (has_stderr ? 1 : 0);
    if (d < 1 || cols[0] != "t_index" || cols[d + 1] != "value")
        throw ValidationError("field csv line 1: bad header, expected "
                              "t_index,offset...,value[,stderr]");
    for (int c = 0; c < d; ++c)
        if (cols[1 + c] != "offset" + std::to_string(c))
            throw ValidationError("field csv line 1: bad offset column " + cols[1 + c]);

    struct Row {
        int n;
        std::vector<int> x;
        double v, e;
    };
    std::vector<Row> rows;
    int n_max = 0, R = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        Row r;
        r.x.resize(d);
        r.e = 0.0;
        const std::string where = "field csv line " + std::to_string(line_no);
        auto next = [&](const char* what) {
            if (!std::getline(ls, tok, ','))
                throw ValidationError(where + ": missing " + what);
            return trim(tok);
        };
        try {
            r.n = std::stoi(next("t_index"));
            for (int c = 0; c < d; ++c) r.x[c] = std::stoi(next("offset"));
            r.v = std::stod(next("value"));
            if (has_stderr) r.e = std::stod(next("stderr"));
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError(where + ": malformed number");
        }
        if (std::getline(ls, tok, ','))
            throw ValidationError(where + ": trailing fields");
        if (r.n < 0) throw ValidationError(where + ": negative t_index");
        n_max = std::max(n_max, r.n);
        for (int c = 0; c < d; ++c) R = std::max(R, std::abs(r.x[c]));
        rows.push_back(std::move(r));
    }
    SpaceTimeField f = SpaceTimeField::zeros(d, 1.0, n_max, R);
    SpaceTimeField e = SpaceTimeField::zeros(d, 1.0, n_max, R);
    for (const auto& r : rows) {
        f.set(r.n, r.x, r.v);
        if (has_stderr) e.set(r.n, r.x, r.e);
    }
    if (stderr_out) *stderr_out = std::move(e);
    if (has_stderr_out) *has_stderr_out = has_stderr;
    return f;
}

void write_field_file(const std::string& path, const SpaceTimeField& f, const FieldMetadata& meta,
                      const SpaceTimeField* stderr_) {
    write_text(path, field_to_csv(f, stderr_));
    write_text(path + ".json", meta_to_json(meta).dump(2) + "\n");
}

LoadedField read_field_file(const std::string& path) {
    LoadedField out;
    out.field = field_from_csv(read_text(path), &out.stderr_, &out.has_stderr);
    out.meta = meta_from_json(json::parse(read_text(path + ".json")));
    if (out.meta.d != out.field.d)
        throw ValidationError("field file " + path + ": sidecar d=" + std::to_string(out.meta.d) +
                              " does not match csv d=" + std::to_string(out.field.d));
    out.field.eps = out.meta.eps;
    out.stderr_.eps = out.meta.eps;
    return out;
}

// --- result store -------------------------------------------------------------------

ResultStore::ResultStore(std::string root) : root_(std::move(root)) {
    if (root_.empty()) {
        const char* env = std::getenv("SPREADOUT_STORE");
        root_ = env && *env ? env : ".spreadout-store";
    }
}

std::string ResultStore::path_for(const std::string& key) const {
    std::string safe = key;
    for (char& c : safe)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
    return (fs::path(root_) / safe).string();
}

void ResultStore::store(const std::string& key, const std::string& bytes) const {
    fs::create_directories(root_);
    char head[64];
    std::snprintf(head, sizeof head, "store-v1 %016llx\n",
                  static_cast<unsigned long long>(fnv1a(bytes)));
    write_text(path_for(key), head + bytes);
}

std::optional<std::string> ResultStore::lookup(const std::string& key) const {
    const std::string path = path_for(key);
    if (!fs::exists(path)) return std::nullopt;
    std::string text;
    try {
        text = read_text(path);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
    const auto nl = text.find('\n');
    unsigned long long want = 0;
    if (nl == std::string::npos ||
        std::sscanf(text.c_str(), "store-v1 %16llx", &want) != 1 ||
        fnv1a(text.substr(nl + 1)) != want) {
        std::cerr << "warning: corrupt store entry '" << key << "', treating as miss\n";
        return std::nullopt;
    }
    return text.substr(nl + 1);
}

int ResultStore::gc() const {
    if (!fs::exists(root_)) return 0;
    int removed = 0;
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (!entry.is_regular_file()) continue;
        std::string text;
        try {
            text = read_text(entry.path().string());
        } catch (const ValidationError&) {
            continue;
        }
        const auto nl = text.find('\n');
        unsigned long long want = 0;
        const bool ok = nl != std::string::npos &&
                        std::sscanf(text.c_str(), "store-v1 %16llx", &want) == 1 &&
                        fnv1a(text.substr(nl + 1)) == want;
        if (!ok) {
            fs::remove(entry.path());
            ++removed;
        }
    }
    return removed;
}

// --- runner -------------------------------------------------------------------------

namespace {

// Exact-backend pi extraction with store-level caching.
PiExtractor cached_exact_extractor(const ModelParams& base, const ResultStore& store,
                                   const std::string& hash) {
    return [base, &store, hash](double lambda) {
        const std::string key = hash + "-pi-" + fmt17(lambda);
        if (auto hit = store.lookup(key)) {
            SpaceTimeField pi = field_from_csv(*hit);
            pi.eps = base.eps;
            return pi;
        }
        ModelParams p = base;
        p.lambda = lambda;
        SpaceTimeField pi = invert_to_pi(p, exact_two_point_dp(p));
        store.store(key, field_to_csv(pi));
        return pi;
    };
}

json constants_json(const LaceConstants& c) {
    return json{{"residual", c.residual}, {"A", c.A},
                {"v", c.v},               {"pi_sum", c.pi_sum},
                {"n_used", c.n_used},     {"denom", c.denom},
                {"denom_margin", c.denom_margin}, {"tail_slope", c.tail_slope},
                {"tail_estimate", c.tail_estimate}};
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const fs::path p(path);
    fs::path out = p.parent_path() / (p.stem().string() + suffix + p.extension().string());
    return out.string();
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& store_root) {
    validate_config(cfg);
    const std::string hash = config_hash(cfg);
    const ResultStore store(store_root);
    json summary{{"kind", cfg.kind}, {"config_hash", hash}, {"code_version", kCodeVersion}};

    if (cfg.kind == "simulate") {
        const ModelParams params = make_params(cfg);
        const EstimatorResult est =
            estimate_two_point(params, cfg.samples, cfg.seed, cfg.threads);
        if (!cfg.out_field.empty())
            write_field_file(cfg.out_field, est.mean, make_meta(cfg, cfg.kind), &est.stderr_);
        summary["samples"] = est.samples;
        summary["susceptibility_partial"] = est.susceptibility_partial;
        summary["final_mass"] = est.per_slice.back().tau_hat0;
    } else if (cfg.kind == "exact") {
        const ModelParams params = make_params(cfg);
        const SpaceTimeField tau = exact_two_point_dp(params);
        if (!cfg.out_field.empty())
            write_field_file(cfg.out_field, tau, make_meta(cfg, cfg.kind));
        summary["final_mass"] = tau.slice_sum(tau.n_max);
    } else if (cfg.kind == "invert") {
        const LoadedField in = read_field_file(cfg.input);
        ModelParams params = make_params(cfg);
        params.n_max = in.field.n_max;
        params.R = in.field.R;
        const SpaceTimeField pi = invert_to_pi(params, in.field);
        if (!cfg.out_field.empty())
            write_field_file(cfg.out_field, pi, make_meta(cfg, cfg.kind));
        const SpaceTimeField d0 = SpaceTimeField::delta(pi.d, pi.eps, 0, pi.R);
        double slice0_dev = 0.0;
        for (long s = 0; s < pi.slice_size(); ++s)
            slice0_dev = std::max(slice0_dev, std::abs(pi.at(0, s) - d0.at(0, s)));
        summary["slice0_delta_dev"] = slice0_dev;
        summary["slice1_sup"] = pi.n_max >= 1 ? pi.slice_sup(1) : 0.0;
    } else if (cfg.kind == "diagrams") {
        const ModelParams params = make_params(cfg);
        const SpaceTimeField tau = cfg.backend == "exact"
                                       ? exact_two_point_dp(params)
                                       : estimate_two_point(params, cfg.samples, cfg.seed,
                                                            cfg.threads).mean;
        const DiagramBounds bounds = build_diagram_bounds(tau, params, cfg.N_max);
        json masses = json::array();
        for (int N = 0; N <= cfg.N_max; ++N) {
            if (!cfg.out_field.empty()) {
                FieldMetadata meta = make_meta(cfg, cfg.kind + ":P" + std::to_string(N));
                write_field_file(with_suffix(cfg.out_field, "_P" + std::to_string(N)),
                                 bounds.P[N], meta);
            }
            masses.push_back(bounds.P[N].slice_sum(params.n_max));
        }
        summary["final_slice_masses"] = masses;
    } else if (cfg.kind == "induct") {
        const ModelParams params = make_params(cfg);
        const SpaceTimeField tau = exact_two_point_dp(params);
        const SpaceTimeField pi = invert_to_pi(params, tau);
        const FourierGrid grid = fourier_transform(params.kernel, cfg.grid_m);
        const InductionConstants consts =
            cfg.constants_given ? cfg.constants : default_constants(cfg.d);
        InductionState st = make_induction_state(params, tau, pi, grid, consts);
        st.lambda_n = lambda_sequence(params, cached_exact_extractor(params, store, hash),
                                      params.n_max);
        v_and_r_sequences(st);
        const HypothesisReport rep = check_hypotheses(st, params.n_max);
        if (!cfg.out_report.empty()) write_text(cfg.out_report, report_to_csv(rep));
        double rec = 0.0;
        for (int m = 0; m <= params.n_max; ++m)
            rec = std::max(rec, reconstruction_error(st, m));
        summary["all_pass"] = rep.all_pass;
        summary["worst_margin"] = rep.worst_margin;
        summary["worst_m"] = rep.worst_m;
        summary["worst_hypothesis"] = rep.worst_hypothesis;
        summary["intervals_nested"] = rep.intervals_nested;
        summary["reconstruction_error"] = rec;
        summary["excluded_points"] = st.excluded.size();
    } else if (cfg.kind == "critical") {
        const ModelParams params = make_params(cfg);
        const CriticalPoint cp = find_lambda_c(
            params, cached_exact_extractor(params, store, hash), cfg.lo, cfg.hi, cfg.tol);
        summary["lambda_c"] = cp.lambda_c;
        summary["iterations"] = cp.iterations;
        summary["constants"] = constants_json(cp.constants);
    } else if (cfg.kind == "fit") {
        // run.input may list several artifacts; they must come from one
        // producing config (mixed hashes are refused).
        std::vector<std::string> inputs;
        {
            std::istringstream is(cfg.input);
            std::string tok;
            while (std::getline(is, tok, ','))
                if (!trim(tok).empty()) inputs.push_back(trim(tok));
        }
        LoadedField in = read_field_file(inputs.front());
        for (std::size_t i = 1; i < inputs.size(); ++i) {
            const LoadedField other = read_field_file(inputs[i]);
            if (other.meta.config_hash != in.meta.config_hash)
                throw ValidationError("fit: mixed config hashes across inputs: " +
                                      inputs.front() + " vs " + inputs[i]);
        }
        if (in.meta.d != cfg.d) bad_key("model.d", "does not match the input field");
        KernelD kernel = make_uniform_kernel(in.meta.d, in.meta.L);
        GaussianFitInput gin;
        gin.d = in.meta.d;
        gin.eps = in.meta.eps;
        gin.sigma2 = kernel_moments(kernel).sigma2;
        for (int n = std::max(1, in.field.n_max / 2); n <= in.field.n_max; ++n)
            gin.slices.push_back(n);
        gin.probes = default_probes(gin.d);
        const SpaceTimeField& f = in.field;
        const ScalingFit fit = gaussian_fit(
            [&f](int n, const std::vector<double>& k) { return f.fourier(n, k); }, gin);
        summary["A"] = fit.A;
        summary["v"] = fit.v;
        summary["residual"] = fit.residual;
        summary["drift"] = fit.drift;
        summary["input_config_hash"] = in.meta.config_hash;
    } else if (cfg.kind == "rw") {
        const ModelParams params = make_params(cfg);
        const SpaceTimeField pi =
            SpaceTimeField::delta(cfg.d, cfg.eps, cfg.n_max, cfg.R);
        const SpaceTimeField tau = forward_solve(params, pi);
        const FourierGrid grid = fourier_transform(params.kernel, cfg.grid_m);
        const RwClosedForm closed = rw_closed_form(params, grid);
        double worst = 0.0;
        std::ostringstream table;
        table << "t_index,k_index,observed,model,residual\n";
        for (int n = 0; n <= cfg.n_max; ++n)
            for (long j = 0; j < grid.size(); ++j) {
                const double obs = tau.fourier(n, grid.kvec(j));
                const double mod = closed.discrete[n][j];
                worst = std::max(worst, std::abs(obs - mod));
                table << n << ',' << j << ',' << fmt17(obs) << ',' << fmt17(mod) << ','
                      << fmt17(obs - mod) << "\n";
            }
        if (!cfg.out_field.empty()) write_text(cfg.out_field, table.str());
        summary["max_abs_diff"] = worst;
    } else if (cfg.kind == "continuum") {
        ModelParams base = make_params(cfg);
        const FieldBackend backend = [](const ModelParams& p) { return exact_two_point_dp(p); };
        const ContinuumStudy study = continuum_study(base, cfg.t, cfg.halvings, backend, true);
        summary["eps_values"] = study.eps_values;
        summary["tau_diffs"] = study.tau_diffs;
        summary["tau_ratios"] = study.tau_ratios;
        summary["pi_diffs"] = study.pi_diffs;
        summary["pi_ratios"] = study.pi_ratios;
        summary["cauchy"] = study.cauchy;
    } else if (cfg.kind == "scaled-range") {
        ScaledRangeConfig sc;
        sc.d = cfg.d;
        sc.b = cfg.b;
        sc.L1 = cfg.L1;
        sc.T = cfg.T;
        // Auto-calibrate the coupling unless the config pins model.lambda.
        const bool lambda_given =
            std::any_of(cfg.entries.begin(), cfg.entries.end(),
                        [](const auto& e) { return e.first == "model.lambda"; });
        sc.lambda = lambda_given ? cfg.lambda : 0.0;
        sc.samples = cfg.samples;
        sc.seed = cfg.seed;
        sc.threads = cfg.threads;
        const ScaledRangeResult res = scaled_range_experiment(sc);
        summary["alpha"] = res.alpha;
        summary["L_T"] = res.L_T;
        summary["sigma2_T"] = res.sigma2_T;
        summary["beta_T"] = res.beta_T;
        summary["lambda_used"] = res.lambda_used;
        summary["horizon"] = res.horizon;
        summary["A"] = res.fit.A;
        summary["v"] = res.fit.v;
        summary["drift"] = res.fit.drift;
        summary["residual"] = res.fit.residual;
    } else if (cfg.kind == "triangle") {
        const ModelParams params = make_params(cfg);
        const SpaceTimeField tau = cfg.backend == "exact"
                                       ? exact_two_point_dp(params)
                                       : rw_two_point(params);
        const FourierGrid grid = fourier_transform(params.kernel, cfg.grid_m);
        const int n_cut = cfg.n_cut >= 0 ? cfg.n_cut : params.n_max;
        const TriangleEstimate tri = triangle_estimate(tau, grid, n_cut);
        summary["value"] = tri.value;
        summary["tail"] = tri.tail;
        summary["tail_slope"] = tri.tail_slope;
        summary["x_space"] = triangle_x_space(tau, n_cut);
    }

    RunSummary out;
    out.kind = cfg.kind;
    out.config_hash = hash;
    out.json = summary.dump(2) + "\n";
    if (!cfg.out_summary.empty()) write_text(cfg.out_summary, out.json);
    return out;
}

}  // namespace spreadout
