#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "spreadout/cli_io.hpp"
#include "spreadout/exact.hpp"

using namespace spreadout;
namespace fs = std::filesystem;

namespace {

const char* kBaseConfig =
    "# comment\n"
    "[run]\n"
    "kind = exact\n"
    "seed = 7\n"
    "[model]\n"
    "d = 1\n"
    "L = 1\n"
    "eps = 1\n"
    "lambda = 0.8\n"
    "n_max = 2\n"
    "R = 2\n";

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("spreadout_test_" +
                                                  std::to_string(std::random_device{}()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("config parsing and validation") {
    const ExperimentConfig cfg = parse_config(kBaseConfig);
    CHECK(cfg.kind == "exact");
    CHECK(cfg.seed == 7);
    CHECK(cfg.lambda == doctest::Approx(0.8));
    CHECK(cfg.n_max == 2);
    validate_config(cfg);

    CHECK_THROWS_WITH_AS(validate_config(parse_config("[run]\nkind = flying\n")),
                         doctest::Contains("run.kind"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\nkind = exact\nwhatever = 1\n"),
                         doctest::Contains("run.whatever"), ValidationError);
    CHECK_THROWS_WITH_AS(validate_config(parse_config("[run]\nkind = fit\n")),
                         doctest::Contains("run.input"), ValidationError);
    CHECK_THROWS_WITH_AS(
        validate_config(parse_config("[run]\nkind = exact\n[model]\neps = 1.5\n")),
        doctest::Contains("model.eps"), ValidationError);
}

TEST_CASE("config hash: output-independent, order-independent, seed-sensitive") {
    const std::string base = config_hash(parse_config(kBaseConfig));
    CHECK(base.size() == 16);

    const std::string with_output =
        std::string(kBaseConfig) + "[output]\nfield = somewhere/else.csv\n";
    CHECK(config_hash(parse_config(with_output)) == base);

    // Same entries, different file order.
    const char* reordered =
        "[model]\nL = 1\nd = 1\nn_max = 2\nR = 2\nlambda = 0.8\neps = 1\n"
        "[run]\nseed = 7\nkind = exact\n";
    CHECK(config_hash(parse_config(reordered)) == base);

    std::string reseeded = kBaseConfig;
    reseeded.replace(reseeded.find("seed = 7"), 8, "seed = 8");
    CHECK(config_hash(parse_config(reseeded)) != base);
}

TEST_CASE("field csv round trip, with and without stderr") {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    SpaceTimeField f = SpaceTimeField::zeros(2, 1.0, 3, 2);
    SpaceTimeField e = SpaceTimeField::zeros(2, 1.0, 3, 2);
    for (double& v : f.data) v = u(gen);
    for (double& v : e.data) v = std::abs(u(gen));

    SpaceTimeField e2;
    bool has_stderr = false;
    const SpaceTimeField f2 = field_from_csv(field_to_csv(f, &e), &e2, &has_stderr);
    CHECK(has_stderr);
    CHECK(f2.max_abs_diff(f) == 0.0);
    CHECK(e2.max_abs_diff(e) == 0.0);

    const SpaceTimeField f3 = field_from_csv(field_to_csv(f), nullptr, &has_stderr);
    CHECK_FALSE(has_stderr);
    CHECK(f3.max_abs_diff(f) == 0.0);
}

TEST_CASE("field csv parse errors carry the line number") {
    CHECK_THROWS_WITH_AS(field_from_csv("bogus,header\n"), doctest::Contains("line 1"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(field_from_csv("t_index,offset0,value\n0,0,1\n0,zero,2\n"),
                         doctest::Contains("line 3"), ValidationError);
    CHECK_THROWS_WITH_AS(field_from_csv("t_index,offset0,value\n0,0\n"),
                         doctest::Contains("line 2"), ValidationError);
}

TEST_CASE("sidecar dimension mismatch is rejected on load") {
    TempDir tmp;
    const std::string path = tmp / "f.csv";
    FieldMetadata meta;
    meta.d = 2;  // csv below is 1-dimensional
    write_field_file(path, SpaceTimeField::delta(1, 1.0, 1, 1), meta);
    CHECK_THROWS_WITH_AS(read_field_file(path), doctest::Contains("does not match"),
                         ValidationError);
}

TEST_CASE("result store: round trip, corruption, gc") {
    TempDir tmp;
    const ResultStore store(tmp / "store");
    CHECK_FALSE(store.lookup("absent").has_value());
    store.store("alpha", "payload bytes\n123");
    auto hit = store.lookup("alpha");
    REQUIRE(hit.has_value());
    CHECK(*hit == "payload bytes\n123");

    // Corrupt the entry on disk: lookup treats it as a miss, gc removes it.
    store.store("beta", "other");
    for (const auto& entry : fs::directory_iterator(tmp / "store")) {
        std::ofstream out(entry.path(), std::ios::binary);
        out << "garbage";
        break;
    }
    int misses = 0;
    if (!store.lookup("alpha")) ++misses;
    if (!store.lookup("beta")) ++misses;
    CHECK(misses == 1);
    CHECK(store.gc() == 1);
    CHECK(store.gc() == 0);
}

TEST_CASE("experiment runner: deterministic artifacts, walk identity") {
    TempDir tmp;
    ExperimentConfig cfg = parse_config(kBaseConfig);
    cfg.out_field = tmp / "tau.csv";
    cfg.out_summary = tmp / "summary.json";
    const RunSummary s1 = run_experiment(cfg, tmp / "store");
    const std::string bytes1 = slurp(cfg.out_field);
    const RunSummary s2 = run_experiment(cfg, tmp / "store");
    CHECK(bytes1 == slurp(cfg.out_field));
    CHECK(s1.json == s2.json);
    CHECK(s1.config_hash == config_hash(cfg));

    // The artifact equals the direct oracle.
    ModelParams p;
    p.kernel = make_uniform_kernel(1, 1);
    p.lambda = 0.8;
    p.n_max = 2;
    p.R = 2;
    const LoadedField back = read_field_file(cfg.out_field);
    CHECK(back.field.max_abs_diff(exact_two_point_dp(p)) == 0.0);
    CHECK(back.meta.config_hash == s1.config_hash);
    CHECK(back.meta.code_version == std::string(kCodeVersion));

    // Walk pipeline: closed form against the forward recursion.
    ExperimentConfig rw = parse_config(
        "[run]\nkind = rw\ngrid_m = 16\n[model]\nd = 1\nL = 1\neps = 0.5\n"
        "lambda = 1\nn_max = 8\nR = 8\n");
    const RunSummary rs = run_experiment(rw, tmp / "store");
    CHECK(rs.json.find("max_abs_diff") != std::string::npos);
}

TEST_CASE("fits refuse inputs with mixed config hashes") {
    TempDir tmp;
    ExperimentConfig a = parse_config(
        "[run]\nkind = exact\n[model]\nd = 1\nL = 1\neps = 1\nlambda = 0.8\nn_max = 4\nR = 4\n");
    a.out_field = tmp / "a.csv";
    run_experiment(a, tmp / "store");
    ExperimentConfig b = a;
    b.out_field = tmp / "b.csv";
    // Different producing config -> different hash in the sidecar.
    for (auto& [k, v] : b.entries)
        if (k == "model.lambda") v = "0.7";
    b.lambda = 0.7;
    run_experiment(b, tmp / "store");

    ExperimentConfig fit = parse_config(
        "[run]\nkind = fit\ninput = unused\n[model]\nd = 1\nL = 1\neps = 1\n"
        "lambda = 0.8\nn_max = 4\nR = 4\n");
    fit.input = a.out_field + "," + b.out_field;
    CHECK_THROWS_WITH_AS(run_experiment(fit, tmp / "store"),
                         doctest::Contains("mixed config hashes"), ValidationError);
}
