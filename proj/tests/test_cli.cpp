#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "qvar/json_io.hpp"

using qvar::ojson;

namespace {

const char* cli_path() {
#ifdef QVAR_CLI_PATH
    return QVAR_CLI_PATH;
#else
    return "./qvar";
#endif
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(cli_path()) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool file_exists(const std::string& path) { return std::ifstream(path).good(); }

}  // namespace

TEST_CASE("metric subcommand reproduces the assignment example") {
    ojson cfg;
    cfg["T1"] = {{"n", 2}, {"points", {{0.0, 0.0}, {2.0, 0.0}}}};
    cfg["T2"] = {{"n", 2}, {"points", {{1.0, 0.0}, {3.0, 0.0}}}};
    write_file("cli_metric.json", cfg.dump());
    REQUIRE(run_cli("metric --config cli_metric.json --out cli_metric_out.json") == 0);
    ojson out = ojson::parse(read_file("cli_metric_out.json"));
    CHECK(out["schema_version"] == 1);
    CHECK(out["g"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    std::remove("cli_metric.json");
    std::remove("cli_metric_out.json");
}

TEST_CASE("malformed configs exit with code 2 and write no output") {
    write_file("cli_bad.json", "{ not json");
    std::remove("cli_bad_out.json");
    CHECK(run_cli("metric --config cli_bad.json --out cli_bad_out.json") == 2);
    CHECK_FALSE(file_exists("cli_bad_out.json"));

    // unknown key rejected
    write_file("cli_bad2.json", R"({"T1":{"n":1,"points":[[0]]},"T2":{"n":1,"points":[[0]]},"extra":1})");
    CHECK(run_cli("metric --config cli_bad2.json --out cli_bad_out.json") == 2);
    CHECK_FALSE(file_exists("cli_bad_out.json"));

    // missing config file
    CHECK(run_cli("metric --config nonexistent_config.json") == 2);
    // mismatched tuple sizes are a config error
    write_file("cli_bad3.json", R"({"T1":{"n":1,"points":[[0]]},"T2":{"n":1,"points":[[0],[1]]}})");
    CHECK(run_cli("metric --config cli_bad3.json --out cli_bad_out.json") == 2);
    std::remove("cli_bad.json");
    std::remove("cli_bad2.json");
    std::remove("cli_bad3.json");
}

TEST_CASE("qc-test subcommand: Dirichlet integrand yields no-violation-found") {
    ojson cfg;
    cfg["integrand"] = {{"kind", "dirichlet"}};
    cfg["affine_map"] = {{"m", 2},
                         {"n", 1},
                         {"groups", {{{"q", 1}, {"a", {0.0}}, {"L", {{0.5, -0.25}}}}}}};
    cfg["optimizer"] = {{"cells_per_side", 4}, {"restarts", 3}, {"max_iters", 25},
                        {"seed", 7}, {"tol", 1e-7}, {"laminate_seeds", true}};
    write_file("cli_qc.json", cfg.dump());
    REQUIRE(run_cli("qc-test --config cli_qc.json --out cli_qc_out.json") == 0);
    ojson out = ojson::parse(read_file("cli_qc_out.json"));
    CHECK(out["status"] == "no-violation-found");
    CHECK(out["margin"].get<double>() >= -1e-9);
    CHECK(out["search_log"]["restarts"].get<int>() == 3);
    std::remove("cli_qc.json");
    std::remove("cli_qc_out.json");
}

TEST_CASE("reproducibility: identical configs produce byte-identical results") {
    ojson cfg;
    cfg["m"] = 2;
    cfg["n"] = 2;
    cfg["Q"] = 1;
    ojson mat = ojson::array();
    for (int r = 0; r < 4; ++r) {
        ojson row = ojson::array();
        for (int c = 0; c < 4; ++c) row.push_back(r == c ? -1.0 : 0.125);
        mat.push_back(row);
    }
    cfg["matrix"] = mat;
    cfg["optimizer"] = {{"cells_per_side", 4}, {"restarts", 4}, {"max_iters", 30},
                        {"seed", 99}, {"tol", 1e-7}, {"laminate_seeds", true}};
    write_file("cli_rep.json", cfg.dump());
    REQUIRE(run_cli("semielliptic --config cli_rep.json --out cli_rep_out1.json") == 0);
    REQUIRE(run_cli("semielliptic --config cli_rep.json --out cli_rep_out2.json") == 0);
    CHECK(read_file("cli_rep_out1.json") == read_file("cli_rep_out2.json"));
    CHECK(read_file("cli_rep_out1.json").size() > 0);
    std::remove("cli_rep.json");
    std::remove("cli_rep_out1.json");
    std::remove("cli_rep_out2.json");
}

TEST_CASE("seed flag overrides the config seed") {
    ojson cfg;
    cfg["m"] = 2;
    cfg["n"] = 2;
    cfg["Q"] = 1;
    ojson mat = ojson::array();
    for (int r = 0; r < 4; ++r) {
        ojson row = ojson::array();
        for (int c = 0; c < 4; ++c) row.push_back(r == c ? 1.0 : 0.0);
        mat.push_back(row);
    }
    cfg["matrix"] = mat;
    cfg["optimizer"] = {{"cells_per_side", 4}, {"restarts", 3}, {"max_iters", 20},
                        {"seed", 1}, {"tol", 1e-7}, {"laminate_seeds", false}};
    write_file("cli_seed.json", cfg.dump());
    REQUIRE(run_cli("semielliptic --config cli_seed.json --seed 123 --out cli_seed_o1.json") == 0);
    REQUIRE(run_cli("semielliptic --config cli_seed.json --seed 123 --out cli_seed_o2.json") == 0);
    CHECK(read_file("cli_seed_o1.json") == read_file("cli_seed_o2.json"));
    ojson out = ojson::parse(read_file("cli_seed_o1.json"));
    CHECK(out["search_log"]["seed"].get<std::uint64_t>() == 123);
    std::remove("cli_seed.json");
    std::remove("cli_seed_o1.json");
    std::remove("cli_seed_o2.json");
}

TEST_CASE("rank-one and polyconvex-cert subcommands") {
    ojson cfg;
    cfg["m"] = 2;
    cfg["n"] = 2;
    ojson mat = ojson::array();
    // determinant form: <A M, M> = 2 det M
    for (int r = 0; r < 4; ++r) {
        ojson row = ojson::array();
        for (int c = 0; c < 4; ++c) row.push_back(0.0);
        mat.push_back(row);
    }
    mat[0][3] = 1.0;
    mat[3][0] = 1.0;
    mat[1][2] = -1.0;
    mat[2][1] = -1.0;
    cfg["matrix"] = mat;
    write_file("cli_r1.json", cfg.dump());
    REQUIRE(run_cli("rank-one --config cli_r1.json --out cli_r1_out.json") == 0);
    ojson out = ojson::parse(read_file("cli_r1_out.json"));
    CHECK(std::abs(out["value"].get<double>()) <= 1e-9);

    REQUIRE(run_cli("polyconvex-cert --config cli_r1.json --out cli_pc_out.json") == 0);
    ojson pc = ojson::parse(read_file("cli_pc_out.json"));
    CHECK(pc["feasible"].get<bool>());
    CHECK(pc["min_eigenvalue"].get<double>() >= -1e-8);
    std::remove("cli_r1.json");
    std::remove("cli_r1_out.json");
    std::remove("cli_pc_out.json");
}

TEST_CASE("dlvp subcommand consumes inline sequences") {
    ojson cfg;
    cfg["sequence"] = {{"num_cells", 4},
                       {"cell_volume", 0.25},
                       {"members", {{1.0, 1.0, 1.0, 1.0}, {2.0, 0.0, 0.0, 0.0}}}};
    cfg["phi"] = {{"kind", "power"}, {"exponent", 2.0}};
    cfg["cap"] = 10.0;
    write_file("cli_dlvp.json", cfg.dump());
    REQUIRE(run_cli("dlvp --config cli_dlvp.json --out cli_dlvp_out.json") == 0);
    ojson out = ojson::parse(read_file("cli_dlvp_out.json"));
    CHECK(out["ok"].get<bool>());
    CHECK(out["sup"].get<double>() == doctest::Approx(1.0));
    std::remove("cli_dlvp.json");
    std::remove("cli_dlvp_out.json");
}

TEST_CASE("stokes subcommand runs on a serialized field and form") {
    // single-sheet linear field on C_1 in m=2, n=1 at resolution 1
    ojson field;
    field["m"] = 2;
    field["n"] = 1;
    field["Q"] = 1;
    field["domain"] = {{"center", {0.0, 0.0}}, {"side", 1.0}};
    field["cells_per_side"] = 1;
    ojson verts = ojson::array();
    // vertex order: (x1 fastest): (-.5,-.5), (.5,-.5), (-.5,.5), (.5,.5)
    for (auto xy : {std::pair{-0.5, -0.5}, {0.5, -0.5}, {-0.5, 0.5}, {0.5, 0.5}}) {
        ojson entries = ojson::array();
        entries.push_back({0.7 * xy.first - 0.2 * xy.second});
        verts.push_back(entries);
    }
    field["vertices"] = verts;
    ojson match = ojson::array();
    for (int c = 0; c < 2; ++c) match.push_back({{0}, {0}, {0}});
    field["matching"] = match;

    ojson form;
    form["m"] = 2;
    form["n"] = 1;
    form["degree"] = 1;
    form["terms"] = ojson::array();
    ojson term;
    term["x_idx"] = {0};
    term["y_idx"] = ojson::array();
    term["poly"] = ojson::array();
    ojson mono;
    mono["exp"] = {0, 1, 1};
    mono["c"] = 1.0;
    term["poly"].push_back(mono);
    form["terms"].push_back(term);

    ojson cfg;
    cfg["field"] = field;
    cfg["form"] = form;
    write_file("cli_stokes.json", cfg.dump());
    REQUIRE(run_cli("stokes --config cli_stokes.json --out cli_stokes_out.json") == 0);
    ojson out = ojson::parse(read_file("cli_stokes_out.json"));
    CHECK(std::abs(out["residual"].get<double>()) <= 1e-10);
    std::remove("cli_stokes.json");
    std::remove("cli_stokes_out.json");
}

TEST_CASE("cleanup scratch files") {
    std::remove("cli_stdout.txt");
    std::remove("cli_stderr.txt");
    CHECK(true);
}
