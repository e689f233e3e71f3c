#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bifirom/config.hpp"

using namespace bifirom;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    f << text;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const char* kSample =
    "# sample\n"
    "[problem]\n"
    "id = wavespeed\n"
    "[grids]\n"
    "hf = 16x16\n"
    "lf = 6x6\n"
    "[sampling]\n"
    "n_p = 30\n"
    "test_n = 5\n"
    "seed_train = 11\n"
    "seed_test = 12\n"
    "[rom]\n"
    "N_rb = 6\n"
    "n_L = 3\n"
    "n_f = 1\n"
    "[iteration]\n"
    "tol_rel = 1e-9  ; inline comment\n"
    "max_iter = 40\n"
    "[output]\n"
    "dir = out/sample\n";

}  // namespace

TEST_CASE("run config parses sections, types and comments") {
    write_text("sample.ini", kSample);
    const RunConfig cfg = load_run_config("sample.ini");
    CHECK(cfg.problem_id == "wavespeed");
    CHECK(cfg.hf == "16x16");
    CHECK(cfg.lf == "6x6");
    CHECK(cfg.n_p == 30);
    CHECK(cfg.test_n == 5);
    CHECK(cfg.seed_train == 11);
    CHECK(cfg.seed_test == 12);
    CHECK(cfg.N_rb == 6);
    CHECK(cfg.tol_rel == 1e-9);
    CHECK(cfg.max_iter == 40);
    CHECK(cfg.output_dir == "out/sample");

    const OfflineConfig off = cfg.offline();
    CHECK(off.hf_grid.nx == 16);
    CHECK(off.lf_grid.ny == 6);
    CHECK(off.it_hf.tol_rel == 1e-9);
    CHECK_NOTHROW(off.validate());

    const ParameterSet test = cfg.test_set();
    CHECK(test.size() == 5);
    CHECK(test.provenance == "test");
}

TEST_CASE("config rejects unknown keys and bad values") {
    write_text("bad1.ini", std::string(kSample) + "[rom]\nbogus = 1\n");
    CHECK_THROWS_WITH_AS(load_run_config("bad1.ini"), doctest::Contains("rom.bogus"),
                         ContractError);

    write_text("bad2.ini", std::string(kSample) + "[sampling]\nn_p = many\n");
    CHECK_THROWS_AS(load_run_config("bad2.ini"), ContractError);

    CHECK_THROWS_AS(load_run_config("no_such.ini"), IoError);
}

TEST_CASE("shipped example configs parse") {
    for (const char* name :
         {"wavespeed", "high-contrast", "nl-elliptic", "cubic", "nl-multiscale",
          "coupled"}) {
        const std::string path = std::string(BIFIROM_SOURCE_DIR) + "/configs/" + name + ".ini";
        CHECK_NOTHROW(load_run_config(path));
    }
}

TEST_CASE("csv_real is roundtrip safe") {
    for (double v : {0.0, 1.0 / 3.0, -2.718281828459045e-12, 6.02214076e23}) {
        CHECK(std::stod(csv_real(v)) == v);
    }
}

TEST_CASE("error CSV emission and reload") {
    ErrorTable table;
    for (int i = 0; i < 3; ++i) {
        ErrorRow r;
        r.mu = {0.1 * i, 1.0 + i};
        r.e_u = 1e-7 * (i + 1);
        r.e_u_ref = 1e-5 * (i + 1);
        r.e_u_lf = 0.2;
        r.t_lf = 0.001;
        r.t_online = 0.002;
        r.t_hf = 0.05;
        table.rows.push_back(r);
    }
    table.finalize();

    emit_errors_csv(table, 6, "errors_test.csv");
    const auto rows = read_csv("errors_test.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"N_rb", "mu1", "mu2", "e_u", "e_u_ref",
                                              "e_u_lf", "t_lf_s", "t_online_s", "t_hf_s"});
    CHECK(std::stod(rows[1][3]) == table.rows[0].e_u);
    CHECK(std::stod(rows[3][2]) == table.rows[2].mu[1]);

    // Append mode adds rows without a second header.
    emit_errors_csv(table, 8, "errors_test.csv", true);
    CHECK(read_csv("errors_test.csv").size() == 7);

    // Empty table yields a header-only file.
    emit_compare_csv(ErrorTable{}, "compare_empty.csv");
    CHECK(read_csv("compare_empty.csv").size() == 1);

    emit_summary_csv({{6, table}}, "summary_test.csv");
    const auto sum = read_csv("summary_test.csv");
    REQUIRE(sum.size() == 2);
    CHECK(std::stod(sum[1][3]) == table.mean_e_u);

    emit_hist_csv(table, "hist_test.csv");
    const auto hist = read_csv("hist_test.csv");
    REQUIRE(hist.size() >= 2);
    // Bin edges are half-decades and the counts add up per column.
    std::size_t total = 0;
    for (std::size_t i = 1; i < hist.size(); ++i) {
        CHECK(std::stod(hist[i][1]) - std::stod(hist[i][0]) == 0.5);
        total += std::stoul(hist[i][2]);
    }
    CHECK(total == table.rows.size());
}

TEST_CASE("files end lines with LF only") {
    emit_compare_csv(ErrorTable{}, "lf_check.csv");
    std::ifstream f("lf_check.csv", std::ios::binary);
    const std::string data((std::istreambuf_iterator<char>(f)), {});
    CHECK(data.find('\r') == std::string::npos);
    CHECK(!data.empty());
    CHECK(data.back() == '\n');
}
