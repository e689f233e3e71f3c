#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <vector>

#include "bifirom/artifact_io.hpp"
#include "bifirom/rom_online.hpp"

using namespace bifirom;

namespace {

RomArtifact quick_artifact() {
    const ProblemSpec& problem = get_problem("wavespeed");
    OfflineConfig cfg;
    cfg.problem_id = "wavespeed";
    cfg.hf_grid = grid_for_problem(problem, 12, 12);
    cfg.lf_grid = grid_for_problem(problem, 4, 4);
    cfg.n_p = 20;
    cfg.N_rb = 5;
    cfg.n_L = 3;
    cfg.n_f = 1;
    cfg.seed = 55;
    return build_artifact(cfg);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), {});
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

}  // namespace

TEST_CASE("artifact roundtrip is byte-identical and value-exact") {
    const RomArtifact art = quick_artifact();
    save_artifact(art, "artifact_a.bin");
    const RomArtifact loaded = load_artifact("artifact_a.bin");
    save_artifact(loaded, "artifact_b.bin");

    CHECK(read_file("artifact_a.bin") == read_file("artifact_b.bin"));

    CHECK(loaded.Q.storage() == art.Q.storage());
    CHECK(loaded.G_L.storage() == art.G_L.storage());
    CHECK(loaded.Llow_gamma.storage() == art.Llow_gamma.storage());
    CHECK(loaded.gamma_L == art.gamma_L);
    CHECK(loaded.gamma_u_idx == art.gamma_u_idx);
    CHECK(loaded.lf_pattern == art.lf_pattern);
    CHECK(loaded.problem_id == art.problem_id);
    CHECK(loaded.hf_grid.nx == art.hf_grid.nx);
    CHECK(loaded.seed == art.seed);
    CHECK(loaded.hf_run_count == art.hf_run_count);
    for (std::size_t t = 0; t < art.n_L(); ++t) {
        CHECK(loaded.L_rb_basis[t].storage() == art.L_rb_basis[t].storage());
    }
    CHECK(loaded.f_rb_basis == art.f_rb_basis);

    // A loaded artifact answers online queries identically.
    const OnlineReport a = online_solve(art, art.gamma_L[0]);
    const OnlineReport b = online_solve(loaded, art.gamma_L[0]);
    CHECK(a.u_r == b.u_r);
}

TEST_CASE("truncated artifact is refused") {
    const RomArtifact art = quick_artifact();
    save_artifact(art, "artifact_t.bin");
    auto data = read_file("artifact_t.bin");
    data.resize(data.size() / 2);
    write_file("artifact_trunc.bin", data);
    CHECK_THROWS_AS(load_artifact("artifact_trunc.bin"), IoError);
}

TEST_CASE("wrong magic and future version are refused") {
    const RomArtifact art = quick_artifact();
    save_artifact(art, "artifact_v.bin");
    auto data = read_file("artifact_v.bin");

    auto bad_magic = data;
    bad_magic[0] = 'X';
    write_file("artifact_magic.bin", bad_magic);
    CHECK_THROWS_WITH_AS(load_artifact("artifact_magic.bin"),
                         doctest::Contains("magic"), IoError);

    auto v2 = data;
    v2[4] = 2;  // version u32 LE
    write_file("artifact_v2.bin", v2);
    CHECK_THROWS_WITH_AS(load_artifact("artifact_v2.bin"),
                         doctest::Contains("version"), IoError);
}

TEST_CASE("a single flipped byte in the Q payload is refused") {
    const RomArtifact art = quick_artifact();
    save_artifact(art, "artifact_f.bin");
    auto data = read_file("artifact_f.bin");

    // Locate the Q section payload and flip one low-order byte.
    const std::vector<std::uint8_t> tag = {1, 0, 0, 0, 'Q'};
    std::size_t at = 0;
    for (std::size_t i = 0; i + tag.size() < data.size(); ++i) {
        if (std::equal(tag.begin(), tag.end(), data.begin() + i)) {
            at = i;
            break;
        }
    }
    REQUIRE(at > 0);
    const std::size_t payload = at + tag.size() + 1 + 1 + 16;  // dtype, rank, dims
    data[payload + 3] ^= 0x01;
    write_file("artifact_flip.bin", data);
    CHECK_THROWS_WITH_AS(load_artifact("artifact_flip.bin"),
                         doctest::Contains("checksum"), IoError);
}

TEST_CASE("missing file raises an IO error") {
    CHECK_THROWS_AS(load_artifact("no_such_artifact.bin"), IoError);
}
