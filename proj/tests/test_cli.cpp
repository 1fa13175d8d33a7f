#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bracketforge/pfm.hpp"
#include "bracketforge/synth.hpp"

using namespace bracketforge;
namespace fs = std::filesystem;

namespace {

const std::string kCli = BRACKETFORGE_CLI_PATH;

int run(const std::string& args, const fs::path& stdout_to = {}) {
    std::string cmd = kCli + " " + args;
    if (!stdout_to.empty()) cmd += " > " + stdout_to.string() + " 2>&1";
    else cmd += " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "bracketforge_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_scene(const fs::path& dir, int frames, std::uint64_t seed) {
    fs::create_directories(dir);
    RngSequence seq(Rng(seed));
    BlobSceneOptions opt;
    opt.frames = frames;
    opt.width = 16;
    opt.height = 16;
    const Video hdr = make_blob_scene(opt, seq);
    for (int i = 0; i < frames; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "hdr_%04d.pfm", i);
        write_pfm(hdr.frames[i], dir / name);
    }
}

}  // namespace

TEST_CASE("selftest exits cleanly") {
    CHECK(run("selftest") == 0);
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("merge --manifest missing.json --method classical") == 1);  // missing --out
    CHECK(run("--no-such-flag") == 1);
    CHECK(run("") == 1);  // a subcommand is required
}

TEST_CASE("data errors exit with code 2") {
    const fs::path dir = work_dir();
    CHECK(run("merge --manifest " + (dir / "missing.json").string() +
              " --method classical --out " + (dir / "out").string()) == 2);
}

TEST_CASE("version flag") {
    const fs::path dir = work_dir();
    CHECK(run("--version", dir / "v.txt") == 0);
    CHECK(slurp(dir / "v.txt").find("bracketforge") != std::string::npos);
}

TEST_CASE("bracket then merge recovers the fixture radiance") {
    const fs::path dir = work_dir();
    write_scene(dir / "hdr", 2, 404);

    REQUIRE(run("bracket --input " + (dir / "hdr").string() + " --e0 0.25 --out " +
                (dir / "bracket").string()) == 0);
    REQUIRE(fs::exists(dir / "bracket" / "manifest.json"));

    REQUIRE(run("merge --manifest " + (dir / "bracket" / "manifest.json").string() +
                " --method classical --out " + (dir / "merged").string()) == 0);

    RngSequence seq(Rng(404));
    BlobSceneOptions opt;
    opt.frames = 2;
    opt.width = 16;
    opt.height = 16;
    const Video hdr = make_blob_scene(opt, seq);
    for (int f = 0; f < 2; ++f) {
        char name[32];
        std::snprintf(name, sizeof(name), "hdr_%04d.pfm", f);
        const Frame merged = read_pfm(dir / "merged" / name);
        const Frame& truth = hdr.frames[f];
        const ExposureBracket b = make_bracket(hdr, 0.25);
        for (std::size_t i = 0; i < truth.data.size(); ++i) {
            const double r = truth.data[i];
            if (r <= 0.0) continue;
            bool unclipped = false;
            for (const Video* v : {&b.minus, &b.base, &b.plus}) {
                const float x = v->frames[f].data[i];
                unclipped = unclipped || (x > 0.0f && x < 1.0f);
            }
            if (unclipped)
                CHECK(std::abs(merged.data[i] - r) / r < 0.01);
        }
    }
}

TEST_CASE("simulate then eval pipeline runs end to end and repeats bitwise") {
    const fs::path dir = work_dir();
    write_scene(dir / "hdr", 2, 505);

    const std::string simulate = "simulate --input " + (dir / "hdr").string() +
                                 " --mode over --crf-seed 3 --noise-seed 4 --out ";
    REQUIRE(run(simulate + (dir / "sdr_a").string()) == 0);
    REQUIRE(run(simulate + (dir / "sdr_b").string()) == 0);
    CHECK(slurp(dir / "sdr_a" / "manifest.json") == slurp(dir / "sdr_b" / "manifest.json"));
    CHECK(slurp(dir / "sdr_a" / "sdr_0000.png") == slurp(dir / "sdr_b" / "sdr_0000.png"));
    CHECK(slurp(dir / "sdr_a" / "sdr_0001.png") == slurp(dir / "sdr_b" / "sdr_0001.png"));

    REQUIRE(run("bracket --input " + (dir / "hdr").string() + " --e0 auto --seed 11 --out " +
                (dir / "bracket").string()) == 0);
    REQUIRE(run("merge --manifest " + (dir / "bracket" / "manifest.json").string() +
                " --method classical --out " + (dir / "merged").string()) == 0);

    const std::string eval_cmd = "eval --pred " + (dir / "merged").string() + " --gt " +
                                 (dir / "hdr").string() + " --report ";
    REQUIRE(run(eval_cmd + (dir / "r1.json").string()) == 0);
    REQUIRE(run(eval_cmd + (dir / "r2.json").string()) == 0);
    const std::string r1 = slurp(dir / "r1.json");
    CHECK(r1 == slurp(dir / "r2.json"));
    CHECK(r1.find("pu_psnr_db") != std::string::npos);
    CHECK(r1.find("log_l1") != std::string::npos);
    CHECK(r1.find("per_frame") != std::string::npos);
}

TEST_CASE("tonemap and scanline subcommands") {
    const fs::path dir = work_dir();
    write_scene(dir / "hdr", 1, 606);
    REQUIRE(run("tonemap --in " + (dir / "hdr").string() + " --out " +
                (dir / "tm").string()) == 0);
    CHECK(fs::exists(dir / "tm" / "tm_0000.png"));

    REQUIRE(run("scanline --frame " + (dir / "hdr" / "hdr_0000.pfm").string() +
                " --row 8 --out " + (dir / "line.csv").string()) == 0);
    const std::string csv = slurp(dir / "line.csv");
    CHECK(csv.rfind("column,r,g,b", 0) == 0);

    CHECK(run("scanline --frame " + (dir / "hdr" / "hdr_0000.pfm").string() + " --row 99") == 2);
}
