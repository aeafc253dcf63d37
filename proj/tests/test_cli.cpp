#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* path = std::getenv("EEGSZ_CLI");
    REQUIRE_MESSAGE(path != nullptr, "EEGSZ_CLI must point at the built binary");
    return path;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

bool same_file_bytes(const fs::path& a, const fs::path& b) {
    return slurp(a.string()) == slurp(b.string());
}

} // namespace

TEST_CASE("help exits 0 and lists subcommands; unknown flags exit 2") {
    CHECK(run("--help") == 0);
    const std::string text = slurp("cli_stdout.txt");
    for (const char* sub : {"synth", "ingest", "bands", "scalogram", "spectrogram",
                            "train-cae", "features", "train-clf", "evaluate"}) {
        CHECK(text.find(sub) != std::string::npos);
    }
    CHECK(run("synth --help") == 0);
    CHECK(run("synth --no-such-flag") == 2);
    CHECK(run("") == 2);  // a subcommand is required
    CHECK(run("ingest") == 2);  // missing required --manifest
}

TEST_CASE("synth is deterministic: same seed gives byte-identical directories") {
    fs::remove_all("cli_s1");
    fs::remove_all("cli_s2");
    REQUIRE(run("synth --n-per-class 2 --seed 9 --out cli_s1") == 0);
    REQUIRE(run("synth --n-per-class 2 --seed 9 --out cli_s2") == 0);

    size_t compared = 0;
    for (const auto& entry : fs::directory_iterator("cli_s1")) {
        const auto other = fs::path("cli_s2") / entry.path().filename();
        REQUIRE(fs::exists(other));
        // manifests embed the directory name, data files must match exactly
        if (entry.path().filename() != "manifest.csv") {
            CHECK(same_file_bytes(entry.path(), other));
            ++compared;
        }
    }
    CHECK(compared == 4);
}

TEST_CASE("full small pipeline: ingest, bands, images, cae, features, classifiers") {
    fs::remove_all("cli_data");
    REQUIRE(run("synth --n-per-class 2 --seed 4 --out cli_data") == 0);

    // ingest validates and caches normalized copies
    fs::remove_all("cli_cache");
    CHECK(run("ingest --manifest cli_data/manifest.csv --out cli_cache") == 0);
    CHECK(fs::exists("cli_cache/manifest.csv"));

    // band CSVs for one subject
    fs::remove_all("cli_bands");
    CHECK(run("bands --manifest cli_data/manifest.csv --subject sz_0 --out cli_bands") == 0);
    CHECK(fs::exists("cli_bands/bands_ch0.csv"));
    CHECK(fs::exists("cli_bands/bands_ch15.csv"));

    // scalogram and spectrogram images + csv
    fs::remove_all("cli_scal");
    CHECK(run("scalogram --manifest cli_data/manifest.csv --subject hc_0 --channel 2 "
              "--width 64 --height 64 --out cli_scal") == 0);
    CHECK(fs::exists("cli_scal/scalogram_ch2.csv"));
    CHECK(fs::exists("cli_scal/scalogram_ch2.png"));

    fs::remove_all("cli_spec");
    CHECK(run("spectrogram --manifest cli_data/manifest.csv --subject hc_0 --channel 2 "
              "--width 64 --height 64 --out cli_spec") == 0);
    CHECK(fs::exists("cli_spec/spectrogram_ch2.csv"));
    CHECK(fs::exists("cli_spec/spectrogram_ch2.png"));

    // quick CAE training, checkpoint, loss curve
    fs::remove_all("cli_cae");
    CHECK(run("train-cae --manifest cli_data/manifest.csv --epochs 1 --batch 16 "
              "--channel-stride 8 --out cli_cae") == 0);
    CHECK(fs::exists("cli_cae/cae.ckpt"));
    CHECK(fs::exists("cli_cae/loss.csv"));

    // feature export from the checkpoint
    CHECK(run("features --checkpoint cli_cae/cae.ckpt --manifest cli_data/manifest.csv "
              "--out cli_features.csv") == 0);
    {
        std::ifstream in("cli_features.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header.find("subject_id,channel,window_index,label") == 0);
    }

    // classifier fitting over the exported features
    fs::remove_all("cli_clf");
    CHECK(run("train-clf --features cli_features.csv --rf-trees 10 --out cli_clf") == 0);
    CHECK(fs::exists("cli_clf/predictions.csv"));
}

TEST_CASE("data errors exit 3") {
    CHECK(run("ingest --manifest no_such_manifest.csv --out cli_x") == 3);
    {
        std::ofstream bad("cli_bad_manifest.csv");
        bad << "path,subject_id,label\nmissing_file.txt,s1,0\n";
    }
    CHECK(run("bands --manifest cli_bad_manifest.csv --subject s1 --out cli_x") == 3);
    std::remove("cli_bad_manifest.csv");
}

TEST_CASE("config file values are applied with flag overrides winning") {
    {
        std::ofstream cfg("cli_cae.cfg");
        cfg << "# cae settings\nepochs=1\nchannel_stride=8\nbatch=16\n";
    }
    fs::remove_all("cli_cae_cfg");
    REQUIRE(fs::exists("cli_data/manifest.csv"));
    CHECK(run("train-cae --manifest cli_data/manifest.csv --config cli_cae.cfg "
              "--out cli_cae_cfg") == 0);
    CHECK(fs::exists("cli_cae_cfg/cae.ckpt"));
    std::remove("cli_cae.cfg");
}
