#include "qheat/cli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace qheat;
using Catch::Matchers::ContainsSubstring;

namespace {

namespace fs = std::filesystem;

std::string tmp_path(const std::string& name) {
    return (fs::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

RunConfig base_config(const std::string& command, const std::string& out) {
    RunConfig cfg;
    cfg.command = command;
    cfg.out_path = tmp_path(out);
    return cfg;
}

}  // namespace

TEST_CASE("emit_csv writes a header-only file for an empty table") {
    std::string path = tmp_path("t_empty.csv");
    emit_csv(path, {"a", "b"}, {});
    REQUIRE(slurp(path) == "a,b\n");
    REQUIRE_THROWS_AS(emit_csv("/nonexistent-dir/x.csv", {"a"}, {}), error);
}

TEST_CASE("argument parsing") {
    RunConfig cfg = parse_args({"inverse-source", "--set", "q=0.4", "--set",
                                "K=5", "--out", tmp_path("t_args.csv")});
    REQUIRE(cfg.command == "inverse-source");
    REQUIRE(cfg.q == 0.4);
    REQUIRE(cfg.K == 5);

    REQUIRE_THROWS_WITH(parse_args({"bogus"}),
                        ContainsSubstring("unknown command 'bogus'"));
    REQUIRE_THROWS_WITH(parse_args({"forward", "--set", "frobnicate=1"}),
                        ContainsSubstring("unknown config key 'frobnicate'"));
    REQUIRE_THROWS_WITH(parse_args({"forward", "--set", "q=banana"}),
                        ContainsSubstring("'q'"));
    REQUIRE_THROWS_WITH(parse_args({"forward", "--set"}),
                        ContainsSubstring("needs a value"));
    REQUIRE_THROWS_WITH(parse_args({"forward", "--set", "q=1.5"}),
                        ContainsSubstring("'q'"));
    REQUIRE_THROWS_AS(parse_args({}), validation_error);
}

TEST_CASE("config file loading with overrides") {
    std::string cfg_path = tmp_path("t_cfg.conf");
    {
        std::ofstream out(cfg_path);
        out << "# comment line\n";
        out << "q = 0.6\n";
        out << "K = 4   # trailing comment\n";
        out << "\n";
        out << "scenario = const-v\n";
    }
    RunConfig cfg = parse_args({"inverse-source", "--config", cfg_path, "--set",
                                "q=0.5", "--out", tmp_path("t_cfg.csv")});
    REQUIRE(cfg.q == 0.5);  // --set wins over the file
    REQUIRE(cfg.K == 4);
    REQUIRE(cfg.scenario == "const-v");

    std::string bad_path = tmp_path("t_bad.conf");
    {
        std::ofstream out(bad_path);
        out << "not a key value line\n";
    }
    REQUIRE_THROWS_WITH(parse_args({"forward", "--config", bad_path}),
                        ContainsSubstring("key=value"));
    REQUIRE_THROWS_WITH(parse_args({"forward", "--config", tmp_path("nope.conf")}),
                        ContainsSubstring("cannot open config file"));
}

TEST_CASE("selftest passes and writes its check table") {
    RunConfig cfg = base_config("selftest", "t_selftest.csv");
    REQUIRE(cli::run(cfg) == 0);
    auto lines = split_lines(slurp(cfg.out_path));
    REQUIRE(lines.front() == "check,q,residual,threshold,pass");
    REQUIRE(lines.size() > 10);
    for (size_t i = 1; i < lines.size(); ++i)
        REQUIRE_THAT(lines[i], Catch::Matchers::EndsWith(",1"));  // pass column
}

TEST_CASE("forward command emits the lattice-major table") {
    RunConfig cfg = base_config("forward", "t_forward.csv");
    REQUIRE(cli::run(cfg) == 0);
    auto lines = split_lines(slurp(cfg.out_path));
    REQUIRE(lines.front() == "t,x,u");
    // first row: t = T = 1, x = 1 (both lattice heads)
    REQUIRE_THAT(lines.at(1), ContainsSubstring("1,1,"));
    // 28 time points x 61 space points at the default parameters
    REQUIRE(lines.size() == 1 + 28 * 61);
}

TEST_CASE("inverse-source round trip through the CLI") {
    RunConfig cfg = base_config("inverse-source", "t_invsrc.csv");
    cfg.scenario = "affine-v";
    REQUIRE(cli::run(cfg) == 0);
    auto lines = split_lines(slurp(cfg.out_path));
    REQUIRE(lines.front() == "t,v_true,v_rec,abs_err");
    REQUIRE(lines.size() == 1 + 28);
    // every row's abs_err stays below the round-trip tolerance
    for (size_t i = 1; i < lines.size(); ++i) {
        auto pos = lines[i].rfind(',');
        double err = std::stod(lines[i].substr(pos + 1));
        REQUIRE(err <= 2e-6);
    }
}

TEST_CASE("hypothesis violation exits with code 2") {
    RunConfig cfg = base_config("inverse-source", "t_zm.csv");
    cfg.scenario = "zero-mean-f";
    REQUIRE(cli::run(cfg) == 2);
}

TEST_CASE("inverse-initial emits the modal table") {
    RunConfig cfg = base_config("inverse-initial", "t_invinit.csv");
    REQUIRE(cli::run(cfg) == 0);
    auto lines = split_lines(slurp(cfg.out_path));
    REQUIRE(lines.front() == "k,lambda_k,gamma_k,tau_k,amplification_k");
    REQUIRE(lines.size() == 1 + 6);
    REQUIRE_THAT(lines.at(1), ContainsSubstring("1,13.44492115124878"));
}

TEST_CASE("unrecoverable mode exits with code 1") {
    RunConfig cfg = base_config("inverse-initial", "t_unrec.csv");
    cfg.K_reg = 6;  // xi0 = T = 1: modes past 3 amplify beyond the budget
    REQUIRE(cli::run(cfg) == 1);
}

TEST_CASE("invalid configuration is rejected before any computation") {
    RunConfig cfg = base_config("forward", "t_badq.csv");
    cfg.q = 1.2;
    REQUIRE(cli::run(cfg) == 2);
    cfg = base_config("forward", "t_badscen.csv");
    cfg.scenario = "no-such-scenario";
    REQUIRE(cli::run(cfg) == 2);
}

TEST_CASE("identical configs produce byte-identical CSV output") {
    for (std::string command :
         {std::string("selftest"), std::string("forward"),
          std::string("inverse-source"), std::string("inverse-initial")}) {
        RunConfig a = base_config(command, "t_det_a_" + command + ".csv");
        RunConfig b = base_config(command, "t_det_b_" + command + ".csv");
        REQUIRE(cli::run(a) == 0);
        REQUIRE(cli::run(b) == 0);
        REQUIRE(slurp(a.out_path) == slurp(b.out_path));
    }
}

TEST_CASE("deterministic noise perturbation is reproducible") {
    RunConfig a = base_config("inverse-source", "t_noise_a.csv");
    a.noise = 1e-6;
    RunConfig b = base_config("inverse-source", "t_noise_b.csv");
    b.noise = 1e-6;
    REQUIRE(cli::run(a) == 0);
    REQUIRE(cli::run(b) == 0);
    REQUIRE(slurp(a.out_path) == slurp(b.out_path));
    // and differs from the clean run
    RunConfig c = base_config("inverse-source", "t_noise_c.csv");
    REQUIRE(cli::run(c) == 0);
    REQUIRE(slurp(a.out_path) != slurp(c.out_path));
}
