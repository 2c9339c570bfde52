#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "sdlab/ensemble.hpp"
#include "sdlab/error.hpp"
#include "sdlab/harness.hpp"
#include "sdlab/io.hpp"
#include "sdlab/skewprod.hpp"

using namespace sdlab;
using namespace sdlab::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("sdlab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string without_wall_clock(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find("\"wall_clock_s\"") == std::string::npos) out += line + "\n";
    return out;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SDLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing") {
    auto cfg = parse_config(json{{"experiment", "capacity"}, {"gamma", 2.0}, {"n_paths", 10}, {"seed", 4}});
    CHECK(cfg.experiment == "capacity");
    CHECK(*cfg.gamma == 2.0);
    CHECK(*cfg.n_paths == 10);
    CHECK_FALSE(cfg.dt.has_value());
    CHECK_THROWS_AS(parse_config(json{{"experiment", "capacity"}, {"paths", 10}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "capacity"}, {"gamma", "one"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "capacity"}, {"n_paths", -3}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);

    RunConfig bad;
    bad.experiment = "no-such-experiment";
    CHECK_THROWS_AS(resolve(bad), ConfigError);
    RunConfig neg;
    neg.experiment = "radial-absorb";
    neg.gamma = -1.0;
    CHECK_THROWS_AS(resolve(neg), ConfigError);
    neg.gamma = 1.0;
    neg.format = "xml";
    CHECK_THROWS_AS(resolve(neg), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("every criterion has an experiment") {
    std::set<std::string> criteria;
    for (const auto& e : experiments()) criteria.insert(e.criterion.substr(0, e.criterion.find('.')));
    for (int c = 1; c <= 12; ++c) CHECK(criteria.count(std::to_string(c)) == 1);
    CHECK_THROWS_AS(experiment_info("nope"), ConfigError);
}

TEST_CASE("capacity report") {
    RunConfig cfg;
    cfg.experiment = "capacity";
    cfg.gamma = 1.0;
    const auto rep = run_experiment(cfg);
    CHECK(rep.pass());
    CHECK(rep.results["capacity"].get<double>() == doctest::Approx(0.886751).epsilon(1e-6));
    const auto j = rep.to_json();
    CHECK(j["pass"].get<bool>());
    CHECK(j["criterion"] == "1");
    CHECK(j.contains("wall_clock_s"));
    CHECK_FALSE(rep.to_json(false).contains("wall_clock_s"));
}

TEST_CASE("small samples are flagged, not failed") {
    RunConfig cfg;
    cfg.experiment = "radial-stationary";
    cfg.n_paths = 10;
    cfg.t_max = 2.0;
    const auto rep = run_experiment(cfg);
    CHECK(rep.underpowered);
    CHECK_FALSE(rep.warnings.empty());
    CHECK(rep.pass());
}

TEST_CASE("reports are reproducible") {
    const auto dir = scratch("determinism");
    json cfgj = {{"experiment", "regulator"}, {"n_paths", 64}, {"t_max", 2.0}, {"seed", 9},
                 {"out_dir", (dir / "a").string()}};
    {
        std::ofstream(dir / "a.json") << cfgj.dump();
        cfgj["out_dir"] = (dir / "b").string();
        std::ofstream(dir / "b.json") << cfgj.dump();
    }
    const auto ra = run_experiment_file((dir / "a.json").string());
    const auto rb = run_experiment_file((dir / "b.json").string(), Execution::serial);
    auto ja = ra.to_json(false), jb = rb.to_json(false);
    ja["config"].erase("out_dir");
    jb["config"].erase("out_dir");
    CHECK(ja.dump() == jb.dump());

    // Same config file twice: files differ only in the wall-clock line.
    run_experiment_file((dir / "a.json").string());
    const auto first = slurp(dir / "a" / "regulator.report.json");
    run_experiment_file((dir / "a.json").string());
    const auto second = slurp(dir / "a" / "regulator.report.json");
    CHECK(without_wall_clock(first) == without_wall_clock(second));
    CHECK(first.find("\"wall_clock_s\"") != std::string::npos);
}

TEST_CASE("parallel and serial kernels agree bit for bit") {
    const model::ModelParams p(1.0);
    const auto par = skewprod::drift_statistic(p, {1, 0, 0}, 1e-3, 5000, 3, {}, Execution::parallel);
    const auto ser = skewprod::drift_statistic(p, {1, 0, 0}, 1e-3, 5000, 3, {}, Execution::serial);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(par.component[i].mean == ser.component[i].mean);
        CHECK(par.component[i].stderr() == ser.component[i].stderr());
    }
    auto kernel = [](std::size_t i) {
        Stream rng = Stream::for_path(77, i);
        return rng.normal() + rng.uniform();
    };
    CHECK(map_paths(10000, kernel) == map_paths_serial(10000, kernel));
}

TEST_CASE("float formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 0.8867513459481288, 1e-300, -2.5e17}) {
        const auto s = io::format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("path files") {
    skewprod::PathR3 path;
    path.dt = 0.5;
    path.points = {Vec3{}, Vec3{1, 2, 3}};
    std::ostringstream os;
    io::write_csv(os, path);
    CHECK(os.str() == "t,x,y,z\n0,0,0,0\n0.5,1,2,3\n");
    const auto j = io::to_table_json(path);
    CHECK(j["columns"] == json({"t", "x", "y", "z"}));
    CHECK(j["rows"].size() == 2);
}

TEST_CASE("command line") {
    const auto dir = scratch("cli");
    CHECK(run_cli("capacity") == 0);
    CHECK(run_cli("capacity --out " + (dir / "out").string() + " --format json") == 0);
    CHECK(fs::exists(dir / "out" / "capacity.report.json"));
    CHECK(run_cli("no-such-experiment") == 2);
    CHECK(run_cli("capacity --format xml") == 2);
    CHECK(run_cli("capacity --gamma -1") == 2);
    CHECK(run_cli("radial-absorb --dt 0") == 2);
    CHECK(run_cli("--list") == 0);
    std::ofstream(dir / "bad.json") << R"({"experiment": "capacity", "bogus": 1})";
    CHECK(run_cli("--config " + (dir / "bad.json").string()) == 2);
    std::ofstream(dir / "good.json") << R"({"experiment": "integrability"})";
    CHECK(run_cli("--config " + (dir / "good.json").string()) == 0);
    // A failing criterion exits 1; keep it cheap with a tiny time-change run.
    CHECK(run_cli("timechange-blowup --paths 1000 --dt 1e-4 --t-max 20") == 1);
}

}
