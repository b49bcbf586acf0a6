// Exercises the installed CLI end to end: exit codes, file outputs,
// determinism, and the serialized formats. Takes the binary path as argv[1].

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
    if (!ok) ++failures;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Cli {
    std::string binary;
    fs::path dir;

    int run(const std::string& args) const {
        const std::string cmd = binary + " " + args + " >" + (dir / "stdout.txt").string() +
                                " 2>" + (dir / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        if (status == -1) return -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        out << text;
        return p;
    }
};

const char* kQubitProblem = R"({
  "dim": 2,
  "observables": [
    {"name": "sz", "real": [[1, 0], [0, -1]], "imag": [[0, 0], [0, 0]]}
  ],
  "target_moments": [0.5]
})";

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_driver <path-to-maxent-binary>\n";
        return 2;
    }
    Cli cli;
    cli.binary = argv[1];
    cli.dir = fs::temp_directory_path() / ("maxent_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(cli.dir);

    const fs::path problem = cli.write("problem.json", kQubitProblem);

    {
        const fs::path out = cli.dir / "solve.json";
        const int code = cli.run("solve " + problem.string() + " --out " + out.string());
        check(code == 0, "solve exits 0 on interior data");
        json result = json::parse(slurp(out));
        check(result["schema_version"] == "1", "result carries schema_version");
        const double lambda = result["solution"]["lambda"][0].get<double>();
        check(std::abs(lambda + 0.549306) < 1e-6, "solve lambda matches -atanh(1/2)");
        const double entropy = result["solution"]["entropy"].get<double>();
        check(std::abs(entropy - 0.562335) < 1e-6, "solve entropy matches the binary entropy");
        check(result["solution"]["classification"] == "interior-converged",
              "solve classifies interior data");
    }

    {
        json zero = json::parse(kQubitProblem);
        zero["target_moments"][0] = 0.0;
        cli.write("zero.json", zero.dump());
        const fs::path out = cli.dir / "zero_out.json";
        const int code =
            cli.run("solve " + (cli.dir / "zero.json").string() + " --out " + out.string());
        json result = json::parse(slurp(out));
        check(code == 0 && std::abs(result["solution"]["lambda"][0].get<double>()) < 1e-9,
              "unconstrained maximum keeps lambda at zero");
        check(std::abs(result["solution"]["sigma"]["real"][0][0].get<double>() - 0.5) < 1e-12,
              "unconstrained maximum is maximally mixed");
    }

    {
        json boundary = json::parse(kQubitProblem);
        boundary["target_moments"][0] = 1.0;
        boundary["options"] = json{{"boundary_tol", 1e-14}};  // push sigma to its kernel
        cli.write("boundary.json", boundary.dump());
        const fs::path out = cli.dir / "boundary_out.json";
        const int code =
            cli.run("solve " + (cli.dir / "boundary.json").string() + " --out " + out.string());
        json result = json::parse(slurp(out));
        check(code == 0, "boundary data still solves");
        check(result["solution"]["classification"] == "boundary-limit",
              "boundary data is classified boundary-limit");
        check(result["solution"].contains("path_trace") &&
                  !result["solution"]["path_trace"].empty(),
              "boundary solutions carry a path trace");
    }

    {
        const int code = cli.run("feasibility " + problem.string() + " --out " +
                                 (cli.dir / "feas.json").string());
        json result = json::parse(slurp(cli.dir / "feas.json"));
        check(code == 0 && result["status"] == "interior", "feasibility exits 0 on interior data");
        check(result.contains("witness_state"), "feasible verdicts carry a witness state");

        json infeasible = json::parse(kQubitProblem);
        infeasible["target_moments"][0] = 1.2;
        cli.write("infeasible.json", infeasible.dump());
        const int bad = cli.run("feasibility " + (cli.dir / "infeasible.json").string() +
                                " --out " + (cli.dir / "infeas.json").string());
        json verdict = json::parse(slurp(cli.dir / "infeas.json"));
        check(bad == 3, "infeasible data exits 3");
        check(verdict["status"] == "infeasible" &&
                  std::abs(verdict["witness_direction"][0].get<double>() - 1.0) < 1e-9,
              "infeasible verdicts carry the violating direction");
    }

    {
        json crooked = json::parse(kQubitProblem);
        crooked["observables"][0]["real"][0][1] = 0.5;  // not Hermitian
        cli.write("crooked.json", crooked.dump());
        check(cli.run("solve " + (cli.dir / "crooked.json").string()) == 2,
              "non-Hermitian observables exit 2");

        json unknown = json::parse(kQubitProblem);
        unknown["extra"] = true;
        cli.write("unknown.json", unknown.dump());
        check(cli.run("solve " + (cli.dir / "unknown.json").string()) == 2,
              "unknown problem fields exit 2");

        cli.write("garbage.json", "{not json");
        check(cli.run("solve " + (cli.dir / "garbage.json").string()) == 2,
              "malformed JSON exits 2");
        check(cli.run("solve " + (cli.dir / "missing.json").string()) == 2,
              "missing files exit 2");
        check(cli.run("frobnicate " + problem.string()) == 2, "unknown subcommands exit 2");
    }

    {
        // Certify the solved state against its own problem: an all-zero report.
        json solved = json::parse(slurp(cli.dir / "solve.json"));
        json state{{"dim", 2},
                   {"real", solved["solution"]["sigma"]["real"]},
                   {"imag", solved["solution"]["sigma"]["imag"]}};
        cli.write("state.json", state.dump());
        const fs::path out = cli.dir / "certify.json";
        const int code = cli.run("certify " + problem.string() + " " +
                                 (cli.dir / "state.json").string() + " --out " + out.string());
        json result = json::parse(slurp(out));
        check(code == 0, "certify exits 0 on the solution itself");
        check(result["certificate"]["trace_distance"].get<double>() < 1e-9,
              "self-certification reports zero distance");
        check(result["certificate"]["identity_residual"].get<double>() < 1e-9,
              "self-certification reports zero identity residual");
    }

    {
        // Support violation against a boundary solution: the "inf" token.
        json state{{"dim", 2},
                   {"real", json::array({json::array({0.0, 0.0}), json::array({0.0, 1.0})})},
                   {"imag", json::array({json::array({0.0, 0.0}), json::array({0.0, 0.0})})}};
        cli.write("down.json", state.dump());
        const fs::path out = cli.dir / "certify_inf.json";
        const int code = cli.run("certify " + (cli.dir / "boundary.json").string() + " " +
                                 (cli.dir / "down.json").string() + " --out " + out.string());
        check(code == 0, "certify handles infinite divergence in-band");
        const std::string text = slurp(out);
        check(text.find("\"relative_entropy\": \"inf\"") != std::string::npos,
              "infinite divergence serializes as the literal token inf");
    }

    {
        const fs::path csv1 = cli.dir / "converge1.csv";
        const fs::path csv2 = cli.dir / "converge2.csv";
        const std::string args = "converge " + problem.string() +
                                 " --kind mix --n 200 --noise 1.0 --seed 9 --quiet --csv-out ";
        check(cli.run(args + csv1.string()) == 0, "converge exits 0");
        check(cli.run(args + csv2.string()) == 0, "converge reruns cleanly");
        const std::string text = slurp(csv1);
        check(text == slurp(csv2), "fixed seeds give byte-identical CSV");
        check(text.rfind("n,moment_error,entropy_gap,relative_entropy,trace_distance,"
                         "pinsker_mixed_bound\n", 0) == 0,
              "CSV starts with the record header");
        check(static_cast<int>(std::count(text.begin(), text.end(), '\n')) == 201,
              "CSV has one row per sequence element");

        check(cli.run("converge " + problem.string() + " --kind mix --n 1 --quiet --csv-out " +
                      (cli.dir / "one.csv").string()) == 0,
              "single-row sequences are fine");
        const std::string one = slurp(cli.dir / "one.csv");
        check(std::count(one.begin(), one.end(), '\n') == 2,
              "single-row CSV holds a header and one row");

        check(cli.run("converge " + problem.string() +
                      " --kind jitter --n 20 --noise 0.3 --seed 2 --quiet --csv-out " +
                      (cli.dir / "jitter.csv").string()) == 0,
              "jitter sequences converge");
        check(cli.run("converge " + (cli.dir / "boundary.json").string() +
                      " --kind boundary --n 64 --quiet --csv-out " +
                      (cli.dir / "bnd.csv").string()) == 0,
              "boundary sequences converge");
        check(slurp(cli.dir / "bnd.csv").find(",inf") != std::string::npos,
              "boundary CSV carries the inf token in the bound column");
    }

    {
        const fs::path out = cli.dir / "chan.json";
        const int code = cli.run("channel-check " + problem.string() +
                                 " --trials 50 --seed 4 --out " + out.string());
        json result = json::parse(slurp(out));
        check(code == 0 && result["violations"] == 0,
              "random channels show zero data-processing violations");

        json identity{{"dim_in", 2},
                      {"dim_out", 2},
                      {"kraus", json::array({json{
                                    {"real", json::array({json::array({1.0, 0.0}),
                                                          json::array({0.0, 1.0})})},
                                    {"imag", json::array({json::array({0.0, 0.0}),
                                                          json::array({0.0, 0.0})})}}})}};
        cli.write("identity_channel.json", identity.dump());
        const int icode = cli.run("channel-check " + problem.string() + " " +
                                  (cli.dir / "identity_channel.json").string() +
                                  " --trials 10 --seed 4 --out " + (cli.dir / "ichan.json").string());
        json iresult = json::parse(slurp(cli.dir / "ichan.json"));
        bool equal_rows = icode == 0;
        for (const auto& row : iresult["rows"]) {
            equal_rows = equal_rows && std::abs(row["contraction_lhs"].get<double>() -
                                                row["contraction_rhs"].get<double>()) < 1e-12;
        }
        check(equal_rows, "identity channels contract nothing");

        json broken = identity;
        broken["kraus"][0]["real"][0][0] = 0.7;
        cli.write("broken_channel.json", broken.dump());
        check(cli.run("channel-check " + problem.string() + " " +
                      (cli.dir / "broken_channel.json").string()) == 2,
              "broken completeness exits 2");
    }

    {
        const fs::path a = cli.dir / "det_a.json";
        const fs::path b = cli.dir / "det_b.json";
        cli.run("solve " + problem.string() + " --quiet --out " + a.string());
        cli.run("solve " + problem.string() + " --quiet --out " + b.string());
        check(slurp(a) == slurp(b), "solve results are byte-identical across runs");

        // parse . serialize is the identity on the result file.
        json parsed = json::parse(slurp(a));
        check(parsed.dump(2) + "\n" == slurp(a), "result files reparse to the same bytes");
    }

    fs::remove_all(cli.dir);
    std::cout << (failures == 0 ? "ALL OK\n" : "FAILURES\n");
    return failures == 0 ? 0 : 1;
}
