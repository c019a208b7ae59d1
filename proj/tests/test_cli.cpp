#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

int run(const std::string& args, const std::string& stdout_path) {
    const std::string cmd =
        std::string(REINS_CLI_PATH) + " " + args + " > " + stdout_path + " 2> /dev/null";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("solve exits cleanly on the default configuration") {
    write_file("/tmp/reins_empty.json", "{}");
    const int rc = run("--config /tmp/reins_empty.json solve", "/tmp/reins_solve.txt");
    CHECK(rc == 0);
    const std::string out = slurp("/tmp/reins_solve.txt");
    CHECK(out.find("eta_star=") != std::string::npos);
    CHECK(out.find("a0_star=") != std::string::npos);
    CHECK(out.find("existence_bound:") != std::string::npos);
}

TEST_CASE("solve exits 2 on validation failure and names the violation") {
    write_file("/tmp/reins_feller.json",
               R"({"market": {"sigma": 1.0, "kappa": 1.0, "delta": 0.1}})");
    const std::string cmd = std::string(REINS_CLI_PATH) +
                            " --config /tmp/reins_feller.json solve > /dev/null 2> "
                            "/tmp/reins_feller_err.txt";
    const int rc = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(rc == 2);
    CHECK(slurp("/tmp/reins_feller_err.txt").find("Feller") != std::string::npos);
}

TEST_CASE("unknown configuration keys exit 1 with the key path") {
    write_file("/tmp/reins_unknown.json", R"({"market": {"mu0": 1.0}})");
    const std::string cmd = std::string(REINS_CLI_PATH) +
                            " --config /tmp/reins_unknown.json solve > /dev/null 2> "
                            "/tmp/reins_unknown_err.txt";
    const int rc = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(rc == 1);
    CHECK(slurp("/tmp/reins_unknown_err.txt").find("market.mu0") != std::string::npos);
}

TEST_CASE("riccati dump is all zero without a variance risk premium") {
    write_file("/tmp/reins_xi0.json",
               R"({"market": {"xi": 0.0}, "numerics": {"ode_steps": 200}})");
    const int rc =
        run("--config /tmp/reins_xi0.json riccati --agent insurer", "/tmp/reins_ric.csv");
    CHECK(rc == 0);
    std::ifstream in("/tmp/reins_ric.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,A,H_lo,H_hi");
    int rows = 0;
    bool all_zero = true;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0) continue;
        ++rows;
        const auto c1 = line.find(',');
        if (line.substr(c1 + 1) != "0,0,0") all_zero = false;
    }
    CHECK(rows == 201);
    CHECK(all_zero);
}

TEST_CASE("riccati dump carries the residual comment") {
    write_file("/tmp/reins_base.json", "{}");
    const int rc = run("--config /tmp/reins_base.json riccati", "/tmp/reins_ric2.csv");
    CHECK(rc == 0);
    const std::string out = slurp("/tmp/reins_ric2.csv");
    const auto pos = out.find("# max_fd_residual=");
    REQUIRE(pos != std::string::npos);
    const double residual = std::stod(out.substr(pos + 18));
    CHECK(residual <= 1e-6);
}

TEST_CASE("sweep emits ordered rows and honors directions") {
    const int rc = run("sweep --param insurer.alpha --values 0.5:1.0:6 --target a0_star --t 5",
                       "/tmp/reins_sweep.csv");
    CHECK(rc == 0);
    std::ifstream in("/tmp/reins_sweep.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "insurer.alpha,a0_star");
    double prev_param = -1.0, prev_value = 1e18;
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double param = std::stod(line.substr(0, comma));
        const double value = std::stod(line.substr(comma + 1));
        CHECK(param > prev_param);
        CHECK(value < prev_value);  // retention falls as ambiguity aversion rises
        prev_param = param;
        prev_value = value;
        ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("sweep supports the retention feedback target against eta") {
    const int rc = run("sweep --param eta --values 0.3,0.6 --target retention_feedback",
                       "/tmp/reins_sweep_eta.csv");
    CHECK(rc == 0);
    std::ifstream in("/tmp/reins_sweep_eta.csv");
    std::string header, r1, r2;
    std::getline(in, header);
    std::getline(in, r1);
    std::getline(in, r2);
    const double a03 = std::stod(r1.substr(r1.find(',') + 1));
    const double a06 = std::stod(r2.substr(r2.find(',') + 1));
    CHECK(a03 < a06);
}

TEST_CASE("sweep rejects the eta pseudo-parameter for other targets") {
    const std::string cmd = std::string(REINS_CLI_PATH) +
                            " sweep --param eta --values 0.3,0.6 --target a0_star > /dev/null "
                            "2> /dev/null";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 1);
}

TEST_CASE("failed sweep cells become NaN rows without killing the run") {
    // alpha = 0.4 violates the attitude range; the cell fails validation
    const int rc = run("sweep --param insurer.alpha --values 0.4,0.8 --target a0_star",
                       "/tmp/reins_sweep_nan.csv");
    CHECK(rc == 0);
    const std::string out = slurp("/tmp/reins_sweep_nan.csv");
    CHECK(out.find("nan") != std::string::npos);
}

TEST_CASE("check reports the existence bound and premium scan") {
    write_file("/tmp/reins_base.json", "{}");
    const int rc = run("--config /tmp/reins_base.json check", "/tmp/reins_check.txt");
    CHECK(rc == 0);
    const std::string out = slurp("/tmp/reins_check.txt");
    CHECK(out.find("validation: valid") != std::string::npos);
    CHECK(out.find("t_max=") != std::string::npos);
    CHECK(out.find("premium_sign_changes=") != std::string::npos);

    write_file("/tmp/reins_xi0b.json", R"({"market": {"xi": 0.0}})");
    const int rc2 = run("--config /tmp/reins_xi0b.json check", "/tmp/reins_check2.txt");
    CHECK(rc2 == 0);
    CHECK(slurp("/tmp/reins_check2.txt").find("t_max=inf") != std::string::npos);
}

TEST_CASE("command output is byte-identical across runs") {
    write_file("/tmp/reins_base.json", "{}");
    CHECK(run("--config /tmp/reins_base.json solve", "/tmp/reins_det1.txt") == 0);
    CHECK(run("--config /tmp/reins_base.json solve", "/tmp/reins_det2.txt") == 0);
    CHECK(slurp("/tmp/reins_det1.txt") == slurp("/tmp/reins_det2.txt"));

    CHECK(run("sweep --param insurer.alpha --values 0.6,0.8 --target a0_star --jobs 2",
              "/tmp/reins_det3.csv") == 0);
    CHECK(run("sweep --param insurer.alpha --values 0.6,0.8 --target a0_star --jobs 1",
              "/tmp/reins_det4.csv") == 0);
    CHECK(slurp("/tmp/reins_det3.csv") == slurp("/tmp/reins_det4.csv"));
}

TEST_CASE("the --out flag redirects without changing content") {
    write_file("/tmp/reins_base.json", "{}");
    CHECK(run("--config /tmp/reins_base.json --out /tmp/reins_out.txt solve",
              "/tmp/reins_stdout.txt") == 0);
    CHECK(slurp("/tmp/reins_stdout.txt").empty());
    CHECK(slurp("/tmp/reins_out.txt").find("eta_star=") != std::string::npos);
}

TEST_CASE("riccati blow-up exits 3 and reports the existence bound") {
    write_file("/tmp/reins_blow.json",
               R"({"market": {"xi": 10.0, "kappa": 0.2, "delta": 1.0, "sigma": 0.6},
                   "insurer": {"beta0": 0.2, "betaY": 0.2, "gamma": 0.1},
                   "numerics": {"ode_steps": 2000}})");
    const std::string cmd = std::string(REINS_CLI_PATH) +
                            " --config /tmp/reins_blow.json riccati > /dev/null 2> "
                            "/tmp/reins_blow_err.txt";
    const int rc = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(rc == 3);
    const std::string err = slurp("/tmp/reins_blow_err.txt");
    CHECK(err.find("blow-up") != std::string::npos);
    CHECK(err.find("existence_bound") != std::string::npos);
}

TEST_CASE("two-parameter sweeps emit the cross product in order") {
    const int rc = run(
        "sweep --param insurer.alpha --values 0.6,0.8 --param2 insurer.gamma "
        "--values2 0.4,0.5,0.6 --target a0_star",
        "/tmp/reins_sweep2d.csv");
    CHECK(rc == 0);
    std::ifstream in("/tmp/reins_sweep2d.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "insurer.alpha,insurer.gamma,a0_star");
    int rows = 0;
    std::string line;
    std::string first_col_prev;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 6);
}

TEST_CASE("premium sweep rises with the reinsurer's ambiguity attitude") {
    const int rc = run("sweep --param reinsurer.alphaR --values 0.5:1.0:6 --target eta_star",
                       "/tmp/reins_sweep_ar.csv");
    CHECK(rc == 0);
    std::ifstream in("/tmp/reins_sweep_ar.csv");
    std::string line;
    std::getline(in, line);  // header
    double prev = -1e18;
    int rows = 0;
    while (std::getline(in, line)) {
        const double value = std::stod(line.substr(line.find(',') + 1));
        CHECK(value > prev);
        prev = value;
        ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("check finds at least one premium sign change at baseline") {
    write_file("/tmp/reins_base.json", "{}");
    REQUIRE(run("--config /tmp/reins_base.json check", "/tmp/reins_check3.txt") == 0);
    const std::string out = slurp("/tmp/reins_check3.txt");
    const auto pos = out.find("premium_sign_changes=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stoi(out.substr(pos + 21)) >= 1);
}

TEST_CASE("strategy curves carry the benchmark column") {
    write_file("/tmp/reins_small.json", R"({"numerics": {"ode_steps": 500}})");
    const int rc = run("--config /tmp/reins_small.json strategies --points 11 --t 5",
                       "/tmp/reins_strat.csv");
    CHECK(rc == 0);
    std::ifstream in("/tmp/reins_strat.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,pi_I,pi_R,pi_tilde");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 11);

    // no variance risk premium: every allocation column is zero
    write_file("/tmp/reins_xi0s.json",
               R"({"market": {"xi": 0.0}, "numerics": {"ode_steps": 500}})");
    REQUIRE(run("--config /tmp/reins_xi0s.json strategies --points 5", "/tmp/reins_strat0.csv") ==
            0);
    std::ifstream in0("/tmp/reins_strat0.csv");
    std::getline(in0, header);
    while (std::getline(in0, line)) {
        CHECK(line.substr(line.find(',') + 1) == "0,0,0");
    }
}

TEST_CASE("distortion series mirror their upper and lower rows") {
    write_file("/tmp/reins_small.json", R"({"numerics": {"ode_steps": 500}})");
    const int rc = run(
        "--config /tmp/reins_small.json distortions --z 0.5,1.5 --t 5 --agent reinsurer",
        "/tmp/reins_dist.csv");
    CHECK(rc == 0);
    std::ifstream in("/tmp/reins_dist.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,z,phi0_lo,phiY_lo,phiZ_lo,phi0_hi,phiY_hi,phiZ_hi");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        std::vector<double> cols;
        std::istringstream is(line);
        std::string piece;
        while (std::getline(is, piece, ',')) cols.push_back(std::stod(piece));
        REQUIRE(cols.size() == 8);
        CHECK(cols[5] == -cols[2]);
        CHECK(cols[6] == -cols[3]);
        ++rows;
    }
    CHECK(rows == 2);
}
