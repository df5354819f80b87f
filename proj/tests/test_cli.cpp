#include <doctest.h>

#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// End-to-end checks against the built binary (path injected by CMake).

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  namespace fs = std::filesystem;
  const fs::path err_path =
      fs::temp_directory_path() / ("pcr_cli_stderr_" + std::to_string(::getpid()) + ".txt");
  const std::string command =
      std::string(PCR_CLI_PATH) + " " + args + " 2>" + err_path.string();
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  std::array<char, 4096> buffer;
  size_t count;
  while ((count = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    output.append(buffer.data(), count);
  }
  const int status = pclose(pipe);
  std::ifstream err_file(err_path);
  std::stringstream err_text;
  err_text << err_file.rdbuf();
  fs::remove(err_path);
  return {WEXITSTATUS(status), output, err_text.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double value_of(const std::string& csv, const std::string& key) {
  for (const auto& line : lines_of(csv)) {
    const auto fields = fields_of(line);
    if (fields.size() == 2 && fields[0] == key) return std::stod(fields[1]);
  }
  FAIL("key not found: ", key);
  return 0.0;
}

std::string write_temp_json(const std::string& name, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("curve emits the frozen reference risks") {
  const auto result =
      run_cli("curve --kappa 2 --beta 0.3 --bigN 1000 --alpha-grid 0.16334:1.0:0.83666");
  REQUIRE(result.exit_code == 0);
  const auto lines = lines_of(result.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "alpha,regime,risk");
  const auto under = fields_of(lines[1]);
  CHECK(under[1] == "Under");
  CHECK(std::stod(under[2]) == doctest::Approx(0.011244).epsilon(1e-4));
  const auto over = fields_of(lines[2]);
  CHECK(over[1] == "Over");
  CHECK(std::stod(over[2]) == doctest::Approx(0.0060977).epsilon(1e-4));
}

TEST_CASE("curve marks the excluded band and the noisy alpha = 0 point") {
  const auto result =
      run_cli("curve --kappa 2 --beta 0.3 --bigN 1000 --sigma 1 --alpha-grid 0:0.3:0.3");
  REQUIRE(result.exit_code == 0);
  const auto lines = lines_of(result.out);
  REQUIRE(lines.size() == 3);
  CHECK(fields_of(lines[1])[2] == "1");  // sigma^2 floor at alpha = 0
  const auto excluded = fields_of(lines[2]);
  CHECK(excluded[1] == "Excluded");
  CHECK(excluded[2].empty());
}

TEST_CASE("optimum report with nine significant digits") {
  const auto result = run_cli("optimum --kappa 2 --beta 0.3 --bigN 1000");
  REQUIRE(result.exit_code == 0);
  CHECK(value_of(result.out, "alpha_star") == doctest::Approx(0.163339973).epsilon(1e-9));
  CHECK(value_of(result.out, "risk_at_alpha_star") ==
        doctest::Approx(0.0112444002).epsilon(1e-9));
  CHECK(value_of(result.out, "risk_at_one") == doctest::Approx(0.00609772226).epsilon(1e-9));
  CHECK(result.out.find("alpha_star,0.163339973\n") != std::string::npos);
  CHECK(result.out.find("verdict,interpolating regime wins") != std::string::npos);

  const auto noisy = run_cli("optimum --kappa 2 --beta 0.3 --bigN 1000 --sigma 1");
  CHECK(value_of(noisy.out, "alpha_star") == 0.0);
  CHECK(value_of(noisy.out, "risk_at_alpha_star") == doctest::Approx(1.0));
  CHECK(noisy.out.find("verdict,noise floor sigma^2 at alpha = 0") != std::string::npos);

  const auto k1 = run_cli("optimum --kappa 1 --beta 0.3 --bigN 1000");
  CHECK(k1.out.find("verdict,interpolating regime wins") != std::string::npos);
}

TEST_CASE("simulate: schema, p = 0 row, and threshold warning") {
  const auto result = run_cli(
      "simulate --bigN 200 --n 60 --kappa 2 --p-list 0,60,180 --replicates 2 --seed 3");
  REQUIRE(result.exit_code == 0);
  const auto lines = lines_of(result.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "p,alpha,mc_mean,mc_stderr,asymptotic,rel_err");
  const auto p0 = fields_of(lines[1]);
  CHECK(p0[0] == "0");
  CHECK(std::stod(p0[5]) <= 1e-12);  // exact trivial value
  const auto threshold_row = fields_of(lines[2]);
  CHECK(threshold_row[0] == "60");
  CHECK(threshold_row[4].empty());  // inside the exclusion band
  CHECK(result.err.find("interpolation threshold") != std::string::npos);
  CHECK(result.err.find("effective rank") != std::string::npos);
  // deterministic given the seed
  const auto again = run_cli(
      "simulate --bigN 200 --n 60 --kappa 2 --p-list 0,60,180 --replicates 2 --seed 3");
  CHECK(again.out == result.out);
}

TEST_CASE("simulate with the sampling oracle adds two columns") {
  const auto result = run_cli(
      "simulate --bigN 100 --n 30 --kappa 2 --p-list 80 --replicates 2 --seed 5 "
      "--theta-draws 40");
  REQUIRE(result.exit_code == 0);
  const auto lines = lines_of(result.out);
  CHECK(lines[0] == "p,alpha,mc_mean,mc_stderr,asymptotic,rel_err,sampled_mean,sampled_stderr");
  CHECK(fields_of(lines[1]).size() == 8);
}

TEST_CASE("spectrum and stieltjes subcommands") {
  const auto spectrum = run_cli("spectrum --bigN 1000 --kappa 2 --p 1000");
  REQUIRE(spectrum.exit_code == 0);
  const auto rows = lines_of(spectrum.out);
  CHECK(rows[0] == "p,ks_distance");
  CHECK(std::stod(fields_of(rows[1])[1]) <= 0.002);

  // precondition p > n is a usage error
  const auto bad = run_cli("stieltjes --bigN 1000 --n 300 --kappa 2 --p 200");
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("p") != std::string::npos);

  const auto ok = run_cli(
      "stieltjes --bigN 400 --n 120 --kappa 2 --p 400 --replicates 3 --seed 1");
  REQUIRE(ok.exit_code == 0);
  const auto header = lines_of(ok.out)[0];
  CHECK(header == "m_hat_mean,m_hat_stderr,m0_theory,mprime_hat_mean,mprime_theory");
  const auto values = fields_of(lines_of(ok.out)[1]);
  const double m_hat = std::stod(values[0]);
  const double m_theory = std::stod(values[2]);
  CHECK(std::abs(m_hat - m_theory) / m_theory < 0.2);
}

TEST_CASE("general subcommands reproduce the uniform-density oracles") {
  const std::string uniform = write_temp_json(
      "pcr_uniform.json", R"({"family":"uniform","delta":1.0,"eta1":1.0,"eta2":2.0})");
  const auto optimum =
      run_cli("general-optimum --density " + uniform + " --beta 0.3 --bigN 1000 --cN 1");
  REQUIRE(optimum.exit_code == 0);
  CHECK(value_of(optimum.out, "nu_b") == doctest::Approx(1.7).epsilon(1e-9));
  CHECK(optimum.out.find("nu_star,AtInfinity") != std::string::npos);
  CHECK(value_of(optimum.out, "min_under_risk") == doctest::Approx(1500.0).epsilon(1e-9));
  CHECK(value_of(optimum.out, "risk_at_eta1") ==
        doctest::Approx(1038.2088708234283).epsilon(1e-8));
  CHECK(optimum.out.find("verdict,interpolating regime wins") != std::string::npos);

  const auto curve = run_cli("general-curve --density " + uniform +
                             " --beta 0.3 --bigN 1000 --cN 1 --nu-grid 1.9:1.9:1");
  REQUIRE(curve.exit_code == 0);
  const auto row = fields_of(lines_of(curve.out)[1]);
  CHECK(row[2] == "Under");
  CHECK(std::stod(row[3]) == doctest::Approx(1957.5).epsilon(1e-8));
}

TEST_CASE("general-curve matches the polynomial curve through the mapping") {
  const std::string ip = write_temp_json(
      "pcr_ip.json",
      R"({"family":"inverse_poly","delta":1.0,"params":{"kappa":2.0,"alpha2":1.0}})");
  const auto general = run_cli("general-curve --density " + ip +
                               " --beta 0.3 --bigN 1000 --cN 1e6 --nu-grid 1:1:1");
  REQUIRE(general.exit_code == 0);
  const auto row = fields_of(lines_of(general.out)[1]);
  CHECK(std::stod(row[1]) == doctest::Approx(1.0));  // alpha(nu = 1) = 1
  CHECK(row[2] == "Over");
  CHECK(std::stod(row[3]) == doctest::Approx(0.0060977222551894).epsilon(1e-6));
}

TEST_CASE("malformed density specs fail with the offending field named") {
  const std::string missing = write_temp_json(
      "pcr_bad1.json", R"({"family":"uniform","delta":1.0,"eta1":1.0})");
  const auto r1 = run_cli("general-optimum --density " + missing +
                          " --beta 0.3 --bigN 1000 --cN 1");
  CHECK(r1.exit_code == 2);
  CHECK(r1.err.find("eta2") != std::string::npos);

  const std::string unknown = write_temp_json(
      "pcr_bad2.json", R"({"family":"gaussian","delta":1.0})");
  const auto r2 = run_cli("general-optimum --density " + unknown +
                          " --beta 0.3 --bigN 1000 --cN 1");
  CHECK(r2.exit_code == 2);
  CHECK(r2.err.find("family") != std::string::npos);

  const std::string bad_json = write_temp_json("pcr_bad3.json", "{family:");
  const auto r3 = run_cli("general-optimum --density " + bad_json +
                          " --beta 0.3 --bigN 1000 --cN 1");
  CHECK(r3.exit_code == 2);
}

TEST_CASE("invalid flags exit with code 2 before any output") {
  const auto bad_beta = run_cli("curve --kappa 2 --beta 1.5 --bigN 1000");
  CHECK(bad_beta.exit_code == 2);
  CHECK(bad_beta.out.empty());
  const auto missing = run_cli("curve --kappa 2");
  CHECK(missing.exit_code == 2);
  const auto both_lists = run_cli(
      "simulate --bigN 100 --n 30 --kappa 2 --p-list 10 --alpha-list 0.5");
  CHECK(both_lists.exit_code == 2);
  const auto log_divergence =
      run_cli("curve --kappa 1 --beta 0.3 --bigN 1000 --alpha-grid 0:0.2:0.1");
  CHECK(log_divergence.exit_code == 2);
  const auto unknown_cmd = run_cli("frobnicate");
  CHECK(unknown_cmd.exit_code == 2);
}

TEST_CASE("--out writes the same CSV to a file") {
  namespace fs = std::filesystem;
  const fs::path out_path = fs::temp_directory_path() / "pcr_curve_out.csv";
  fs::remove(out_path);
  const auto direct = run_cli("curve --kappa 2 --beta 0.3 --bigN 1000 --alpha-grid 0.5:1:0.25");
  const auto filed = run_cli("curve --kappa 2 --beta 0.3 --bigN 1000 --alpha-grid 0.5:1:0.25 "
                             "--out " + out_path.string());
  REQUIRE(filed.exit_code == 0);
  CHECK(filed.out.empty());
  std::ifstream in(out_path);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(content.str() == direct.out);
  fs::remove(out_path);
  // validation failures must not create the file
  const fs::path never = fs::temp_directory_path() / "pcr_never.csv";
  fs::remove(never);
  run_cli("curve --kappa 0 --beta 0.3 --bigN 1000 --out " + never.string());
  CHECK(!fs::exists(never));
}
