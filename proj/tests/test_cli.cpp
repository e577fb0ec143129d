#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path tool = HBTSIM_PATH;
const fs::path configs = CONFIG_DIR;

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "hbt_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = tool.string() + " " + args + " > " + (scratch() / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("no column " + name);
    const auto idx = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[idx]);
    return out;
  }
};

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  Table t;
  std::string line, cell;
  std::getline(in, line);
  std::stringstream hs(line);
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    t.rows.push_back(row);
  }
  return t;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

double contrast(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / (*hi + *lo);
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path;
}

std::string cfg(const std::string& name) { return "--config " + (configs / (name + ".cfg")).string(); }
std::string out(const std::string& stem) { return "--out " + (scratch() / stem).string(); }

}  // namespace

TEST_CASE("closed-form curves") {
  REQUIRE(run("closed-form " + cfg("fig2c") + " " + out("f2c")) == 0);
  const auto t = read_csv(scratch() / "f2c.csv");
  CHECK(t.header == std::vector<std::string>{"delta_rad", "g2_fermi_polarized",
                                             "g2_fermi_unpolarized_sfe",
                                             "g2_fermi_unpolarized_mfe", "g2_boson_reference"});
  CHECK(contrast(t.column("g2_fermi_unpolarized_mfe")) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(contrast(t.column("g2_fermi_unpolarized_sfe")) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(contrast(t.column("g2_fermi_polarized")) == doctest::Approx(1.0).epsilon(1e-12));

  const auto delta = t.column("delta_rad");
  const auto pol = t.column("g2_fermi_polarized");
  const auto bos = t.column("g2_boson_reference");
  const auto zero = static_cast<std::size_t>(
      std::min_element(delta.begin(), delta.end(),
                       [](double a, double b) { return std::abs(a) < std::abs(b); }) - delta.begin());
  CHECK(std::abs(delta[zero]) < 1e-12);
  CHECK(std::abs(pol[zero]) < 1e-12);

  // 801 points over 8 pi: a shift of pi is 100 rows.
  for (std::size_t i = 0; i + 100 < delta.size(); ++i) CHECK(bos[i] == doctest::Approx(pol[i + 100]).epsilon(1e-9));

  const auto m = read_json(scratch() / "f2c.manifest.json");
  CHECK(m["command"] == "closed-form");
  CHECK(m["derived"]["visibility_unpolarized_mfe"].get<double>() == doctest::Approx(0.4));
  CHECK(m["outputs"][0] == "f2c.csv");
}

TEST_CASE("coulomb run") {
  const auto dir = scratch();
  REQUIRE(run("coulomb " + cfg("fig4b") + " " + out("c4b")) == 0);
  const auto dip = read_json(dir / "c4b.dip.json");
  CHECK(dip["converged"] == true);
  CHECK(std::abs(dip["z_dip_relative_difference"].get<double>()) < 1e-2);
  CHECK(dip["t_99_below_one_percent_of_t_f"] == true);
  const auto traj = read_csv(dir / "c4b.csv");
  const auto drift = traj.column("energy_drift");
  CHECK(*std::max_element(drift.begin(), drift.end()) < 1e-6);

  std::ifstream base(configs / "fig4b.cfg");
  std::stringstream text;
  text << base.rdbuf() << "integrator.t_max_s = 1e-14\n";
  const auto short_cfg = write_config("short.cfg", text.str());
  CHECK(run("coulomb --config " + short_cfg.string() + " " + out("short")) == 2);
  CHECK(fs::exists(dir / "short.csv"));
  CHECK(read_json(dir / "short.dip.json")["converged"] == false);
  CHECK(read_json(dir / "short.manifest.json")["converged"] == false);
}

TEST_CASE("compose runs") {
  const auto dir = scratch();
  REQUIRE(run("compose " + cfg("fig4b") + " " + out("p4b") + " --threads 4") == 0);
  CHECK(read_json(dir / "p4b.manifest.json")["derived"]["fringe_count"].get<double>() ==
        doctest::Approx(4.37).epsilon(1e-2));
  REQUIRE(run("compose " + cfg("fig4a") + " " + out("p4a")) == 0);
  CHECK(read_json(dir / "p4a.manifest.json")["derived"]["fringe_count"].get<double>() ==
        doctest::Approx(0.138).epsilon(1e-2));

  std::ifstream base(configs / "fig4b.cfg");
  std::stringstream text;
  for (std::string line; std::getline(base, line);) {
    if (line.rfind("coulomb.enabled", 0) == 0) line = "coulomb.enabled = false";
    text << line << "\n";
  }
  const auto off = write_config("off.cfg", text.str());
  REQUIRE(run("compose --config " + off.string() + " " + out("off")) == 0);
  for (double e : read_csv(dir / "off.csv").column("envelope")) CHECK(e == 1.0);

  // A manifest is itself a valid config and reproduces the run.
  REQUIRE(run("compose --config " + (dir / "p4b.manifest.json").string() + " " + out("again")) == 0);
  std::ifstream a(dir / "p4b.csv"), b(dir / "again.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("sweeps") {
  const auto dir = scratch();
  REQUIRE(run("sweep " + cfg("sweep_d") + " --values 1e-9,4e-9,16e-9,64e-9 " + out("sd")) == 0);
  const auto n = read_csv(dir / "sd.csv").column("fringe_count");
  REQUIRE(n.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(n[i] / n[0] == doctest::Approx(double(1 << i)).epsilon(1e-12));

  REQUIRE(run("sweep " + cfg("fig2c") + " --param k --values 5e10,1e11,2e11 " + out("sk")) == 0);
  const auto nk = read_csv(dir / "sk.csv").column("fringe_count");
  for (double v : nk) CHECK(std::abs(v / nk[0] - 1.0) <= 1e-12);

  REQUIRE(run("sweep " + cfg("fig2c") + " --param mu --values 0.01,0.2,1,3 " + out("smu")) == 0);
  for (double v : read_csv(dir / "smu.csv").column("visibility")) CHECK(std::abs(v - 0.4) < 1e-12);

  REQUIRE(run("sweep " + cfg("sweep_d") + " " + out("sdefault")) == 0);
  const auto m = read_json(dir / "sdefault.manifest.json");
  CHECK(m["checks"].size() == 2);
  for (const auto& c : m["checks"]) CHECK(c["passed"] == true);
}

TEST_CASE("oracle run") {
  CHECK(run("oracle " + cfg("fig2c") + " " + out("o2c") + " --threads 2") == 0);
  CHECK(read_json(scratch() / "o2c.manifest.json")["derived"]["max_relative_difference"].get<double>() < 1e-10);
  CHECK(run("oracle " + cfg("fig4a") + " " + out("o4a")) == 1);
}

TEST_CASE("exit codes") {
  CHECK(run("") == 1);
  CHECK(run("compose --config /nonexistent.cfg " + out("x")) == 1);
  CHECK(run("compose " + cfg("fig4b")) == 1);
  const auto bad = write_config("bad.cfg",
                                "schema_version = 1\ngeometry.d_m = 1e-8\ngeometry.D_m = 1\n"
                                "geometry.k_per_m = 1e11\nsource.mu = 0.2\nsource.typo = 1\n");
  CHECK(run("compose --config " + bad.string() + " " + out("bad")) == 1);
  CHECK_FALSE(fs::exists(scratch() / "bad.csv"));
  CHECK(run("compose " + cfg("fig4b") + " --out /nonexistent/dir/x") == 1);
  CHECK(run("sweep " + cfg("fig4b") + " --param d " + out("empty")) == 1);
  CHECK(run("verify nonsense") == 1);
  CHECK(run("--version") == 0);
}

TEST_CASE("verify suites") {
  const auto t0 = std::chrono::steady_clock::now();
  CHECK(run("verify coulomb") == 0);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 60.0);
  CHECK(run("verify all " + out("v")) == 0);
  const auto report = read_json(scratch() / "v.verify.json");
  CHECK(report["passed"] == true);
  CHECK(report["checks"].size() == 16);

  // Mutation smoke test: ignoring the exchange sign must be caught.
  CHECK(run("verify fock --mutate exchange-sign " + out("mut")) == 3);
  const auto mut = read_json(scratch() / "mut.verify.json");
  CHECK(mut["passed"] == false);
  bool anticommutation_failed = false;
  for (const auto& c : mut["checks"])
    if (c["name"] == "anticommutation") anticommutation_failed = c["passed"] == false;
  CHECK(anticommutation_failed);
}

TEST_CASE("spread-averaged compose depends on the seed, not the thread count") {
  const auto dir = scratch();
  std::ifstream base(configs / "fig4b.cfg");
  std::stringstream text;
  for (std::string line; std::getline(base, line);) {
    if (line.rfind("coulomb.spread_samples", 0) == 0) line = "coulomb.spread_samples = 500";
    if (line.rfind("screen.n_points", 0) == 0) line = "screen.n_points = 401";
    text << line << "\n";
  }
  const auto spread = write_config("spread.cfg", text.str());
  const std::string common = "compose --config " + spread.string() + " --timestamp fixed ";
  REQUIRE(run(common + "--seed 7 --threads 1 " + out("s1")) == 0);
  REQUIRE(run(common + "--seed 7 --threads 8 " + out("s8")) == 0);
  REQUIRE(run(common + "--seed 8 --threads 1 " + out("s1b")) == 0);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(dir / "s1.csv") == slurp(dir / "s8.csv"));
  CHECK(slurp(dir / "s1.csv") != slurp(dir / "s1b.csv"));
  CHECK(read_json(dir / "s1.manifest.json")["config"]["seed"] == "7");
}
