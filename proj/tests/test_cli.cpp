#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "pdncg_cli_XXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(PDNCG_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::vector<double> read_solution(const fs::path& p) {
  std::ifstream f(p);
  std::vector<double> v;
  double d;
  while (f >> d) v.push_back(d);
  return v;
}

struct Row {
  double raw, pre;
};

std::vector<Row> read_spectrum(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  std::vector<Row> rows;
  while (std::getline(f, line)) {
    std::istringstream ls(line);
    std::string idx, raw, pre;
    std::getline(ls, idx, ',');
    std::getline(ls, raw, ',');
    std::getline(ls, pre, ',');
    rows.push_back({std::stod(raw), std::stod(pre)});
  }
  return rows;
}

const char* kSmall = "problem=itv\nimage=phantom:16\nc=0.05\nmu=1e-3\nseed=3\n";

}  // namespace

TEST_CASE("phantom writes a deterministic binary PGM") {
  TempDir t;
  REQUIRE(run("phantom --size 32 --out " + (t.path / "a.pgm").string()) == 0);
  REQUIRE(run("phantom --size 32 --out " + (t.path / "b.pgm").string()) == 0);
  const std::string a = slurp(t.path / "a.pgm");
  CHECK(a.rfind("P5\n32 32\n255\n", 0) == 0);
  CHECK(a.size() == std::string("P5\n32 32\n255\n").size() + 32 * 32);
  CHECK(a == slurp(t.path / "b.pgm"));
}

TEST_CASE("phantom rejects a size below 16") {
  TempDir t;
  CHECK(run("phantom --size 8 --out " + (t.path / "a.pgm").string()) != 0);
  CHECK_FALSE(fs::exists(t.path / "a.pgm"));
}

TEST_CASE("solve writes all outputs for a small instance") {
  TempDir t;
  write(t.path / "c.cfg", std::string(kSmall) + "grad_tol=1e-6\n");
  REQUIRE(run("solve --config " + (t.path / "c.cfg").string() + " --out-dir " + (t.path / "out").string()) == 0);
  for (const char* f : {"reconstruction.pgm", "trace.csv", "metrics.txt", "solution.txt"}) {
    CHECK(fs::exists(t.path / "out" / f));
  }
  const std::string m = slurp(t.path / "out" / "metrics.txt");
  CHECK(m.find("converged=1") != std::string::npos);
  CHECK(m.find("psnr=") != std::string::npos);
  CHECK(m.find("total_matvecs=") != std::string::npos);
  CHECK(slurp(t.path / "out" / "trace.csv").rfind("stage,iter,", 0) == 0);
}

TEST_CASE("continuation and a plain solve agree at a tight tolerance") {
  TempDir t;
  write(t.path / "on.cfg", std::string(kSmall) + "grad_tol=1e-8\ncontinuation=on\nprecond=exact\n");
  write(t.path / "off.cfg", std::string(kSmall) + "grad_tol=1e-8\ncontinuation=off\nprecond=none\nmax_outer=500\nmax_pcg=2000\n");
  REQUIRE(run("solve --config " + (t.path / "on.cfg").string() + " --out-dir " + (t.path / "on").string()) == 0);
  REQUIRE(run("solve --config " + (t.path / "off.cfg").string() + " --out-dir " + (t.path / "off").string()) == 0);
  const auto a = read_solution(t.path / "on" / "solution.txt");
  const auto b = read_solution(t.path / "off" / "solution.txt");
  REQUIRE(a.size() == 256);
  REQUIRE(b.size() == a.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  CHECK(std::sqrt(num / den) <= 1e-4);
}

TEST_CASE("invalid configuration exits 2 without writing outputs") {
  TempDir t;
  write(t.path / "bad.cfg", std::string(kSmall) + "bogus=1\n");
  CHECK(run("solve --config " + (t.path / "bad.cfg").string() + " --out-dir " + (t.path / "out").string()) == 2);
  CHECK_FALSE(fs::exists(t.path / "out"));
  write(t.path / "neg.cfg", std::string(kSmall) + "mu=-1\n");
  CHECK(run("solve --config " + (t.path / "neg.cfg").string() + " --out-dir " + (t.path / "out").string()) == 2);
  CHECK(run("solve --config " + (t.path / "missing.cfg").string() + " --out-dir " + (t.path / "out").string()) == 2);
  write(t.path / "img.cfg", "problem=itv\nimage=" + (t.path / "nope.pgm").string() + "\n");
  CHECK(run("solve --config " + (t.path / "img.cfg").string() + " --out-dir " + (t.path / "out").string()) == 2);
  CHECK_FALSE(fs::exists(t.path / "out"));
  CHECK(run("solve --out-dir x") == 2);
}

TEST_CASE("solve reads a PGM image and reports non-convergence with exit 1") {
  TempDir t;
  REQUIRE(run("phantom --size 16 --out " + (t.path / "p.pgm").string()) == 0);
  write(t.path / "c.cfg", "problem=itv\nimage=" + (t.path / "p.pgm").string() +
                              "\nc=0.05\nmu=1e-3\ncontinuation=off\nmax_outer=1\ngrad_tol=1e-12\n");
  CHECK(run("solve --config " + (t.path / "c.cfg").string() + " --out-dir " + (t.path / "out").string()) == 1);
  CHECK(slurp(t.path / "out" / "metrics.txt").find("converged=0") != std::string::npos);
}

TEST_CASE("solve handles the dense l1 problem") {
  TempDir t;
  write(t.path / "c.cfg", "problem=l1-dense\nn=32\nm=16\nk=3\nnoise_level=0\nc=1e-3\nmu=1e-4\ngrad_tol=1e-8\n");
  CHECK(run("solve --config " + (t.path / "c.cfg").string() + " --out-dir " + (t.path / "out").string()) == 0);
  CHECK(read_solution(t.path / "out" / "solution.txt").size() == 32);
  CHECK_FALSE(fs::exists(t.path / "out" / "reconstruction.pgm"));
}

TEST_CASE("spectrum CSV has raw and preconditioned columns") {
  TempDir t;
  write(t.path / "c.cfg", std::string(kSmall) + "grad_tol=1e-6\n");
  REQUIRE(run("spectrum --config " + (t.path / "c.cfg").string() + " --out " + (t.path / "s.csv").string()) == 0);
  const auto rows = read_spectrum(t.path / "s.csv");
  CHECK(rows.size() == 256);
  for (const auto& r : rows) CHECK(r.raw > 0.0);
  CHECK(fs::exists(t.path / "s.csv.summary"));
  CHECK(slurp(t.path / "s.csv.summary").find("bound=") != std::string::npos);
}

TEST_CASE("full sampling with rho = 1 gives a unit preconditioned spectrum") {
  TempDir t;
  write(t.path / "c.cfg", std::string(kSmall) + "sampling_ratio=1\nrho=1\ngrad_tol=1e-6\n");
  REQUIRE(run("spectrum --config " + (t.path / "c.cfg").string() + " --out " + (t.path / "s.csv").string()) == 0);
  for (const auto& r : read_spectrum(t.path / "s.csv")) CHECK(r.pre == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("identity preconditioner leaves the spectrum unchanged") {
  TempDir t;
  write(t.path / "c.cfg", std::string(kSmall) + "precond=none\ngrad_tol=1e-6\nmax_pcg=1000\n");
  REQUIRE(run("spectrum --config " + (t.path / "c.cfg").string() + " --out " + (t.path / "s.csv").string()) == 0);
  for (const auto& r : read_spectrum(t.path / "s.csv")) CHECK(r.pre == r.raw);
}

TEST_CASE("spectrum rejects problems that are too large") {
  TempDir t;
  write(t.path / "c.cfg", "problem=itv\nimage=phantom:128\n");
  CHECK(run("spectrum --config " + (t.path / "c.cfg").string() + " --out " + (t.path / "s.csv").string()) == 2);
  CHECK_FALSE(fs::exists(t.path / "s.csv"));
}

TEST_CASE("check exit codes") {
  CHECK(run("check --suite all") == 0);
  CHECK(run("check --suite fault") == 1);
  CHECK(run("check --suite bogus") == 2);
  CHECK(run("--help") == 0);
  CHECK(run("nonsense") == 2);
}
