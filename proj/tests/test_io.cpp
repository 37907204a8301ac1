#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "pdncg/io.hpp"

using namespace pdncg;

TEST_SUITE("cli") {

TEST_CASE("PGM encoding, layout and round trip") {
  Image img{2, 3, {0.0, 1.0, 0.5, 0.25, 0.2, 2.0}};  // column-major 2 x 3
  const std::string pgm = io::encode_pgm(img);
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(pgm.size() == header.size() + 6);
  CHECK(pgm.substr(0, header.size()) == header);
  // Row-major bytes: row 0 = (0, 0.5, 0.2), row 1 = (1, 0.25, clamp(2) = 1).
  const unsigned char expect[] = {0, 128, 51, 255, 64, 255};
  for (int k = 0; k < 6; ++k) CHECK(static_cast<unsigned char>(pgm[header.size() + k]) == expect[k]);

  const auto path = std::filesystem::temp_directory_path() / "pdncg_io_test.pgm";
  const Image p = shepp_logan(32, 16);
  io::write_pgm(path, p);
  const Image back = io::read_pgm(path);
  CHECK(back.n1 == 32);
  CHECK(back.n2 == 16);
  for (std::size_t i = 0; i < p.pixels.size(); ++i) CHECK(std::abs(back.pixels[i] - p.pixels[i]) <= 0.5 / 255.0 + 1e-15);
  std::filesystem::remove(path);

  const auto bad = std::filesystem::temp_directory_path() / "pdncg_io_bad.pgm";
  std::ofstream(bad) << "P2\n2 2\n255\n0 0 0 0\n";
  CHECK_THROWS(io::read_pgm(bad));
  std::filesystem::remove(bad);
  CHECK_THROWS(io::read_pgm("/nonexistent/file.pgm"));
}

TEST_CASE("trace CSV columns") {
  std::vector<IterationRecord> tr(2);
  tr[1].iter = 1;
  tr[1].stage = 3;
  tr[1].pcg_iters = 7;
  const std::string csv = io::trace_csv(tr);
  CHECK(csv.rfind("stage,iter,f,grad_norm,pcg_iters,alpha,backtracks,time_s\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("\n3,1,") != std::string::npos);
}

TEST_CASE("key=value config parsing") {
  const std::set<std::string> allowed{"c", "mu", "problem"};
  const auto kv = io::parse_config("# comment\nc = 0.05\n\n  mu=1e-5  # trailing\nproblem=itv\n", allowed);
  CHECK(kv.at("c") == "0.05");
  CHECK(kv.at("mu") == "1e-5");
  CHECK(kv.at("problem") == "itv");
  try {
    (void)io::parse_config("c=1\nbogus=2\n", allowed);
    FAIL("unknown key accepted");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_config("c=1\nc=2\n", allowed), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_config("c 1\n", allowed), std::invalid_argument);
  CHECK_THROWS(io::read_config("/nonexistent/config.txt", allowed));
}

}
