#include "pdncg/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdncg::io {

std::string encode_pgm(const Image& image) {
  std::string out = "P5\n" + std::to_string(image.n2) + " " + std::to_string(image.n1) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(image.size()));
  // PGM is row-major; the image is column-major.
  for (Index i = 0; i < image.n1; ++i) {
    for (Index j = 0; j < image.n2; ++j) {
      const double v = std::clamp(image(i, j), 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const Image& image) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string data = encode_pgm(image);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  if (header_token(f) != "P5") throw std::runtime_error(path.string() + ": not a binary PGM");
  Index w = 0, h = 0;
  int maxval = 0;
  try {
    w = std::stol(header_token(f));
    h = std::stol(header_token(f));
    maxval = std::stoi(header_token(f));
  } catch (const std::exception&) {
    throw std::runtime_error(path.string() + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw std::runtime_error(path.string() + ": unsupported PGM header");
  }
  std::string raw(static_cast<std::size_t>(w * h), '\0');
  f.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (f.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error(path.string() + ": truncated PGM data");
  }
  Image img{h, w, Vector(static_cast<std::size_t>(w * h))};
  for (Index i = 0; i < h; ++i) {
    for (Index j = 0; j < w; ++j) {
      const auto byte = static_cast<unsigned char>(raw[static_cast<std::size_t>(i * w + j)]);
      img.pixels[static_cast<std::size_t>(i + h * j)] = static_cast<double>(byte) / maxval;
    }
  }
  return img;
}

std::string trace_csv(const std::vector<IterationRecord>& trace) {
  std::ostringstream os;
  os.precision(17);
  os << "stage,iter,f,grad_norm,pcg_iters,alpha,backtracks,time_s\n";
  for (const auto& r : trace) {
    os << r.stage << ',' << r.iter << ',' << r.f << ',' << r.grad_norm << ',' << r.pcg_iters << ','
       << r.alpha << ',' << r.backtracks << ',' << r.time_s << '\n';
  }
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> parse_config(const std::string& text,
                                                const std::set<std::string>& allowed) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!allowed.contains(key)) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!out.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

std::map<std::string, std::string> read_config(const std::filesystem::path& path,
                                               const std::set<std::string>& allowed) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), allowed);
}

}  // namespace pdncg::io
