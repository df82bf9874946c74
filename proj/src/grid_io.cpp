#include "curveflow/grid_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace curveflow {

namespace {

constexpr char kMagic[4] = {'C', 'F', 'G', 'F'};
constexpr std::uint8_t kVersion = 1;

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    std::reverse(b.begin(), b.end());
    std::memcpy(&v, b.data(), sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw GridFormatError("truncated binary grid file");
  return to_little(v);
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

void write_values_csv(std::ostream& os, const std::vector<cplx>& v) {
  os << "re,im\n" << std::setprecision(17);
  for (const auto& z : v) os << z.real() << ',' << z.imag() << '\n';
}

void write_values_bin(std::ostream& os, const std::vector<cplx>& v) {
  for (const auto& z : v) {
    put(os, z.real());
    put(os, z.imag());
  }
}

std::vector<cplx> read_values_csv(std::istream& is, std::size_t n) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("re,im", 0) != 0) {
    throw GridFormatError("expected `re,im` column header");
  }
  std::vector<cplx> v;
  v.reserve(n);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw GridFormatError("malformed value line: " + line);
    try {
      v.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw GridFormatError("malformed value line: " + line);
    }
  }
  if (v.size() != n) {
    throw GridFormatError("expected " + std::to_string(n) + " values, found " + std::to_string(v.size()));
  }
  return v;
}

std::vector<cplx> read_values_bin(std::istream& is, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& z : v) {
    const double re = get<double>(is);
    z = cplx(re, get<double>(is));
  }
  return v;
}

AnyGrid read_csv(std::istream& is) {
  std::string line;
  std::getline(is, line);
  std::istringstream hs(line);
  std::string hash, tag;
  hs >> hash >> tag;
  if (hash != "#") throw GridFormatError("missing `#` header line");
  if (tag == "grid1d") {
    double o, h;
    std::size_t n;
    if (!(hs >> o >> h >> n) || n == 0 || !(h > 0)) throw GridFormatError("bad grid1d header");
    return GridFunction1D(o, h, read_values_csv(is, n));
  }
  if (tag == "grid2d") {
    double o1, h1, o2, h2;
    std::size_t n1, n2;
    if (!(hs >> o1 >> h1 >> n1 >> o2 >> h2 >> n2) || n1 == 0 || n2 == 0 || !(h1 > 0) || !(h2 > 0)) {
      throw GridFormatError("bad grid2d header");
    }
    std::string b = "zero";
    hs >> b;
    if (b != "zero" && b != "periodic") throw GridFormatError("unknown boundary `" + b + "`");
    GridFunction2D f(o1, h1, n1, o2, h2, n2, b == "periodic" ? X2Boundary::periodic : X2Boundary::zero);
    f.values = read_values_csv(is, n1 * n2);
    return f;
  }
  throw GridFormatError("unknown grid tag `" + tag + "`");
}

AnyGrid read_bin(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw GridFormatError("bad magic");
  const auto version = get<std::uint8_t>(is);
  if (version != kVersion) throw GridFormatError("unsupported version " + std::to_string(version));
  const auto dim = get<std::uint8_t>(is);
  const auto boundary = get<std::uint8_t>(is);
  if (dim == 1) {
    const double o = get<double>(is), h = get<double>(is);
    const auto n = get<std::uint64_t>(is);
    if (n == 0 || !(h > 0)) throw GridFormatError("bad grid1d header");
    return GridFunction1D(o, h, read_values_bin(is, n));
  }
  if (dim == 2) {
    const double o1 = get<double>(is), h1 = get<double>(is);
    const auto n1 = get<std::uint64_t>(is);
    const double o2 = get<double>(is), h2 = get<double>(is);
    const auto n2 = get<std::uint64_t>(is);
    if (n1 == 0 || n2 == 0 || !(h1 > 0) || !(h2 > 0) || boundary > 1) throw GridFormatError("bad grid2d header");
    GridFunction2D f(o1, h1, n1, o2, h2, n2, boundary == 1 ? X2Boundary::periodic : X2Boundary::zero);
    f.values = read_values_bin(is, n1 * n2);
    return f;
  }
  throw GridFormatError("bad dimension byte");
}

}  // namespace

GridFileFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".cfgf" ? GridFileFormat::binary : GridFileFormat::csv;
}

void write_grid(const GridFunction1D& f, const std::filesystem::path& path, GridFileFormat format) {
  auto os = open_out(path, format == GridFileFormat::binary);
  if (format == GridFileFormat::csv) {
    os << std::setprecision(17) << "# grid1d " << f.origin << ' ' << f.step << ' ' << f.size() << '\n';
    write_values_csv(os, f.values);
  } else {
    os.write(kMagic, 4);
    put<std::uint8_t>(os, kVersion);
    put<std::uint8_t>(os, 1);
    put<std::uint8_t>(os, 0);
    put(os, f.origin);
    put(os, f.step);
    put<std::uint64_t>(os, f.size());
    write_values_bin(os, f.values);
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

void write_grid(const GridFunction2D& f, const std::filesystem::path& path, GridFileFormat format) {
  auto os = open_out(path, format == GridFileFormat::binary);
  const bool periodic = f.x2_boundary == X2Boundary::periodic;
  if (format == GridFileFormat::csv) {
    os << std::setprecision(17) << "# grid2d " << f.origin1 << ' ' << f.step1 << ' ' << f.n1 << ' '
       << f.origin2 << ' ' << f.step2 << ' ' << f.n2;
    if (periodic) os << " periodic";
    os << '\n';
    write_values_csv(os, f.values);
  } else {
    os.write(kMagic, 4);
    put<std::uint8_t>(os, kVersion);
    put<std::uint8_t>(os, 2);
    put<std::uint8_t>(os, periodic ? 1 : 0);
    put(os, f.origin1);
    put(os, f.step1);
    put<std::uint64_t>(os, f.n1);
    put(os, f.origin2);
    put(os, f.step2);
    put<std::uint64_t>(os, f.n2);
    write_values_bin(os, f.values);
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

void write_grid(const GridFunction1D& f, const std::filesystem::path& path) {
  write_grid(f, path, format_for_path(path));
}

void write_grid(const GridFunction2D& f, const std::filesystem::path& path) {
  write_grid(f, path, format_for_path(path));
}

AnyGrid read_grid(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char first = 0;
  is.get(first);
  is.seekg(0);
  return first == 'C' ? read_bin(is) : read_csv(is);
}

GridFunction1D read_grid_1d(const std::filesystem::path& path) {
  auto g = read_grid(path);
  if (auto* f = std::get_if<GridFunction1D>(&g)) return std::move(*f);
  throw GridFormatError(path.string() + " holds a 2D grid, expected 1D");
}

GridFunction2D read_grid_2d(const std::filesystem::path& path) {
  auto g = read_grid(path);
  if (auto* f = std::get_if<GridFunction2D>(&g)) return std::move(*f);
  throw GridFormatError(path.string() + " holds a 1D grid, expected 2D");
}

}  // namespace curveflow
