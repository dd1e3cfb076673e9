#include "pwlab/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwlab {

namespace {

constexpr const char* kMagic = "PWLAB-SNAPSHOT";

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class T>
std::string join(const std::vector<T>& xs, bool exact) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += exact ? fmt17(xs[i]) : std::to_string(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

}  // namespace

void write_snapshot(std::ostream& out, const SpectralField& field, std::optional<Rational> wave_speed) {
  const GridSpec& g = field.grid();
  out << kMagic << " 1 dim=" << g.dim << " points=" << join(g.points, true)
      << " periods=" << join(g.periods, true) << " dealias=" << fmt17(g.dealias_fraction)
      << " components=" << field.components() << " complex=" << (field.is_real() ? 0 : 1)
      << " coords=" << (wave_speed ? "wz" : "xyz");
  if (wave_speed) out << " c=" << wave_speed->str();
  out << '\n';
  std::vector<std::uint64_t> buf;
  buf.reserve(field.coeffs().size() * 2);
  for (const auto& c : field.coeffs()) {
    buf.push_back(to_le(std::bit_cast<std::uint64_t>(c.real())));
    buf.push_back(to_le(std::bit_cast<std::uint64_t>(c.imag())));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8));
  if (!out) throw std::runtime_error("snapshot: write failed");
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& field,
                    std::optional<Rational> wave_speed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("snapshot: cannot open " + path.string());
  write_snapshot(out, field, wave_speed);
}

Snapshot read_snapshot(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("snapshot: missing header");
  std::istringstream hs(header);
  std::string magic;
  std::string version;
  hs >> magic >> version;
  if (magic != kMagic || version != "1") throw std::runtime_error("snapshot: not a pwlab snapshot");
  std::map<std::string, std::string> kv;
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("snapshot: malformed header token " + tok);
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error(std::string("snapshot: header lacks ") + key);
    return it->second;
  };
  GridSpec g;
  try {
    g.dim = std::stoi(need("dim"));
    for (const auto& s : split(need("points"), ',')) g.points.push_back(std::stoi(s));
    for (const auto& s : split(need("periods"), ',')) g.periods.push_back(std::stod(s));
    if (kv.count("dealias")) g.dealias_fraction = std::stod(kv["dealias"]);
  } catch (const std::logic_error&) {
    throw std::runtime_error("snapshot: malformed grid description");
  }
  g.validate();
  const int comps = std::stoi(need("components"));
  const bool is_complex = need("complex") == "1";
  Snapshot snap{SpectralField(g, comps, !is_complex), std::nullopt};
  if (need("coords") == "wz") snap.wave_speed = Rational::parse(need("c"));

  auto& coeffs = snap.field.coeffs();
  std::vector<std::uint64_t> buf(coeffs.size() * 2);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8));
  if (in.gcount() != static_cast<std::streamsize>(buf.size() * 8)) {
    throw std::runtime_error("snapshot: truncated coefficient payload");
  }
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    coeffs[i] = Complex(std::bit_cast<double>(to_le(buf[2 * i])), std::bit_cast<double>(to_le(buf[2 * i + 1])));
  }
  return snap;
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace pwlab
