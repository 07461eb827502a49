#include "nlwave/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nlwave {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

void put_block(std::ostream& os, const std::vector<double>& a) {
  // Little-endian host: dump directly; otherwise fall back per value.
  const std::uint16_t probe = 1;
  if (*reinterpret_cast<const unsigned char*>(&probe) == 1) {
    os.write(reinterpret_cast<const char*>(a.data()),
             static_cast<std::streamsize>(a.size() * sizeof(double)));
  } else {
    for (double v : a) put_f64(os, v);
  }
}

void get_block(std::istream& is, std::vector<double>& a) {
  const std::uint16_t probe = 1;
  if (*reinterpret_cast<const unsigned char*>(&probe) == 1) {
    is.read(reinterpret_cast<char*>(a.data()),
            static_cast<std::streamsize>(a.size() * sizeof(double)));
  } else {
    for (double& v : a) v = get_f64(is);
  }
}

}  // namespace

void write_checkpoint(const std::string& path, const Grid& g,
                      const FieldState& st) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_checkpoint: cannot open " + path);
  os.write("NLWV", 4);
  put_u32(os, 1u);
  put_u32(os, static_cast<std::uint32_t>(g.n));
  put_f64(os, g.h);
  put_f64(os, st.t);
  put_block(os, st.phi);
  put_block(os, st.pi);
  if (!os) throw std::runtime_error("write_checkpoint: write failed");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "NLWV", 4) != 0)
    throw std::runtime_error("read_checkpoint: bad magic");
  const std::uint32_t version = get_u32(is);
  if (version != 1u)
    throw std::runtime_error("read_checkpoint: unsupported version");
  const std::uint32_t n = get_u32(is);
  const double h = get_f64(is);
  const double t = get_f64(is);
  Checkpoint cp{Grid(static_cast<int>(n), h), FieldState()};
  cp.state.t = t;
  cp.state.phi.resize(cp.grid.size());
  cp.state.pi.resize(cp.grid.size());
  get_block(is, cp.state.phi);
  get_block(is, cp.state.pi);
  if (!is) throw std::runtime_error("read_checkpoint: truncated file");
  return cp;
}

}  // namespace nlwave
