#include "unimotion/param_snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "unimotion/errors.hpp"

namespace unimotion {

namespace {

constexpr char kMagic[4] = {'U', 'M', 'P', 'S'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in, std::size_t record) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw ParseError(record, "truncated snapshot");
  }
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    if (t.values.size() != static_cast<std::size_t>(t.rows) * t.cols) {
      throw DimensionError("tensor " + t.name + " has inconsistent shape");
    }
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u32(out, t.rows);
    put_u32(out, t.cols);
    out.write(reinterpret_cast<const char*>(t.values.data()),
              static_cast<std::streamsize>(t.values.size() * sizeof(double)));
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<NamedTensor> read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError(0, "not a parameter snapshot");
  }
  if (get_u32(in, 0) != kVersion) throw ParseError(0, "unsupported snapshot version");
  const std::uint32_t count = get_u32(in, 0);
  std::vector<NamedTensor> tensors;
  tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    const std::uint32_t len = get_u32(in, i + 1);
    t.name.resize(len);
    if (!in.read(t.name.data(), len)) throw ParseError(i + 1, "truncated tensor name");
    t.rows = get_u32(in, i + 1);
    t.cols = get_u32(in, i + 1);
    t.values.resize(static_cast<std::size_t>(t.rows) * t.cols);
    if (!in.read(reinterpret_cast<char*>(t.values.data()),
                 static_cast<std::streamsize>(t.values.size() * sizeof(double)))) {
      throw ParseError(i + 1, "truncated data for tensor " + t.name);
    }
    tensors.push_back(std::move(t));
  }
  return tensors;
}

}  // namespace unimotion
