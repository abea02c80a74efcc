#include "senselab/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "senselab/error.hpp"

namespace senselab {

namespace {

constexpr char kMagic[4] = {'S', 'L', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("checkpoint: truncated file " + path);
  return v;
}

}  // namespace

void Checkpoint::add_blob(const std::string& name, std::vector<double> values) {
  blobs.emplace_back(name, std::move(values));
}

bool Checkpoint::has_blob(const std::string& name) const {
  for (const auto& [n, _] : blobs) {
    if (n == name) return true;
  }
  return false;
}

const std::vector<double>& Checkpoint::blob(const std::string& name) const {
  for (const auto& [n, v] : blobs) {
    if (n == name) return v;
  }
  throw DataError("checkpoint: missing blob '" + name + "'");
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("checkpoint: cannot write " + path);
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  const std::string header = meta.dump();
  write_pod(out, static_cast<std::uint64_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  write_pod(out, static_cast<std::uint32_t>(blobs.size()));
  for (const auto& [name, values] : blobs) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod(out, static_cast<std::uint64_t>(values.size()));
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
  if (!out) throw DataError("checkpoint: write failed for " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot read " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("checkpoint: bad magic in " + path);
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kVersion) {
    throw DataError("checkpoint: unsupported version " +
                    std::to_string(version) + " in " + path);
  }
  const auto header_len = read_pod<std::uint64_t>(in, path);
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("checkpoint: truncated header in " + path);
  Checkpoint ck;
  ck.meta = nlohmann::json::parse(header);
  const auto n_blobs = read_pod<std::uint32_t>(in, path);
  for (std::uint32_t i = 0; i < n_blobs; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    const auto count = read_pod<std::uint64_t>(in, path);
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw DataError("checkpoint: truncated blob in " + path);
    ck.blobs.emplace_back(std::move(name), std::move(values));
  }
  return ck;
}

}  // namespace senselab
