#include "qtp/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "qtp/error.hpp"
#include "qtp/io_util.hpp"

namespace qtp {

namespace {

constexpr char kMagic[8] = {'Q', 'T', 'P', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T take(std::string_view bytes, std::size_t& pos) {
  if (bytes.size() - pos < sizeof(T)) throw DataError("checkpoint truncated");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  c.model.check_shapes();
  const auto specs = param_specs(c.model.config);
  nlohmann::json header;
  header["config"] = config_to_json(c.model.config);
  header["seed"] = c.seed;
  header["metadata"] = c.metadata;
  header["params"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& s : specs) {
    header["params"].push_back({{"name", s.name}, {"shape", {s.rows, s.cols}}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(s.rows) * s.cols * sizeof(double);
  }
  const std::string h = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, static_cast<std::uint64_t>(h.size()));
  out += h;
  for (const auto& t : c.model.params) {
    for (double x : t.data()) put(out, x);
  }
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint (bad magic)");
  }
  std::size_t pos = sizeof(kMagic);
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  const auto hlen = take<std::uint64_t>(bytes, pos);
  if (hlen > bytes.size() - pos) throw DataError("checkpoint truncated");
  Checkpoint c;
  try {
    const auto header = nlohmann::json::parse(bytes.substr(pos, hlen));
    pos += hlen;
    c.model.config = config_from_json(header.at("config"));
    c.seed = header.at("seed").get<std::uint64_t>();
    c.metadata = header.at("metadata");
    const auto specs = param_specs(c.model.config);
    const auto& manifest = header.at("params");
    if (manifest.size() != specs.size()) throw DataError("checkpoint parameter count does not match its config");
    const std::size_t base = pos;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto& e = manifest[i];
      const auto shape = e.at("shape").get<std::array<int, 2>>();
      if (e.at("name").get<std::string>() != specs[i].name || shape[0] != specs[i].rows ||
          shape[1] != specs[i].cols) {
        throw DataError("checkpoint parameter " + specs[i].name + " does not match its config");
      }
      if (e.at("offset").get<std::uint64_t>() != pos - base) throw DataError("checkpoint offsets are inconsistent");
      ad::Tensor t(shape[0], shape[1]);
      for (double& x : t.data()) x = take<double>(bytes, pos);
      c.model.params.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint header: ") + e.what());
  }
  if (pos != bytes.size()) throw DataError("trailing bytes after checkpoint payload");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  write_text_file(path, serialize_checkpoint(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_text_file(path));
}

}  // namespace qtp
