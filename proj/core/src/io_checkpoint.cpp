#include "redecide/io/checkpoint.hpp"

#include <cstring>

#include "redecide/io/binio.hpp"

namespace redecide {

namespace {
constexpr char kMagic[4] = {'R', 'D', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string encode_checkpoint(const PolicyWeights& weights,
                              const std::string& config_echo) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u8(out, static_cast<std::uint8_t>(weights.arch.kind));
  put_u8(out, static_cast<std::uint8_t>(weights.arch.mem_encoder));
  put_u8(out, static_cast<std::uint8_t>(weights.arch.memory_mode));
  put_u8(out, weights.arch.fmp2_emits_first ? 1 : 0);
  put_u64(out, weights.arch.obs_dim);
  put_u64(out, weights.arch.action_count);
  put_u64(out, weights.arch.embed_width);
  put_string(out, config_echo);

  const auto sections = weights.sections();
  put_u64(out, sections.size());
  for (const auto& [name, set] : sections) {
    put_string(out, name);
    put_u64(out, set->size());
    for (const auto& [pname, entry] : *set) {
      put_string(out, pname);
      put_u8(out, entry.trainable ? 1 : 0);
      put_u64(out, entry.value.rank());
      for (std::size_t d : entry.value.shape()) put_u64(out, d);
      for (double v : entry.value.data()) put_f64(out, v);
    }
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  BinReader in(bytes, "checkpoint");
  char magic[4];
  for (char& c : magic) c = static_cast<char>(in.u8());
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("checkpoint: bad magic (not a checkpoint file)");
  }
  const std::uint32_t version = in.u32();
  if (version != kVersion) {
    throw IoError("checkpoint: unsupported format version " +
                  std::to_string(version) + " (expected " +
                  std::to_string(kVersion) + ")");
  }
  Checkpoint ck;
  ck.weights.arch.kind = static_cast<ArchKind>(in.u8());
  ck.weights.arch.mem_encoder = static_cast<MemEncoderKind>(in.u8());
  ck.weights.arch.memory_mode = static_cast<MemoryMode>(in.u8());
  ck.weights.arch.fmp2_emits_first = in.u8() != 0;
  ck.weights.arch.obs_dim = in.u64();
  ck.weights.arch.action_count = in.u64();
  ck.weights.arch.embed_width = in.u64();
  ck.config_echo = in.str();

  const std::uint64_t section_count = in.u64();
  auto sections = ck.weights.sections();
  if (section_count != sections.size()) {
    throw IoError("checkpoint: unexpected section count " +
                  std::to_string(section_count));
  }
  for (auto& [expected_name, set] : sections) {
    const std::string name = in.str();
    if (name != expected_name) {
      throw IoError("checkpoint: unexpected section '" + name + "' (wanted '" +
                    expected_name + "')");
    }
    const std::uint64_t params = in.u64();
    for (std::uint64_t p = 0; p < params; ++p) {
      const std::string pname = in.str();
      const bool trainable = in.u8() != 0;
      const std::uint64_t rank = in.u64();
      if (rank > 8) throw IoError("checkpoint: implausible parameter rank");
      std::vector<std::size_t> shape(rank);
      std::size_t total = 1;
      for (auto& d : shape) {
        d = in.u64();
        total *= d;
      }
      if (total > (1ull << 32)) {
        throw IoError("checkpoint: implausible parameter size");
      }
      std::vector<double> data(total);
      for (auto& v : data) v = in.f64();
      set->add(pname, Array(std::move(shape), std::move(data)), trainable);
    }
  }
  in.expect_exhausted();
  return ck;
}

void save_checkpoint(const std::string& path, const PolicyWeights& weights,
                     const std::string& config_echo) {
  write_file_bytes(path, encode_checkpoint(weights, config_echo));
}

Checkpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file_bytes(path));
}

}  // namespace redecide
