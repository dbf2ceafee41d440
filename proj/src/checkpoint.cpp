#include "fairprune/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fairprune/errors.hpp"
#include "fairprune/util.hpp"

namespace fairprune {

namespace {

constexpr char kMagic[8] = {'F', 'P', 'R', 'U', 'N', 'E', '0', '1'};

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

void put_f64_le(std::string& out, double d) {
  put_u64_le(out, std::bit_cast<std::uint64_t>(d));
}

double get_f64_le(const unsigned char* p) {
  return std::bit_cast<double>(get_u64_le(p));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Mlp& model,
                     std::uint64_t seed, const PruningMask* mask) {
  if (mask && mask->size() != model.param_count())
    throw ConfigError("checkpoint: mask length mismatch");

  std::ostringstream meta;
  meta << "layer_sizes=";
  const auto& sizes = model.layer_sizes();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) meta << ',';
    meta << sizes[i];
  }
  meta << '\n';
  meta << "activation=" << activation_name(model.activation()) << '\n';
  meta << "seed=" << seed << '\n';
  meta << "mask=" << (mask ? 1 : 0) << '\n';
  const std::string meta_str = meta.str();

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u64_le(out, meta_str.size());
  out += meta_str;
  for (double v : model.params()) put_f64_le(out, v);
  if (mask)
    for (auto b : mask->bits()) out.push_back(static_cast<char>(b));
  write_text_file(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string raw = read_text_file(path);
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < sizeof(kMagic) + 8 ||
      std::memcmp(raw.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataError(path.string() + ": checkpoint magic mismatch");

  const std::uint64_t meta_len = get_u64_le(bytes + sizeof(kMagic));
  const std::size_t meta_start = sizeof(kMagic) + 8;
  if (meta_start + meta_len > raw.size())
    throw DataError(path.string() + ": truncated checkpoint metadata");
  const std::string meta = raw.substr(meta_start, meta_len);

  std::vector<int> layer_sizes;
  std::string activation;
  std::uint64_t seed = 0;
  bool has_mask = false;
  bool saw_sizes = false, saw_act = false;
  std::istringstream lines(meta);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path.string() + ": bad metadata line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "layer_sizes") {
      for (const auto& part : split_line(value, ',')) {
        long long v;
        if (!parse_int(part, v) || v <= 0)
          throw DataError(path.string() + ": bad layer size '" + part + "'");
        layer_sizes.push_back(static_cast<int>(v));
      }
      saw_sizes = true;
    } else if (key == "activation") {
      activation = value;
      saw_act = true;
    } else if (key == "seed") {
      if (!parse_u64(value, seed))
        throw DataError(path.string() + ": bad seed '" + value + "'");
    } else if (key == "mask") {
      has_mask = value == "1";
      if (value != "0" && value != "1")
        throw DataError(path.string() + ": bad mask flag '" + value + "'");
    } else {
      throw DataError(path.string() + ": unknown metadata key '" + key + "'");
    }
  }
  if (!saw_sizes || !saw_act)
    throw DataError(path.string() + ": incomplete checkpoint metadata");

  Checkpoint ckpt{Mlp(layer_sizes, activation_from_name(activation)), seed,
                  std::nullopt};
  const std::size_t n = ckpt.model.param_count();
  const std::size_t params_start = meta_start + meta_len;
  const std::size_t params_bytes = n * 8;
  const std::size_t expected =
      params_start + params_bytes + (has_mask ? n : 0);
  if (raw.size() != expected)
    throw DataError(path.string() + ": checkpoint size mismatch (expected " +
                    std::to_string(expected) + " bytes, got " +
                    std::to_string(raw.size()) + ")");

  std::vector<double> params(n);
  for (std::size_t i = 0; i < n; ++i)
    params[i] = get_f64_le(bytes + params_start + i * 8);
  ckpt.model.unflatten(params);

  if (has_mask) {
    std::vector<std::uint8_t> bits(n);
    std::memcpy(bits.data(), raw.data() + params_start + params_bytes, n);
    ckpt.mask = PruningMask::from_bits(std::move(bits));
  }
  return ckpt;
}

}  // namespace fairprune
