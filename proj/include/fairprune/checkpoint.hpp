#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "fairprune/mask.hpp"
#include "fairprune/mlp.hpp"

namespace fairprune {

// Model checkpoint file layout:
//   bytes 0..7   magic "FPRUNE01"
//   u64 LE       metadata byte length
//   metadata     UTF-8 "key=value\n" lines:
//                  layer_sizes=<comma-separated ints>
//                  activation=tanh|relu
//                  seed=<u64>
//                  mask=0|1
//   parameters   N little-endian 64-bit floats in parameter order
//   mask         N bytes (1 = pruned), present iff mask=1
struct Checkpoint {
  Mlp model;
  std::uint64_t seed = 0;
  std::optional<PruningMask> mask;
};

void save_checkpoint(const std::filesystem::path& path, const Mlp& model,
                     std::uint64_t seed, const PruningMask* mask = nullptr);

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fairprune
