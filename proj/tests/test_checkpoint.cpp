#include <doctest.h>

#include <filesystem>

#include "fairprune/checkpoint.hpp"
#include "fairprune/errors.hpp"
#include "fairprune/rng.hpp"
#include "fairprune/util.hpp"

using namespace fairprune;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("checkpoint round-trips model, seed and mask") {
  Mlp m = Mlp::random_init({5, 9, 3}, Activation::kRelu, 909);
  PruningMask mask(m.param_count());
  mask.prune(std::vector<std::size_t>{0, 3, 17, 40}, 1);

  const auto path = temp_file("fp_ckpt_roundtrip.ckpt");
  save_checkpoint(path, m, 12345, &mask);
  const Checkpoint back = load_checkpoint(path);
  CHECK(back.model.layer_sizes() == m.layer_sizes());
  CHECK(back.model.activation() == Activation::kRelu);
  CHECK(back.model.flatten() == m.flatten());
  CHECK(back.seed == 12345);
  REQUIRE(back.mask.has_value());
  CHECK(back.mask->bits() == mask.bits());
}

TEST_CASE("checkpoint without mask omits the mask block") {
  Mlp m = Mlp::random_init({3, 2}, Activation::kTanh, 4);
  const auto path = temp_file("fp_ckpt_nomask.ckpt");
  save_checkpoint(path, m, 7);
  const Checkpoint back = load_checkpoint(path);
  CHECK_FALSE(back.mask.has_value());
  CHECK(back.model.flatten() == m.flatten());
}

TEST_CASE("saving twice produces identical bytes") {
  Mlp m = Mlp::random_init({4, 6, 2}, Activation::kTanh, 11);
  const auto a = temp_file("fp_ckpt_a.ckpt");
  const auto b = temp_file("fp_ckpt_b.ckpt");
  save_checkpoint(a, m, 1);
  save_checkpoint(b, m, 1);
  CHECK(read_text_file(a) == read_text_file(b));
}

TEST_CASE("magic mismatch is a data error") {
  const auto path = temp_file("fp_ckpt_bad.ckpt");
  write_text_file(path, "NOTMAGIC________________");
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("magic"),
                       DataError);
}

TEST_CASE("truncated checkpoint is a data error") {
  Mlp m = Mlp::random_init({3, 2}, Activation::kTanh, 4);
  const auto path = temp_file("fp_ckpt_trunc.ckpt");
  save_checkpoint(path, m, 7);
  const std::string raw = read_text_file(path);
  write_text_file(path, raw.substr(0, raw.size() - 5));
  CHECK_THROWS_AS(load_checkpoint(path), DataError);
}

TEST_CASE("unknown metadata key is rejected") {
  // Hand-build a file with a bogus key.
  std::string meta = "layer_sizes=2,2\nactivation=tanh\nbogus=1\n";
  std::string out = "FPRUNE01";
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((meta.size() >> (8 * i)) & 0xff));
  out += meta;
  out.append((2 + 1) * 2 * 8, '\0');
  const auto path = temp_file("fp_ckpt_badkey.ckpt");
  write_text_file(path, out);
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("bogus"),
                       DataError);
}
