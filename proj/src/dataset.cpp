#include "fairprune/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fairprune/errors.hpp"
#include "fairprune/rng.hpp"
#include "fairprune/util.hpp"

namespace fairprune {

std::size_t GroupedDataset::group_count(int group) const {
  std::size_t n = 0;
  for (const auto& s : samples) n += (s.group == group);
  return n;
}

std::vector<std::size_t> GroupedDataset::group_indices(int group) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].group == group) idx.push_back(i);
  return idx;
}

Batch GroupedDataset::to_batch() const {
  Batch b;
  b.features.reserve(samples.size());
  b.labels.reserve(samples.size());
  b.groups.reserve(samples.size());
  for (const auto& s : samples) {
    b.features.push_back(s.features);
    b.labels.push_back(s.label);
    b.groups.push_back(s.group);
  }
  return b;
}

Batch GroupedDataset::to_batch(std::span<const std::size_t> indices) const {
  Batch b;
  b.features.reserve(indices.size());
  b.labels.reserve(indices.size());
  b.groups.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto& s = samples.at(i);
    b.features.push_back(s.features);
    b.labels.push_back(s.label);
    b.groups.push_back(s.group);
  }
  return b;
}

GroupedDataset GroupedDataset::filter_group(int group) const {
  GroupedDataset out;
  out.feature_dim = feature_dim;
  out.num_classes = num_classes;
  out.provenance = provenance;
  out.seed = seed;
  for (const auto& s : samples)
    if (s.group == group) out.samples.push_back(s);
  return out;
}

void GroupedDataset::validate() const {
  if (num_classes < 1) throw DataError("dataset needs at least one class");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.features.size() != feature_dim)
      throw DataError("sample " + std::to_string(i) +
                      " has wrong feature count");
    if (s.label < 0 || s.label >= num_classes)
      throw DataError("sample " + std::to_string(i) + " label out of range");
    if (s.group != 0 && s.group != 1)
      throw DataError("sample " + std::to_string(i) + " group out of range");
  }
}

void GroupedDataset::validate_for_pruning() const {
  validate();
  if (group_count(0) == 0 || group_count(1) == 0)
    throw DataError("both groups must be non-empty");
}

void SplitSpec::validate() const {
  if (train <= 0.0 || val <= 0.0 || test <= 0.0)
    throw ConfigError("split fractions must be positive");
  if (std::abs(train + val + test - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
}

void SynthConfig::validate() const {
  if (n_per_group == 0) throw ConfigError("n_per_group must be positive");
  if (feature_dim < 2) throw ConfigError("feature_dim must be at least 2");
  if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
  if (class_signal < 0.0 || spurious_strength_g0 < 0.0 ||
      spurious_strength_g1 < 0.0)
    throw ConfigError("signal strengths must be >= 0");
  if (label_noise_g0 < 0.0 || label_noise_g0 >= 0.5 || label_noise_g1 < 0.0 ||
      label_noise_g1 >= 0.5)
    throw ConfigError("label noise rates must be in [0, 0.5)");
}

namespace {

struct ColumnMap {
  std::size_t label = 0;
  std::size_t group = 0;
  std::vector<std::size_t> features;
};

ColumnMap resolve_schema(const std::vector<std::string>& header,
                         const CsvSchema& schema,
                         const std::filesystem::path& path) {
  auto find = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw DataError(path.string() + ": missing column '" + name + "'");
  };
  ColumnMap map;
  map.label = find(schema.label_column);
  map.group = find(schema.group_column);
  if (schema.feature_columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (i != map.label && i != map.group) map.features.push_back(i);
  } else {
    for (const auto& name : schema.feature_columns)
      map.features.push_back(find(name));
  }
  if (map.features.empty())
    throw DataError(path.string() + ": no feature columns");
  return map;
}

}  // namespace

GroupedDataset load_csv(const std::filesystem::path& path,
                        const CsvSchema& schema) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open dataset: " + path.string());

  std::string line;
  if (!std::getline(f, line)) throw DataError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line, ',');
  const auto map = resolve_schema(header, schema, path);

  GroupedDataset ds;
  ds.provenance = Provenance::kCsv;
  ds.feature_dim = map.features.size();

  std::size_t line_no = 1;  // header was line 1
  int max_label = -1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line, ',');
    if (cells.size() != header.size())
      throw DataError(path.string() + ": line " + std::to_string(line_no) +
                      ": expected " + std::to_string(header.size()) +
                      " cells, got " + std::to_string(cells.size()));
    Sample s;
    s.features.reserve(map.features.size());
    for (std::size_t col : map.features) {
      double v;
      if (!parse_double(cells[col], v))
        throw DataError(path.string() + ": line " + std::to_string(line_no) +
                        ": non-numeric feature '" + cells[col] + "'");
      s.features.push_back(v);
    }
    long long label;
    if (!parse_int(cells[map.label], label) || label < 0)
      throw DataError(path.string() + ": line " + std::to_string(line_no) +
                      ": bad label '" + cells[map.label] + "'");
    long long group;
    if (!parse_int(cells[map.group], group) || (group != 0 && group != 1))
      throw DataError(path.string() + ": line " + std::to_string(line_no) +
                      ": group must be 0 or 1, got '" + cells[map.group] +
                      "'");
    s.label = static_cast<int>(label);
    s.group = static_cast<int>(group);
    max_label = std::max(max_label, s.label);
    ds.samples.push_back(std::move(s));
  }
  ds.num_classes = max_label + 1;
  ds.validate();
  return ds;
}

void save_csv(const GroupedDataset& dataset,
              const std::filesystem::path& path) {
  dataset.validate();
  std::ostringstream out;
  for (std::size_t i = 0; i < dataset.feature_dim; ++i)
    out << 'f' << i << ',';
  out << "label,group\n";
  for (const auto& s : dataset.samples) {
    for (double v : s.features) out << format_double(v) << ',';
    out << s.label << ',' << s.group << '\n';
  }
  write_text_file(path, out.str());
}

GroupedDataset gen_synthetic_biased(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  GroupedDataset ds;
  ds.provenance = Provenance::kSynthetic;
  ds.feature_dim = cfg.feature_dim;
  ds.num_classes = cfg.num_classes;
  ds.seed = cfg.seed;

  const std::size_t d_inf = cfg.feature_dim - 1;  // informative block
  const int k = cfg.num_classes;

  // Class centroids: scaled standard basis vectors when they fit, otherwise
  // spread deterministically over coordinates. Per-class spurious target is
  // evenly spaced in [-1, 1].
  auto centroid_coord = [&](int cls) { return static_cast<std::size_t>(cls) % d_inf; };
  auto spurious_target = [&](int cls) {
    return k == 1 ? 0.0 : -1.0 + 2.0 * cls / static_cast<double>(k - 1);
  };

  for (int group = 0; group <= 1; ++group) {
    const double strength =
        group == 0 ? cfg.spurious_strength_g0 : cfg.spurious_strength_g1;
    const double noise_rate =
        group == 0 ? cfg.label_noise_g0 : cfg.label_noise_g1;
    for (std::size_t i = 0; i < cfg.n_per_group; ++i) {
      Sample s;
      s.group = group;
      const int true_label = static_cast<int>(i % static_cast<std::size_t>(k));
      s.features.resize(cfg.feature_dim);
      for (std::size_t j = 0; j < d_inf; ++j) {
        double mean = centroid_coord(true_label) == j ? cfg.class_signal : 0.0;
        s.features[j] = mean + rng.normal();
      }
      s.features[d_inf] = strength * spurious_target(true_label) + rng.normal();
      s.label = true_label;
      if (noise_rate > 0.0 && rng.uniform() < noise_rate) {
        // uniform among the other classes
        int shift = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k - 1)));
        s.label = (true_label + shift) % k;
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

Splits split(const GroupedDataset& dataset, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(spec.seed);
  shuffle(order, rng);

  const auto n_val = static_cast<std::size_t>(
      std::floor(spec.val * static_cast<double>(n)));
  const auto n_test = static_cast<std::size_t>(
      std::floor(spec.test * static_cast<double>(n)));
  const std::size_t n_train = n - n_val - n_test;

  auto take = [&](std::size_t begin, std::size_t count) {
    GroupedDataset part;
    part.feature_dim = dataset.feature_dim;
    part.num_classes = dataset.num_classes;
    part.provenance = dataset.provenance;
    part.seed = dataset.seed;
    part.samples.reserve(count);
    for (std::size_t i = begin; i < begin + count; ++i)
      part.samples.push_back(dataset.samples[order[i]]);
    return part;
  };

  Splits out;
  out.train = take(0, n_train);
  out.val = take(n_train, n_val);
  out.test = take(n_train + n_val, n_test);
  return out;
}

}  // namespace fairprune
