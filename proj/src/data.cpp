#include "dgc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include "dgc/errors.hpp"
#include "dgc/rng.hpp"

namespace dgc {

double LocalDataset::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(std::string_view field) {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

}  // namespace

GlobalDataset parse_dataset(const std::string& text, const LoadOptions& options) {
  const bool has_label = options.format == CsvFormat::features_label;

  std::vector<std::pair<std::size_t, std::string_view>> rows;  // (line number, content)
  {
    std::string_view rest(text);
    std::size_t line_no = 0;
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
      ++line_no;
      if (!trim(line).empty()) rows.emplace_back(line_no, line);
    }
  }
  if (rows.empty()) throw SchemaError("dataset is empty");

  const std::size_t arity = split_fields(rows.front().second).size();
  const std::size_t label_col = has_label ? arity - 1 : arity;
  if (has_label && arity < 2) throw SchemaError("labelled CSV needs at least one feature column and a label");
  if (options.weight_column) {
    if (*options.weight_column >= arity) throw SchemaError("weight column out of range");
    if (has_label && *options.weight_column == label_col)
      throw SchemaError("weight column cannot be the label column");
  }
  auto is_feature = [&](std::size_t c) {
    return c != label_col && (!options.weight_column || c != *options.weight_column);
  };
  std::size_t d = 0;
  for (std::size_t c = 0; c < arity; ++c)
    if (is_feature(c)) ++d;
  if (d == 0) throw SchemaError("no feature columns");

  // A first row whose feature fields are all non-numeric is a header.
  std::size_t first = 0;
  {
    const auto fields = split_fields(rows.front().second);
    bool any_numeric = false;
    for (std::size_t c = 0; c < fields.size(); ++c)
      if (is_feature(c) && parse_number(fields[c])) any_numeric = true;
    if (!any_numeric) first = 1;
  }
  if (first == rows.size()) throw SchemaError("dataset has a header but no rows");

  GlobalDataset data;
  data.samples = Matrix(0, d);
  std::vector<int> labels;
  std::vector<double> weights;
  std::map<std::string, int, std::less<>> label_ids;
  std::vector<double> row(d);

  for (std::size_t i = first; i < rows.size(); ++i) {
    const auto [line_no, line] = rows[i];
    const auto fields = split_fields(line);
    if (fields.size() != arity)
      throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(arity) +
                        " fields, found " + std::to_string(fields.size()));
    std::size_t f = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (has_label && c == label_col) {
        if (fields[c].empty()) throw ParseError(line_no, "empty label");
        auto it = label_ids.find(fields[c]);
        if (it == label_ids.end()) {
          it = label_ids.emplace(std::string(fields[c]), static_cast<int>(data.label_names.size())).first;
          data.label_names.emplace_back(fields[c]);
        }
        labels.push_back(it->second);
        continue;
      }
      const auto value = parse_number(fields[c]);
      if (!value)
        throw ParseError(line_no, "column " + std::to_string(c + 1) + " is not numeric: '" +
                                      std::string(fields[c]) + "'");
      if (!std::isfinite(*value))
        throw DataError("line " + std::to_string(line_no) + ": non-finite value in column " +
                        std::to_string(c + 1));
      if (options.weight_column && c == *options.weight_column) {
        if (*value <= 0.0)
          throw DataError("line " + std::to_string(line_no) + ": weight must be positive");
        weights.push_back(*value);
      } else {
        row[f++] = *value;
      }
    }
    data.samples.append_row(row);
  }
  if (has_label) data.labels = std::move(labels);
  if (options.weight_column) data.weights = std::move(weights);
  return data;
}

GlobalDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dataset '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), options);
}

void standardize(GlobalDataset& data) {
  const std::size_t n = data.size();
  if (n == 0) return;
  for (std::size_t c = 0; c < data.dim(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += data.samples(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dev = data.samples(r, c) - mean;
      var += dev * dev;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
      double& v = data.samples(r, c);
      v = sd > 0.0 ? (v - mean) / sd : v - mean;
    }
  }
}

std::size_t count_distinct(const Matrix& samples) {
  std::set<std::vector<double>> seen;
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    const auto row = samples.row(r);
    seen.emplace(row.begin(), row.end());
  }
  return seen.size();
}

bool validate_k_distinct(const Matrix& samples, std::size_t K) {
  return count_distinct(samples) >= K;
}

std::string to_string(PartitionMode mode) {
  switch (mode) {
    case PartitionMode::homogeneous: return "homogeneous";
    case PartitionMode::heterogeneous: return "heterogeneous";
    case PartitionMode::custom: return "custom";
  }
  return "?";
}

PartitionMode parse_partition_mode(const std::string& text) {
  if (text == "homogeneous") return PartitionMode::homogeneous;
  if (text == "heterogeneous") return PartitionMode::heterogeneous;
  if (text == "custom") return PartitionMode::custom;
  throw ConfigError("unknown partition mode '" + text + "'");
}

namespace {

std::vector<LocalDataset> build_locals(const GlobalDataset& data, const std::vector<std::size_t>& owner,
                                       std::size_t users) {
  std::vector<LocalDataset> locals(users);
  for (std::size_t u = 0; u < users; ++u) {
    locals[u].owner = u;
    locals[u].samples = Matrix(0, data.dim());
  }
  for (std::size_t g = 0; g < data.size(); ++g) {
    LocalDataset& local = locals[owner[g]];
    local.samples.append_row(data.samples.row(g));
    local.weights.push_back(data.weights ? (*data.weights)[g] : 1.0);
    local.global_indices.push_back(g);
  }
  return locals;
}

// Per-class sample lists in global order, then shuffled with the partition RNG.
std::vector<std::vector<std::size_t>> class_members(const GlobalDataset& data, Rng& rng) {
  const std::size_t classes = data.labels ? std::max<std::size_t>(data.num_classes(), 1) : 1;
  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t g = 0; g < data.size(); ++g)
    members[data.labels ? static_cast<std::size_t>((*data.labels)[g]) : 0].push_back(g);
  for (auto& list : members) std::shuffle(list.begin(), list.end(), rng);
  return members;
}

}  // namespace

std::vector<LocalDataset> partition(const GlobalDataset& data, const PartitionSpec& spec) {
  const std::size_t m = spec.users;
  const std::size_t n = data.size();
  if (m < 1) throw ConfigError("partition needs at least one user");
  if (m > n) throw ConfigError("more users (" + std::to_string(m) + ") than samples (" + std::to_string(n) + ")");

  std::vector<std::size_t> owner(n, 0);
  if (m == 1) return build_locals(data, owner, 1);

  Rng rng(derive_seed(spec.seed, seed_tags::partition));

  switch (spec.mode) {
    case PartitionMode::custom: {
      if (spec.owners.size() != n) throw ConfigError("custom partition needs one owner per sample");
      for (std::size_t g = 0; g < n; ++g) {
        if (spec.owners[g] >= m) throw ConfigError("custom owner id out of range");
        owner[g] = spec.owners[g];
      }
      break;
    }
    case PartitionMode::homogeneous: {
      // Deal each class round-robin, continuing the counter across classes so
      // per-user totals also stay within one sample of each other.
      std::size_t next = 0;
      for (const auto& list : class_members(data, rng))
        for (std::size_t g : list) owner[g] = next++ % m;
      break;
    }
    case PartitionMode::heterogeneous: {
      if (!data.labels) throw ConfigError("heterogeneous partition requires labels");
      const std::size_t classes = data.num_classes();
      const std::size_t per_user = spec.classes_per_user;
      if (per_user < 1 || per_user >= classes)
        throw ConfigError("classes-per-user must be in [1, number of classes)");
      // User u holds classes u, u+1, ..., u+per_user-1 (mod classes).
      std::vector<std::vector<std::size_t>> eligible(classes);
      for (std::size_t u = 0; u < m; ++u)
        for (std::size_t s = 0; s < per_user; ++s) eligible[(u + s) % classes].push_back(u);

      const auto members = class_members(data, rng);
      std::exponential_distribution<double> share(1.0);
      for (std::size_t c = 0; c < classes; ++c) {
        const auto& users = eligible[c];
        const auto& list = members[c];
        if (list.empty()) continue;
        if (users.empty())
          throw ConfigError("class " + std::to_string(c) + " has no eligible user; increase users");
        const std::size_t floor_total = spec.min_samples_per_user * users.size();
        if (list.size() < floor_total)
          throw ConfigError("class " + std::to_string(c) + " has " + std::to_string(list.size()) +
                            " samples, fewer than min-samples-per-user times its " +
                            std::to_string(users.size()) + " users");
        // Dirichlet(1,...,1) shares of the surplus, rounded by largest remainder.
        std::vector<double> weights(users.size());
        for (double& w : weights) w = share(rng);
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        const std::size_t surplus = list.size() - floor_total;
        std::vector<std::size_t> counts(users.size(), spec.min_samples_per_user);
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t k = 0; k < users.size(); ++k) {
          const double exact = static_cast<double>(surplus) * weights[k] / total;
          const auto whole = static_cast<std::size_t>(std::floor(exact));
          counts[k] += whole;
          assigned += whole;
          remainders.emplace_back(exact - static_cast<double>(whole), k);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t k = 0; assigned < surplus; ++k, ++assigned) ++counts[remainders[k % users.size()].second];

        std::size_t pos = 0;
        for (std::size_t k = 0; k < users.size(); ++k)
          for (std::size_t j = 0; j < counts[k]; ++j) owner[list[pos++]] = users[k];
      }
      break;
    }
  }
  return build_locals(data, owner, m);
}

LocalDataset pooled(const GlobalDataset& data) {
  return build_locals(data, std::vector<std::size_t>(data.size(), 0), 1).front();
}

}  // namespace dgc
