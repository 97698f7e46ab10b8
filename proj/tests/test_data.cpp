#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "dgc/data.hpp"
#include "dgc/errors.hpp"
#include "test_support.hpp"

using namespace dgc;

TEST_CASE("Iris CSV loads with 150 samples, 4 features and 50 per class") {
  const auto iris = load_dataset(test::source_path("data/iris.csv"));
  CHECK(iris.size() == 150);
  CHECK(iris.dim() == 4);
  REQUIRE(iris.labels);
  CHECK(iris.num_classes() == 3);
  std::map<int, int> counts;
  for (int l : *iris.labels) ++counts[l];
  for (const auto& [label, count] : counts) CHECK(count == 50);
  CHECK(iris.label_names.front() == "Iris-setosa");
  CHECK(iris.samples(0, 0) == doctest::Approx(5.1));
}

TEST_CASE("minimal labelled CSV") {
  const auto data = parse_dataset("0,0,a\n1,1,b");
  CHECK(data.size() == 2);
  CHECK(data.dim() == 2);
  CHECK(*data.labels == std::vector<int>{0, 1});
  CHECK(data.samples(1, 0) == 1.0);
}

TEST_CASE("labels map to ids in first-appearance order") {
  const auto data = parse_dataset("x,y,label\n1,2,zeta\n3,4,alpha\n5,6,zeta\n");
  CHECK(data.size() == 3);
  CHECK(*data.labels == std::vector<int>{0, 1, 0});
  CHECK(data.label_names == std::vector<std::string>{"zeta", "alpha"});
}

TEST_CASE("features-only format keeps every column") {
  LoadOptions opts;
  opts.format = CsvFormat::features_only;
  const auto data = parse_dataset("1,2,3\n4,5,6\n", opts);
  CHECK(data.dim() == 3);
  CHECK_FALSE(data.labels);
}

TEST_CASE("weight column is read and excluded from features") {
  LoadOptions opts;
  opts.weight_column = 1;
  const auto data = parse_dataset("1,0.5,2,a\n3,2,4,b\n", opts);
  CHECK(data.dim() == 2);
  REQUIRE(data.weights);
  CHECK((*data.weights)[1] == 2.0);
  CHECK(data.samples(1, 1) == 4.0);
  const auto locals = partition(data, PartitionSpec{});
  CHECK(locals[0].weights == std::vector<double>{0.5, 2.0});

  CHECK_THROWS_AS(parse_dataset("1,0,2,a\n", opts), DataError);
  opts.weight_column = 3;
  CHECK_THROWS_AS(parse_dataset("1,0,2,a\n", opts), SchemaError);
}

TEST_CASE("CSV error paths") {
  CHECK_THROWS_AS(parse_dataset(""), SchemaError);
  CHECK_THROWS_AS(parse_dataset("\n\n"), SchemaError);
  CHECK_THROWS_AS(parse_dataset("a,b,label\n"), SchemaError);
  CHECK_THROWS_AS(parse_dataset("1,2,a\n3,b"), SchemaError);
  CHECK_THROWS_AS(parse_dataset("1,2,a\n3,nan,b\n"), DataError);
  CHECK_THROWS_AS(parse_dataset("1,2,a\n3,inf,b\n"), DataError);
  try {
    parse_dataset("1,2,a\n3,4,b\n5,oops,c\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv"), InputError);
}

TEST_CASE("validate_k_distinct") {
  const auto iris = load_dataset(test::source_path("data/iris.csv"));
  CHECK(validate_k_distinct(iris, 3));

  Matrix same(3, 1, 7.0);
  CHECK_FALSE(validate_k_distinct(same, 2));

  Matrix two(3, 1);
  two(2, 0) = 1.0;
  CHECK(validate_k_distinct(two, 2));
  CHECK_FALSE(validate_k_distinct(two, 3));
}

TEST_CASE("standardize gives zero mean and unit variance") {
  auto iris = load_dataset(test::source_path("data/iris.csv"));
  standardize(iris);
  for (std::size_t c = 0; c < iris.dim(); ++c) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < iris.size(); ++r) mean += iris.samples(r, c);
    mean /= 150.0;
    for (std::size_t r = 0; r < iris.size(); ++r) sq += (iris.samples(r, c) - mean) * (iris.samples(r, c) - mean);
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sq / 150.0 == doctest::Approx(1.0));
  }
}

namespace {

void check_cover(const GlobalDataset& data, const std::vector<LocalDataset>& locals) {
  std::vector<std::size_t> all;
  for (const auto& local : locals) {
    CHECK(local.size() == local.weights.size());
    CHECK(local.size() == local.global_indices.size());
    for (std::size_t r = 0; r < local.size(); ++r) {
      const std::size_t g = local.global_indices[r];
      CHECK(std::equal(local.samples.row(r).begin(), local.samples.row(r).end(), data.samples.row(g).begin()));
      CHECK(local.weights[r] > 0.0);
    }
    all.insert(all.end(), local.global_indices.begin(), local.global_indices.end());
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(data.size());
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(all == expected);
}

}  // namespace

TEST_CASE("homogeneous Iris over 10 users: 15 samples, 5 per class") {
  const auto iris = load_dataset(test::source_path("data/iris.csv"));
  PartitionSpec spec;
  spec.users = 10;
  const auto locals = partition(iris, spec);
  REQUIRE(locals.size() == 10);
  check_cover(iris, locals);
  for (const auto& local : locals) {
    CHECK(local.size() == 15);
    std::map<int, int> per_class;
    for (std::size_t g : local.global_indices) ++per_class[(*iris.labels)[g]];
    CHECK(per_class.size() == 3);
    for (const auto& [c, n] : per_class) CHECK(n == 5);
  }
}

TEST_CASE("single user receives the whole dataset") {
  const auto iris = load_dataset(test::source_path("data/iris.csv"));
  PartitionSpec spec;
  spec.users = 1;
  const auto locals = partition(iris, spec);
  REQUIRE(locals.size() == 1);
  CHECK(locals[0].samples == iris.samples);
  CHECK(locals[0].weights == std::vector<double>(150, 1.0));
}

TEST_CASE("heterogeneous Iris, m = 10, seed 7: disjoint cover with two classes per user") {
  const auto iris = load_dataset(test::source_path("data/iris.csv"));
  PartitionSpec spec;
  spec.mode = PartitionMode::heterogeneous;
  spec.users = 10;
  spec.seed = 7;
  const auto locals = partition(iris, spec);
  check_cover(iris, locals);
  std::set<std::size_t> sizes;
  for (const auto& local : locals) {
    std::map<int, int> per_class;
    for (std::size_t g : local.global_indices) ++per_class[(*iris.labels)[g]];
    CHECK(per_class.size() == 2);
    for (const auto& [c, n] : per_class) CHECK(n >= 2);
    sizes.insert(local.size());
  }
  CHECK(sizes.size() > 1);  // unequal user sizes
}

TEST_CASE("partition configuration errors") {
  auto data = parse_dataset("0,0,a\n1,1,b\n2,2,a\n");
  PartitionSpec spec;
  spec.users = 4;
  CHECK_THROWS_AS(partition(data, spec), ConfigError);

  LoadOptions opts;
  opts.format = CsvFormat::features_only;
  const auto unlabeled = parse_dataset("0,0\n1,1\n2,2\n3,3\n", opts);
  spec.users = 2;
  spec.mode = PartitionMode::heterogeneous;
  CHECK_THROWS_AS(partition(unlabeled, spec), ConfigError);

  spec.classes_per_user = 2;  // equals the class count
  CHECK_THROWS_AS(partition(data, spec), ConfigError);
}

TEST_CASE("custom partition follows the owner list") {
  auto data = parse_dataset("0,a\n1,b\n2,a\n3,b\n");
  PartitionSpec spec;
  spec.mode = PartitionMode::custom;
  spec.users = 2;
  spec.owners = {1, 0, 1, 1};
  const auto locals = partition(data, spec);
  CHECK(locals[0].global_indices == std::vector<std::size_t>{1});
  CHECK(locals[1].global_indices == std::vector<std::size_t>{0, 2, 3});
  spec.owners = {0, 0};
  CHECK_THROWS_AS(partition(data, spec), ConfigError);
}

TEST_CASE("property: partitions are index bijections, deterministic and balanced") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t classes = 2 + rng() % 4;
    const std::size_t n = 30 + rng() % 90;
    auto data = test::blobs(rng, n, 2, classes);
    PartitionSpec spec;
    spec.users = 2 + rng() % 8;
    spec.seed = rng();
    spec.mode = trial % 2 ? PartitionMode::heterogeneous : PartitionMode::homogeneous;
    spec.classes_per_user = 1 + rng() % (classes - 1);
    spec.min_samples_per_user = 1;
    std::vector<LocalDataset> a;
    try {
      a = partition(data, spec);
    } catch (const ConfigError&) {
      continue;  // heterogeneous draws can legitimately leave a class without users
    }
    check_cover(data, a);
    const auto b = partition(data, spec);
    for (std::size_t u = 0; u < a.size(); ++u) {
      CHECK(a[u].global_indices == b[u].global_indices);
      CHECK(a[u].samples == b[u].samples);
    }
    if (spec.mode == PartitionMode::homogeneous) {
      std::vector<std::size_t> class_size(classes, 0);
      for (int l : *data.labels) ++class_size[static_cast<std::size_t>(l)];
      for (const auto& local : a) {
        std::vector<std::size_t> have(classes, 0);
        for (std::size_t g : local.global_indices) ++have[static_cast<std::size_t>((*data.labels)[g])];
        for (std::size_t c = 0; c < classes; ++c) {
          const double expected = static_cast<double>(class_size[c]) / static_cast<double>(spec.users);
          CHECK(std::abs(static_cast<double>(have[c]) - expected) <= 1.0);
        }
      }
    } else {
      for (const auto& local : a) {
        std::set<int> seen;
        for (std::size_t g : local.global_indices) seen.insert((*data.labels)[g]);
        CHECK(seen.size() == spec.classes_per_user);
      }
    }
  }
}
