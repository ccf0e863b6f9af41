#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "isinglearn/errors.hpp"
#include "isinglearn/io.hpp"
#include "test_support.hpp"

using namespace isinglearn;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("isinglearn_test_io_" + name);
}

}  // namespace

TEST_CASE("model round trip is bit exact in both encodings") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 9);
    const IsingModel m{testing::random_coupling(n, rng, 1.0 / 3.0), testing::random_field(n, rng)};
    for (auto enc : {CouplingEncoding::Dense, CouplingEncoding::Triplets}) {
      const auto path = temp_path("roundtrip.json");
      save_model(m, path, enc);
      const IsingModel back = load_model(path);
      CHECK(back.coupling == m.coupling);
      CHECK(back.field == m.field);
    }
  }
}

TEST_CASE("sparse triplets and dense encodings describe the same model") {
  const std::string dense = R"({"n": 3, "h": [0.5, 0, -1],
    "J": {"dense": [[0, 0.25, 0], [0.25, 0, -0.75], [0, -0.75, 0]]}})";
  const std::string sparse = R"({"n": 3, "h": [0.5, 0, -1],
    "J": {"triplets": [[0, 1, 0.25], [1, 2, -0.75]]}})";
  const IsingModel a = model_from_json(dense);
  const IsingModel b = model_from_json(sparse);
  CHECK(a.coupling == b.coupling);
  CHECK(a.field == b.field);
}

TEST_CASE("model parse errors carry context") {
  CHECK_THROWS_WITH_AS(model_from_json(R"({"h": [], "J": {"dense": []}})"), doctest::Contains("\"n\""), ParseError);
  CHECK_THROWS_WITH_AS(model_from_json("{\n\"n\": 2,\n\"J\": {\"dense\": [[0, 1], [1, 0]]\n"),
                       doctest::Contains("line"), ParseError);
  CHECK_THROWS_WITH_AS(model_from_json(R"({"n": 2, "J": {"dense": [[0, 1], [2, 0]]}})"),
                       doctest::Contains("asymmetry"), ParseError);
  CHECK_THROWS_WITH_AS(model_from_json(R"({"n": 2, "J": {"triplets": [[1, 0, 0.5]]}})"),
                       doctest::Contains("J.triplets"), ParseError);
  CHECK_THROWS_WITH_AS(model_from_json(R"({"n": 2, "J": {"dense": [[0, "x"], [1, 0]]}})"),
                       doctest::Contains("J.dense"), ParseError);
  CHECK_THROWS_WITH_AS(model_from_json(R"({"n": 2, "h": [0], "J": {"dense": [[0, 1], [1, 0]]}})"),
                       doctest::Contains("field length mismatch"), ParseError);
}

TEST_CASE("model writer uses 17 significant digits") {
  Matrix j = Matrix::Zero(2, 2);
  j(0, 1) = j(1, 0) = 0.1;
  const std::string text = model_to_json(IsingModel{CouplingMatrix(j), Vector::Zero(2)});
  CHECK(text.find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("sample CSV round trip and errors") {
  std::mt19937_64 rng(9);
  const SampleBatch batch = testing::random_batch(50, 7, rng);
  std::stringstream ss;
  write_samples(batch, ss);
  CHECK(ss.str().substr(0, 2).find_first_of("-1") == 0);
  const SampleBatch back = read_samples(ss);
  CHECK(back.spins() == batch.spins());

  std::istringstream bad("1,-1\n1,0\n");
  CHECK_THROWS_WITH_AS(read_samples(bad), doctest::Contains("line 2, field 2"), ParseError);
  std::istringstream ragged("1,-1\n1\n");
  CHECK_THROWS_WITH_AS(read_samples(ragged), doctest::Contains("line 2"), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_samples(empty), ParseError);
}
