#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <unistd.h>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spd/serialization.hpp"
#include "support.hpp"

using namespace spd;
using namespace spd::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("spd_test_" + std::to_string(std::rand()) + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("SPD matrix binary round trip is exact") {
  Rng rng(301);
  for (int trial = 0; trial < 20; ++trial) {
    const SpdMatrix x = random_spd(rng, 2 + static_cast<Index>(rng.below(6)));
    std::stringstream ss;
    io::write_spd(ss, x);
    const SpdMatrix back = io::read_spd(ss);
    CHECK(back.dim() == x.dim());
    CHECK(max_abs_diff(back.mat(), x.mat()) == 0.0);  // f64 bits preserved
  }
}

TEST_CASE("SPD matrix JSON round trip") {
  Rng rng(302);
  const SpdMatrix x = random_spd(rng, 4);
  const io::json j = io::spd_to_json(x);
  CHECK(j.at("dim") == 4);
  CHECK(j.at("entries").size() == 16);
  const SpdMatrix back = io::spd_from_json(j);
  CHECK(max_abs_diff(back.mat(), x.mat()) == 0.0);  // shortest-round-trip doubles

  // symmetry is re-enforced on load
  io::json skewed = j;
  skewed["entries"][1] = skewed["entries"][1].get<double>() + 1e-13;
  const SpdMatrix repaired = io::spd_from_json(skewed);
  CHECK(exactly_symmetric(repaired.mat()));
}

TEST_CASE("dictionary round trips preserve atom order") {
  Rng rng(303);
  std::vector<SpdMatrix> atoms;
  for (int i = 0; i < 5; ++i) {
    // distinct traces so a reordering would be detected
    atoms.push_back(
        SpdMatrix::unchecked((1.0 + i) * Matrix::Identity(3, 3) +
                             0.1 * random_spd(rng, 3).mat()));
  }
  const Dictionary dict(atoms);

  std::stringstream ss;
  io::write_dictionary(ss, dict);
  const Dictionary back = io::read_dictionary(ss);
  REQUIRE(back.n_atoms() == dict.n_atoms());
  for (Index i = 0; i < dict.n_atoms(); ++i) {
    CHECK(max_abs_diff(back.atom(i).mat(), dict.atom(i).mat()) == 0.0);
  }

  const Dictionary back_json = io::dictionary_from_json(io::dictionary_to_json(dict));
  for (Index i = 0; i < dict.n_atoms(); ++i) {
    CHECK(max_abs_diff(back_json.atom(i).mat(), dict.atom(i).mat()) == 0.0);
  }
}

TEST_CASE("dataset container round trip with labels") {
  Rng rng(304);
  io::DatasetPayload ds;
  for (int i = 0; i < 7; ++i) {
    ds.items.push_back(random_spd(rng, 3));
    ds.labels.push_back(i % 3);
  }
  std::stringstream ss;
  io::write_dataset(ss, ds);
  const io::DatasetPayload back = io::read_dataset(ss);
  REQUIRE(back.items.size() == ds.items.size());
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    CHECK(max_abs_diff(back.items[i].mat(), ds.items[i].mat()) == 0.0);
    CHECK(back.labels[i] == ds.labels[i]);
  }

  const io::DatasetPayload via_json = io::dataset_from_json(io::dataset_to_json(ds));
  CHECK(via_json.items.size() == ds.items.size());
  CHECK(via_json.labels == ds.labels);
}

TEST_CASE("bad magic raises IoError") {
  std::stringstream ss;
  ss << "NOPE" << std::string(64, '\0');
  CHECK_THROWS_AS(io::read_spd(ss), IoError);
  std::stringstream truncated;
  truncated << "SPD1";
  CHECK_THROWS_AS(io::read_spd(truncated), IoError);
}

TEST_CASE("codes JSONL round trip") {
  TempDir tmp;
  Rng rng(305);
  std::vector<io::CodeRecord> codes;
  for (int i = 0; i < 4; ++i) {
    io::CodeRecord c;
    c.index = i;
    c.label = i % 2;
    c.coeffs = Vector::Zero(6);
    c.coeffs[static_cast<Index>(i)] = rng.uniform(0.1, 2.0);
    c.objective = rng.uniform(0.0, 1.0);
    c.iterations = 10 + i;
    c.wall_ms = 0.5 * i;
    codes.push_back(std::move(c));
  }
  const std::string path = tmp.file("codes.jsonl");
  io::write_codes_file(path, codes);
  const auto back = io::read_codes_file(path);
  REQUIRE(back.size() == codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    CHECK(back[i].index == codes[i].index);
    CHECK(back[i].label == codes[i].label);
    CHECK((back[i].coeffs - codes[i].coeffs).norm() == 0.0);
    CHECK(back[i].objective == codes[i].objective);
    CHECK(back[i].iterations == codes[i].iterations);
  }
}

TEST_CASE("csv writer emits header plus rows") {
  TempDir tmp;
  const std::string path = tmp.file("t.csv");
  io::write_csv_file(path, {"a", "b"}, {{"1", "2"}, {"3", "4"}});
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  CHECK(line == "a,b");
  std::getline(is, line);
  CHECK(line == "1,2");
  std::getline(is, line);
  CHECK(line == "3,4");
}

TEST_CASE("missing files raise IoError") {
  CHECK_THROWS_AS(io::read_spd_file("/nonexistent/path/x.spd1"), IoError);
  CHECK_THROWS_AS(io::load_json_file("/nonexistent/path/x.json"), IoError);
}
