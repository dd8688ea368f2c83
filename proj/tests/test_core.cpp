#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "helpers.hpp"

using namespace repgrowth;
using testutil::ab_alphabet;
using testutil::iso2;

namespace {

std::string data_path(const std::string& name) {
  return std::string(REPGROWTH_DATA_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("alphabet construction and involution") {
  GeneratorAlphabet alphabet = ab_alphabet();
  REQUIRE(alphabet.size() == 4);
  CHECK(alphabet.name(0) == "a");
  CHECK(alphabet.name(1) == "A");
  for (int l = 0; l < 4; ++l) {
    CHECK(alphabet.inverse(alphabet.inverse(l)) == l);
    CHECK(alphabet.inverse(l) != l);
  }
  CHECK(alphabet.find("B") == 3);
  CHECK_FALSE(alphabet.find("c").has_value());

  CHECK_THROWS_AS(GeneratorAlphabet::from_generators({}), ValidationError);
  CHECK_THROWS_AS(GeneratorAlphabet::from_generators({"a", "a"}), ValidationError);
  CHECK_THROWS_AS(GeneratorAlphabet::from_generators({"A"}), ValidationError);
  CHECK_THROWS_AS(GeneratorAlphabet::from_generators({"a1"}), ValidationError);
}

TEST_CASE("iso2 file parses to 4 letters and 12 blocks") {
  MatrixSystem sys = load_system(data_path("iso2.json"));
  REQUIRE(sys.letters() == 4);
  int blocks = 0;
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a)
      if (sys.allowed(b, a)) ++blocks;
  CHECK(blocks == 12);
  CHECK(sys.dim(0) == 1);
  CHECK(std::abs(sys.block(2, 0)(0, 0) - Complex(1.0 / std::sqrt(3.0), 0.0)) < 1e-15);
  CHECK(sys.same_data(iso2()));
}

TEST_CASE("parser names the offending key") {
  std::string text = serialize_system(iso2());

  SECTION("missing block") {
    nlohmann::json doc = nlohmann::json::parse(text);
    doc["H"].erase("b|a");
    try {
      parse_system(doc.dump());
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("b|a") != std::string::npos);
      CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }
  }

  SECTION("forbidden block") {
    nlohmann::json doc = nlohmann::json::parse(text);
    doc["H"]["A|a"] = doc["H"]["b|a"];
    try {
      parse_system(doc.dump());
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("block forbidden") != std::string::npos);
      CHECK(std::string(e.what()).find("A|a") != std::string::npos);
    }
  }

  SECTION("shape mismatch") {
    nlohmann::json doc = nlohmann::json::parse(text);
    doc["H"]["b|a"] = nlohmann::json::parse("[[[0.1, 0.0], [0.2, 0.0]]]");
    try {
      parse_system(doc.dump());
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("shape mismatch") != std::string::npos);
      CHECK(std::string(e.what()).find("b|a") != std::string::npos);
    }
  }

  SECTION("malformed syntax") {
    CHECK_THROWS_AS(parse_system("{ not json"), ValidationError);
  }

  SECTION("missing dim") {
    nlohmann::json doc = nlohmann::json::parse(text);
    doc["dims"].erase("B");
    CHECK_THROWS_AS(parse_system(doc.dump()), ValidationError);
  }
}

TEST_CASE("serialize then parse is the identity, bit for bit") {
  MatrixSystem sys = random_system(ab_alphabet(), {2, 1, 1, 2}, 42);
  std::string text = serialize_system(sys);
  MatrixSystem back = parse_system(text);
  CHECK(back.same_data(sys));
  CHECK(serialize_system(back) == text);

  // the shipped file is canonical
  std::string file_text = read_file(data_path("iso2.json"));
  CHECK(serialize_system(parse_system(file_text)) == file_text);
}

TEST_CASE("equivalence maps") {
  MatrixSystem sys = iso2();

  SECTION("self-equivalence is the identity up to scalar") {
    auto maps = equivalence_maps(sys, sys);
    REQUIRE(maps.has_value());
    Complex ratio = (*maps)[0](0, 0);
    REQUIRE(std::abs(ratio) > 0.0);
    for (const auto& j : *maps) CHECK(max_abs(j - ratio * Matrix::Identity(1, 1)) < 1e-9);
  }

  SECTION("iso2 is equivalent to its twin, with constant scalar maps") {
    NormalizedSystem norm = normalize(sys);
    TwinSystem tw = twin(norm);
    auto maps = equivalence_maps(norm.system, tw.system);
    REQUIRE(maps.has_value());
    Complex ratio = (*maps)[0](0, 0);
    for (const auto& j : *maps) CHECK(std::abs(j(0, 0) - ratio) < 1e-9);
  }

  SECTION("dimension-mismatched generic systems admit no intertwiner") {
    MatrixSystem small = random_system(ab_alphabet(), {1, 1, 1, 1}, 11);
    MatrixSystem big = random_system(ab_alphabet(), {2, 2, 2, 2}, 12);
    CHECK_FALSE(equivalence_maps(small, big).has_value());
  }

  SECTION("alphabet mismatch is an error") {
    GeneratorAlphabet other = GeneratorAlphabet::from_generators({"x", "y"});
    MatrixSystem sys2 = random_system(other, {1, 1, 1, 1}, 1);
    CHECK_THROWS_AS(equivalence_maps(sys, sys2), std::invalid_argument);
  }

  SECTION("intertwiner equations hold for a returned tuple") {
    NormalizedSystem norm = normalize(sys);
    TwinSystem tw = twin(norm);
    auto maps = equivalence_maps(norm.system, tw.system);
    REQUIRE(maps.has_value());
    for (int b = 0; b < 4; ++b)
      for (int a = 0; a < 4; ++a) {
        if (!sys.allowed(b, a)) continue;
        Matrix lhs = tw.system.block(b, a) * (*maps)[static_cast<std::size_t>(a)];
        Matrix rhs = (*maps)[static_cast<std::size_t>(b)] * norm.system.block(b, a);
        CHECK(max_abs(lhs - rhs) < 1e-9);
      }
  }
}

TEST_CASE("irreducibility closure test") {
  SECTION("iso2 is irreducible-probabilistic") {
    auto verdict = is_irreducible(iso2(), 8, 0);
    CHECK(verdict.irreducible());
  }

  SECTION("direct sum of two copies is reducible with a valid witness") {
    MatrixSystem one = iso2();
    MatrixSystem sum = MatrixSystem::zero(ab_alphabet(), {2, 2, 2, 2});
    for (int b = 0; b < 4; ++b)
      for (int a = 0; a < 4; ++a) {
        if (!sum.allowed(b, a)) continue;
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = one.block(b, a)(0, 0);
        m(1, 1) = one.block(b, a)(0, 0);
        sum.set_block(b, a, m);
      }
    auto verdict = is_irreducible(sum, 8, 1);
    REQUIRE_FALSE(verdict.irreducible());
    REQUIRE(verdict.witness.has_value());
    CHECK(verdict.witness->proper(sum.dims()));
    CHECK(verdict.witness->invariance_residual(sum) <= 1e-9);
  }

  SECTION("dead letter forces reducibility via the dual closure") {
    MatrixSystem sys = random_system(ab_alphabet(), {1, 1, 1, 1}, 3);
    for (int b = 0; b < 4; ++b)
      if (sys.allowed(0, b)) sys.set_block(0, b, Matrix::Zero(1, 1));
    auto verdict = is_irreducible(sys, 8, 2);
    REQUIRE_FALSE(verdict.irreducible());
    CHECK(verdict.witness->invariance_residual(sys) <= 1e-9);
    CHECK(verdict.witness->bases[0].cols() == 0);
  }

  SECTION("random systems come out irreducible") {
    for (std::uint64_t seed : {1, 2, 3}) {
      auto verdict = is_irreducible(random_system(ab_alphabet(), {2, 1, 2, 1}, seed), 8, seed);
      CHECK(verdict.irreducible());
    }
  }
}

TEST_CASE("random systems are reproducible and well shaped") {
  GeneratorAlphabet alphabet = ab_alphabet();
  MatrixSystem first = random_system(alphabet, {2, 2, 1, 1}, 7);
  MatrixSystem second = random_system(alphabet, {2, 2, 1, 1}, 7);
  CHECK(first.same_data(second));
  CHECK(serialize_system(first) == serialize_system(second));
  CHECK_FALSE(first.same_data(random_system(alphabet, {2, 2, 1, 1}, 8)));
  CHECK(first.block(0, 2).rows() == 2);
  CHECK(first.block(0, 2).cols() == 1);
  CHECK(first.block(2, 0).rows() == 1);
  CHECK(first.block(2, 0).cols() == 2);
}

TEST_CASE("forbidden block access throws") {
  MatrixSystem sys = iso2();
  CHECK_THROWS_AS(sys.block(1, 0), std::invalid_argument);  // A|a
  CHECK(max_abs(sys.block_or_zero(1, 0)) == 0.0);
}

TEST_CASE("sphere enumeration counts") {
  GeneratorAlphabet alphabet = ab_alphabet();
  CHECK(sphere_words(alphabet, 3).size() == 36);  // 4 * 3^2
  CHECK(sphere_words(alphabet, 0).size() == 1);
  CHECK(sphere_words(alphabet, 0)[0].empty());
  CHECK(sphere_words(alphabet, 1, 0, 2).empty());  // first a, last b: impossible at length 1
  CHECK(sphere_words(alphabet, 1, 0, 0).size() == 1);
  CHECK(sphere_words(alphabet, 5, 2).size() == 81);  // 3^4 with first letter pinned
  for (const auto& w : sphere_words(alphabet, 4))
    for (int i = 0; i + 1 < w.length(); ++i)
      REQUIRE(w.letters[static_cast<std::size_t>(i + 1)] !=
              alphabet.inverse(w.letters[static_cast<std::size_t>(i)]));
}

TEST_CASE("multi-letter generator names") {
  GeneratorAlphabet alphabet = GeneratorAlphabet::from_generators({"u", "vw"});
  REQUIRE(alphabet.size() == 4);
  CHECK(alphabet.name(3) == "VW");
  CHECK(alphabet.inverse(2) == 3);
  MatrixSystem sys = random_system(alphabet, {1, 2, 2, 1}, 5);
  MatrixSystem back = parse_system(serialize_system(sys));
  CHECK(back.same_data(sys));
}

TEST_CASE("non-finite entries are rejected by name") {
  // textual overflow is caught at the JSON layer
  std::string text = serialize_system(testutil::iso2());
  auto pos = text.find("0.57735026918962584");
  REQUIRE(pos != std::string::npos);
  CHECK_THROWS_AS(parse_system(text.substr(0, pos) + "1e999" + text.substr(pos + 19)),
                  ValidationError);

  // a non-finite value smuggled into the block table is named
  GeneratorAlphabet alphabet = testutil::ab_alphabet();
  std::vector<Matrix> blocks(16, Matrix::Zero(1, 1));
  blocks[2 * 4 + 0](0, 0) = std::numeric_limits<double>::infinity();
  try {
    MatrixSystem sys(alphabet, {1, 1, 1, 1}, std::move(blocks));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
    CHECK(std::string(e.what()).find("b|a") != std::string::npos);
  }
}

TEST_CASE("degenerate systems are refused by normalization") {
  MatrixSystem zero = MatrixSystem::zero(testutil::ab_alphabet(), {1, 1, 1, 1});
  CHECK_THROWS_AS(normalize(zero), NumericalError);
}
