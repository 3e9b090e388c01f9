#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "twalign/io.hpp"
#include "twalign/synth.hpp"

using namespace twalign;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("twalign_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("matrix csv round-trips bit-identically") {
  TempDir tmp;
  RngStream g(401);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix m = oracles::random_matrix(4, 7, g, -3.0, 3.0);
    // sprinkle awkward values
    m(0, 0) = 1.0 / 3.0;
    m(1, 2) = 1e-17;
    m(2, 3) = -0.0;
    const auto p = tmp.path / "m.csv";
    write_matrix_csv(p, m);
    Matrix back = read_matrix_csv(p);
    CHECK(back == m);
    // a second write of the parsed matrix produces identical bytes
    const auto p2 = tmp.path / "m2.csv";
    write_matrix_csv(p2, back);
    std::ifstream a(p), b(p2);
    std::string sa((std::istreambuf_iterator<char>(a)), {});
    std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
  }
}

TEST_CASE("sequence csv round-trips and honors comments") {
  TempDir tmp;
  const auto p = tmp.path / "seq.csv";
  {
    std::ofstream out(p);
    out << "# a comment line\n1.5,2.5\n-0.25,3\n";
  }
  auto seq = read_sequence_csv(p);
  CHECK(seq.length() == 2);
  CHECK(seq.dim() == 2);
  CHECK(seq.item(1)[0] == -0.25);
  write_sequence_csv(tmp.path / "seq2.csv", seq);
  auto back = read_sequence_csv(tmp.path / "seq2.csv");
  CHECK(back.flat() == seq.flat());
}

TEST_CASE("malformed csv errors name the line") {
  TempDir tmp;
  const auto p = tmp.path / "bad.csv";
  {
    std::ofstream out(p);
    out << "1.0,2.0\n1.0,oops\n";
  }
  try {
    read_sequence_csv(p);
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  CHECK_THROWS_AS(read_matrix_csv(tmp.path / "missing.csv"), ArgumentError);
  {
    std::ofstream out(tmp.path / "ragged.csv");
    out << "1,2\n3\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(tmp.path / "ragged.csv"), ArgumentError);
}

TEST_CASE("pgm export layout") {
  TempDir tmp;
  Matrix m(2, 3, 0.0);
  m(0, 0) = 1.0;  // top-left brightest
  const auto p = tmp.path / "m.pgm";
  write_pgm(p, m);
  std::ifstream in(p, std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "P5");
  std::string dims;
  std::getline(in, dims);
  CHECK(dims == "3 2");
  std::string maxval;
  std::getline(in, maxval);
  CHECK(maxval == "255");
  char px[6];
  in.read(px, 6);
  CHECK(static_cast<unsigned char>(px[0]) == 255);  // row 1 at top
  CHECK(static_cast<unsigned char>(px[1]) == 0);
}

TEST_CASE("corpus save/load round trip") {
  TempDir tmp;
  ScenarioSpec spec;
  spec.kind = ScenarioKind::partial_irrelevant;
  spec.n = 3;
  spec.m = 4;
  spec.irrelevance_rate = 0.5;
  auto corpus = make_corpus({spec}, {2, 2}, 77);
  save_corpus(tmp.path / "corpus", corpus);
  auto back = load_corpus(tmp.path / "corpus");
  REQUIRE(back.train.size() == 2);
  REQUIRE(back.test.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(back.train[k].clips.flat() == corpus.train[k].clips.flat());
    CHECK(back.train[k].captions.flat() == corpus.train[k].captions.flat());
    CHECK(back.train[k].gt.correspondences ==
          corpus.train[k].gt.correspondences);
    CHECK(back.train[k].gt.irrelevant_captions ==
          corpus.train[k].gt.irrelevant_captions);
    CHECK(back.train_specs[k].seed == corpus.train_specs[k].seed);
  }
  CHECK_THROWS_AS(load_corpus(tmp.path / "nowhere"), ArgumentError);
}

TEST_CASE("loss output serializes with null for unevaluated cells") {
  RngStream g(411);
  Batch batch;
  for (int i = 0; i < 2; ++i) {
    batch.clips.push_back(oracles::random_sequence(3, 3, g));
    batch.captions.push_back(
        oracles::random_sequence(3, 3, g, Modality::caption));
  }
  batch.negatives.policy = NegativePolicy::none;
  S2dtwParams params;
  auto out = batch_loss(batch, params);
  const std::string j = loss_output_json(out);
  CHECK(j.find("\"loss\"") != std::string::npos);
  CHECK(j.find("\"cost_matrix\"") != std::string::npos);
  CHECK(j.find("null") != std::string::npos);  // off-diagonal not evaluated
}

TEST_CASE("atomic write leaves no temp file") {
  TempDir tmp;
  const auto p = tmp.path / "out.txt";
  atomic_write_text(p, "hello\n");
  CHECK(fs::exists(p));
  CHECK_FALSE(fs::exists(tmp.path / "out.txt.tmp"));
}
