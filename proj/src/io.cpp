#include "twalign/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace twalign {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::vector<double>> parse_csv_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
          ++used;
        if (used != field.size()) throw std::invalid_argument(field);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ArgumentError(path.string() + ":" + std::to_string(lineno) +
                            ": malformed field '" + field + "'");
      }
    }
    if (row.empty())
      throw ArgumentError(path.string() + ":" + std::to_string(lineno) +
                          ": empty row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ArgumentError(path.string() + ": no data rows");
  for (const auto& r : rows)
    if (r.size() != rows.front().size())
      throw ArgumentError(path.string() + ": ragged rows");
  return rows;
}

}  // namespace

FeatureSequence read_sequence_csv(const fs::path& path, Modality tag) {
  return FeatureSequence(parse_csv_rows(path), tag);
}

void write_sequence_csv(const fs::path& path, const FeatureSequence& seq) {
  std::string out = "# " + std::to_string(seq.length()) + " x " +
                    std::to_string(seq.dim()) + "\n";
  for (std::size_t t = 0; t < seq.length(); ++t) {
    const auto it = seq.item(t);
    for (std::size_t k = 0; k < seq.dim(); ++k) {
      out += format_double(it[k]);
      out += k + 1 < seq.dim() ? ',' : '\n';
    }
  }
  atomic_write_text(path, out);
}

Matrix read_matrix_csv(const fs::path& path) {
  const auto rows = parse_csv_rows(path);
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out += format_double(m(i, j));
      out += j + 1 < m.cols() ? ',' : '\n';
    }
  atomic_write_text(path, out);
}

void write_pgm(const fs::path& path, const Matrix& m) {
  double lo = m.data().front(), hi = lo;
  for (double v : m.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::string out = "P5\n" + std::to_string(m.cols()) + " " +
                    std::to_string(m.rows()) + "\n255\n";
  out.reserve(out.size() + m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const int px = static_cast<int>(255.0 * (m(i, j) - lo) / span + 0.5);
      out.push_back(static_cast<char>(px < 0 ? 0 : px > 255 ? 255 : px));
    }
  atomic_write_text(path, out);
}

void atomic_write_text(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ArgumentError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

namespace {

json spec_to_json(const ScenarioSpec& s) {
  return json{{"kind", to_string(s.kind)},
              {"n", s.n},
              {"m", s.m},
              {"d_raw", s.d_raw},
              {"latent_dim", s.latent_dim},
              {"noise_sigma", s.noise_sigma},
              {"shift_window", s.shift_window},
              {"irrelevance_rate", s.irrelevance_rate},
              {"events", s.events},
              {"seed", s.seed},
              {"map_seed", s.map_seed}};
}

ScenarioSpec spec_from_json(const json& j) {
  ScenarioSpec s;
  s.kind = scenario_from_string(j.at("kind").get<std::string>());
  s.n = j.at("n").get<std::size_t>();
  s.m = j.at("m").get<std::size_t>();
  s.d_raw = j.at("d_raw").get<std::size_t>();
  s.latent_dim = j.at("latent_dim").get<std::size_t>();
  s.noise_sigma = j.at("noise_sigma").get<double>();
  s.shift_window = j.at("shift_window").get<std::size_t>();
  s.irrelevance_rate = j.at("irrelevance_rate").get<double>();
  s.events = j.value("events", std::size_t{0});
  s.seed = j.at("seed").get<std::uint64_t>();
  s.map_seed = j.at("map_seed").get<std::uint64_t>();
  return s;
}

json gt_to_json(const GroundTruth& gt) {
  json c = json::array();
  for (const auto& [i, jx] : gt.correspondences) c.push_back({i, jx});
  return json{{"correspondences", c},
              {"irrelevant_clips", gt.irrelevant_clips},
              {"irrelevant_captions", gt.irrelevant_captions},
              {"applied_shift", gt.applied_shift.map()}};
}

GroundTruth gt_from_json(const json& j) {
  GroundTruth gt;
  for (const auto& c : j.at("correspondences"))
    gt.correspondences.emplace_back(c.at(0).get<std::size_t>(),
                                    c.at(1).get<std::size_t>());
  gt.irrelevant_clips = j.at("irrelevant_clips").get<std::vector<std::size_t>>();
  gt.irrelevant_captions =
      j.at("irrelevant_captions").get<std::vector<std::size_t>>();
  gt.applied_shift =
      Permutation(j.at("applied_shift").get<std::vector<std::size_t>>());
  return gt;
}

}  // namespace

void save_corpus(const fs::path& dir, const Corpus& corpus) {
  fs::create_directories(dir / "pairs");
  json manifest;
  manifest["format"] = "twalign-corpus-v1";
  auto dump_split = [&](const char* name, const std::vector<SynthPair>& pairs,
                        const std::vector<ScenarioSpec>& specs) {
    json arr = json::array();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const std::string stem = std::string(name) + "_" + std::to_string(k);
      write_sequence_csv(dir / "pairs" / (stem + "_clips.csv"), pairs[k].clips);
      write_sequence_csv(dir / "pairs" / (stem + "_captions.csv"),
                         pairs[k].captions);
      arr.push_back(json{{"stem", stem},
                         {"spec", spec_to_json(specs[k])},
                         {"gt", gt_to_json(pairs[k].gt)}});
    }
    manifest[name] = std::move(arr);
  };
  dump_split("train", corpus.train, corpus.train_specs);
  dump_split("test", corpus.test, corpus.test_specs);
  atomic_write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string loss_output_json(const LossOutput& out) {
  json costs = json::array();
  for (std::size_t i = 0; i < out.cost_matrix.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < out.cost_matrix.cols(); ++j) {
      const double c = out.cost_matrix(i, j);
      if (std::isnan(c))
        row.push_back(nullptr);
      else
        row.push_back(c);
    }
    costs.push_back(std::move(row));
  }
  json ratios = json::array();
  for (double r : out.ratios) {
    if (std::isnan(r))
      ratios.push_back(nullptr);
    else
      ratios.push_back(r);
  }
  json j{{"loss", out.loss}, {"cost_matrix", costs}, {"ratios", ratios}};
  return j.dump();
}

Corpus load_corpus(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ArgumentError("cannot open " + (dir / "manifest.json").string());
  json manifest = json::parse(in);
  if (manifest.value("format", "") != "twalign-corpus-v1")
    throw ArgumentError("unrecognized corpus manifest in " + dir.string());
  Corpus corpus;
  auto load_split = [&](const char* name, std::vector<SynthPair>& pairs,
                        std::vector<ScenarioSpec>& specs) {
    for (const auto& e : manifest.at(name)) {
      const std::string stem = e.at("stem").get<std::string>();
      SynthPair p{
          read_sequence_csv(dir / "pairs" / (stem + "_clips.csv"),
                            Modality::clip),
          read_sequence_csv(dir / "pairs" / (stem + "_captions.csv"),
                            Modality::caption),
          gt_from_json(e.at("gt"))};
      pairs.push_back(std::move(p));
      specs.push_back(spec_from_json(e.at("spec")));
    }
  };
  load_split("train", corpus.train, corpus.train_specs);
  load_split("test", corpus.test, corpus.test_specs);
  return corpus;
}

}  // namespace twalign
