#pragma once

#include <filesystem>
#include <string>

#include "twalign/loss.hpp"
#include "twalign/matrix.hpp"
#include "twalign/sequence.hpp"
#include "twalign/synth.hpp"

namespace twalign {

// Feature-sequence CSV: one row per time step, d comma-separated decimal
// fields; lines starting with '#' are comments. Matrix CSV: rows x cols
// comma-separated decimals. Writers use 17 significant digits so that
// written matrices re-parse bit-identically.

FeatureSequence read_sequence_csv(const std::filesystem::path& path,
                                  Modality tag = Modality::clip);
void write_sequence_csv(const std::filesystem::path& path,
                        const FeatureSequence& seq);

Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

// 8-bit binary PGM heatmap, linear min-max scaling, row 1 at top.
void write_pgm(const std::filesystem::path& path, const Matrix& m);

// Writes to a temporary file in the same directory, then renames.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

std::string format_double(double v);  // canonical %.17g

// Corpus on disk: manifest.json plus per-pair CSV feature files.
void save_corpus(const std::filesystem::path& dir, const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& dir);

// Training-log form of one loss evaluation: loss, cost matrix and per-pair
// ratios as a JSON object string (unevaluated cost cells appear as null).
std::string loss_output_json(const LossOutput& out);

}  // namespace twalign
