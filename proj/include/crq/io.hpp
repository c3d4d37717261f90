#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "crq/clustering.hpp"

namespace crq {

using KeyValues = std::map<std::string, std::string>;

/// Lines "key=value"; blank lines and lines starting with '#' are skipped.
KeyValues parse_key_values(const std::string& text);
std::string format_key_values(const KeyValues& kv);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Matrix Market reader for coordinate (general/symmetric) and array (general) real matrices.
Eigen::SparseMatrix<double> read_matrix_market_sparse(std::istream& is);
MatrixXd read_matrix_market_dense(std::istream& is);
/// Coordinate symmetric: lower triangle of `a`, which must be symmetric.
void write_matrix_market_symmetric(std::ostream& os, const MatrixXd& a);
void write_matrix_market_array(std::ostream& os, const MatrixXd& a);

/// Whitespace-separated numbers.
VectorXd read_vector(std::istream& is);
void write_vector(std::ostream& os, const VectorXd& v);

/// Manifest keys A, C, b name files relative to the manifest directory.
CrqProblem load_problem(const std::filesystem::path& manifest, std::uint64_t seed = 0);
void save_problem(const std::filesystem::path& dir, const MatrixXd& a, const MatrixXd& c, const VectorXd& b);

/// P2 or P5 grayscale; values stay on their native scale.
GrayImage read_pgm(std::istream& is);
GrayImage read_pgm(const std::filesystem::path& path);
/// Binary P5 with maxval 65535 from values in [0, 1].
void write_pgm16(std::ostream& os, Index width, Index height, const std::vector<double>& values);
/// Binary P5 with maxval 255: 255 where mask is set.
void write_pgm_mask(std::ostream& os, Index width, Index height, const std::vector<std::uint8_t>& mask);

/// Lines "row col {+|-}" with zero-based coordinates.
LabelSet read_labels(std::istream& is, Index width, Index height);

}  // namespace crq
