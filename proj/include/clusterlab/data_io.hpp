#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "clusterlab/matrix.hpp"

namespace clab::io {

/// Samples with ground-truth class ids. After ingestion the ids form the
/// contiguous set {0 .. C-1} (sorted order of the raw label values).
struct LabeledDataset {
    DataMatrix data;
    std::vector<int> labels;
    std::string name;

    std::size_t size() const noexcept { return data.rows(); }
    std::size_t n_classes() const;
};

/// Per-feature mean and population standard deviation.
struct StandardizationParams {
    std::vector<double> means;
    std::vector<double> stds;
};

struct Standardized {
    DataMatrix data;
    StandardizationParams params;
};

/// IDX image/label pairs, big-endian: images carry magic 0x00000803 and
/// three dimensions (count, rows, cols); labels carry 0x00000801 and a count.
/// Several splits are concatenated in order before the labels are remapped.
LabeledDataset load_idx(std::span<const std::filesystem::path> image_files,
                        std::span<const std::filesystem::path> label_files, std::string name = "idx");
LabeledDataset load_idx(const std::filesystem::path& image_file, const std::filesystem::path& label_file,
                        std::string name = "idx");

/// Writes an IDX pair. Pixel values must be integers in [0, 255] and labels
/// in [0, 255].
void write_idx(const std::filesystem::path& image_file, const std::filesystem::path& label_file,
               const DataMatrix& images, std::span<const int> labels, std::uint32_t rows,
               std::uint32_t cols);

/// Whitespace-separated feature rows (LF or CRLF) plus one integer label per
/// line. Every row must carry `expected_cols` values.
LabeledDataset load_har(std::span<const std::filesystem::path> feature_files,
                        std::span<const std::filesystem::path> label_files, std::string name = "har",
                        std::size_t expected_cols = 561);
LabeledDataset load_har(const std::filesystem::path& feature_file, const std::filesystem::path& label_file,
                        std::string name = "har", std::size_t expected_cols = 561);

/// CSV with a header row; features first, the integer label last.
LabeledDataset read_csv(const std::filesystem::path& file, std::string name = "csv");
void write_csv(const std::filesystem::path& file, const LabeledDataset& ds);
/// Same layout without a label column.
void write_matrix_csv(const std::filesystem::path& file, const Matrix& m, std::span<const int> labels = {});

/// z = (x - mean) / std per column; zero-variance columns map to 0.
Standardized standardize(const DataMatrix& x);

/// Stratified sample of n rows: per-class quotas by largest remainder,
/// rows kept in their original order. Deterministic given the seed.
LabeledDataset subsample(const LabeledDataset& ds, std::size_t n, std::uint64_t seed);

/// Remaps arbitrary integer ids onto {0 .. C-1} preserving their order.
std::vector<int> remap_contiguous(std::span<const int> raw);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace clab::io
