#include "clusterlab/data_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "clusterlab/error.hpp"
#include "clusterlab/rng.hpp"

namespace clab::io {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

std::vector<unsigned char> read_bytes(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + file.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset, const fs::path& file) {
    if (offset + 4 > bytes.size()) fail(ErrorKind::FormatError, file.string() + ": truncated IDX header");
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void put_be32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                                static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(b.data(), 4);
}

struct RawSplit {
    std::size_t count = 0;
    std::size_t features = 0;
    std::vector<double> values;
    std::vector<int> labels;
};

RawSplit read_idx_images(const fs::path& file) {
    const auto bytes = read_bytes(file);
    const std::uint32_t magic = read_be32(bytes, 0, file);
    if (magic != kIdxImagesMagic)
        fail(ErrorKind::FormatError, file.string() + ": bad IDX image magic number");
    const std::size_t count = read_be32(bytes, 4, file);
    const std::size_t rows = read_be32(bytes, 8, file);
    const std::size_t cols = read_be32(bytes, 12, file);
    const std::size_t features = rows * cols;
    if (bytes.size() < 16 + count * features)
        fail(ErrorKind::FormatError, file.string() + ": truncated IDX image payload");
    RawSplit s;
    s.count = count;
    s.features = features;
    s.values.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(count * features));
    return s;
}

std::vector<int> read_idx_labels(const fs::path& file) {
    const auto bytes = read_bytes(file);
    const std::uint32_t magic = read_be32(bytes, 0, file);
    if (magic != kIdxLabelsMagic)
        fail(ErrorKind::FormatError, file.string() + ": bad IDX label magic number");
    const std::size_t count = read_be32(bytes, 4, file);
    if (bytes.size() < 8 + count) fail(ErrorKind::FormatError, file.string() + ": truncated IDX label payload");
    return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count)};
}

/// Splits on spaces/tabs; strips a trailing CR.
std::vector<std::string_view> tokenize(std::string_view line, char sep = '\0') {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    if (sep != '\0') {
        while (true) {
            const std::size_t j = line.find(sep, i);
            tokens.push_back(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
            if (j == std::string_view::npos) break;
            i = j + 1;
        }
        return tokens;
    }
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

double parse_double(std::string_view tok, const fs::path& file, std::size_t line_no) {
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty() || !std::isfinite(v))
        fail(ErrorKind::FormatError, file.string() + ":" + std::to_string(line_no) + ": not a number: '" +
                                         std::string(tok) + "'");
    return v;
}

int parse_int(std::string_view tok, const fs::path& file, std::size_t line_no) {
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
        fail(ErrorKind::FormatError, file.string() + ":" + std::to_string(line_no) + ": not an integer: '" +
                                         std::string(tok) + "'");
    return v;
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
    std::size_t start = 0, line_no = 1;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string_view line(text.data() + start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(line, line_no);
        start = end + 1;
        ++line_no;
    }
}

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

LabeledDataset assemble(std::vector<double> values, std::size_t features, std::vector<int> raw_labels,
                        std::string name) {
    const std::size_t n = raw_labels.size();
    LabeledDataset ds{DataMatrix(n, features, std::move(values)), remap_contiguous(raw_labels), std::move(name)};
    validate_data(ds.data, ds.name.c_str());
    return ds;
}

}  // namespace

std::size_t LabeledDataset::n_classes() const {
    if (labels.empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()) + 1);
}

std::vector<int> remap_contiguous(std::span<const int> raw) {
    std::vector<int> distinct(raw.begin(), raw.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        out[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), raw[i]) - distinct.begin());
    return out;
}

LabeledDataset load_idx(std::span<const fs::path> image_files, std::span<const fs::path> label_files,
                        std::string name) {
    require(!image_files.empty() && image_files.size() == label_files.size(),
            "load_idx: need matching, non-empty lists of image and label files");
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t features = 0;
    for (std::size_t s = 0; s < image_files.size(); ++s) {
        RawSplit split = read_idx_images(image_files[s]);
        std::vector<int> split_labels = read_idx_labels(label_files[s]);
        if (split_labels.size() != split.count)
            fail(ErrorKind::InvalidInput, image_files[s].string() + ": " + std::to_string(split.count) +
                                              " images but " + std::to_string(split_labels.size()) + " labels");
        if (s > 0 && split.features != features)
            fail(ErrorKind::InvalidInput, image_files[s].string() + ": image size differs from previous split");
        features = split.features;
        values.insert(values.end(), split.values.begin(), split.values.end());
        labels.insert(labels.end(), split_labels.begin(), split_labels.end());
    }
    if (labels.empty() || features == 0) fail(ErrorKind::FormatError, "load_idx: no samples");
    return assemble(std::move(values), features, std::move(labels), std::move(name));
}

LabeledDataset load_idx(const fs::path& image_file, const fs::path& label_file, std::string name) {
    const fs::path images[] = {image_file};
    const fs::path labels[] = {label_file};
    return load_idx(images, labels, std::move(name));
}

void write_idx(const fs::path& image_file, const fs::path& label_file, const DataMatrix& images,
               std::span<const int> labels, std::uint32_t rows, std::uint32_t cols) {
    require(images.cols() == std::size_t{rows} * cols, "write_idx: rows*cols must equal the feature count");
    require(labels.size() == images.rows(), "write_idx: label count differs from image count");
    std::ofstream img(image_file, std::ios::binary);
    std::ofstream lab(label_file, std::ios::binary);
    if (!img || !lab) fail(ErrorKind::IoError, "write_idx: cannot open output files");
    put_be32(img, kIdxImagesMagic);
    put_be32(img, static_cast<std::uint32_t>(images.rows()));
    put_be32(img, rows);
    put_be32(img, cols);
    for (double v : images.values()) {
        require(v >= 0.0 && v <= 255.0 && v == std::floor(v), "write_idx: pixel values must be bytes");
        img.put(static_cast<char>(static_cast<unsigned char>(v)));
    }
    put_be32(lab, kIdxLabelsMagic);
    put_be32(lab, static_cast<std::uint32_t>(labels.size()));
    for (int l : labels) {
        require(l >= 0 && l <= 255, "write_idx: labels must be bytes");
        lab.put(static_cast<char>(static_cast<unsigned char>(l)));
    }
    if (!img || !lab) fail(ErrorKind::IoError, "write_idx: write failed");
}

LabeledDataset load_har(std::span<const fs::path> feature_files, std::span<const fs::path> label_files,
                        std::string name, std::size_t expected_cols) {
    require(!feature_files.empty() && feature_files.size() == label_files.size(),
            "load_har: need matching, non-empty lists of feature and label files");
    std::vector<double> values;
    std::vector<int> labels;
    for (std::size_t s = 0; s < feature_files.size(); ++s) {
        const fs::path& ff = feature_files[s];
        const std::string text = read_text(ff);
        std::size_t rows = 0;
        for_each_line(text, [&](std::string_view line, std::size_t line_no) {
            if (blank(line)) return;
            const auto tokens = tokenize(line);
            if (tokens.size() != expected_cols)
                fail(ErrorKind::FormatError, ff.string() + ":" + std::to_string(line_no) + ": expected " +
                                                 std::to_string(expected_cols) + " values, found " +
                                                 std::to_string(tokens.size()));
            for (auto tok : tokens) values.push_back(parse_double(tok, ff, line_no));
            ++rows;
        });
        const fs::path& lf = label_files[s];
        const std::string ltext = read_text(lf);
        std::size_t nlabels = 0;
        for_each_line(ltext, [&](std::string_view line, std::size_t line_no) {
            if (blank(line)) return;
            const auto tokens = tokenize(line);
            if (tokens.size() != 1)
                fail(ErrorKind::FormatError, lf.string() + ":" + std::to_string(line_no) + ": expected one label");
            labels.push_back(parse_int(tokens[0], lf, line_no));
            ++nlabels;
        });
        if (nlabels != rows)
            fail(ErrorKind::InvalidInput, ff.string() + ": " + std::to_string(rows) + " rows but " +
                                              std::to_string(nlabels) + " labels");
    }
    if (labels.empty()) fail(ErrorKind::FormatError, "load_har: no samples");
    return assemble(std::move(values), expected_cols, std::move(labels), std::move(name));
}

LabeledDataset load_har(const fs::path& feature_file, const fs::path& label_file, std::string name,
                        std::size_t expected_cols) {
    const fs::path features[] = {feature_file};
    const fs::path labels[] = {label_file};
    return load_har(features, labels, std::move(name), expected_cols);
}

LabeledDataset read_csv(const fs::path& file, std::string name) {
    const std::string text = read_text(file);
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t cols = 0;
    bool header = true;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (blank(line)) return;
        const auto tokens = tokenize(line, ',');
        if (header) {
            if (tokens.size() < 2) fail(ErrorKind::FormatError, file.string() + ": need features and a label");
            cols = tokens.size();
            header = false;
            return;
        }
        if (tokens.size() != cols)
            fail(ErrorKind::FormatError, file.string() + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(cols) + " fields");
        for (std::size_t i = 0; i + 1 < cols; ++i) values.push_back(parse_double(tokens[i], file, line_no));
        labels.push_back(parse_int(tokens.back(), file, line_no));
    });
    if (labels.empty()) fail(ErrorKind::FormatError, file.string() + ": no samples");
    return assemble(std::move(values), cols - 1, std::move(labels), std::move(name));
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

void write_matrix_csv(const fs::path& file, const Matrix& m, std::span<const int> labels) {
    require(labels.empty() || labels.size() == m.rows(), "write_matrix_csv: label count differs from rows");
    std::ofstream out(file, std::ios::binary);
    if (!out) fail(ErrorKind::IoError, "cannot open " + file.string() + " for writing");
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << 'f' << j;
    if (!labels.empty()) out << ",label";
    out << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
        if (!labels.empty()) out << ',' << labels[i];
        out << '\n';
    }
    if (!out) fail(ErrorKind::IoError, "write failed: " + file.string());
}

void write_csv(const fs::path& file, const LabeledDataset& ds) { write_matrix_csv(file, ds.data, ds.labels); }

Standardized standardize(const DataMatrix& x) {
    const std::size_t n = x.rows(), d = x.cols();
    Standardized out{DataMatrix(n, d), {std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) out.params.means[j] += x(i, j);
    for (double& m : out.params.means) m /= static_cast<double>(n);
    // Second pass: correct the mean by the mean residual, accumulate the variance.
    std::vector<double> drift(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double c = x(i, j) - out.params.means[j];
            drift[j] += c;
            out.params.stds[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) {
        const double shift = drift[j] / static_cast<double>(n);
        out.params.means[j] += shift;
        out.params.stds[j] -= static_cast<double>(n) * shift * shift;
    }
    for (std::size_t j = 0; j < d; ++j) {
        double& s = out.params.stds[j];
        s = std::sqrt(std::max(s, 0.0) / static_cast<double>(n));
        // Round-off variance of a constant column counts as zero.
        if (s <= 1e-12 * (1.0 + std::abs(out.params.means[j]))) s = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double s = out.params.stds[j];
            out.data(i, j) = s > 0.0 ? (x(i, j) - out.params.means[j]) / s : 0.0;
        }
    return out;
}

LabeledDataset subsample(const LabeledDataset& ds, std::size_t n, std::uint64_t seed) {
    const std::size_t total = ds.size();
    require(n >= 1 && n <= total, "subsample: n=" + std::to_string(n) + " outside [1, " + std::to_string(total) + "]");
    const std::size_t classes = ds.n_classes();
    std::vector<std::vector<std::size_t>> members(classes);
    for (std::size_t i = 0; i < total; ++i) members[static_cast<std::size_t>(ds.labels[i])].push_back(i);

    // Largest-remainder quotas; ties go to the lower class id.
    std::vector<std::size_t> quota(classes);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        const double exact = static_cast<double>(n) * static_cast<double>(members[c].size()) /
                             static_cast<double>(total);
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n; ++r) {
        const std::size_t c = remainders[r % classes].second;
        if (quota[c] < members[c].size()) {
            ++quota[c];
            ++assigned;
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (std::size_t c = 0; c < classes; ++c) {
        auto& idx = members[c];
        // Partial Fisher-Yates: the first quota[c] slots become the sample.
        for (std::size_t i = 0; i < quota[c]; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
    std::sort(chosen.begin(), chosen.end());

    LabeledDataset out{ds.data.select_rows(chosen), {}, ds.name};
    out.labels.reserve(n);
    for (std::size_t i : chosen) out.labels.push_back(ds.labels[i]);
    return out;
}

}  // namespace clab::io
