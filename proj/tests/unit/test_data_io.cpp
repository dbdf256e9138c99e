#include <doctest.h>

#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "clusterlab/data_io.hpp"
#include "clusterlab/error.hpp"
#include "support/temp_dir.hpp"

using namespace clab;
using clab::testing::TempDir;
using clab::testing::write_text;

namespace {

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string be32(std::uint32_t v) {
    return {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
            static_cast<char>(v)};
}

std::string har_row(std::size_t cols, double base) {
    std::ostringstream os;
    for (std::size_t j = 0; j < cols; ++j) os << (j ? " " : "  ") << base + 0.001 * j;
    return os.str();
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected clab::Error");
    return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("idx: hand-built file decodes pixel by pixel") {
    TempDir tmp;
    std::string img = be32(0x803) + be32(2) + be32(2) + be32(3);
    for (int i = 0; i < 12; ++i) img.push_back(static_cast<char>(i * 20));
    write_text(tmp / "img", img);
    write_text(tmp / "lab", be32(0x801) + be32(2) + std::string{char(7), char(3)});

    auto ds = io::load_idx(tmp / "img", tmp / "lab");
    REQUIRE(ds.data.rows() == 2);
    REQUIRE(ds.data.cols() == 6);
    CHECK(ds.data(0, 0) == 0.0);
    CHECK(ds.data(1, 5) == 220.0);
    CHECK(ds.labels == std::vector<int>{1, 0});  // 3 -> 0, 7 -> 1
    CHECK(ds.n_classes() == 2);
}

TEST_CASE("idx: write then read gives identical bytes and values") {
    TempDir tmp;
    Matrix images(3, 4);
    for (std::size_t i = 0; i < images.size(); ++i) images.data()[i] = static_cast<double>((i * 37) % 256);
    std::vector<int> labels{0, 1, 2};
    io::write_idx(tmp / "a.img", tmp / "a.lab", images, labels, 2, 2);
    auto ds = io::load_idx(tmp / "a.img", tmp / "a.lab");
    CHECK(ds.data == images);
    CHECK(ds.labels == labels);
    io::write_idx(tmp / "b.img", tmp / "b.lab", ds.data, ds.labels, 2, 2);
    CHECK(read_bytes(tmp / "a.img") == read_bytes(tmp / "b.img"));
    CHECK(read_bytes(tmp / "a.lab") == read_bytes(tmp / "b.lab"));
    CHECK(read_bytes(tmp / "a.img").size() == 16 + 12);
}

TEST_CASE("idx: splits are concatenated in order") {
    TempDir tmp;
    Matrix a(2, 1, 5.0), b(1, 1, 9.0);
    io::write_idx(tmp / "a.img", tmp / "a.lab", a, std::vector<int>{4, 4}, 1, 1);
    io::write_idx(tmp / "b.img", tmp / "b.lab", b, std::vector<int>{2}, 1, 1);
    std::vector<std::filesystem::path> imgs{tmp / "a.img", tmp / "b.img"};
    std::vector<std::filesystem::path> labs{tmp / "a.lab", tmp / "b.lab"};
    auto ds = io::load_idx(imgs, labs);
    REQUIRE(ds.size() == 3);
    CHECK(ds.data(2, 0) == 9.0);
    CHECK(ds.labels == std::vector<int>{1, 1, 0});
}

TEST_CASE("idx: malformed input") {
    TempDir tmp;
    Matrix images(2, 4, 1.0);
    io::write_idx(tmp / "img", tmp / "lab", images, std::vector<int>{0, 1}, 2, 2);

    CHECK(kind_of([&] { io::load_idx(tmp / "missing", tmp / "lab"); }) == ErrorKind::IoError);

    auto bytes = read_bytes(tmp / "img");
    write_text(tmp / "short", bytes.substr(0, bytes.size() - 1));
    CHECK(kind_of([&] { io::load_idx(tmp / "short", tmp / "lab"); }) == ErrorKind::FormatError);

    auto bad = bytes;
    bad[3] = 0x01;
    write_text(tmp / "magic", bad);
    CHECK(kind_of([&] { io::load_idx(tmp / "magic", tmp / "lab"); }) == ErrorKind::FormatError);

    write_text(tmp / "lab3", be32(0x801) + be32(3) + std::string(3, '\0'));
    CHECK(kind_of([&] { io::load_idx(tmp / "img", tmp / "lab3"); }) != ErrorKind::IoError);
}

TEST_CASE("har: three rows of 561 columns") {
    TempDir tmp;
    write_text(tmp / "X.txt", har_row(561, 0.5) + "\n" + har_row(561, -0.25) + "\r\n" + har_row(561, 1e-3) + "\n");
    write_text(tmp / "y.txt", "5\n1\r\n5\n");
    auto ds = io::load_har(tmp / "X.txt", tmp / "y.txt");
    REQUIRE(ds.data.rows() == 3);
    REQUIRE(ds.data.cols() == 561);
    CHECK(ds.data(0, 0) == doctest::Approx(0.5));
    CHECK(ds.data(1, 560) == doctest::Approx(-0.25 + 0.56));
    CHECK(ds.labels == std::vector<int>{1, 0, 1});
}

TEST_CASE("har: a ragged row is a format error") {
    TempDir tmp;
    write_text(tmp / "X.txt", har_row(561, 0.5) + "\n" + har_row(560, 0.1) + "\n" + har_row(561, 0.2) + "\n");
    write_text(tmp / "y.txt", "1\n2\n3\n");
    CHECK(kind_of([&] { io::load_har(tmp / "X.txt", tmp / "y.txt"); }) == ErrorKind::FormatError);
}

TEST_CASE("har: non-numeric token and count mismatch") {
    TempDir tmp;
    write_text(tmp / "X.txt", "1 2 x\n");
    write_text(tmp / "y.txt", "1\n");
    CHECK(kind_of([&] { io::load_har(tmp / "X.txt", tmp / "y.txt", "har", 3); }) == ErrorKind::FormatError);
    write_text(tmp / "X2.txt", "1 2 3\n4 5 6\n");
    CHECK(kind_of([&] { io::load_har(tmp / "X2.txt", tmp / "y.txt", "har", 3); }) == ErrorKind::InvalidInput);
}

TEST_CASE("csv: round trip keeps every bit") {
    TempDir tmp;
    io::LabeledDataset ds;
    ds.data = Matrix(3, 2);
    ds.data(0, 0) = 0.1;
    ds.data(0, 1) = -1e-300;
    ds.data(1, 0) = 1.0 / 3.0;
    ds.data(1, 1) = 12345678.9;
    ds.data(2, 0) = 0.0;
    ds.data(2, 1) = 2.5;
    ds.labels = {2, 0, 1};
    io::write_csv(tmp / "d.csv", ds);
    auto text = read_bytes(tmp / "d.csv");
    CHECK(text.rfind("f0,f1,label\n", 0) == 0);
    CHECK(text.find(',') != std::string::npos);
    auto back = io::read_csv(tmp / "d.csv");
    CHECK(back.data == ds.data);
    CHECK(back.labels == ds.labels);
}

TEST_CASE("standardize: zero mean, unit population variance, constant column to zero") {
    Matrix x(4, 2);
    const double col0[] = {1, 2, 3, 4};
    for (std::size_t i = 0; i < 4; ++i) {
        x(i, 0) = col0[i];
        x(i, 1) = 7.0;
    }
    auto s = io::standardize(x);
    double mean = 0, var = 0;
    for (std::size_t i = 0; i < 4; ++i) mean += s.data(i, 0) / 4;
    for (std::size_t i = 0; i < 4; ++i) var += s.data(i, 0) * s.data(i, 0) / 4;
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(var == doctest::Approx(1.0));
    CHECK(s.params.means[0] == 2.5);
    CHECK(s.params.stds[0] == doctest::Approx(std::sqrt(1.25)));
    for (std::size_t i = 0; i < 4; ++i) CHECK(s.data(i, 1) == 0.0);
}

TEST_CASE("subsample: stratified quotas, sub-multiset, determinism") {
    io::LabeledDataset ds;
    const std::size_t n = 100;
    ds.data = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        ds.data(i, 0) = static_cast<double>(i);
        ds.labels.push_back(i < 50 ? 0 : (i < 80 ? 1 : 2));
    }
    auto a = io::subsample(ds, 10, 42);
    auto b = io::subsample(ds, 10, 42);
    REQUIRE(a.size() == 10);
    CHECK(a.data == b.data);
    CHECK(a.labels == b.labels);
    std::map<int, int> counts;
    for (int l : a.labels) ++counts[l];
    CHECK(counts[0] == 5);
    CHECK(counts[1] == 3);
    CHECK(counts[2] == 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto row = static_cast<std::size_t>(a.data(i, 0));
        CHECK(ds.labels[row] == a.labels[i]);
        if (i) CHECK(a.data(i, 0) > a.data(i - 1, 0));
    }
    CHECK(kind_of([&] { io::subsample(ds, 101, 1); }) == ErrorKind::InvalidInput);
}

TEST_CASE("remap_contiguous and format_double") {
    CHECK(io::remap_contiguous(std::vector<int>{10, -3, 10, 4}) == std::vector<int>{2, 0, 2, 1});
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(-2.0) == "-2");
}
