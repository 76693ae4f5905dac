#include <gtest/gtest.h>

#include <filesystem>

#include "horst/io.hpp"

using namespace horst;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("horst_io_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}
} // namespace

TEST(Io, FmtDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(fmt_double(v)), v);
}

TEST(Io, DatasetRoundTrip) {
    auto d = scratch("dataset");
    auto ds = make_sparse_teacher(7, 11, 2, 5);
    save_dataset(d / "ds", ds);
    auto back = load_dataset(d / "ds");
    EXPECT_EQ(back.X, ds.X);
    EXPECT_EQ(back.y, ds.y);
    EXPECT_EQ(back.teacher, ds.teacher);
    EXPECT_EQ(back.seed, 5u);
}

TEST(Io, CheckpointRoundTripIsBitExact) {
    auto d = scratch("ckpt");
    ParamVector p({0.1, -1e-310, 3.0, 1.0 / 7.0}, {{"a", 0, 1}, {"b", 1, 3}});
    save_checkpoint(d / "c", p, {{"iteration", 12}});
    json meta;
    auto back = load_checkpoint(d / "c", &meta);
    EXPECT_EQ(back.values(), p.values());
    EXPECT_EQ(back.segment("b").length, 3u);
    EXPECT_EQ(meta.at("iteration"), 12);
    EXPECT_EQ(fs::file_size(d / "c.bin"), 4 * sizeof(double));
}

TEST(Io, MaskRoundTrip) {
    auto d = scratch("mask");
    ParamVector layout(Vec(11, 1.0), {{"w", 0, 11}});
    SparsityMask m;
    m.bits = {1, 0, 0, 1, 1, 1, 0, 1, 0, 0, 1};
    m.target_sparsity = 0.45;
    m.scope = {"w"};
    m.event = {40, "magnitude_per_segment"};
    save_mask(d / "m", m, layout);
    EXPECT_EQ(fs::file_size(d / "m.mask"), 2u);
    auto back = load_mask(d / "m");
    EXPECT_EQ(back.bits, m.bits);
    EXPECT_EQ(back.scope, m.scope);
    EXPECT_EQ(back.event.iteration, 40u);
    EXPECT_EQ(back.target_sparsity, 0.45);
}

TEST(Io, MissingFilesAndBadJson) {
    auto d = scratch("errors");
    EXPECT_THROW(read_text(d / "none.txt"), io_error);
    EXPECT_THROW(load_checkpoint(d / "none"), io_error);
    write_text(d / "bad.json", "{not json");
    EXPECT_THROW(read_json(d / "bad.json"), io_error);
}

TEST(Io, CsvParse) {
    auto rows = parse_csv("a,b\n1,2\n3,4\n");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(rows[2][1], "4");
}
