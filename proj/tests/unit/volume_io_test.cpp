#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <random>

#include "mimo/error.hpp"
#include "mimo/manifest.hpp"
#include "mimo/npy.hpp"
#include "mimo/volume.hpp"
#include "oracles.hpp"

using namespace mimo;
using oracle::TempDir;

namespace {

// Builds an NPY v1 file by hand from the format description.
std::string handmade_npy(const std::string& descr, const std::string& shape, const std::string& payload,
                         int major = 1) {
    std::string header = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " + shape + ", }";
    const std::size_t prefix = major == 1 ? 10 : 12;
    while ((prefix + header.size() + 1) % 64 != 0) header += ' ';
    header += '\n';
    std::string out = "\x93NUMPY";
    out += static_cast<char>(major);
    out += '\0';
    const std::size_t len = header.size();
    out += static_cast<char>(len & 0xff);
    out += static_cast<char>((len >> 8) & 0xff);
    if (major != 1) out += std::string(2, '\0');
    return out + header + payload;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

LabelVolume small_labels() {
    LabelVolume v;
    v.shape = {2, 3, 4};
    v.labels.resize(24);
    for (std::size_t i = 0; i < 24; ++i) v.labels[i] = static_cast<std::uint16_t>(i % 3);
    return v;
}

}  // namespace

TEST(Npy, ParsesHandmadeUint8) {
    TempDir dir("npy");
    const std::string payload = {1, 0, 2, 0, 0, 1, 1, 1};
    write_text(dir / "a.npy", handmade_npy("|u1", "(2, 2, 2)", payload));
    auto v = load_label_volume(dir / "a.npy");
    EXPECT_EQ(v.shape, (Shape3{2, 2, 2}));
    EXPECT_EQ(v.at(0, 0, 0), 1);
    EXPECT_EQ(v.at(0, 0, 1), 0);
    EXPECT_EQ(v.at(0, 1, 0), 2);
    EXPECT_EQ(v.at(1, 1, 1), 1);
}

TEST(Npy, ParsesVersionTwoAndBigEndian) {
    TempDir dir("npy");
    std::string payload;
    for (std::uint16_t x : {std::uint16_t{1}, std::uint16_t{258}}) {
        payload += static_cast<char>(x >> 8);
        payload += static_cast<char>(x & 0xff);
    }
    write_text(dir / "b.npy", handmade_npy(">u2", "(2,)", payload, 2));
    auto a = npy::read(dir / "b.npy");
    EXPECT_EQ(a.shape, (std::vector<std::size_t>{2}));
    EXPECT_EQ(a.to_unsigned(), (std::vector<std::uint64_t>{1, 258}));
}

TEST(Npy, RejectsFortranOrder) {
    TempDir dir("npy");
    std::string text = handmade_npy("|u1", "(1, 1, 1)", std::string(1, '\0'));
    text.replace(text.find("False"), 5, "True ");
    write_text(dir / "f.npy", text);
    EXPECT_THROW(npy::read(dir / "f.npy"), Error);
}

TEST(Npy, RejectsTruncatedPayloadAndBadMagic) {
    TempDir dir("npy");
    write_text(dir / "t.npy", handmade_npy("<f4", "(4,)", std::string(8, '\0')));
    EXPECT_THROW(npy::read(dir / "t.npy"), Error);
    write_text(dir / "m.npy", "not an npy file at all");
    EXPECT_THROW(npy::read(dir / "m.npy"), Error);
    EXPECT_THROW(npy::read(dir / "missing.npy"), Error);
}

TEST(Npy, WriterProducesAlignedHeader) {
    const std::vector<std::size_t> shape{3, 1, 2};
    std::vector<std::byte> data(6 * 4);
    auto bytes = npy::serialize(shape, npy::DType::f32, data);
    const std::size_t header_len = static_cast<std::size_t>(bytes[8]) | (static_cast<std::size_t>(bytes[9]) << 8);
    EXPECT_EQ((10 + header_len) % 64, 0u);
    EXPECT_EQ(bytes.size(), 10 + header_len + data.size());
    EXPECT_EQ(static_cast<char>(bytes[10 + header_len - 1]), '\n');
}

TEST(NpyProperty, RoundTripIsBitwise) {
    std::mt19937_64 gen(7);
    const npy::DType types[] = {npy::DType::u8, npy::DType::u16, npy::DType::i32, npy::DType::f32, npy::DType::f64};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> shape;
        const std::size_t rank = 1 + gen() % 4;
        for (std::size_t a = 0; a < rank; ++a) shape.push_back(1 + gen() % 5);
        const auto dtype = types[gen() % 5];
        std::size_t count = 1;
        for (auto e : shape) count *= e;
        std::vector<std::byte> data(count * npy::dtype_size(dtype));
        for (auto& b : data) b = static_cast<std::byte>(gen() & 0xff);
        auto bytes = npy::serialize(shape, dtype, data);
        auto back = npy::parse(bytes);
        EXPECT_EQ(back.shape, shape);
        EXPECT_EQ(back.dtype, dtype);
        ASSERT_EQ(back.data.size(), data.size());
        EXPECT_EQ(std::memcmp(back.data.data(), data.data(), data.size()), 0);
    }
}

TEST(LabelVolume, SaveLoadRoundTrip) {
    TempDir dir("vol");
    auto v = small_labels();
    save_label_volume(dir / "l.npy", v);
    auto back = load_label_volume(dir / "l.npy");
    EXPECT_EQ(back.shape, v.shape);
    EXPECT_EQ(back.labels, v.labels);
    EXPECT_EQ(npy::read(dir / "l.npy").dtype, npy::DType::u8);

    v.labels[5] = 300;
    save_label_volume(dir / "w.npy", v);
    EXPECT_EQ(npy::read(dir / "w.npy").dtype, npy::DType::u16);
    EXPECT_EQ(load_label_volume(dir / "w.npy").labels, v.labels);
}

TEST(LabelVolume, RejectsWrongRank) {
    TempDir dir("vol");
    write_text(dir / "r.npy", handmade_npy("|u1", "(2, 2)", std::string(4, '\0')));
    try {
        load_label_volume(dir / "r.npy");
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("expected rank 3"), std::string::npos);
    }
}

TEST(LabelVolume, RejectsOutOfRangeLabelNamingVoxel) {
    TempDir dir("vol");
    auto v = small_labels();
    v.labels[23] = 9;
    save_label_volume(dir / "x.npy", v);
    try {
        load_label_volume(dir / "x.npy", kUnitSpacing, 2u);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("9"), std::string::npos);
        EXPECT_NE(msg.find("(1,2,3)"), std::string::npos) << msg;
    }
}

TEST(LabelVolume, RejectsNegativeAndFloatLabels) {
    TempDir dir("vol");
    write_text(dir / "n.npy", handmade_npy("|i1", "(1, 1, 2)", std::string{0, '\xff'}));
    EXPECT_THROW(load_label_volume(dir / "n.npy"), Error);
    float f = 0.5f;
    std::string payload(reinterpret_cast<const char*>(&f), 4);
    write_text(dir / "f.npy", handmade_npy("<f4", "(1, 1, 1)", payload));
    EXPECT_THROW(load_label_volume(dir / "f.npy"), Error);
}

TEST(LabelVolume, RejectsBadSpacing) {
    TempDir dir("vol");
    save_label_volume(dir / "l.npy", small_labels());
    EXPECT_THROW(load_label_volume(dir / "l.npy", Spacing{1.0, 0.0, 1.0}), Error);
    EXPECT_THROW(load_label_volume(dir / "l.npy", Spacing{1.0, -2.0, 1.0}), Error);
}

TEST(ProbabilityVolume, RoundTripAndValidation) {
    TempDir dir("prob");
    ProbabilityVolume p;
    p.classes = 3;
    p.shape = {1, 2, 2};
    p.probs = {0.2f, 0.1f, 1.0f, 0.5f, 0.3f, 0.9f, 0.0f, 0.25f, 0.5f, 0.0f, 0.0f, 0.25f};
    save_probability_volume(dir / "p.npy", p);
    auto back = load_probability_volume(dir / "p.npy", 3);
    EXPECT_EQ(back.probs, p.probs);
    EXPECT_EQ(back.classes, 3u);
    EXPECT_THROW(load_probability_volume(dir / "p.npy", 4), Error);

    auto bad = p;
    bad.probs[0] = 0.4f;  // sum 1.2 at voxel 0
    save_probability_volume(dir / "s.npy", bad);
    EXPECT_THROW(load_probability_volume(dir / "s.npy", 3), Error);

    bad = p;
    bad.probs[1] = -0.1f;
    bad.probs[5] = 1.1f;
    save_probability_volume(dir / "r.npy", bad);
    EXPECT_THROW(load_probability_volume(dir / "r.npy", 3), Error);
}

TEST(Manifest, ParsesRelativePathsAndSpacing) {
    const std::string text = R"({
      "organs": ["liver", "spleen"],
      "samples": [
        {"id": "a", "gt": "gt/a.npy", "pred": "pred/a.npy", "prob": "prob/a.npy", "spacing": [2.0, 0.5, 0.5]},
        {"id": "b", "gt": "/abs/b.npy", "pred": "pred/b.npy"}
      ]})";
    auto m = parse_manifest(text, "/data/set");
    ASSERT_EQ(m.sample_count(), 2u);
    EXPECT_EQ(m.organs, (std::vector<std::string>{"liver", "spleen"}));
    EXPECT_EQ(m.samples[0].ground_truth, std::filesystem::path("/data/set/gt/a.npy"));
    EXPECT_EQ(*m.samples[0].probabilities, std::filesystem::path("/data/set/prob/a.npy"));
    EXPECT_EQ(m.samples[0].spacing, (Spacing{2.0, 0.5, 0.5}));
    EXPECT_EQ(m.samples[1].ground_truth, std::filesystem::path("/abs/b.npy"));
    EXPECT_FALSE(m.samples[1].probabilities.has_value());
    EXPECT_EQ(m.samples[1].spacing, kUnitSpacing);
}

TEST(Manifest, Rejections) {
    EXPECT_THROW(parse_manifest("{", "/"), Error);
    EXPECT_THROW(parse_manifest(R"({"organs": [], "samples": []})", "/"), Error);
    const std::string dup = R"({"organs": ["x"], "samples": [
        {"id": "a", "gt": "g", "pred": "p"}, {"id": "a", "gt": "g", "pred": "p"}]})";
    EXPECT_THROW(validate(parse_manifest(dup, "/"), false), Error);
    const std::string spacing = R"({"organs": ["x"], "samples": [
        {"id": "a", "gt": "g", "pred": "p", "spacing": [1, 0, 1]}]})";
    EXPECT_THROW(validate(parse_manifest(spacing, "/"), false), Error);
}

TEST(Manifest, DanglingPathIsNamed) {
    TempDir dir("man");
    const std::string text = R"({"organs": ["x"], "samples": [{"id": "a", "gt": "nowhere.npy", "pred": "p.npy"}]})";
    write_text(dir / "manifest.json", text);
    try {
        validate(load_manifest(dir / "manifest.json"), true);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("nowhere.npy"), std::string::npos);
    }
}

TEST(Manifest, SaveLoadRoundTrip) {
    TempDir dir("man");
    DatasetManifest m;
    m.organs = {"a", "b"};
    m.samples.push_back({"s1", dir / "gt" / "s1.npy", dir / "pred" / "s1.npy", dir / "prob" / "s1.npy", {1.5, 1, 1}});
    for (const char* sub : {"gt", "pred", "prob"}) {
        std::filesystem::create_directories(dir / sub);
        write_text(dir.path() / sub / "s1.npy", "");
    }
    save_manifest(dir / "manifest.json", m);
    auto back = load_manifest(dir / "manifest.json");
    EXPECT_EQ(back.organs, m.organs);
    ASSERT_EQ(back.sample_count(), 1u);
    EXPECT_EQ(back.samples[0].ground_truth.lexically_normal(), m.samples[0].ground_truth.lexically_normal());
    EXPECT_EQ(back.samples[0].spacing, m.samples[0].spacing);
}
