#include "catch_amalgamated.hpp"

#include <cmath>

#include "gifdec/metrics.hpp"

using namespace gifdec;
using Catch::Matchers::WithinAbs;

namespace {

Frame frame2x2(std::vector<uint8_t> indices) {
    Frame f;
    f.width = 2;
    f.height = 2;
    f.index_map = std::move(indices);
    return f;
}

const ColorTable kTa{
    std::vector<Rgb>{{0, 0, 0}, {255, 255, 255}, {128, 0, 0}, {0, 128, 0}}};
const ColorTable kTb{
    std::vector<Rgb>{{10, 10, 10}, {250, 250, 250}, {120, 8, 4}, {0, 120, 6}}};

} // namespace

TEST_CASE("psnr from mse", "[metrics]") {
    REQUIRE(std::isinf(psnr_from_mse(0.0)));
    REQUIRE(psnr_from_mse(0.0) > 0);
    REQUIRE(psnr_from_mse(1.0) == 0.0);
    REQUIRE_THAT(psnr_from_mse(0.01), WithinAbs(20.0, 1e-12));
    REQUIRE_THAT(psnr_from_mse(0.0001), WithinAbs(40.0, 1e-12));
}

TEST_CASE("identical frames have zero error", "[metrics]") {
    Frame f = frame2x2({0, 1, 2, 3});
    REQUIRE(frame_mse(f, kTa, f, kTa) == 0.0);
}

TEST_CASE("frame mse reference value", "[metrics]") {
    // value computed with an independent reference implementation
    Frame a = frame2x2({0, 1, 2, 3});
    Frame b = frame2x2({0, 1, 2, 3});
    double mse = frame_mse(a, kTa, b, kTb);
    REQUIRE_THAT(mse, WithinAbs(0.00079328463411508423, 1e-15));
    REQUIRE_THAT(psnr_from_mse(mse), WithinAbs(31.005709578954171, 1e-9));
}

TEST_CASE("frame mse is symmetric", "[metrics]") {
    Frame a = frame2x2({0, 1, 2, 3});
    Frame b = frame2x2({3, 2, 1, 0});
    REQUIRE(frame_mse(a, kTa, b, kTb) == frame_mse(b, kTb, a, kTa));
}

TEST_CASE("transparent pixels are excluded from both sides", "[metrics]") {
    Frame a = frame2x2({0, 1, 2, 3});
    Frame b = frame2x2({0, 1, 2, 3});
    double all = frame_mse(a, kTa, b, kTb);

    // marking index 2 transparent in `a` must change the average
    GraphicControl gce;
    gce.transparency = true;
    gce.transparent_index = 2;
    a.gce = gce;
    double skipped = frame_mse(a, kTa, b, kTb);
    REQUIRE(skipped != all);

    // ... and transparency on either side skips the pixel the same way
    Frame a2 = frame2x2({0, 1, 2, 3});
    Frame b2 = frame2x2({0, 1, 2, 3});
    b2.gce = gce;
    REQUIRE(frame_mse(a2, kTa, b2, kTb) == skipped);
}

TEST_CASE("an all-transparent frame scores zero", "[metrics]") {
    Frame a = frame2x2({2, 2, 2, 2});
    Frame b = frame2x2({0, 1, 2, 3});
    GraphicControl gce;
    gce.transparency = true;
    gce.transparent_index = 2;
    a.gce = gce;
    REQUIRE(frame_mse(a, kTa, b, kTb) == 0.0);
}

TEST_CASE("geometry mismatches are rejected", "[metrics]") {
    Frame a = frame2x2({0, 1, 2, 3});
    Frame b = frame2x2({0, 1, 2, 3});
    b.left = 1;
    REQUIRE_THROWS_AS(frame_mse(a, kTa, b, kTb), GeometryMismatch);
    b.left = 0;
    b.width = 4;
    b.height = 1;
    REQUIRE_THROWS_AS(frame_mse(a, kTa, b, kTb), GeometryMismatch);
}

TEST_CASE("sequence report aggregates per-frame values", "[metrics]") {
    GifFile orig;
    orig.screen.width = 2;
    orig.screen.height = 2;
    orig.gct = kTa;
    orig.frames.push_back(frame2x2({0, 1, 2, 3}));
    orig.frames.push_back(frame2x2({0, 0, 0, 0}));

    GifFile opt = orig;
    opt.gct = kTb;

    QualityReport q = sequence_mse(orig, opt);
    REQUIRE(q.per_frame_mse.size() == 2);
    REQUIRE_THAT(q.per_frame_mse[0], WithinAbs(0.00079328463411508423, 1e-15));
    REQUIRE(q.mse_max == std::max(q.per_frame_mse[0], q.per_frame_mse[1]));
    REQUIRE_THAT(q.mse_avg, WithinAbs((q.per_frame_mse[0] + q.per_frame_mse[1]) / 2.0, 1e-15));
    REQUIRE(q.psnr_avg == psnr_from_mse(q.mse_avg));
    REQUIRE(q.psnr_max_err == psnr_from_mse(q.mse_max));

    QualityReport same = sequence_mse(orig, orig);
    REQUIRE(same.mse_avg == 0.0);
    REQUIRE(same.mse_max == 0.0);
    REQUIRE(std::isinf(same.psnr_avg));
    REQUIRE(std::isinf(same.psnr_max_err));
}

TEST_CASE("sequence mse input validation", "[metrics]") {
    GifFile a;
    a.screen.width = 2;
    a.screen.height = 2;
    a.gct = kTa;
    a.frames.push_back(frame2x2({0, 1, 2, 3}));

    GifFile b = a;
    b.frames.push_back(frame2x2({0, 1, 2, 3}));
    REQUIRE_THROWS_AS(sequence_mse(a, b), FrameCountMismatch);

    GifFile no_table = a;
    no_table.gct.reset();
    REQUIRE_THROWS_AS(sequence_mse(a, no_table), InvariantViolation);
}

TEST_CASE("bitrate", "[metrics]") {
    GifFile g;
    g.screen.width = 10;
    g.screen.height = 10;
    g.frames.resize(10);
    RateReport r = bitrate(1000, g);
    REQUIRE(r.bytes == 1000);
    REQUIRE(r.bpp == 8.0); // 8*1000 / (10*10*10)

    g.frames.resize(1);
    REQUIRE(bitrate(125, g).bpp == 10.0);

    g.frames.clear();
    REQUIRE_THROWS_AS(bitrate(1000, g), std::invalid_argument);
}

TEST_CASE("render maps indices through the table", "[metrics]") {
    Frame f = frame2x2({0, 1, 2, 3});
    GraphicControl gce;
    gce.transparency = true;
    gce.transparent_index = 1;
    f.gce = gce;
    RenderedFrame r = render(f, kTa);
    REQUIRE(r.width == 2);
    REQUIRE(r.pixels == std::vector<Rgb>{{0, 0, 0}, {255, 255, 255}, {128, 0, 0}, {0, 128, 0}});
    REQUIRE(r.opaque == std::vector<uint8_t>{1, 0, 1, 1});

    Frame oob = frame2x2({0, 1, 2, 9});
    REQUIRE_THROWS_AS(render(oob, kTa), OversizedIndex);
}
