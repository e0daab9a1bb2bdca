#include "catch_amalgamated.hpp"

#include <random>

#include "gifdec/codec.hpp"
#include "gifdec/decimate.hpp"
#include "gifdec/synth.hpp"

using namespace gifdec;
using Catch::Matchers::WithinAbs;

namespace {

ColorTable table(std::initializer_list<Rgb> entries) {
    return ColorTable{std::vector<Rgb>(entries)};
}

// 2x2 single-frame file over a 4-entry GCT, with an optional LCT.
GifFile make_file(ColorTable gct, std::optional<ColorTable> lct, std::vector<uint8_t> indices) {
    GifFile g;
    g.screen.width = 2;
    g.screen.height = 2;
    g.gct = std::move(gct);
    Frame f;
    f.width = 2;
    f.height = 2;
    f.lct = std::move(lct);
    f.index_map = std::move(indices);
    g.frames.push_back(std::move(f));
    return g;
}

const ColorTable kGct = table({{0, 0, 0}, {80, 80, 80}, {160, 160, 160}, {240, 240, 240}});

} // namespace

TEST_CASE("remap of a duplicate table is the identity", "[decimator]") {
    RemapTable r = build_remap(kGct, kGct);
    REQUIRE(r.mapping == std::vector<uint8_t>{0, 1, 2, 3});
    REQUIRE_FALSE(r.transparent_remap.has_value());
}

TEST_CASE("remap of a permuted table is the permutation", "[decimator]") {
    ColorTable permuted = table({{160, 160, 160}, {0, 0, 0}, {240, 240, 240}, {80, 80, 80}});
    REQUIRE(build_remap(permuted, kGct).mapping == std::vector<uint8_t>{2, 0, 3, 1});
}

TEST_CASE("remap picks nearest entries", "[decimator]") {
    ColorTable local = table({{5, 5, 5}, {250, 250, 250}});
    REQUIRE(build_remap(local, kGct).mapping == std::vector<uint8_t>{0, 3});
}

TEST_CASE("transparent slot moves to the smallest free index", "[decimator]") {
    // opaque entries take 0,1,3; slot 2 is the first one left over
    ColorTable local = table({{0, 0, 0}, {80, 80, 80}, {10, 10, 10}, {240, 240, 240}});
    RemapTable r = build_remap(local, kGct, 2);
    REQUIRE(r.transparent_remap == std::make_pair(uint8_t(2), uint8_t(2)));
    REQUIRE(r.mapping == std::vector<uint8_t>{0, 1, 2, 3});

    // opaque entries take 0,1,2 -> transparent lands on 3
    ColorTable local2 = table({{0, 0, 0}, {80, 80, 80}, {160, 160, 160}, {5, 5, 5}});
    RemapTable r2 = build_remap(local2, kGct, 3);
    REQUIRE(r2.transparent_remap == std::make_pair(uint8_t(3), uint8_t(3)));

    // ... even when that frees index 0
    ColorTable local3 = table({{200, 200, 200}, {80, 80, 80}, {160, 160, 160}, {240, 240, 240}});
    RemapTable r3 = build_remap(local3, kGct, 0);
    REQUIRE(r3.transparent_remap == std::make_pair(uint8_t(0), uint8_t(0)));
    REQUIRE(r3.mapping == std::vector<uint8_t>{0, 1, 2, 3});
}

TEST_CASE("no free slot for the transparent index", "[decimator]") {
    ColorTable g2 = table({{0, 0, 0}, {255, 255, 255}});
    ColorTable local = table({{0, 0, 0}, {255, 255, 255}, {4, 4, 4}, {250, 250, 250}});
    REQUIRE_THROWS_AS(build_remap(local, g2, 2), NoFreeTransparentSlot);
    REQUIRE_NOTHROW(build_remap(local, g2)); // fine without transparency
}

TEST_CASE("build_remap validates the transparent slot", "[decimator]") {
    REQUIRE_THROWS_AS(build_remap(kGct, kGct, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(build_remap(kGct, kGct, -1), std::invalid_argument);
}

TEST_CASE("duplicate table is removed losslessly at t=0", "[decimator]") {
    GifFile g = make_file(kGct, kGct, {0, 1, 2, 3});
    size_t original_size = encode(g).size();
    DecimationResult r = decimate(g, 0.0);

    REQUIRE(r.outcome.lcts_before == 1);
    REQUIRE(r.outcome.lcts_removed == 1);
    REQUIRE(r.outcome.frames[0].action == FrameAction::removed);
    REQUIRE(r.outcome.frames[0].dissimilarity == 0.0);
    REQUIRE_FALSE(r.gif.frames[0].lct.has_value());
    REQUIRE(r.encoded.size() < original_size);
    REQUIRE(r.report.quality.mse_max == 0.0);
    REQUIRE(std::isinf(r.report.quality.psnr_avg));

    RenderedFrame before = render(g.frames[0], *g.gct);
    RenderedFrame after = render(r.gif.frames[0], *r.gif.gct);
    REQUIRE(before.pixels == after.pixels);
    REQUIRE(before.opaque == after.opaque);
}

TEST_CASE("dissimilar table is kept below its threshold", "[decimator]") {
    ColorTable far = table({{255, 0, 0}, {0, 255, 0}, {0, 0, 255}, {255, 255, 0}});
    GifFile g = make_file(kGct, far, {0, 1, 2, 3});

    DecimationResult keep = decimate(g, 0.05);
    REQUIRE(keep.outcome.frames[0].action == FrameAction::kept);
    REQUIRE(keep.outcome.lcts_removed == 0);
    REQUIRE(keep.gif == g); // untouched, including the LCT
    REQUIRE(std::isinf(keep.report.quality.psnr_avg));

    DecimationResult drop = decimate(g, 1.0);
    REQUIRE(drop.outcome.frames[0].action == FrameAction::removed);
    REQUIRE(drop.report.quality.mse_max > 0.0);

    // error bound: frame MSE can't exceed the square of the worst entry
    auto d = table_dissimilarity(far, kGct);
    double worst = *std::max_element(d.per_entry_distance.begin(), d.per_entry_distance.end());
    REQUIRE(drop.report.quality.per_frame_mse[0] <= worst * worst + 1e-12);
}

TEST_CASE("threshold boundary is inclusive", "[decimator]") {
    ColorTable local = table({{0, 0, 0}, {80, 80, 80}, {160, 160, 160}, {250, 240, 230}});
    GifFile g = make_file(kGct, local, {0, 1, 2, 3});
    double d = table_dissimilarity(local, *g.gct).dissimilarity;
    REQUIRE(d > 0.0);
    // exactly at D the table still goes (the predicate is D <= t)
    REQUIRE(decimate(g, d).outcome.frames[0].action == FrameAction::removed);
    REQUIRE(decimate(g, d * 0.999).outcome.frames[0].action == FrameAction::kept);
}

TEST_CASE("remapped pixels are nearest-entry optimal", "[decimator]") {
    ColorTable local = table({{13, 17, 19}, {90, 70, 110}, {150, 170, 160}, {230, 250, 210}});
    GifFile g = make_file(kGct, local, {0, 1, 2, 3});
    DecimationResult r = decimate(g, 1.0);
    REQUIRE(r.outcome.frames[0].action == FrameAction::removed);
    for (size_t i = 0; i < 4; ++i) {
        Rgb orig_color = local[g.frames[0].index_map[i]];
        Rgb new_color = (*r.gif.gct)[r.gif.frames[0].index_map[i]];
        REQUIRE(color_distance(orig_color, new_color) ==
                nearest_index(orig_color, kGct).distance);
    }
}

TEST_CASE("transparency survives decimation", "[decimator]") {
    // local: opaque entries map to 0,1,3; the transparent slot 2 has a
    // wild color that must not influence D or the remap
    ColorTable local = table({{0, 0, 0}, {80, 80, 80}, {255, 0, 0}, {240, 240, 240}});
    GifFile g = make_file(kGct, local, {0, 1, 2, 3});
    GraphicControl gce;
    gce.transparency = true;
    gce.transparent_index = 2;
    g.frames[0].gce = gce;

    // D excludes the transparent entry, so it is exactly 0 here
    DecimationResult r = decimate(g, 0.0);
    REQUIRE(r.outcome.frames[0].action == FrameAction::removed);
    REQUIRE(r.outcome.frames[0].dissimilarity == 0.0);
    REQUIRE(r.gif.frames[0].gce->transparent_index == 2); // smallest free slot
    REQUIRE(r.gif.frames[0].index_map == std::vector<uint8_t>{0, 1, 2, 3});

    RenderedFrame before = render(g.frames[0], local);
    RenderedFrame after = render(r.gif.frames[0], *r.gif.gct);
    REQUIRE(before.opaque == after.opaque);
    for (size_t i = 0; i < before.pixels.size(); ++i)
        if (before.opaque[i]) REQUIRE(before.pixels[i] == after.pixels[i]);
}

TEST_CASE("frame is skipped when transparency cannot move", "[decimator]") {
    ColorTable g2 = table({{0, 0, 0}, {255, 255, 255}});
    ColorTable local = table({{0, 0, 0}, {255, 255, 255}, {4, 4, 4}, {250, 250, 250}});
    GifFile g = make_file(g2, local, {0, 1, 2, 3});
    GraphicControl gce;
    gce.transparency = true;
    gce.transparent_index = 2;
    g.frames[0].gce = gce;

    DecimationResult r = decimate(g, 1.0);
    REQUIRE(r.outcome.frames[0].action == FrameAction::skipped_transparency);
    REQUIRE(r.gif == g);
    REQUIRE(r.outcome.lcts_removed == 0);
}

TEST_CASE("files without a GCT pass through", "[decimator]") {
    GifFile g = make_file(kGct, kGct, {0, 1, 2, 3});
    g.gct.reset();
    DecimationResult r = decimate(g, 1.0);
    REQUIRE(r.outcome.frames[0].action == FrameAction::skipped_no_gct);
    REQUIRE(r.gif == g);
    REQUIRE(decode(r.encoded) == g);
}

TEST_CASE("frames without an LCT are recorded as such", "[decimator]") {
    GifFile g = make_file(kGct, std::nullopt, {0, 1, 2, 3});
    DecimationResult r = decimate(g, 0.5);
    REQUIRE(r.outcome.frames[0].action == FrameAction::no_lct);
    REQUIRE(r.outcome.lcts_before == 0);
    REQUIRE(r.gif == g);
}

TEST_CASE("decimation is idempotent", "[decimator]") {
    std::mt19937 rng(77);
    GifFile g = synth::synth_gif(rng);
    DecimationResult first = decimate(g, 0.1);
    DecimationResult second = decimate(first.gif, 0.1);
    REQUIRE(second.outcome.lcts_removed == 0);
    REQUIRE(second.encoded == first.encoded);
}

TEST_CASE("small local table moves to the bigger global one", "[decimator]") {
    // 4-entry LCT duplicating entries of a 256-entry GCT: removal changes
    // the LZW minimum code size from 2 to 8 and the indices follow
    std::mt19937 rng(31);
    ColorTable big = synth::detail::random_table(rng, 256, 0, 255);
    ColorTable small{std::vector<Rgb>{big[200], big[100], big[33], big[7]}};
    GifFile g = make_file(big, small, {0, 1, 2, 3});

    DecimationResult r = decimate(g, 0.0);
    REQUIRE(r.outcome.frames[0].action == FrameAction::removed);
    REQUIRE(r.gif.frames[0].index_map == std::vector<uint8_t>{200, 100, 33, 7});
    REQUIRE(r.report.quality.mse_max == 0.0);

    GifFile back = decode(r.encoded);
    REQUIRE(back == r.gif);
    RenderedFrame before = render(g.frames[0], small);
    RenderedFrame after = render(back.frames[0], *back.gct);
    REQUIRE(before.pixels == after.pixels);
}

TEST_CASE("report bookkeeping", "[decimator]") {
    GifFile g = make_file(kGct, kGct, {0, 1, 2, 3});
    size_t actual = encode(g).size();

    DecimationResult r = decimate(g, 0.0, actual + 100);
    REQUIRE(r.report.bytes_before == actual + 100); // caller-supplied size wins
    REQUIRE(r.report.bytes_after == r.encoded.size());
    REQUIRE_THAT(r.report.saving_bpp, WithinAbs(r.report.bpp_before - r.report.bpp_after, 1e-15));
    REQUIRE(r.report.threshold == 0.0);
    REQUIRE(r.report.lcts_before == 1);
    REQUIRE(r.report.lcts_removed == 1);

    DecimationResult d = decimate(g, 0.0);
    REQUIRE(d.report.bytes_before == actual); // derived when not supplied
}

TEST_CASE("threshold validation", "[decimator]") {
    GifFile g = make_file(kGct, kGct, {0, 1, 2, 3});
    REQUIRE_THROWS_AS(decimate(g, -0.001), std::invalid_argument);
    REQUIRE_THROWS_AS(decimate(g, 1.001), std::invalid_argument);
    REQUIRE_THROWS_AS(decimate(g, std::numeric_limits<double>::quiet_NaN()),
                      std::invalid_argument);

    std::vector<double> descending{0.2, 0.1};
    REQUIRE_THROWS_AS(sweep(g, descending), std::invalid_argument);
    std::vector<double> out_of_range{0.5, 1.5};
    REQUIRE_THROWS_AS(sweep(g, out_of_range), std::invalid_argument);
}

TEST_CASE("sweep rows match independent runs", "[decimator]") {
    std::mt19937 rng(123);
    GifFile g = synth::synth_gif(rng);
    std::vector<double> grid{0.0, 0.05, 0.2};
    auto rows = sweep(g, grid, 5000);
    REQUIRE(rows.size() == 3);
    for (size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(rows[i].first == grid[i]);
        DecimationResult direct = decimate(g, grid[i], 5000);
        REQUIRE(rows[i].second.bytes_after == direct.report.bytes_after);
        REQUIRE(rows[i].second.lcts_removed == direct.report.lcts_removed);
        REQUIRE(rows[i].second.quality.mse_avg == direct.report.quality.mse_avg);
    }
}

TEST_CASE("default grid", "[decimator]") {
    auto grid = default_threshold_grid();
    REQUIRE(grid.size() == 25);
    REQUIRE(grid.front() == 0.0);
    REQUIRE(grid.back() == 0.25);
    REQUIRE(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("action names", "[decimator]") {
    REQUIRE(std::string(to_string(FrameAction::removed)) == "removed");
    REQUIRE(std::string(to_string(FrameAction::kept)) == "kept");
    REQUIRE(std::string(to_string(FrameAction::no_lct)) == "no_lct");
    REQUIRE(std::string(to_string(FrameAction::skipped_no_gct)) == "skipped_no_gct");
    REQUIRE(std::string(to_string(FrameAction::skipped_transparency)) == "skipped_transparency");
}
