#include <doctest.h>

#include <set>

#include "hvis/assignment.hpp"
#include "hvis/error.hpp"
#include "oracles.hpp"

using namespace hvis;

namespace {

bool throws_code(ErrorCode code, const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

AssignConfig config(Strategy s) {
    AssignConfig cfg;
    cfg.strategy = s;
    cfg.edge_samples = 100000;
    return cfg;
}

std::int64_t chebyshev_x2(Point pixel, Point center_x2) {
    return std::max(std::abs(2 * pixel.x - center_x2.x), std::abs(2 * pixel.y - center_x2.y));
}

// L along the left and bottom edges of [x0, x1) x [y0, y1), and its mirror
// along the right and top edges: identical boxes, far-apart inner centers.
std::vector<InstanceAnnotation> mirrored_pair(int size, int x0, int y0, int x1, int y1, int t) {
    BinaryMask b(size, size);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (x >= x1 - t || y < y0 + t) {
                b.set(x, y);
            }
        }
    }
    return {make_instance(1, oracle::l_mask(size, size, x0, y0, x1, y1, t)),
            make_instance(2, std::move(b))};
}

}  // namespace

TEST_CASE("build_grids") {
    const auto g = build_grids(512, 512, 8);
    REQUIRE(g.size() == 3);
    CHECK(g[0].width == 64);
    CHECK(g[0].height == 64);
    CHECK(g[1].width == 32);
    CHECK(g[2].width == 16);
    CHECK(g[0].level == 3);
    CHECK(g[2].level == 5);
    CHECK(g[1].stride == 16);
    CHECK(g[2].stride == 32);
    const auto odd = build_grids(100, 60, 8);
    CHECK((odd[0].width == 13 && odd[0].height == 8));
    CHECK((odd[1].width == 7 && odd[1].height == 4));
    CHECK((odd[2].width == 4 && odd[2].height == 2));
    CHECK(throws_code(ErrorCode::InvalidDims, [] { build_grids(64, 64, 0); }));
    CHECK(throws_code(ErrorCode::InvalidDims, [] { build_grids(4, 64, 8); }));
}

TEST_CASE("cell_center") {
    const auto g = build_grids(512, 512, 8);
    CHECK(cell_center(g[0], 0, 0) == Point{4, 4});
    CHECK(cell_center(g[0], 3, 2) == Point{28, 20});
    CHECK(throws_code(ErrorCode::OutOfRange, [&] { cell_center(g[0], 64, 0); }));
    CHECK(throws_code(ErrorCode::OutOfRange, [&] { cell_center(g[0], 0, -1); }));
    // odd stride floors the half
    const FeatureGrid odd{3, 5, 4, 4, 20, 20};
    CHECK(cell_center(odd, 1, 1) == Point{7, 7});
}

TEST_CASE("level_for_instance") {
    const auto inst = [](int side) {
        return make_instance(1, oracle::rect_mask(256, 256, 0, 0, side, 4));
    };
    CHECK(level_for_instance(inst(32)) == 3);
    CHECK(level_for_instance(inst(64)) == 3);
    CHECK(level_for_instance(inst(65)) == 4);
    CHECK(level_for_instance(inst(128)) == 4);
    CHECK(level_for_instance(inst(200)) == 5);
    CHECK(throws_code(ErrorCode::SchemaError, [] { make_instance(0, oracle::rect_mask(4, 4, 0, 0, 1, 1)); }));
}

TEST_CASE("assign: CenterBox radius rule") {
    // box [0, 9) x [0, 9): pixel-index center (4, 4) sits on the cell center of (0, 0)
    const auto inst = make_instance(3, oracle::rect_mask(64, 64, 0, 0, 9, 9));
    const auto grids = build_grids(64, 64, 8);
    const auto a = assign(std::vector{inst}, grids, config(Strategy::CenterBox));
    CHECK(a[0].label(0, 0) == 3);
    // neighbours are 8 px away, beyond the 4 px half-stride
    CHECK(a[0].positive_count() == 1);
    CHECK(a[1].positive_count() == 0);

    // a center exactly between cells reaches both (inclusive radius)
    const auto mid = make_instance(1, oracle::rect_mask(64, 64, 0, 0, 17, 9));
    const auto b = assign(std::vector{mid}, grids, config(Strategy::CenterBox));
    CHECK(b[0].label(0, 0) == 1);
    CHECK(b[0].label(1, 0) == 1);
    CHECK(b[0].positive_count() == 2);
}

TEST_CASE("assign: InsideBox") {
    const auto inst = make_instance(2, oracle::rect_mask(32, 32, 0, 0, 16, 8));
    const auto a = assign(std::vector{inst}, build_grids(32, 32, 8), config(Strategy::InsideBox));
    // cell centers (4, 4) and (12, 4)
    CHECK(a[0].positive_count() == 2);
    CHECK(a[0].label(0, 0) == 2);
    CHECK(a[0].label(1, 0) == 2);
}

TEST_CASE("assign: identical box centers make every CenterBox positive ambiguous") {
    const auto pair = mirrored_pair(64, 8, 8, 41, 41, 6);
    REQUIRE(pair[0].box == pair[1].box);
    const auto grids = build_grids(64, 64, 8);
    const auto a = assign(pair, grids, config(Strategy::CenterBox));
    std::int64_t claimed = 0;
    for (const auto& s : a) {
        for (std::size_t i = 0; i < s.labels.size(); ++i) {
            if (!s.claims[i].empty()) {
                ++claimed;
                CHECK(s.labels[i] == kAmbiguousLabel);
                CHECK(s.claims[i] == std::vector<int>{1, 2});
            }
        }
    }
    CHECK(claimed >= 1);
    const auto amb = detect_ambiguous(a);
    CHECK(static_cast<std::int64_t>(amb.size()) == claimed);
    for (const auto& c : amb) {
        CHECK(c.ids == std::vector<int>{1, 2});
    }
}

TEST_CASE("assign: far-apart inner centers never share a cell") {
    const auto pair = mirrored_pair(64, 8, 8, 41, 41, 6);
    const auto grids = build_grids(64, 64, 8);
    const auto a = assign(pair, grids, config(Strategy::InnerCenter));
    const Point c1 = inner_center(pair[0].mask, 100000);
    const Point c2 = inner_center(pair[1].mask, 100000);
    CHECK(std::max(std::abs(c1.x - c2.x), std::abs(c1.y - c2.y)) > 8);
    CHECK(detect_ambiguous(a).empty());
    // enumeration: no cell is within the half-stride of both centers
    const auto& g = a[0].grid;
    for (int cy = 0; cy < g.height; ++cy) {
        for (int cx = 0; cx < g.width; ++cx) {
            const Point p = cell_center(g, cx, cy);
            CHECK_FALSE((chebyshev_x2(p, {2 * c1.x, 2 * c1.y}) <= 8 &&
                         chebyshev_x2(p, {2 * c2.x, 2 * c2.y}) <= 8));
        }
    }
    CHECK(a[0].positive_count() >= 2);
}

TEST_CASE("detect_ambiguous: disjoint instances and a triple stack") {
    const auto grids = build_grids(64, 64, 8);
    const std::vector disjoint{make_instance(1, oracle::rect_mask(64, 64, 0, 0, 10, 10)),
                               make_instance(2, oracle::rect_mask(64, 64, 40, 40, 60, 60))};
    for (auto s : {Strategy::InsideBox, Strategy::CenterBox, Strategy::CentroidMask,
                   Strategy::InnerCenter}) {
        CHECK(detect_ambiguous(assign(disjoint, grids, config(s))).empty());
    }
    const std::vector stack{make_instance(4, oracle::rect_mask(64, 64, 0, 0, 9, 9)),
                            make_instance(2, oracle::rect_mask(64, 64, 2, 2, 7, 7)),
                            make_instance(7, oracle::rect_mask(64, 64, 3, 3, 6, 6))};
    const auto amb = detect_ambiguous(assign(stack, grids, config(Strategy::CenterBox)));
    REQUIRE(amb.size() == 1);
    CHECK(amb[0].level == 3);
    CHECK(amb[0].cx == 0);
    CHECK(amb[0].cy == 0);
    CHECK(amb[0].ids == std::vector<int>{2, 4, 7});
}

TEST_CASE("resolve_ambiguous") {
    const auto grids = build_grids(64, 64, 8);
    // ids 2 and 5 share the box center (4, 4); areas 81 and 9
    const std::vector two{make_instance(2, oracle::rect_mask(64, 64, 0, 0, 9, 9)),
                          make_instance(5, oracle::rect_mask(64, 64, 3, 3, 6, 6))};
    const auto raw = assign(two, grids, config(Strategy::CenterBox));
    CHECK(raw[0].label(0, 0) == kAmbiguousLabel);
    CHECK(resolve_ambiguous(raw[0], {AmbiguityPolicy::SmallestArea}).label(0, 0) == 5);
    CHECK(resolve_ambiguous(raw[0], {AmbiguityPolicy::ToNegative}).label(0, 0) == kAmbiguousLabel);
    CHECK(resolve_ambiguous(raw[0], {AmbiguityPolicy::ToNegative, false}).label(0, 0) ==
          kBackgroundLabel);
    // equal areas: smaller id wins
    const std::vector tie{make_instance(6, oracle::rect_mask(64, 64, 0, 0, 9, 5)),
                          make_instance(3, oracle::rect_mask(64, 64, 0, 4, 9, 9))};
    auto t = assign(tie, grids, config(Strategy::InsideBox));
    t[0] = resolve_ambiguous(t[0], {AmbiguityPolicy::SmallestArea});
    CHECK(t[0].label(0, 0) == 3);
    // no ambiguity: unchanged
    const std::vector one{make_instance(1, oracle::rect_mask(64, 64, 0, 0, 9, 9))};
    const auto u = assign(one, grids, config(Strategy::CenterBox));
    CHECK(resolve_ambiguous(u[0], {AmbiguityPolicy::SmallestArea}).labels == u[0].labels);
    CHECK(resolve_ambiguous(u[0], {AmbiguityPolicy::ToNegative}).labels == u[0].labels);
}

TEST_CASE("inside_mask_fraction") {
    const auto grids = build_grids(64, 64, 8);
    const std::vector solid{make_instance(1, oracle::rect_mask(64, 64, 5, 5, 40, 30))};
    for (auto s : {Strategy::InsideBox, Strategy::CenterBox, Strategy::CentroidMask,
                   Strategy::InnerCenter}) {
        const auto a = assign(solid, grids, config(s));
        CHECK(inside_mask_fraction(a, solid).fraction == 1.0);
    }
    // U: the box center falls in the gap between the arms
    const std::vector thin{make_instance(1, oracle::u_mask(64, 64, 0, 0, 40, 40, 4))};
    const auto a = assign(thin, grids, config(Strategy::CenterBox));
    const auto r = inside_mask_fraction(a, thin);
    CHECK(r.fraction < 1.0);
    CHECK(r.positives == r.inside + static_cast<std::int64_t>(r.outside.size()));
    CHECK(throws_code(ErrorCode::NoPositives, [&] {
        inside_mask_fraction(assign(std::vector<InstanceAnnotation>{}, grids, config(Strategy::CenterBox)),
                             std::vector<InstanceAnnotation>{});
    }));
}

TEST_CASE("assign invariants on random scenes") {
    Rng rng(31);
    for (int t = 0; t < 40; ++t) {
        const int w = 64 + static_cast<int>(rng.uniform_index(100));
        const int h = 64 + static_cast<int>(rng.uniform_index(100));
        std::vector<InstanceAnnotation> inst;
        const int n = 1 + static_cast<int>(rng.uniform_index(5));
        std::set<int> ids;
        for (int i = 0; i < n; ++i) {
            inst.push_back(make_instance(i + 1, oracle::random_blob(rng, w, h)));
            ids.insert(i + 1);
        }
        const auto grids = build_grids(w, h, 4 + static_cast<int>(rng.uniform_index(5)));
        for (auto s : {Strategy::InsideBox, Strategy::CenterBox, Strategy::CentroidMask,
                       Strategy::InnerCenter}) {
            AssignConfig cfg;
            cfg.strategy = s;
            cfg.seed = static_cast<std::uint64_t>(t);
            const auto a = assign(inst, grids, cfg);
            REQUIRE(a.size() == 3);
            const auto again = assign(inst, grids, cfg);
            for (std::size_t l = 0; l < a.size(); ++l) {
                REQUIRE(a[l].labels == again[l].labels);
                const auto resolved = resolve_ambiguous(a[l], {AmbiguityPolicy::SmallestArea});
                for (std::size_t i = 0; i < a[l].labels.size(); ++i) {
                    const int label = a[l].labels[i];
                    REQUIRE((label == -1 || label == 0 || ids.contains(label)));
                    // single label after resolution
                    REQUIRE(resolved.labels[i] != kAmbiguousLabel);
                }
                if (s == Strategy::InsideBox) {
                    continue;
                }
                const auto& g = a[l].grid;
                for (int cy = 0; cy < g.height; ++cy) {
                    for (int cx = 0; cx < g.width; ++cx) {
                        const int label = a[l].label(cx, cy);
                        if (label < 1) {
                            continue;
                        }
                        const auto* summary = a[l].find_instance(label);
                        REQUIRE(summary != nullptr);
                        REQUIRE(chebyshev_x2(cell_center(g, cx, cy), summary->center_x2) <= g.stride);
                    }
                }
            }
            if (s == Strategy::InnerCenter) {
                for (const auto& i : inst) {
                    const Point c = inner_center(i.mask, cfg.edge_samples, cfg.seed);
                    const auto& grid = *std::find_if(a.begin(), a.end(), [&](const SampleAssignment& x) {
                        return x.grid.level == level_for_instance(i);
                    });
                    REQUIRE(grid.find_instance(i.instance_id)->center_x2 == Point{2 * c.x, 2 * c.y});
                }
            }
        }
    }
}

TEST_CASE("assign errors") {
    const auto grids = build_grids(64, 64, 8);
    const std::vector wrong{make_instance(1, oracle::rect_mask(32, 32, 0, 0, 4, 4))};
    CHECK(throws_code(ErrorCode::MaskOutOfBounds, [&] { assign(wrong, grids, {}); }));
    const std::vector big{make_instance(1, oracle::rect_mask(256, 256, 0, 0, 200, 4))};
    auto only_two = build_grids(256, 256, 8);
    only_two.pop_back();
    CHECK(throws_code(ErrorCode::GridMismatch, [&] { assign(big, only_two, {}); }));
}

TEST_CASE("mix_positive_sets") {
    const auto grids = build_grids(128, 128, 8);
    std::vector<InstanceAnnotation> inst;
    Rng rng(77);
    for (int i = 0; i < 4; ++i) {
        inst.push_back(make_instance(i + 1, oracle::random_blob(rng, 128, 128)));
    }
    AssignConfig wide;
    wide.strategy = Strategy::InsideBox;
    const auto sc = resolve_ambiguous(assign(inst, grids, config(Strategy::CenterBox))[0]);
    const auto si = resolve_ambiguous(assign(inst, grids, wide)[0]);
    CHECK(mix_positive_sets(sc, si, 0, 1).labels == sc.labels);

    const auto full = mix_positive_sets(sc, si, 100, 1);
    for (std::size_t i = 0; i < sc.labels.size(); ++i) {
        const int a = sc.labels[i];
        const int b = si.labels[i];
        int expect = a;
        if (b >= 1) {
            expect = (a == 0 || a == b) ? b : kAmbiguousLabel;
        }
        REQUIRE(full.labels[i] == expect);
    }

    const auto half = mix_positive_sets(sc, si, 50, 9);
    CHECK(half.labels == mix_positive_sets(sc, si, 50, 9).labels);
    const std::int64_t donors = si.positive_count();
    std::int64_t changed = 0;
    for (std::size_t i = 0; i < sc.labels.size(); ++i) {
        if (half.claims[i] != sc.claims[i]) {
            REQUIRE(si.labels[i] >= 1);
            ++changed;
        }
    }
    CHECK(changed <= (50 * donors + 50) / 100);

    // empty base: every drawn donor shows up
    auto empty_base = sc;
    std::fill(empty_base.labels.begin(), empty_base.labels.end(), 0);
    for (auto& c : empty_base.claims) {
        c.clear();
    }
    const auto only = mix_positive_sets(empty_base, si, 50, 9);
    CHECK(only.positive_count() == (50 * donors + 50) / 100);
    CHECK(throws_code(ErrorCode::GridMismatch, [&] {
        mix_positive_sets(sc, resolve_ambiguous(assign(inst, grids, wide)[1]), 50, 1);
    }));
    CHECK(throws_code(ErrorCode::InvalidConfig, [&] { mix_positive_sets(sc, si, 101, 1); }));
}

TEST_CASE("strategy names") {
    for (auto s : {Strategy::InsideBox, Strategy::CenterBox, Strategy::CentroidMask,
                   Strategy::InnerCenter}) {
        CHECK(parse_strategy(to_string(s)) == s);
    }
    CHECK(parse_policy("smallest-area") == AmbiguityPolicy::SmallestArea);
    CHECK(throws_code(ErrorCode::InvalidConfig, [] { parse_strategy("fcos"); }));
}
