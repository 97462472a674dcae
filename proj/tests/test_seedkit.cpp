#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "unlbench/seedkit.hpp"

using namespace unlbench::seedkit;

namespace {

std::vector<std::uint64_t> first_draws(Seed root, const char* label, int n) {
    auto stream = derive_stream(root, label);
    std::vector<std::uint64_t> out;
    for (int k = 0; k < n; ++k) out.push_back(stream.next_u64());
    return out;
}

}  // namespace

TEST_CASE("derive_stream is deterministic for identical inputs") {
    CHECK(first_draws(Seed{7}, "train", 8) == first_draws(Seed{7}, "train", 8));
}

TEST_CASE("distinct labels and distinct roots give distinct sequences") {
    CHECK(first_draws(Seed{7}, "train", 8) != first_draws(Seed{7}, "unlearn", 8));
    CHECK(first_draws(Seed{7}, "x", 8) != first_draws(Seed{8}, "x", 8));
}

TEST_CASE("labels must be nonempty ascii") {
    CHECK_THROWS(derive_stream(Seed{1}, ""));
    CHECK_THROWS(derive_stream(Seed{1}, "caf\xc3\xa9"));
}

TEST_CASE("draw_uniform basics") {
    auto stream = derive_stream(Seed{11}, "u");

    SUBCASE("n = 0 leaves the state untouched") {
        auto copy = stream;
        CHECK(draw_uniform(stream, 0).empty());
        CHECK(stream.next_u64() == copy.next_u64());
    }

    SUBCASE("values live in [0, 1) and the mean settles near 1/2") {
        const auto values = draw_uniform(stream, 10000);
        double mean = 0.0;
        for (const double v : values) {
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
            mean += v;
        }
        mean /= static_cast<double>(values.size());
        CHECK(mean > 0.47);
        CHECK(mean < 0.53);
    }

    SUBCASE("replay from a copied state reproduces the values") {
        auto copy = stream;
        CHECK(draw_uniform(stream, 5) == draw_uniform(copy, 5));
    }
}

TEST_CASE("draw_gaussian basics") {
    auto stream = derive_stream(Seed{12}, "g");

    SUBCASE("n = 0") { CHECK(draw_gaussian(stream, 0).empty()); }

    SUBCASE("sample variance close to 1") {
        const auto values = draw_gaussian(stream, 10000);
        double mean = 0.0;
        for (const double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (const double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(values.size());
        CHECK(var > 0.9);
        CHECK(var < 1.1);
    }

    SUBCASE("replay determinism") {
        auto copy = stream;
        CHECK(draw_gaussian(stream, 7) == draw_gaussian(copy, 7));
    }
}

TEST_CASE("shuffle") {
    auto stream = derive_stream(Seed{13}, "s");

    SUBCASE("empty and singleton") {
        CHECK(shuffled(stream, std::vector<int>{}).empty());
        CHECK(shuffled(stream, std::vector<int>{42}) == std::vector<int>{42});
    }

    SUBCASE("same state, same permutation") {
        auto copy = stream;
        const std::vector<int> items = {1, 2, 3, 4, 5, 6};
        CHECK(shuffled(stream, items) == shuffled(copy, items));
    }

    SUBCASE("permutation property over random lengths") {
        auto len_stream = derive_stream(Seed{14}, "len");
        for (int rep = 0; rep < 50; ++rep) {
            const auto n = static_cast<std::size_t>(len_stream.next_below(40));
            std::vector<int> items(n);
            std::iota(items.begin(), items.end(), 0);
            auto mixed = shuffled(stream, items);
            std::sort(mixed.begin(), mixed.end());
            CHECK(mixed == items);
        }
    }
}

TEST_CASE("sibling streams are isolated") {
    auto a = derive_stream(Seed{21}, "a");
    auto b1 = derive_stream(Seed{21}, "b");
    auto b2 = derive_stream(Seed{21}, "b");
    (void)draw_uniform(a, 100);  // consuming a must not disturb b
    CHECK(draw_uniform(b1, 8) == draw_uniform(b2, 8));
}
