#include "unlbench/seedkit.hpp"

#include <cmath>
#include <stdexcept>

namespace unlbench::seedkit {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 output function (Vigna's fixed-increment SplittableRandom).
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

RngStream::RngStream(Seed root, std::string label)
    : root_(root), label_(std::move(label)) {
    if (label_.empty()) {
        throw std::invalid_argument("rng stream label must be nonempty");
    }
    for (const char c : label_) {
        if (static_cast<unsigned char>(c) > 0x7F) {
            throw std::invalid_argument("rng stream label must be ASCII");
        }
    }
    // Hash-combine the root and the label hash so that distinct labels from
    // one root start in decorrelated states.
    state_ = mix64(mix64(root_.value + kGolden) ^ fnv1a64(label_));
}

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("next_below: bound must be positive");
    }
    const unsigned __int128 product =
        static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(product >> 64);
}

RngStream derive_stream(Seed root, std::string_view label) {
    return RngStream(root, std::string(label));
}

std::vector<double> draw_uniform(RngStream& stream, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(stream.next_unit());
    }
    return out;
}

std::vector<double> draw_gaussian(RngStream& stream, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    while (out.size() < n) {
        const double u1 = stream.next_unit();
        const double u2 = stream.next_unit();
        // 1 - u1 lies in (0, 1], so the log is finite.
        const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
        const double angle = kTwoPi * u2;
        out.push_back(radius * std::cos(angle));
        if (out.size() < n) {
            out.push_back(radius * std::sin(angle));
        }
    }
    return out;
}

}  // namespace unlbench::seedkit
