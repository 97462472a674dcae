#ifndef UNLBENCH_SEEDKIT_HPP
#define UNLBENCH_SEEDKIT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace unlbench::seedkit {

// A 64-bit seed value. Every trained model, unlearned model and metric in the
// harness is a pure function of the seeds declared for it.
struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(const Seed&, const Seed&) = default;
};

// Deterministic counter-based stream (splitmix64 core). A stream is fully
// determined by its (root seed, label) lineage; sibling streams derived with
// distinct labels never share state.
class RngStream {
  public:
    RngStream(Seed root, std::string label);

    std::uint64_t next_u64();

    // One draw in [0, 1), consuming exactly one 64-bit step.
    double next_unit();

    // Unbiased-enough integer in [0, bound) via 128-bit multiply-shift.
    std::uint64_t next_below(std::uint64_t bound);

    Seed root() const { return root_; }
    const std::string& label() const { return label_; }

  private:
    std::uint64_t state_;
    Seed root_;
    std::string label_;
};

// Derives an independent stream from (root, label). Label must be nonempty
// ASCII; any 64-bit root value is valid.
RngStream derive_stream(Seed root, std::string_view label);

std::vector<double> draw_uniform(RngStream& stream, std::size_t n);

// Standard normal variates, Box-Muller on consecutive uniform pairs. A call
// consumes 2*ceil(n/2) uniform draws regardless of platform.
std::vector<double> draw_gaussian(RngStream& stream, std::size_t n);

// Fisher-Yates permutation of `items`, deterministic given stream state.
template <typename T>
std::vector<T> shuffled(RngStream& stream, std::vector<T> items) {
    if (items.size() < 2) return items;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(stream.next_below(i + 1));
        std::swap(items[i], items[j]);
    }
    return items;
}

}  // namespace unlbench::seedkit

#endif
