#ifndef UNLBENCH_TEXTIO_HPP
#define UNLBENCH_TEXTIO_HPP

#include <string>
#include <string_view>
#include <vector>

namespace unlbench::textio {

// Shortest round-trip decimal form of a double (std::to_chars). Deterministic
// and parse-exact, which the CSV determinism contract relies on.
std::string format_double(double v);

double parse_double(std::string_view s);  // throws on garbage
std::uint64_t parse_u64(std::string_view s);
long long parse_i64(std::string_view s);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace unlbench::textio

#endif
