/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_TEXT_HPP_
#define TREECONTRIB_TEXT_HPP_

#include <optional>
#include <string>
#include <string_view>

namespace treecontrib {

// Shortest decimal form that parses back to the same double (round-trip exact).
std::string format_double(double value);

// Strict full-string parse; rejects leading/trailing junk and empty input.
std::optional<double> parse_double(std::string_view text);

}  // namespace treecontrib

#endif  // TREECONTRIB_TEXT_HPP_
