#pragma once

#include <string>
#include <vector>

namespace fibmon {

// Scaled-down figure/criterion recipes with pinned tolerances. Each check
// prints one pass/fail line; `pass` is the conjunction.
struct ReproduceReport {
    std::string id;
    bool pass = false;
    std::vector<std::string> lines;
};

std::vector<std::string> reproduce_ids();

// Runs one recipe; throws std::invalid_argument for unknown ids.
// `threads` caps worker threads (0 = hardware concurrency).
ReproduceReport reproduce(const std::string& id, int threads = 0);

}  // namespace fibmon
