#include "fibmon/reproduce.hpp"

#include <stdexcept>

namespace fibmon {

std::vector<std::string> reproduce_ids() { return {}; }

ReproduceReport reproduce(const std::string& id, int) {
    throw std::invalid_argument("unknown figure id: " + id);
}

}  // namespace fibmon
