#pragma once

#include <span>
#include <string>
#include <vector>

#include "dprh/likelihood.hpp"

namespace dprh {

// Dataset CSV schema: header "t1,d1,t2,d2", one row per pair.
std::string pairs_to_csv(std::span<const CensoredPair> pairs);
void write_pairs_csv(const std::string& path, std::span<const CensoredPair> pairs);
std::vector<CensoredPair> read_pairs_csv(const std::string& path);

// Shortest round-trip decimal form of a double (deterministic).
std::string format_double(double value);

}  // namespace dprh
