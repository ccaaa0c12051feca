#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bilayer/composites.hpp"

namespace bilayer {

struct ParseError : UsageError {
    std::size_t position;
    ParseError(const std::string& what, std::size_t pos) : UsageError(what), position(pos) {}
};

struct LayoutError : UsageError {
    using UsageError::UsageError;
};

struct ChainBlock {
    int digit = 0;  // 0 lens, 1 internal drop, 2 h1-drop, 3 h-drop
    bool inverted = false;

    bool operator==(const ChainBlock&) const = default;
};

/// Chain shortcut such as "(2-0-02)": a digit followed by '-' is mirrored in x,
/// '+' or nothing is standard. Standard blocks sit with their centre (lens,
/// internal drop) or drop (h1-, h-drop) at the left end of their sub-interval.
struct ChainExpr {
    std::vector<ChainBlock> blocks;

    bool operator==(const ChainExpr&) const = default;
};

ChainExpr parse_chain(const std::string& text);
std::string format_chain(const ChainExpr& chain);
Kind chain_digit_kind(int digit);

/// Minimal sub-interval a one-CL block needs at the given heights.
double block_footprint(int digit, double sigma, double well_depth, const HeightPair& heights);

struct ChainLayout {
    std::vector<double> starts;   // left ends
    std::vector<double> lengths;
    std::vector<LeadingOrderSolution> solutions;  // oriented, on [-length, 0]
};

/// heights holds one pair per block, or a single pair used for all blocks.
/// block_lengths defaults to an equal split of L.
ChainLayout layout_chain(const ChainExpr& chain, double sigma, double well_depth, double L,
                         const std::vector<HeightPair>& heights,
                         const std::optional<std::vector<double>>& block_lengths = std::nullopt);

Profile assemble_chain(const ChainExpr& chain, const PotentialParams& p, double sigma, double L,
                       const std::vector<HeightPair>& heights, int grid_points, bool mollify = true,
                       const std::optional<std::vector<double>>& block_lengths = std::nullopt);

}  // namespace bilayer
