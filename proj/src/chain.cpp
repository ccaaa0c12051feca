#include "bilayer/chain.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace bilayer {

ChainExpr parse_chain(const std::string& text) {
    ChainExpr out;
    std::size_t i = 0;
    if (text.empty() || text[0] != '(') throw ParseError("chain must start with '(' at position 0", 0);
    ++i;
    while (i < text.size() && text[i] != ')') {
        const char c = text[i];
        if (c < '0' || c > '3')
            throw ParseError("expected a digit 0-3 at position " + std::to_string(i) + ", got '" +
                                 std::string(1, c) + "'",
                             i);
        ChainBlock b;
        b.digit = c - '0';
        ++i;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
            b.inverted = text[i] == '-';
            ++i;
        }
        out.blocks.push_back(b);
    }
    if (i >= text.size()) throw ParseError("missing ')' at position " + std::to_string(i), i);
    if (out.blocks.empty()) throw ParseError("empty chain at position " + std::to_string(i), i);
    if (i + 1 != text.size())
        throw ParseError("trailing characters at position " + std::to_string(i + 1), i + 1);
    return out;
}

std::string format_chain(const ChainExpr& chain) {
    std::string s = "(";
    for (const auto& b : chain.blocks) {
        s += static_cast<char>('0' + b.digit);
        if (b.inverted) s += '-';
    }
    return s + ")";
}

Kind chain_digit_kind(int digit) {
    switch (digit) {
        case 0: return Kind::Lens;
        case 1: return Kind::InternalDrop;
        case 2: return Kind::H1Drop;
        case 3: return Kind::HDrop;
    }
    throw UsageError("chain digit out of range: " + std::to_string(digit));
}

double block_footprint(int digit, double sigma, double well_depth, const HeightPair& h) {
    const double p = well_depth;
    switch (digit) {
        case 0: return h.h * std::sqrt(2.0 * sigma / ((sigma + 1.0) * p));
        case 1: return h.h1 * std::sqrt(2.0 * sigma / p);
        case 2: return h.h1 * std::sqrt(2.0 * (sigma + 1.0) / p);
        case 3: return h.h * std::sqrt(2.0 / p);
    }
    throw UsageError("chain digit out of range: " + std::to_string(digit));
}

ChainLayout layout_chain(const ChainExpr& chain, double sigma, double well_depth, double L,
                         const std::vector<HeightPair>& heights,
                         const std::optional<std::vector<double>>& block_lengths) {
    const std::size_t n = chain.blocks.size();
    if (n == 0) throw UsageError("empty chain");
    if (heights.size() != 1 && heights.size() != n)
        throw UsageError("need one height pair per block (or a single shared pair)");
    auto height = [&](std::size_t i) { return heights.size() == 1 ? heights[0] : heights[i]; };

    std::vector<double> lengths;
    if (block_lengths) {
        if (block_lengths->size() != n) throw UsageError("need one length per block");
        lengths = *block_lengths;
        const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
        if (std::abs(total - L) > 1e-12 * L) throw LayoutError("block lengths must sum to L");
    } else {
        lengths.assign(n, L / static_cast<double>(n));
    }

    std::vector<double> foot(n);
    double sum = 0.0;
    bool fits = true;
    for (std::size_t i = 0; i < n; ++i) {
        foot[i] = block_footprint(chain.blocks[i].digit, sigma, well_depth, height(i));
        sum += foot[i];
        fits = fits && foot[i] < lengths[i];
    }
    if (sum >= L || !fits) {
        std::ostringstream msg;
        msg << "chain " << format_chain(chain) << " does not fit in L=" << format_double(L) << ":";
        for (std::size_t i = 0; i < n; ++i)
            msg << " block" << i << "(footprint=" << format_double(foot[i]) << ",length=" << format_double(lengths[i])
                << ")";
        throw LayoutError(msg.str());
    }

    ChainLayout out;
    double start = -L;
    for (std::size_t i = 0; i < n; ++i) {
        const ChainBlock& b = chain.blocks[i];
        CompositeSpec spec;
        spec.kind = chain_digit_kind(b.digit);
        spec.sigma = sigma;
        spec.L = lengths[i];
        spec.well_depth = well_depth;
        spec.h1_m = height(i).h1;
        spec.h_m = height(i).h;
        // Natively the lens and internal drop are centred on the right end, the
        // h1- and h-drops peak on the left end.
        const bool native_right = b.digit <= 1;
        spec.inverted = native_right ? !b.inverted : b.inverted;
        out.solutions.push_back(build_one_cl(spec));
        out.starts.push_back(start);
        out.lengths.push_back(lengths[i]);
        start += lengths[i];
    }
    return out;
}

Profile assemble_chain(const ChainExpr& chain, const PotentialParams& p, double sigma, double L,
                       const std::vector<HeightPair>& heights, int grid_points, bool mollify,
                       const std::optional<std::vector<double>>& block_lengths) {
    if (grid_points < 2) throw UsageError("assemble_chain: need at least 2 grid points");
    const ChainLayout lay = layout_chain(chain, sigma, p.well_depth(), L, heights, block_lengths);
    std::vector<ProfileSampler> samplers;
    for (const auto& sol : lay.solutions) samplers.emplace_back(sol, p, mollify);

    Profile out;
    out.resolution_warning = mollify && grid_points < 16.0 * L / p.eps;
    const std::size_t n = lay.solutions.size();
    for (int i = 0; i < grid_points; ++i) {
        const double x = i == grid_points - 1 ? 0.0 : -L + L * i / (grid_points - 1);
        // Nodes belong to the block whose centre is nearer; a node on an interface
        // between equal-length blocks takes the mean of both so symmetric chains stay symmetric.
        std::size_t b = 0, tie = n;
        double best = std::abs(x - (lay.starts[0] + 0.5 * lay.lengths[0]));
        for (std::size_t k = 1; k < n; ++k) {
            const double d = std::abs(x - (lay.starts[k] + 0.5 * lay.lengths[k]));
            if (std::abs(d - best) <= 1e-12 * L) {
                tie = k;
            } else if (d < best) {
                best = d;
                b = k;
                tie = n;
            }
        }
        auto eval = [&](std::size_t k) {
            const double local = x - (lay.starts[k] + lay.lengths[k]);  // in [-length, 0]
            return samplers[k].at(std::min(0.0, std::max(-lay.lengths[k], local)));
        };
        HeightPair v = eval(b);
        if (tie < n) {
            const HeightPair w = eval(tie);
            v = {0.5 * (v.h1 + w.h1), 0.5 * (v.h + w.h)};
        }
        out.x.push_back(x);
        out.h1.push_back(v.h1);
        out.h.push_back(v.h);
    }
    return out;
}

}  // namespace bilayer
