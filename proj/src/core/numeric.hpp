#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace ppm {

// Pairwise (cascade) summation of term(0) + ... + term(n-1). The reduction
// tree depends only on n, so results are reproducible.
template <class Term>
double pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
    const std::size_t n = end - begin;
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = begin + n / 2;
    return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

template <class Term>
double pairwise_sum(std::size_t n, const Term& term) {
    return pairwise_sum(std::size_t{0}, n, term);
}

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Parses a complete decimal token; returns false on trailing garbage.
bool parse_double(std::string_view token, double& out);

}  // namespace ppm
