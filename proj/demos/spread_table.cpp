// Spread-betting study: a drifting point differential, three bet-able bands,
// and the sqrt feedback prices.  Prints the profit distribution summary.

#include <cstdio>

#include "bookmaker/simulation.hpp"

using namespace bookmaker;

int main(int argc, char** argv) {
    const std::size_t paths = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000;
    auto s = nba_experiment({}, paths, 1, 2);
    std::printf("spread betting, %zu paths\n", paths);
    std::printf("%10s %10s %10s %10s %10s %10s %10s\n", "mean", "sd", "min", "q25",
                "median", "q75", "max");
    std::printf("%10.1f %10.1f %10.1f %10.1f %10.1f %10.1f %10.1f\n", s.mean, s.sd, s.min,
                s.q25, s.median, s.q75, s.max);
    std::printf("every path profitable: %s\n", s.min > 0.0 ? "yes" : "no");
    std::printf("mean bets per outcome: %.0f / %.0f / %.0f\n", s.mean_final_counts[0],
                s.mean_final_counts[1], s.mean_final_counts[2]);
    return 0;
}
