#pragma once

#include <string>
#include <vector>

// Long-running scenarios shared by the acceptance checks. Each returns the
// numbers it judged plus a text artifact whose bytes must not depend on the
// worker count.

namespace acceptance {

struct Outcome {
    bool pass = false;
    std::string detail;
    std::string artifact;
};

Outcome gaussian_benchmark(unsigned workers);

struct RoundTrip {
    Outcome smile;    // deviation bound and first-vs-third ordering
    Outcome identity; // implicit residuals at -sqrt(w), 0, +sqrt(w)
};
RoundTrip smile_round_trip(unsigned workers);

Outcome swaption_round_trip(unsigned workers);

} // namespace acceptance
