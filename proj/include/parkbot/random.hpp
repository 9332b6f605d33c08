#pragma once

#include <cstdint>
#include <random>

namespace parkbot {

// Named sub-streams so that each noise source draws from its own sequence.
enum class Stream : std::uint32_t {
    Gps = 1,
    Gyro = 2,
    Odometry = 3,
    Detector = 4,
    Pickup = 5,
    Test = 99,
};

// Seeded Mersenne-Twister stream. Identical (seed, run, stream) triples give
// identical sequences.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t run_index = 0, Stream stream = Stream::Test) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(run_index),
                          static_cast<std::uint32_t>(run_index >> 32),
                          static_cast<std::uint32_t>(stream)};
        engine_.seed(seq);
    }

    // Uniform in [0, 1).
    double uniform() {
        const double u = std::generate_canonical<double, 53>(engine_);
        return u < 1.0 ? u : 0x1.fffffffffffffp-1;
    }

    double normal(double sd) {
        if (sd == 0.0) return 0.0;
        return sd * normal_(engine_);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace parkbot
