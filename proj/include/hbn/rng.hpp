#ifndef HBN_RNG_HPP
#define HBN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace hbn {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of the stream addressed by (master seed, key...). Streams with different keys are
// statistically independent and do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(master);
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : m_engine(seed) {}
    Rng(std::uint64_t master, std::initializer_list<std::uint64_t> keys) : m_engine(derive_seed(master, keys)) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return m_engine(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // rejection keeps the draw exactly uniform
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = m_engine();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Marsaglia polar method.
    double normal(double mean = 0.0, double sd = 1.0) {
        if (m_has_spare) {
            m_has_spare = false;
            return mean + sd * m_spare;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        m_spare = v * f;
        m_has_spare = true;
        return mean + sd * u * f;
    }

private:
    std::mt19937_64 m_engine;
    double m_spare = 0.0;
    bool m_has_spare = false;
};

}  // namespace hbn

#endif  // HBN_RNG_HPP
