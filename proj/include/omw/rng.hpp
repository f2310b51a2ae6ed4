#ifndef OMW_RNG_HPP
#define OMW_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace omw {

// Philox4x32-10 counter-based generator. The output is a pure function of
// (key, counter), so independent streams are obtained by giving each
// consumer its own stream id; parallel and serial execution then draw
// identical numbers. Satisfies UniformRandomBitGenerator.
class PhiloxEngine {
  public:
    using result_type = std::uint64_t;

    explicit PhiloxEngine(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          base_{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (have_ == 0) refill();
        const std::uint32_t lo = buf_[4 - have_];
        --have_;
        if (have_ == 0) refill();
        const std::uint32_t hi = buf_[4 - have_];
        --have_;
        return (static_cast<std::uint64_t>(hi) << 32) | lo;
    }

    // uniform double in [0, 1) with 53 random bits
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    static const char* name() { return "philox4x32-10"; }

    // one keyed block; the engine is just this function plus a counter
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 2> key,
                                              std::array<std::uint32_t, 4> ctr) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t prod0 = 0xD2511F53ull * ctr[0];
            const std::uint64_t prod1 = 0xCD9E8D57ull * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(prod0);
            const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(prod1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

  private:
    void refill() {
        buf_ = block(key_, {static_cast<std::uint32_t>(counter_),
                            static_cast<std::uint32_t>(counter_ >> 32), base_[0], base_[1]});
        have_ = 4;
        ++counter_;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> base_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
};

}  // namespace omw

#endif
