#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace sqz {

// Counter-based generator: Philox4x32-10 (Salmon et al., Random123).
// A generator is addressed by (seed, stream); draws are a pure function of
// (seed, stream, counter), so independent streams and bit-identical replay
// are structural. Every simulator in this project derives its variates from
// one of these, with the stream id documented at the call site.
class PhiloxRng {
public:
    PhiloxRng(uint64_t seed, uint64_t stream = 0)
        : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
          stream_lo_(static_cast<uint32_t>(stream)),
          stream_hi_(static_cast<uint32_t>(stream >> 32)) {}

    // One 128-bit block for an explicit counter value (stateless form).
    static std::array<uint32_t, 4> block(uint64_t seed, uint64_t stream,
                                         uint64_t counter);

    uint64_t next_u64();
    // Uniform on (0,1), strictly excluding the endpoints.
    double next_uniform();
    // Standard normal via the inverse CDF (Wichura AS241, double precision).
    double next_normal();

    uint64_t seed() const { return static_cast<uint64_t>(key_[1]) << 32 | key_[0]; }
    uint64_t stream() const {
        return static_cast<uint64_t>(stream_hi_) << 32 | stream_lo_;
    }

    static constexpr std::string_view name() { return "philox4x32-10"; }
    static constexpr std::string_view normal_method() {
        return "inverse-cdf-as241";
    }

private:
    std::array<uint32_t, 2> key_;
    uint32_t stream_lo_, stream_hi_;
    uint64_t counter_ = 0;
    std::array<uint32_t, 4> buf_{};
    int buf_pos_ = 4; // empty

    void refill();
};

// Inverse of the standard normal CDF (Wichura's algorithm AS241, PPND16).
// Accurate to about 1e-16 relative over p in (0,1).
double inverse_normal_cdf(double p);

} // namespace sqz
