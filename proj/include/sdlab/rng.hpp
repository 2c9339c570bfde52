#pragma once

#include <cstdint>
#include <random>

namespace sdlab {

/// SplitMix64 finalizer. Used to derive independent stream keys.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key of the child stream `index` under `parent`. This is the only splitting
/// function in the library; every random quantity is reached from the master
/// seed through a chain of these calls.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) {
    return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// A random stream identified by a 64-bit key. Samplers take `Stream&` and
/// never touch global state.
class Stream {
public:
    explicit Stream(std::uint64_t key) : key_(key), engine_(splitmix64(key)) {}

    /// Stream for path `index` of an ensemble driven by `seed`.
    static Stream for_path(std::uint64_t seed, std::uint64_t index) { return Stream(derive_key(seed, index)); }

    Stream child(std::uint64_t index) const { return Stream(derive_key(key_, index)); }

    std::uint64_t key() const noexcept { return key_; }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() { return normal_(engine_); }

    std::uint64_t bits() { return engine_(); }

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sdlab
