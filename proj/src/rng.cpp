#include "medhe/rng.hpp"

#include <random>

namespace medhe {

uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace medhe
