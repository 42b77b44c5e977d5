#include <doctest.h>

#include "medhe/errors.hpp"
#include "medhe/ntt.hpp"
#include "medhe/rng.hpp"
#include "oracles.hpp"

using namespace medhe;

TEST_CASE("miller-rabin spot checks") {
    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(1'000'000'007ULL));
    CHECK(is_prime_u64(2305843009213693951ULL));  // 2^61 - 1
    CHECK_FALSE(is_prime_u64(1));
    CHECK_FALSE(is_prime_u64(2305843009213693953ULL));  // 2^61 + 1 = 3 * 768614...
    CHECK_FALSE(is_prime_u64(3215031751ULL));           // strong pseudoprime to 2,3,5,7
}

TEST_CASE("find_ntt_prime returns an NTT-friendly prime below 2^bits") {
    for (size_t n : {size_t{256}, size_t{1024}, size_t{8192}}) {
        uint64_t q = find_ntt_prime(61, n);
        CHECK(is_prime_u64(q));
        CHECK(q < (uint64_t{1} << 61));
        CHECK((q - 1) % (2 * n) == 0);
    }
    uint64_t q30 = find_ntt_prime(30, 1024);
    CHECK(is_prime_u64(q30));
    CHECK(q30 < (uint64_t{1} << 30));
}

TEST_CASE("forward/inverse round-trip is the identity") {
    const size_t n = 1024;
    uint64_t q = find_ntt_prime(61, n);
    NegacyclicNtt ntt(n, q);

    Rng rng(5);
    std::vector<uint64_t> a(n);
    for (auto& x : a) x = rng.next_below(q);
    std::vector<uint64_t> b = a;
    ntt.forward(b);
    ntt.inverse(b);
    CHECK(a == b);
}

TEST_CASE("negacyclic product matches the schoolbook oracle") {
    Rng rng(9);
    for (size_t n : {size_t{8}, size_t{64}, size_t{256}}) {
        uint64_t q = find_ntt_prime(61, n);
        NegacyclicNtt ntt(n, q);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<uint64_t> a(n), b(n);
            for (auto& x : a) x = rng.next_below(q);
            for (auto& x : b) x = rng.next_below(q);
            CHECK(ntt.multiply(a, b) == oracles::schoolbook_negacyclic(a, b, q));
        }
    }
}

TEST_CASE("wrap-around sign: X^(n-1) * X = -1") {
    const size_t n = 8;
    uint64_t q = find_ntt_prime(30, n);
    std::vector<uint64_t> a(n, 0), b(n, 0);
    a[n - 1] = 1;
    b[1] = 1;
    NegacyclicNtt ntt(n, q);
    auto prod = ntt.multiply(a, b);
    CHECK(prod[0] == q - 1);
    for (size_t i = 1; i < n; ++i) CHECK(prod[i] == 0);
}

TEST_CASE("constructor rejects bad parameters") {
    CHECK_THROWS_AS(NegacyclicNtt(100, 97), ConfigError);       // not a power of two
    CHECK_THROWS_AS(NegacyclicNtt(8, 36), ConfigError);         // composite modulus
    CHECK_THROWS_AS(NegacyclicNtt(1024, 1'000'000'007ULL), ConfigError);  // 1e9+7 != 1 mod 2048
}
