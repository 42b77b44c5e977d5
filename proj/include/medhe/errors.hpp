#pragma once

#include <stdexcept>
#include <string>

namespace medhe {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user-supplied configuration (bad manifest, impossible parameter
/// combination). Maps to CLI exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// A caller violated an API precondition (dimension mismatch, k out of range).
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& msg) : Error(msg) {}
};

/// Homomorphic addition attempted on ciphertexts with mismatched scale,
/// level or ring parameters.
class ScaleMismatchError : public Error {
public:
    explicit ScaleMismatchError(const std::string& msg) : Error(msg) {}
};

/// Plaintext magnitude exceeds the encoding headroom of the ring.
class EncodingOverflowError : public Error {
public:
    explicit EncodingOverflowError(const std::string& msg) : Error(msg) {}
};

/// Decrypted values sit too close to the ring wrap-around boundary to be
/// trusted; accumulated noise likely exceeded the headroom.
class DecryptionOverflowError : public Error {
public:
    explicit DecryptionOverflowError(const std::string& msg) : Error(msg) {}
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace medhe
