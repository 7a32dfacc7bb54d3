#include "bqs/bits.h"

#include <stdexcept>

namespace bqs {

namespace {

void check_bit(int value) {
    if (value != 0 && value != 1) {
        throw std::invalid_argument("bit value must be 0 or 1, got " + std::to_string(value));
    }
}

}  // namespace

BitString::BitString(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) {
        push_back(b);
    }
}

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
        check_bit(b);
    }
}

BitString BitString::from_string(std::string_view text) {
    BitString result;
    for (char ch : text) {
        if (ch != '0' && ch != '1') {
            throw std::invalid_argument("not a bit string: " + std::string(text));
        }
        result.push_back(ch - '0');
    }
    return result;
}

BitString BitString::from_uint(std::uint64_t value, std::size_t length) {
    if (length > 64) {
        throw std::invalid_argument("from_uint: length exceeds 64");
    }
    BitString result(length);
    for (std::size_t i = 0; i < length; ++i) {
        result.bits_[i] = static_cast<std::uint8_t>((value >> (length - 1 - i)) & 1u);
    }
    return result;
}

BitString BitString::random(std::size_t length, Rng &rng) {
    BitString result(length);
    for (auto &b : result.bits_) {
        b = static_cast<std::uint8_t>(rng.bit());
    }
    return result;
}

void BitString::set(std::size_t i, int value) {
    check_bit(value);
    bits_.at(i) = static_cast<std::uint8_t>(value);
}

void BitString::push_back(int value) {
    check_bit(value);
    bits_.push_back(static_cast<std::uint8_t>(value));
}

std::uint64_t BitString::to_uint() const {
    if (bits_.size() > 64) {
        throw std::invalid_argument("to_uint: more than 64 bits");
    }
    std::uint64_t v = 0;
    for (auto b : bits_) {
        v = (v << 1) | b;
    }
    return v;
}

std::string BitString::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) {
        s.push_back(static_cast<char>('0' + b));
    }
    return s;
}

std::string BitString::to_hex() const {
    std::vector<std::uint8_t> bytes((bits_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) {
            bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
        }
    }
    return bytes_to_hex(bytes);
}

BitString BitString::operator^(const BitString &other) const {
    if (other.size() != size()) {
        throw std::invalid_argument("xor of bit strings with different lengths");
    }
    BitString result(size());
    for (std::size_t i = 0; i < size(); ++i) {
        result.bits_[i] = bits_[i] ^ other.bits_[i];
    }
    return result;
}

BitString BitString::concat(const BitString &other) const {
    BitString result = *this;
    result.bits_.insert(result.bits_.end(), other.bits_.begin(), other.bits_.end());
    return result;
}

BitString BitString::padded(std::size_t length) const {
    BitString result = *this;
    if (result.bits_.size() < length) {
        result.bits_.resize(length, 0);
    }
    return result;
}

BasisString::BasisString(std::initializer_list<int> bases) : bases_(bases) {
    if (bases_.empty()) {
        throw std::invalid_argument("basis string must be non-empty");
    }
}

BasisString::BasisString(BitString bases) : bases_(std::move(bases)) {
    if (bases_.empty()) {
        throw std::invalid_argument("basis string must be non-empty");
    }
}

BasisString BasisString::uniform(std::size_t length, int basis) {
    BitString bits(length);
    for (std::size_t i = 0; i < length; ++i) {
        bits.set(i, basis);
    }
    return BasisString(std::move(bits));
}

BasisString BasisString::random(std::size_t length, Rng &rng) {
    return BasisString(BitString::random(length, rng));
}

std::string BasisString::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < size(); ++i) {
        s.push_back(bases_[i] ? 'x' : '+');
    }
    return s;
}

BitString substring_in_basis(const BitString &x, const BasisString &b, int basis) {
    if (x.size() != b.size()) {
        throw std::invalid_argument("substring_in_basis: length mismatch");
    }
    BitString result;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (b[i] == basis) {
            result.push_back(x[i]);
        }
    }
    return result;
}

std::string bytes_to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto byte : bytes) {
        out.push_back(kDigits[byte >> 4]);
        out.push_back(kDigits[byte & 0xF]);
    }
    return out;
}

}  // namespace bqs
