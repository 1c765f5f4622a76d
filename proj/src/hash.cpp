#include "apollo/hash.hpp"

#include <openssl/evp.h>

#include "apollo/error.hpp"

namespace apollo {

Fingerprint sha256(std::string_view data) {
    Fingerprint out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
        throw Error("sha256 digest failed");
    }
    return out;
}

std::string to_hex(const Fingerprint& fp) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (auto byte : fp) {
        s.push_back(digits[byte >> 4]);
        s.push_back(digits[byte & 0xf]);
    }
    return s;
}

}  // namespace apollo
