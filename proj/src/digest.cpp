#include "guiforge/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace guiforge {

namespace {

std::array<unsigned char, 32> sha256_raw(std::string_view bytes) {
    std::array<unsigned char, 32> out{};
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
    bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
              EVP_DigestFinal_ex(ctx, out.data(), &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok || len != out.size()) throw std::runtime_error("SHA-256 computation failed");
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    static const char* hex = "0123456789abcdef";
    auto raw = sha256_raw(bytes);
    std::string s;
    s.reserve(64);
    for (unsigned char b : raw) {
        s.push_back(hex[b >> 4]);
        s.push_back(hex[b & 0x0f]);
    }
    return s;
}

std::string short_digest(std::string_view bytes) {
    return sha256_hex(bytes).substr(0, 12);
}

std::uint64_t digest_u64(std::string_view bytes) {
    auto raw = sha256_raw(bytes);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | raw[static_cast<std::size_t>(i)];
    return v;
}

}  // namespace guiforge
