#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "baryflow/error.hpp"
#include "baryflow/image.hpp"
#include "baryflow/math.hpp"

namespace baryflow {

/// Incremental SHA-256 over typed values. Numbers are fed as their raw
/// little-endian bytes, strings with a length prefix.
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      fail(ErrorKind::Io, "SHA-256 initialisation failed");
    }
  }

  Sha256& bytes(const void* data, std::size_t size) {
    EVP_DigestUpdate(ctx_.get(), data, size);
    return *this;
  }
  Sha256& add(std::string_view s) {
    add(static_cast<std::uint64_t>(s.size()));
    return bytes(s.data(), s.size());
  }
  Sha256& add(const char* s) { return add(std::string_view(s)); }
  Sha256& add(const std::string& s) { return add(std::string_view(s)); }
  Sha256& add(double v) { return bytes(&v, sizeof v); }
  Sha256& add(std::uint64_t v) { return bytes(&v, sizeof v); }
  Sha256& add(std::int64_t v) { return bytes(&v, sizeof v); }
  Sha256& add(int v) { return add(static_cast<std::int64_t>(v)); }
  Sha256& add(bool v) { return add(static_cast<std::int64_t>(v)); }
  Sha256& add(const Vec3& v) { return add(v.x).add(v.y).add(v.z); }
  Sha256& add(const Rgb& c) { return add(c.r).add(c.g).add(c.b); }
  Sha256& add(const Image& image) {
    add(image.width()).add(image.height());
    return bytes(image.pixels().data(), image.pixels().size_bytes());
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 0xf];
    }
    return out;
  }

 private:
  struct Free {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
  };
  std::unique_ptr<EVP_MD_CTX, Free> ctx_;
};

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read '" + path.string() + "'");
  Sha256 h;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof buffer);
    h.bytes(buffer, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

}  // namespace baryflow
