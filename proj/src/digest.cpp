#include "webtb/digest.hpp"

#include <cstring>
#include <stdexcept>

#include <openssl/evp.h>

namespace webtb {

struct DigestSpinner::Ctx {
  EVP_MD_CTX* md = EVP_MD_CTX_new();
  ~Ctx() { EVP_MD_CTX_free(md); }
};

DigestSpinner::DigestSpinner(std::uint64_t seed) : ctx_(std::make_unique<Ctx>()) {
  if (!ctx_->md) throw std::runtime_error("EVP_MD_CTX_new failed");
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    buffer_[i] = static_cast<unsigned char>((seed >> ((i % 8) * 8)) ^ (i * 131u));
  }
}

DigestSpinner::~DigestSpinner() = default;
DigestSpinner::DigestSpinner(DigestSpinner&&) noexcept = default;
DigestSpinner& DigestSpinner::operator=(DigestSpinner&&) noexcept = default;

void DigestSpinner::spin(std::uint64_t iterations) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const EVP_MD* md5 = EVP_md5();
  for (std::uint64_t i = 0; i < iterations; ++i) {
    EVP_DigestInit_ex(ctx_->md, md5, nullptr);
    EVP_DigestUpdate(ctx_->md, buffer_.data(), buffer_.size());
    EVP_DigestFinal_ex(ctx_->md, out, &len);
    std::memcpy(buffer_.data(), out, len);
  }
}

}  // namespace webtb
