#include "manifest.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "phasebeam/version.hpp"

namespace phasebeam::cli {

namespace {

using MdCtx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error(ErrorCode::io_failure, "SHA-256 initialisation failed");
    }
  }

  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) {
      throw Error(ErrorCode::io_failure, "SHA-256 update failed");
    }
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) {
      throw Error(ErrorCode::io_failure, "SHA-256 finalisation failed");
    }
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
      s += kDigits[md[i] >> 4];
      s += kDigits[md[i] & 0xf];
    }
    return s;
  }

 private:
  MdCtx ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

Manifest::Manifest(std::string command, std::vector<std::string> arguments)
    : command_(std::move(command)), arguments_(std::move(arguments)) {}

void Manifest::set(const std::string& key, io::Json value) { extra_[key] = std::move(value); }

void Manifest::add_input(const std::filesystem::path& path) {
  inputs_[path.string()] = sha256_file(path);
}

void Manifest::add_output(const std::filesystem::path& out_dir, const std::string& name) {
  outputs_[name] = sha256_file(out_dir / name);
}

void Manifest::add_array_output(const std::filesystem::path& out_dir, const std::string& base) {
  add_output(out_dir, base + ".json");
  add_output(out_dir, base + ".r32");
}

io::Json Manifest::to_json() const {
  io::Json j = extra_;
  j["tool"] = "phasebeam";
  j["version"] = std::string(kVersion);
  j["command"] = command_;
  j["arguments"] = arguments_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  return j;
}

void Manifest::write(const std::filesystem::path& out_dir) const {
  io::write_json(to_json(), out_dir / "manifest.json");
}

}  // namespace phasebeam::cli
