#include "graspdec/epoch_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace graspdec {

namespace {

constexpr char kMagic[4] = {'E', 'E', 'G', 'E'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& buf, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(buf, bits);
}

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}

  void need(std::size_t n, const char* what) const {
    if (pos_ + n > size_) {
      throw Error(Error::Code::malformed_header, std::string("truncated epoch file: ") + what);
    }
  }

  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = static_cast<std::uint8_t>(data_[pos_]) |
                      (static_cast<std::uint16_t>(static_cast<std::uint8_t>(data_[pos_ + 1])) << 8);
    pos_ += 2;
    return v;
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  float f32(const char* what) {
    std::uint32_t bits = u32(what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }

  std::string bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s(data_ + pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return size_ - pos_; }

 private:
  const char* data_;
  std::size_t size_;
  std::size_t pos_{0};
};

}  // namespace

EpochSet load_epochs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Error::Code::io_failure, "cannot open epoch file: " + path);
  }
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(raw.data(), raw.size());

  const std::string magic = r.bytes(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw Error(Error::Code::malformed_header, "bad magic in epoch file: " + path);
  }
  const std::uint16_t version = r.u16("version");
  if (version != kVersion) {
    throw Error(Error::Code::malformed_header,
                "unsupported epoch file version " + std::to_string(version));
  }
  const std::uint32_t n_trials = r.u32("n_trials");
  const std::uint32_t n_channels = r.u32("n_channels");
  const std::uint32_t n_samples = r.u32("n_samples");
  const float rate = r.f32("sample_rate");
  if (!(rate > 0.0f) || !std::isfinite(rate)) {
    throw Error(Error::Code::malformed_header, "non-positive sample rate in epoch file");
  }

  EpochSet set;
  set.sample_rate = static_cast<double>(rate);
  set.labels.reserve(n_trials);
  for (std::uint32_t i = 0; i < n_trials; ++i) {
    set.labels.push_back(label_from_code(r.u8("labels")));
  }
  set.channels.reserve(n_channels);
  for (std::uint32_t c = 0; c < n_channels; ++c) {
    const std::uint16_t len = r.u16("channel name length");
    set.channels.push_back(r.bytes(len, "channel name"));
  }

  const std::size_t want = static_cast<std::size_t>(n_trials) * n_channels * n_samples * 4;
  if (r.remaining() != want) {
    throw Error(Error::Code::dimension_mismatch,
                "epoch file data block has " + std::to_string(r.remaining()) +
                    " bytes, header implies " + std::to_string(want));
  }
  set.data.reserve(n_trials);
  for (std::uint32_t t = 0; t < n_trials; ++t) {
    Mat trial(n_channels, n_samples);
    for (std::uint32_t c = 0; c < n_channels; ++c) {
      for (std::uint32_t s = 0; s < n_samples; ++s) {
        const float v = r.f32("sample");
        if (!std::isfinite(v)) {
          throw Error(Error::Code::non_finite_sample, "non-finite sample in epoch file");
        }
        trial(c, s) = static_cast<double>(v);
      }
    }
    set.data.push_back(std::move(trial));
  }
  set.validate();
  return set;
}

void save_epochs(const EpochSet& set, const std::string& path) {
  set.validate();
  for (const std::string& name : set.channels) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(Error::Code::bad_argument, "channel name too long: " + name);
    }
  }

  std::string buf;
  buf.append(kMagic, 4);
  put_u16(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(set.n_trials()));
  put_u32(buf, static_cast<std::uint32_t>(set.n_channels()));
  put_u32(buf, static_cast<std::uint32_t>(set.n_samples()));
  put_f32(buf, static_cast<float>(set.sample_rate));
  for (Label l : set.labels) buf.push_back(static_cast<char>(l));
  for (const std::string& name : set.channels) {
    put_u16(buf, static_cast<std::uint16_t>(name.size()));
    buf.append(name);
  }
  for (const Mat& trial : set.data) {
    for (int c = 0; c < trial.rows(); ++c) {
      for (int s = 0; s < trial.cols(); ++s) {
        put_f32(buf, static_cast<float>(trial(c, s)));
      }
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Error::Code::unwritable_path, "cannot open for writing: " + path);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw Error(Error::Code::unwritable_path, "write failed: " + path);
  }
}

}  // namespace graspdec
