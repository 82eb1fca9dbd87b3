#include "night/sample_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace night {
namespace {

static_assert(std::numeric_limits<float>::is_iec559 && std::numeric_limits<double>::is_iec559);

class Writer {
 public:
  explicit Writer(std::size_t reserve) { bytes_.reserve(reserve); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(std::uint8_t(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(std::uint8_t(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }

  template <typename T>
  void plane(const Image<T>& img) {
    for (std::size_t i = 0; i < img.size(); ++i) f32(float(img[i]));
  }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n, const std::string& section) const {
    if (bytes_.size() - pos_ < n) {
      throw SampleFormatError(SampleFormatError::Kind::truncated, section,
                              "sample file truncated in section '" + section + "'");
    }
  }
  std::uint32_t u32(const std::string& section) {
    need(4, section);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const std::string& section) {
    need(8, section);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32(const std::string& section) { return std::bit_cast<float>(u32(section)); }
  double f64(const std::string& section) { return std::bit_cast<double>(u64(section)); }

  template <typename T>
  void plane(Image<T>& img, const std::string& section) {
    need(img.size() * 4, section);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = T(f32(section));
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check_shapes(const SampleRecord& r) {
  const auto w = r.width();
  const auto h = r.height();
  auto ok = [&](const auto& img) { return img.same_shape(w, h); };
  bool good = ok(r.gt_mask) && ok(r.gt_phasor.re) && ok(r.gt_phasor.im);
  for (const auto& p : r.inputs) good = good && ok(p.re) && ok(p.im);
  if (!good) throw std::invalid_argument("sample '" + r.id + "': planes differ in size");
}

}  // namespace

void quantize_to_storage(SampleRecord& record) {
  auto q = [](Image<double>& img) {
    for (auto& v : img.data()) v = double(float(v));
  };
  for (auto& p : record.inputs) {
    q(p.re);
    q(p.im);
  }
  q(record.gt_phasor.re);
  q(record.gt_phasor.im);
  q(record.gt_depth);
}

std::vector<std::uint8_t> encode_sample(const SampleRecord& record) {
  check_shapes(record);
  const std::size_t n_px = record.gt_depth.size();
  Writer w(20 + 8 * record.inputs.size() + 4 * n_px * (2 * record.inputs.size() + 4));
  w.raw(kSampleMagic, 4);
  w.u32(kSampleFormatVersion);
  w.u32(record.height());
  w.u32(record.width());
  w.u32(std::uint32_t(record.inputs.size()));
  for (const auto& p : record.inputs) w.f64(p.frequency_hz);
  for (const auto& p : record.inputs) w.plane(p.re);
  for (const auto& p : record.inputs) w.plane(p.im);
  w.plane(record.gt_phasor.re);
  w.plane(record.gt_phasor.im);
  w.plane(record.gt_depth);
  w.plane(record.gt_mask);
  return w.take();
}

SampleRecord decode_sample(std::span<const std::uint8_t> bytes) {
  using Kind = SampleFormatError::Kind;
  Reader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kSampleMagic, 4) != 0) {
    throw SampleFormatError(Kind::bad_magic, "magic", "not a sample file (bad magic)");
  }
  r.skip(4);
  const std::uint32_t version = r.u32("header");
  if (version != kSampleFormatVersion) {
    throw SampleFormatError(Kind::bad_version, "header",
                            "unsupported sample format version " + std::to_string(version));
  }
  const std::uint32_t height = r.u32("header");
  const std::uint32_t width = r.u32("header");
  const std::uint32_t n_freq = r.u32("header");
  if (n_freq > 64 || (std::uint64_t(width) * height) > (1ull << 28)) {
    throw SampleFormatError(Kind::bad_header, "header", "implausible sample dimensions");
  }

  SampleRecord rec;
  rec.inputs.resize(n_freq);
  for (std::uint32_t f = 0; f < n_freq; ++f) {
    const double hz = r.f64("frequencies");
    rec.inputs[f] = tof::PhasorImage(hz, width, height);
  }
  for (std::uint32_t f = 0; f < n_freq; ++f) {
    r.plane(rec.inputs[f].re, "input_real[" + std::to_string(f) + "]");
  }
  for (std::uint32_t f = 0; f < n_freq; ++f) {
    r.plane(rec.inputs[f].im, "input_imag[" + std::to_string(f) + "]");
  }
  rec.gt_phasor = tof::PhasorImage(tof::kGroundTruthFrequencyHz, width, height);
  r.plane(rec.gt_phasor.re, "gt_real");
  r.plane(rec.gt_phasor.im, "gt_imag");
  rec.gt_depth = DepthMap(width, height);
  r.plane(rec.gt_depth, "gt_depth");
  Image<double> mask(width, height);
  r.plane(mask, "gt_mask");
  rec.gt_mask = SegMask(width, height);
  for (std::size_t i = 0; i < mask.size(); ++i) rec.gt_mask[i] = mask[i] != 0.0 ? 1 : 0;
  if (r.remaining() != 0) {
    throw SampleFormatError(Kind::trailing_data, "end",
                            std::to_string(r.remaining()) + " unexpected trailing bytes");
  }
  return rec;
}

void write_sample(const SampleRecord& record, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_sample(record);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SampleIoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw SampleIoError("failed writing '" + path.string() + "'");
}

SampleRecord parse_sample(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SampleIoError("cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  SampleRecord rec = decode_sample(bytes);
  rec.id = path.stem().string();
  return rec;
}

}  // namespace night
