// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "core/error.hpp"

namespace gvae {
namespace {

class Writer {
 public:
  void U8(std::uint8_t v) { out_.push_back(v); }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back((v >> (8 * i)) & 0xff);
  }
  void F32(double v) { U32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void Bytes(const std::string &s) { out_.insert(out_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t> &in) : in_(in) {}
  void Need(std::size_t n) const {
    if (pos_ + n > in_.size()) Fail(ErrorCode::kFormat, "truncated checkpoint");
  }
  std::uint8_t U8() {
    Need(1);
    return in_[pos_++];
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double F32() { return std::bit_cast<float>(U32()); }
  std::string Bytes(std::size_t n) {
    Need(n);
    std::string s(in_.begin() + pos_, in_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t> &in_;
  std::size_t pos_ = 0;
};

}  // namespace

void Checkpoint::AddNet(const std::string &name, FeedForwardNet net) {
  nets_.emplace_back(name, std::move(net));
}

void Checkpoint::AddArray(const std::string &name, Eigen::MatrixXd array) {
  arrays_.emplace_back(name, std::move(array));
}

bool Checkpoint::HasNet(const std::string &name) const {
  for (const auto &[n, _] : nets_)
    if (n == name) return true;
  return false;
}

bool Checkpoint::HasArray(const std::string &name) const {
  for (const auto &[n, _] : arrays_)
    if (n == name) return true;
  return false;
}

const FeedForwardNet &Checkpoint::Net(const std::string &name) const {
  for (const auto &[n, net] : nets_)
    if (n == name) return net;
  Fail(ErrorCode::kFormat, "checkpoint has no network '" + name + "'");
}

const Eigen::MatrixXd &Checkpoint::Array(const std::string &name) const {
  for (const auto &[n, a] : arrays_)
    if (n == name) return a;
  Fail(ErrorCode::kFormat, "checkpoint has no array '" + name + "'");
}

const std::string &Checkpoint::Header(const std::string &key) const {
  auto it = header.find(key);
  if (it == header.end())
    Fail(ErrorCode::kFormat, "checkpoint header lacks '" + key + "'");
  return it->second;
}

std::size_t Checkpoint::ParameterCount() const {
  std::size_t n = 0;
  for (const auto &[_, net] : nets_) n += net.ParameterCount();
  return n;
}

std::vector<std::uint8_t> Checkpoint::Serialize() const {
  Writer w;
  w.Bytes(kCheckpointMagic);
  std::string ext;
  for (const auto &[k, v] : header) {
    if (k.find_first_of("=\n") != std::string::npos ||
        v.find('\n') != std::string::npos)
      Fail(ErrorCode::kInvalidArgument, "bad checkpoint header entry " + k);
    ext += k + "=" + v + "\n";
  }
  w.U32(static_cast<std::uint32_t>(ext.size()));
  w.Bytes(ext);
  w.U32(static_cast<std::uint32_t>(nets_.size() + arrays_.size()));
  for (const auto &[name, net] : nets_) {
    w.U8('N');
    w.U32(static_cast<std::uint32_t>(name.size()));
    w.Bytes(name);
    w.U32(static_cast<std::uint32_t>(net.layers().size()));
    for (const DenseLayer &l : net.layers()) {
      w.U32(static_cast<std::uint32_t>(l.weight.cols()));
      w.U32(static_cast<std::uint32_t>(l.weight.rows()));
      w.U8(static_cast<std::uint8_t>(l.activation));
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.F32(l.weight(r, c));
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) w.F32(l.bias(r));
    }
  }
  for (const auto &[name, a] : arrays_) {
    w.U8('A');
    w.U32(static_cast<std::uint32_t>(name.size()));
    w.Bytes(name);
    w.U32(static_cast<std::uint32_t>(a.rows()));
    w.U32(static_cast<std::uint32_t>(a.cols()));
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      for (Eigen::Index c = 0; c < a.cols(); ++c) w.F32(a(r, c));
  }
  return w.Take();
}

Checkpoint Checkpoint::Deserialize(const std::vector<std::uint8_t> &bytes) {
  Reader r(bytes);
  const std::size_t magic_len = std::strlen(kCheckpointMagic);
  if (r.Bytes(magic_len) != kCheckpointMagic)
    Fail(ErrorCode::kFormat, "bad checkpoint magic");
  Checkpoint ck;
  const std::uint32_t ext_len = r.U32();
  std::istringstream ext(r.Bytes(ext_len));
  for (std::string line; std::getline(ext, line);) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      Fail(ErrorCode::kFormat, "bad checkpoint header line");
    ck.header[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const std::uint32_t blocks = r.U32();
  for (std::uint32_t b = 0; b < blocks; ++b) {
    const std::uint8_t tag = r.U8();
    const std::string name = r.Bytes(r.U32());
    if (tag == 'N') {
      const std::uint32_t count = r.U32();
      std::vector<DenseLayer> layers;
      for (std::uint32_t k = 0; k < count; ++k) {
        const std::uint32_t in = r.U32();
        const std::uint32_t out = r.U32();
        DenseLayer l;
        l.activation = ActivationFromId(r.U8());
        r.Need((static_cast<std::size_t>(in) * out + out) * 4);
        l.weight.resize(out, in);
        for (std::uint32_t i = 0; i < out; ++i)
          for (std::uint32_t j = 0; j < in; ++j) l.weight(i, j) = r.F32();
        l.bias.resize(out);
        for (std::uint32_t i = 0; i < out; ++i) l.bias(i) = r.F32();
        layers.push_back(std::move(l));
      }
      ck.AddNet(name, FeedForwardNet(std::move(layers)));
    } else if (tag == 'A') {
      const std::uint32_t rows = r.U32();
      const std::uint32_t cols = r.U32();
      r.Need(static_cast<std::size_t>(rows) * cols * 4);
      Eigen::MatrixXd a(rows, cols);
      for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) a(i, j) = r.F32();
      ck.AddArray(name, std::move(a));
    } else {
      Fail(ErrorCode::kFormat, "unknown checkpoint block tag");
    }
  }
  if (!r.AtEnd()) Fail(ErrorCode::kFormat, "trailing bytes in checkpoint");
  return ck;
}

void Checkpoint::Save(const std::string &path) const {
  const std::vector<std::uint8_t> bytes = Serialize();
  std::ofstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kIo, "cannot write " + path);
  f.write(reinterpret_cast<const char *>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) Fail(ErrorCode::kIo, "write failed: " + path);
}

Checkpoint Checkpoint::Load(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return Deserialize(bytes);
}

void RoundToFloat(FeedForwardNet &net) {
  for (DenseLayer &l : net.mutable_layers()) {
    l.weight = l.weight.cast<float>().cast<double>();
    l.bias = l.bias.cast<float>().cast<double>();
  }
}

}  // namespace gvae
