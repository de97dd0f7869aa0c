// Copyright 2026 The gvae Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef GVAE_CORE_CHECKPOINT_HPP_
#define GVAE_CORE_CHECKPOINT_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "core/nn.hpp"

namespace gvae {

// Container layout, all integers little-endian:
//
//   "GVAE1"
//   u32 n, then n bytes of header extension ("key=value\n" lines)
//   u32 block count
//   per block: u8 tag, u32 name length, name bytes, then
//     tag 'N' (network): u32 layer count, per layer
//         u32 in, u32 out, u8 activation id,
//         f32 weights (out x in, row-major), f32 biases (out)
//     tag 'A' (array):   u32 rows, u32 cols, f32 data (row-major)
//
// Parameters are stored as float32, so a round trip is exact only for values
// representable in single precision.
inline constexpr char kCheckpointMagic[] = "GVAE1";

class Checkpoint {
 public:
  std::map<std::string, std::string> header;

  void AddNet(const std::string &name, FeedForwardNet net);
  void AddArray(const std::string &name, Eigen::MatrixXd array);

  bool HasNet(const std::string &name) const;
  bool HasArray(const std::string &name) const;
  const FeedForwardNet &Net(const std::string &name) const;
  const Eigen::MatrixXd &Array(const std::string &name) const;
  const std::string &Header(const std::string &key) const;

  const std::vector<std::pair<std::string, FeedForwardNet>> &nets() const {
    return nets_;
  }
  const std::vector<std::pair<std::string, Eigen::MatrixXd>> &arrays() const {
    return arrays_;
  }

  std::size_t ParameterCount() const;

  std::vector<std::uint8_t> Serialize() const;
  static Checkpoint Deserialize(const std::vector<std::uint8_t> &bytes);

  void Save(const std::string &path) const;
  static Checkpoint Load(const std::string &path);

 private:
  std::vector<std::pair<std::string, FeedForwardNet>> nets_;
  std::vector<std::pair<std::string, Eigen::MatrixXd>> arrays_;
};

/// Rounds every parameter to float32 so in-memory models match what a
/// save/load cycle produces.
void RoundToFloat(FeedForwardNet &net);

}  // namespace gvae

#endif  // GVAE_CORE_CHECKPOINT_HPP_
